#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "orbitcert/checks.hpp"
#include "orbitcert/generate.hpp"

using namespace orbitcert;

namespace {

ComplexMatrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return ComplexMatrix(m);
}

ComplexMatrix scalar(Complex z) {
  Matrix m(1, 1);
  m(0, 0) = z;
  return ComplexMatrix(m);
}

ComplexMatrix random_square(int dim, uint64_t seed) {
  return generate({GenKind::ginibre, dim, seed, 1.0})[0];
}

ComplexMatrix random_unitary_like(int dim, uint64_t seed) {
  const Matrix g = generate({GenKind::ginibre, dim, seed, 1.0})[0].mat();
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  return ComplexMatrix(q);
}

// Singular values straight from Eigen's SVD; independent of the spectral
// module used by the checks.
std::vector<double> svd_singulars(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m.mat());
  std::vector<double> out;
  for (Eigen::Index j = 0; j < svd.singularValues().size(); ++j)
    out.push_back(svd.singularValues()(j));
  return out;
}

double schatten_power_sum(const ComplexMatrix& m, double p) {
  double acc = 0.0;
  for (double s : svd_singulars(m)) acc += std::pow(s, p);
  return acc;
}

double find_slack(const CheckResult& r, const std::vector<int>& indices) {
  for (const auto& d : r.details)
    if (d.indices == indices) return d.rhs - d.lhs;
  FAIL("detail with requested indices not found");
  return 0.0;
}

}  // namespace

TEST_CASE("clarkson trace: scalar equality and hand-computed diagonals") {
  const CheckResult same = check_clarkson_trace(scalar(1.0), scalar(1.0), 4.0);
  CHECK(same.holds);
  CHECK(same.margin == doctest::Approx(0.0).epsilon(1e-12));

  // A=diag(1,0), B=diag(0,1), p=4: midpoint form reads 1/8 + 1/8 <= 1,
  // slack 3/4; the raw lower-side display is tight (4 <= 4).
  const CheckResult r = check_clarkson_trace(diag2(1, 0), diag2(0, 1), 4.0);
  CHECK(r.holds);
  CHECK(find_slack(r, {2}) == doctest::Approx(0.75));
  CHECK(find_slack(r, {0}) == doctest::Approx(0.0));
  CHECK(find_slack(r, {1}) == doctest::Approx(12.0));
  CHECK(r.margin == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("clarkson trace: random pairs against direct singular-value sums") {
  for (int t = 0; t < 30; ++t) {
    const ComplexMatrix a = random_square(4, derive_seed(301, 2 * t));
    const ComplexMatrix b = random_square(4, derive_seed(301, 2 * t + 1));
    for (double p : {0.5, 1.0, 1.5, 2.5, 3.0, 4.0}) {
      const CheckResult r = check_clarkson_trace(a, b, p);
      CHECK(r.holds);

      const double ta = schatten_power_sum(a, p);
      const double tb = schatten_power_sum(b, p);
      const double mid_sum =
          schatten_power_sum(ComplexMatrix(0.5 * (a.mat() + b.mat())), p);
      const double mid_diff =
          schatten_power_sum(ComplexMatrix(0.5 * (a.mat() - b.mat())), p);
      const double slack = p >= 2.0
                               ? 0.5 * (ta + tb) - (mid_sum + mid_diff)
                               : (mid_sum + mid_diff) - 0.5 * (ta + tb);
      const int idx = p >= 2.0 ? 2 : 5;
      CHECK(find_slack(r, {idx}) == doctest::Approx(slack).epsilon(1e-8));
    }
  }
}

TEST_CASE("clarkson trace at p=2 reduces to the parallelogram equality") {
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_square(3, derive_seed(302, 2 * t));
    const ComplexMatrix b = random_square(3, derive_seed(302, 2 * t + 1));
    const CheckResult r = check_clarkson_trace(a, b, 2.0);
    CHECK(r.holds);
    CHECK(r.details.size() == 6);
    CHECK(std::abs(r.margin) <= 1e-10 * (1.0 + std::abs(r.details[0].rhs)));
  }
}

TEST_CASE("clarkson trace rejects bad input") {
  CHECK_THROWS_AS(check_clarkson_trace(diag2(1, 0), scalar(1.0), 3.0),
                  ShapeError);
  CHECK_THROWS_AS(check_clarkson_trace(scalar(1.0), scalar(1.0), 0.0),
                  DomainError);
}

TEST_CASE("weak majorization: identity pair and hand-computed diagonals") {
  const ComplexMatrix id2(Matrix::Identity(2, 2));
  const CheckResult same = check_weak_majorization(id2, id2, 3.0);
  CHECK(same.holds);
  CHECK(same.margin == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(same.details.size() == 2);
  CHECK(same.details[0].lhs == doctest::Approx(1.0));
  CHECK(same.details[1].lhs == doctest::Approx(2.0));

  const CheckResult r = check_weak_majorization(diag2(1, 0), diag2(0, 1), 4.0);
  CHECK(r.holds);
  CHECK(r.details[0].lhs == doctest::Approx(0.125));
  CHECK(r.details[0].rhs == doctest::Approx(0.5));
  CHECK(r.details[1].lhs == doctest::Approx(0.25));
  CHECK(r.details[1].rhs == doctest::Approx(1.0));
}

TEST_CASE("weak majorization: random inputs against prefix-sum oracle") {
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_square(5, derive_seed(303, 2 * t));
    const ComplexMatrix b = random_square(5, derive_seed(303, 2 * t + 1));
    const CheckResult r = check_weak_majorization(a, b, 6.0);
    CHECK(r.holds);

    // Oracle: eigenvalues of both sides via a fresh Eigen solve on the
    // p-th powers built from SVD factors.
    auto abs_pow = [](const ComplexMatrix& m, double p) {
      Eigen::JacobiSVD<Matrix> svd(m.mat(), Eigen::ComputeThinV);
      Matrix v = svd.matrixV();
      Matrix out = Matrix::Zero(m.rows(), m.cols());
      for (Eigen::Index j = 0; j < m.rows(); ++j)
        out += std::pow(svd.singularValues()(j), p) * v.col(j) *
               v.col(j).adjoint();
      return out;
    };
    const Matrix lhs_m = abs_pow(ComplexMatrix(0.5 * (a.mat() + b.mat())), 6.0) +
                         abs_pow(ComplexMatrix(0.5 * (a.mat() - b.mat())), 6.0);
    const Matrix rhs_m = 0.5 * (abs_pow(a, 6.0) + abs_pow(b, 6.0));
    Eigen::SelfAdjointEigenSolver<Matrix> el(lhs_m), er(rhs_m);
    double lacc = 0.0, racc = 0.0;
    for (int k = 0; k < 5; ++k) {
      lacc += el.eigenvalues()(4 - k);
      racc += er.eigenvalues()(4 - k);
      CHECK(r.details[static_cast<size_t>(k)].lhs ==
            doctest::Approx(lacc).epsilon(1e-8));
      CHECK(r.details[static_cast<size_t>(k)].rhs ==
            doctest::Approx(racc).epsilon(1e-8));
    }
  }
  CHECK_THROWS_AS(check_weak_majorization(diag2(1, 0), diag2(0, 1), 1.5),
                  DomainError);
}

TEST_CASE("antinorm superadditivity: equal pair collapses the second term") {
  const ComplexMatrix a = random_square(3, 9104);
  const CheckResult r =
      check_antinorm_superadditivity(a, a, 4.0, AntinormVariant::sum);
  CHECK(r.holds);
  CHECK(r.margin == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("antinorm superadditivity: hand-computed diagonals, sum variant") {
  const CheckResult r = check_antinorm_superadditivity(
      diag2(1, 0), diag2(0, 1), 4.0, AntinormVariant::sum);
  CHECK(r.holds);
  // k=2: both smallest-eigenvalue sums of the midpoint powers are 1/8 each,
  // against the full trace 1 of the mean.
  CHECK(r.details[1].lhs == doctest::Approx(0.25));
  CHECK(r.details[1].rhs == doctest::Approx(1.0));
}

TEST_CASE("antinorm superadditivity: random inputs, both variants") {
  for (int t = 0; t < 20; ++t) {
    const ComplexMatrix a = random_square(4, derive_seed(304, 2 * t));
    const ComplexMatrix b = random_square(4, derive_seed(304, 2 * t + 1));
    for (auto variant : {AntinormVariant::sum, AntinormVariant::geomean}) {
      const CheckResult r =
          check_antinorm_superadditivity(a, b, 3.0, variant);
      CHECK(r.holds);
      for (const auto& d : r.details)
        CHECK(d.lhs <= d.rhs + 1e-8 * (1.0 + std::abs(d.rhs)));
    }
  }
  CHECK_THROWS_AS(check_antinorm_superadditivity(diag2(1, 0), diag2(0, 1), 2.0,
                                                 AntinormVariant::sum),
                  DomainError);
}

TEST_CASE("antinorm geomean details match ascending prefix products") {
  const ComplexMatrix a = random_square(4, 9401);
  const ComplexMatrix b = random_square(4, 9402);
  const CheckResult r =
      check_antinorm_superadditivity(a, b, 3.0, AntinormVariant::geomean);

  auto asc_vals = [](const ComplexMatrix& m, double p) {
    std::vector<double> s = svd_singulars(m);
    std::vector<double> v;
    for (double x : s) v.push_back(std::pow(x, p));
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto plus = asc_vals(ComplexMatrix(0.5 * (a.mat() + b.mat())), 3.0);
  const auto minus = asc_vals(ComplexMatrix(0.5 * (a.mat() - b.mat())), 3.0);
  for (size_t k = 0; k < 4; ++k) {
    double pa = 1.0, pb = 1.0;
    for (size_t j = 0; j <= k; ++j) {
      pa *= plus[j];
      pb *= minus[j];
    }
    const double expect = std::pow(pa, 1.0 / static_cast<double>(k + 1)) +
                          std::pow(pb, 1.0 / static_cast<double>(k + 1));
    CHECK(r.details[k].lhs == doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("weyl split: scalar and hand-computed cases") {
  const CheckResult c5 =
      check_weyl_split(scalar(1.0), scalar(1.0), 4.0, 0, 0, WeylVariant::cor5);
  CHECK(c5.holds);
  CHECK(c5.margin == doctest::Approx(0.0).epsilon(1e-12));

  // diag(1,0) vs diag(0,1), p=4, j=k=0: top midpoint eigenvalue 1/16 plus
  // smallest difference eigenvalue 1/16 against 1/2.
  const CheckResult c3 =
      check_weyl_split(diag2(1, 0), diag2(0, 1), 4.0, 0, 0, WeylVariant::cor3);
  CHECK(c3.holds);
  CHECK(c3.details[0].lhs == doctest::Approx(0.125));
  CHECK(c3.details[0].rhs == doctest::Approx(0.5));
  CHECK(c3.margin == doctest::Approx(0.375));
}

TEST_CASE("weyl split: all admissible indices on random inputs") {
  for (int t = 0; t < 15; ++t) {
    const ComplexMatrix a = random_square(3, derive_seed(305, 2 * t));
    const ComplexMatrix b = random_square(3, derive_seed(305, 2 * t + 1));
    for (int j = 0; j < 3; ++j) {
      for (int k = 0; j + k + 1 <= 3; ++k) {
        CHECK(check_weyl_split(a, b, 1.0, j, k, WeylVariant::cor4).holds);
        CHECK(check_weyl_split(a, b, 3.0, j, k, WeylVariant::cor3).holds);
      }
      CHECK(check_weyl_split(a, b, 3.0, j, 0, WeylVariant::cor5).holds);
    }
  }
  CHECK_THROWS_AS(
      check_weyl_split(diag2(1, 0), diag2(0, 1), 4.0, 1, 1, WeylVariant::cor3),
      DomainError);
  CHECK_THROWS_AS(
      check_weyl_split(diag2(1, 0), diag2(0, 1), 3.0, 0, 0, WeylVariant::cor4),
      DomainError);
  CHECK_THROWS_AS(
      check_weyl_split(diag2(1, 0), diag2(0, 1), 4.0, 2, 0, WeylVariant::cor5),
      DomainError);
}

TEST_CASE("parallelogram identity holds exactly") {
  const ComplexMatrix id2(Matrix::Identity(2, 2));
  CHECK(check_parallelogram_identity(id2, id2).holds);

  Matrix nil = Matrix::Zero(2, 2);
  nil(0, 1) = 1.0;
  const CheckResult r = check_parallelogram_identity(
      ComplexMatrix(nil), ComplexMatrix(nil.adjoint().eval()));
  CHECK(r.holds);
  CHECK(r.margin >= -1e-14);

  for (int t = 0; t < 25; ++t) {
    const ComplexMatrix a = random_square(6, derive_seed(306, 2 * t));
    const ComplexMatrix b = random_square(6, derive_seed(306, 2 * t + 1));
    const CheckResult rr = check_parallelogram_identity(a, b);
    CHECK(rr.holds);
    CHECK(rr.margin >= -1e-10 * 40.0);
  }
}

TEST_CASE("direct-sum majorization in both exponent regimes") {
  for (int t = 0; t < 15; ++t) {
    const ComplexMatrix a = random_square(3, derive_seed(307, 2 * t));
    const ComplexMatrix b = random_square(3, derive_seed(307, 2 * t + 1));
    for (double e : {0.5, 1.0, 1.5, 2.5, 4.0})
      CHECK(check_direct_sum_majorization(a, b, e).holds);
  }
  const ComplexMatrix a = random_square(3, 777);
  const ComplexMatrix zero(Matrix::Zero(3, 3));
  CHECK(check_direct_sum_majorization(a, zero, 4.0).holds);
  CHECK_THROWS_AS(check_direct_sum_majorization(a, zero, 2.0), DomainError);
}

TEST_CASE("checks are symmetric in (A,B) and unitarily invariant") {
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix a = random_square(3, derive_seed(308, 4 * t));
    const ComplexMatrix b = random_square(3, derive_seed(308, 4 * t + 1));
    const ComplexMatrix u = random_unitary_like(3, derive_seed(308, 4 * t + 2));
    const ComplexMatrix v = random_unitary_like(3, derive_seed(308, 4 * t + 3));
    const ComplexMatrix ua(u.mat() * a.mat() * v.mat());
    const ComplexMatrix ub(u.mat() * b.mat() * v.mat());

    auto margins = [](const ComplexMatrix& x, const ComplexMatrix& y) {
      return std::vector<double>{
          check_clarkson_trace(x, y, 3.0).margin,
          check_weak_majorization(x, y, 3.0).margin,
          check_antinorm_superadditivity(x, y, 3.0, AntinormVariant::sum)
              .margin,
          check_weyl_split(x, y, 3.0, 0, 0, WeylVariant::cor3).margin,
          check_parallelogram_identity(x, y).margin,
          check_direct_sum_majorization(x, y, 1.5).margin};
    };
    const auto base = margins(a, b);
    const auto swapped = margins(b, a);
    const auto rotated = margins(ua, ub);
    for (size_t i = 0; i < base.size(); ++i) {
      CHECK(base[i] == doctest::Approx(swapped[i]).epsilon(1e-8));
      CHECK(base[i] == doctest::Approx(rotated[i]).epsilon(1e-8));
    }
  }
}

TEST_CASE("scalar reduction agrees with direct real arithmetic") {
  for (int t = 0; t < 200; ++t) {
    const ComplexMatrix a = random_square(1, derive_seed(309, 2 * t));
    const ComplexMatrix b = random_square(1, derive_seed(309, 2 * t + 1));
    const double ra = std::abs(a.mat()(0, 0));
    const double rb = std::abs(b.mat()(0, 0));
    const double rp = std::abs(a.mat()(0, 0) + b.mat()(0, 0)) / 2.0;
    const double rm = std::abs(a.mat()(0, 0) - b.mat()(0, 0)) / 2.0;
    for (double p : {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 10.0}) {
      const CheckResult r = check_clarkson_trace(a, b, p);
      const double mean = 0.5 * (std::pow(ra, p) + std::pow(rb, p));
      const double split = std::pow(rp, p) + std::pow(rm, p);
      const bool expect = p >= 2.0 ? split <= mean + 1e-10 * (1.0 + mean)
                                   : mean <= split + 1e-10 * (1.0 + split);
      CHECK(r.holds == expect);
      if (p > 2.0) {
        const CheckResult w = check_weak_majorization(a, b, p);
        CHECK(w.margin == doctest::Approx(mean - split).epsilon(1e-9));
        const CheckResult c5 =
            check_weyl_split(a, b, p, 0, 0, WeylVariant::cor5);
        CHECK(c5.margin ==
              doctest::Approx(mean - std::max(std::pow(rp, p),
                                              std::pow(rm, p)))
                  .epsilon(1e-9));
      }
    }
  }
}
