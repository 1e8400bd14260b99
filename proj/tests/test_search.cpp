#include <doctest.h>

#include <cmath>
#include <random>

#include "orbitcert/generate.hpp"
#include "orbitcert/search.hpp"

using namespace orbitcert;

namespace {

Matrix diagm(std::initializer_list<double> vals) {
  const Eigen::Index n = static_cast<Eigen::Index>(vals.size());
  Matrix m = Matrix::Zero(n, n);
  Eigen::Index i = 0;
  for (double v : vals) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

PsdMatrix random_psd(int dim, uint64_t seed) {
  return PsdMatrix(generate({GenKind::psd, dim, seed, 1.0})[0].mat());
}

ComplexMatrix random_square(int dim, uint64_t seed) {
  return generate({GenKind::ginibre, dim, seed, 1.0})[0];
}

double cert_scale(const Certificate& c) {
  return 1.0 + std::max(max_abs(c.lhs.mat()), max_abs(c.rhs.mat()));
}

SearchConfig quick_config(uint64_t seed) {
  SearchConfig cfg;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST_CASE("orbit_optimize accepts an already-feasible single term") {
  const PsdMatrix s = random_psd(3, 501);
  std::vector<std::pair<PsdMatrix, ComplexMatrix>> terms;
  terms.emplace_back(s, ComplexMatrix(Matrix::Identity(3, 3)));
  const auto [cert, trace] = orbit_optimize(
      terms, s.hermitian(), SearchDirection::sum_le_bound, quick_config(1));
  CHECK(trace.converged);
  CHECK(trace.iterations_used == 0);
  CHECK(cert.gap_min_eig >= -1e-10);
  CHECK(verify_certificate(cert));
}

TEST_CASE("orbit_optimize solves commuting diagonal placement") {
  // diag terms summing under the bound after a permutation the warm start
  // cannot see: identity init leaves an infeasible point, the search must
  // rotate.
  std::vector<std::pair<PsdMatrix, ComplexMatrix>> terms;
  terms.emplace_back(PsdMatrix(diagm({3, 0})),
                     ComplexMatrix(Matrix::Identity(2, 2)));
  terms.emplace_back(PsdMatrix(diagm({2, 0})),
                     ComplexMatrix(Matrix::Identity(2, 2)));
  const HermitianMatrix bound(diagm({3.5, 2.5}));
  const auto [cert, trace] = orbit_optimize(
      terms, bound, SearchDirection::sum_le_bound, quick_config(7));
  CHECK(trace.converged);
  CHECK(cert.gap_min_eig >= -1e-7 * cert_scale(cert));
  for (const auto& t : cert.transforms)
    CHECK(max_abs(t.matrix.mat().adjoint() * t.matrix.mat() -
                  Matrix::Identity(2, 2)) <= 1e-8);
}

TEST_CASE("orbit objective agrees with the certificate gap") {
  const PsdMatrix a = random_psd(3, 502);
  const PsdMatrix b = random_psd(3, 503);
  const HermitianMatrix bound(a.mat() + b.mat() +
                              0.5 * Matrix::Identity(3, 3));
  std::vector<std::pair<PsdMatrix, ComplexMatrix>> terms;
  terms.emplace_back(a, ComplexMatrix(Matrix::Identity(3, 3)));
  terms.emplace_back(b, ComplexMatrix(Matrix::Identity(3, 3)));
  const auto [cert, trace] = orbit_optimize(
      terms, bound, SearchDirection::sum_le_bound, quick_config(2));
  CHECK(trace.converged);

  std::vector<Matrix> us;
  for (const auto& t : cert.transforms) us.push_back(t.matrix.mat());
  const double f = orbit_objective(terms, us, bound,
                                   SearchDirection::sum_le_bound);
  CHECK(std::abs(f - (-cert.gap_min_eig)) <= 1e-12 * (1.0 + std::abs(f)));
}

TEST_CASE("objective history is nonincreasing within a restart segment") {
  const PsdMatrix a = random_psd(3, 504);
  const PsdMatrix b = random_psd(3, 505);
  const HermitianMatrix bound(1.02 * (a.mat() + b.mat()));
  std::vector<std::pair<PsdMatrix, ComplexMatrix>> terms;
  terms.emplace_back(a, ComplexMatrix(Matrix::Identity(3, 3)));
  terms.emplace_back(b, ComplexMatrix(Matrix::Identity(3, 3)));
  const auto [cert, trace] = orbit_optimize(
      terms, bound, SearchDirection::sum_le_bound, quick_config(3));
  // History concatenates restart segments; within each, accepted steps only
  // ever lower the objective.
  double prev = std::numeric_limits<double>::infinity();
  for (double f : trace.objective_history) {
    if (f > prev + 1e-12) prev = std::numeric_limits<double>::infinity();
    CHECK(f <= prev + 1e-12);
    prev = f;
  }
}

TEST_CASE("search is deterministic for a fixed config") {
  const ComplexMatrix a = random_square(2, 506);
  const ComplexMatrix b = random_square(2, 507);
  const auto [c1, t1] = theorem2_certificate(a, b, 1.5, quick_config(77));
  const auto [c2, t2] = theorem2_certificate(a, b, 1.5, quick_config(77));
  CHECK(t1.iterations_used == t2.iterations_used);
  CHECK(t1.restarts_used == t2.restarts_used);
  REQUIRE(t1.objective_history.size() == t2.objective_history.size());
  for (size_t i = 0; i < t1.objective_history.size(); ++i)
    CHECK(t1.objective_history[i] == t2.objective_history[i]);
  CHECK(max_abs(c1.transforms[0].matrix.mat() -
                c2.transforms[0].matrix.mat()) == 0.0);
}

TEST_CASE("key1 commuting fast path is exact with zero iterations") {
  const ScalarFn square = [](double t) { return t * t; };
  const auto [cert, trace] = key1_certificate(
      PsdMatrix(diagm({1, 3})), PsdMatrix(diagm({2, 1})), square,
      /*convex=*/true, quick_config(4));
  CHECK(trace.converged);
  CHECK(trace.iterations_used == 0);
  CHECK(cert.gap_min_eig >= -1e-12);
  // g(X+Y) = diag(9,16) vs g(X)+g(Y) = diag(5,10): slack diag(4,6).
  CHECK(cert.gap_min_eig == doctest::Approx(4.0));
  CHECK(verify_certificate(cert));

  const auto [cz, tz] = key1_certificate(
      PsdMatrix(diagm({2, 1})), PsdMatrix(diagm({0, 0})), square,
      /*convex=*/true, quick_config(5));
  CHECK(tz.converged);
  CHECK(cz.gap_min_eig >= -1e-12);
}

TEST_CASE("key1 search handles non-commuting pairs in both directions") {
  const ScalarFn p32 = [](double t) { return std::pow(std::max(t, 0.0), 1.5); };
  const ScalarFn root = [](double t) { return std::sqrt(std::max(t, 0.0)); };
  for (int t = 0; t < 8; ++t) {
    const PsdMatrix x = random_psd(3, derive_seed(508, 2 * t));
    const PsdMatrix y = random_psd(3, derive_seed(508, 2 * t + 1));
    const auto [cvx, cvx_tr] =
        key1_certificate(x, y, p32, /*convex=*/true, quick_config(6 + t));
    CHECK(cvx_tr.converged);
    CHECK(cvx.gap_min_eig >= -1e-7 * cert_scale(cvx));
    CHECK(verify_certificate(cvx));

    const auto [ccv, ccv_tr] =
        key1_certificate(x, y, root, /*convex=*/false, quick_config(6 + t));
    CHECK(ccv_tr.converged);
    CHECK(ccv.direction == Direction::lhs_ge_rhs);
    CHECK(ccv.gap_min_eig >= -1e-7 * cert_scale(ccv));
    CHECK(verify_certificate(ccv));
  }
}

TEST_CASE("theorem2 certificate: equal pair, scalars, and random inputs") {
  const ComplexMatrix a = random_square(3, 509);
  const auto [same, same_tr] = theorem2_certificate(a, a, 1.0, quick_config(8));
  CHECK(same_tr.converged);
  CHECK(same.gap_min_eig >= -1e-9 * cert_scale(same));
  CHECK(verify_certificate(same));

  const ComplexMatrix one(Matrix::Ones(1, 1));
  const auto [sc, sc_tr] = theorem2_certificate(one, one, 1.0, quick_config(9));
  CHECK(sc_tr.converged);
  CHECK(sc.gap_min_eig == doctest::Approx(0.0).epsilon(1e-12));

  for (double q : {0.5, 1.0, 1.5}) {
    for (int t = 0; t < 5; ++t) {
      const ComplexMatrix x = random_square(3, derive_seed(510, 2 * t));
      const ComplexMatrix y = random_square(3, derive_seed(510, 2 * t + 1));
      const auto [cert, trace] = theorem2_certificate(x, y, q,
                                                      quick_config(10 + t));
      CHECK(trace.converged);
      CHECK(cert.direction == Direction::lhs_ge_rhs);
      CHECK(cert.gap_min_eig >= -1e-7 * cert_scale(cert));
      CHECK(verify_certificate(cert));
    }
  }
}

TEST_CASE("direct-sum power certificates across statements and regimes") {
  const ComplexMatrix a = random_square(2, 511);
  const ComplexMatrix zero(Matrix::Zero(2, 2));

  const auto [bz, bz_tr] = direct_sum_power_certificates(
      a, zero, 4.0, quick_config(11), DirectSumStatement::four_term);
  CHECK(bz_tr.converged);
  CHECK(verify_certificate(bz));

  const auto [cd, cd_tr] = direct_sum_power_certificates(
      ComplexMatrix(diagm({1, 2})), ComplexMatrix(diagm({3, 0.5})), 4.0,
      quick_config(12), DirectSumStatement::four_term);
  CHECK(cd_tr.converged);
  CHECK(cd.gap_min_eig >= -1e-7 * cert_scale(cd));

  for (int t = 0; t < 6; ++t) {
    const ComplexMatrix x = random_square(2, derive_seed(512, 2 * t));
    const ComplexMatrix y = random_square(2, derive_seed(512, 2 * t + 1));

    const auto [p4, p4_tr] = direct_sum_power_certificates(
        x, y, 4.0, quick_config(13 + t), DirectSumStatement::four_term);
    CHECK(p4_tr.converged);
    CHECK(p4.direction == Direction::lhs_le_rhs);
    CHECK(verify_certificate(p4));
    CHECK(p4.transforms.size() == 4);

    const auto [q1, q1_tr] = direct_sum_power_certificates(
        x, y, 1.0, quick_config(13 + t), DirectSumStatement::four_term);
    CHECK(q1_tr.converged);
    CHECK(q1.direction == Direction::lhs_ge_rhs);
    CHECK(verify_certificate(q1));

    const auto [qr, qr_tr] = direct_sum_power_certificates(
        x, y, 1.0, quick_config(13 + t), DirectSumStatement::reversed_theorem);
    CHECK(qr_tr.converged);
    CHECK(qr.transforms.size() == 2);
    CHECK(verify_certificate(qr));
  }

  CHECK_THROWS_AS(direct_sum_power_certificates(a, zero, 2.0, quick_config(1)),
                  DomainError);
  CHECK_THROWS_AS(
      direct_sum_power_certificates(a, zero, 4.0, quick_config(1),
                                    DirectSumStatement::reversed_theorem),
      DomainError);
}

TEST_CASE("analytic directional derivative matches central differences") {
  std::mt19937_64 rng(513);
  const PsdMatrix a = random_psd(3, 514);
  const PsdMatrix b = random_psd(3, 515);
  const HermitianMatrix bound(a.mat() + b.mat());
  std::vector<std::pair<PsdMatrix, ComplexMatrix>> terms;
  terms.emplace_back(a, ComplexMatrix(Matrix::Identity(3, 3)));
  terms.emplace_back(b, ComplexMatrix(Matrix::Identity(3, 3)));

  int tested = 0;
  while (tested < 10) {
    std::vector<Matrix> us = {haar_unitary(3, rng), haar_unitary(3, rng)};
    // Skip near-degenerate top eigenvalues where lambda_max is not smooth.
    Matrix gap = -bound.mat();
    for (size_t i = 0; i < terms.size(); ++i)
      gap += us[i] * terms[i].first.mat() * us[i].adjoint();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gap, Eigen::EigenvaluesOnly);
    const double top_gap = es.eigenvalues()(2) - es.eigenvalues()(1);
    if (top_gap < 1e-4 * (1.0 + std::abs(es.eigenvalues()(2)))) continue;

    std::vector<Matrix> dirs = {random_skew_hermitian(3, rng),
                                random_skew_hermitian(3, rng)};
    const double analytic = orbit_directional_derivative(
        terms, us, bound, SearchDirection::sum_le_bound, dirs);
    const double h = 1e-6;
    auto shifted = [&](double sign) {
      std::vector<Matrix> moved;
      for (size_t i = 0; i < us.size(); ++i)
        moved.push_back(us[i] * unitary_exp_skew((sign * h) * dirs[i]));
      return orbit_objective(terms, moved, bound,
                             SearchDirection::sum_le_bound);
    };
    const double numeric = (shifted(1.0) - shifted(-1.0)) / (2.0 * h);
    CHECK(analytic ==
          doctest::Approx(numeric).epsilon(1e-4).scale(1.0 + std::abs(numeric)));
    ++tested;
  }
}

TEST_CASE("unitary helpers produce valid group elements") {
  std::mt19937_64 rng(516);
  for (int t = 0; t < 10; ++t) {
    const Matrix u = haar_unitary(4, rng);
    CHECK(max_abs(u.adjoint() * u - Matrix::Identity(4, 4)) <= 1e-10);
    const Matrix k = random_skew_hermitian(4, rng);
    CHECK(max_abs(k + k.adjoint()) <= 1e-12);
    CHECK(std::abs(k.norm() - 1.0) <= 1e-10);
    const Matrix e = unitary_exp_skew(k);
    CHECK(max_abs(e.adjoint() * e - Matrix::Identity(4, 4)) <= 1e-10);
  }
}
