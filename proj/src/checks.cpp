#include "orbitcert/checks.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

namespace orbitcert {

namespace {

CheckResult finalize(std::string name, std::vector<CheckDetail> details,
                     double tolerance) {
  CheckResult r;
  r.name = std::move(name);
  r.details = std::move(details);
  double margin = std::numeric_limits<double>::infinity();
  double scale = 1.0;
  for (const auto& d : r.details) {
    margin = std::min(margin, d.rhs - d.lhs);
    scale = std::max({scale, 1.0 + std::abs(d.lhs), 1.0 + std::abs(d.rhs)});
  }
  if (r.details.empty()) margin = 0.0;
  r.margin = margin;
  r.holds = margin >= -tolerance * scale;
  return r;
}

void require_same_square(const ComplexMatrix& A, const ComplexMatrix& B,
                         const char* who) {
  if (!A.square() || !B.square() || A.rows() != B.rows())
    throw ShapeError(std::string(who) +
                     ": A, B must be square with equal dimension");
}

RealVector desc_spectrum_abs_power(const ComplexMatrix& M, double p) {
  return spectral_decomposition(matrix_abs_power(M, p).hermitian()).eigenvalues;
}

ComplexMatrix half(const Matrix& m) { return ComplexMatrix(0.5 * m); }

}  // namespace

nlohmann::json check_result_to_json(const CheckResult& r) {
  nlohmann::json details = nlohmann::json::array();
  for (const auto& d : r.details)
    details.push_back({d.indices, d.lhs, d.rhs});
  return {{"name", r.name},
          {"holds", r.holds},
          {"margin", r.margin},
          {"details", details}};
}

CheckResult check_clarkson_trace(const ComplexMatrix& A, const ComplexMatrix& B,
                                 double p) {
  require_same_square(A, B, "check_clarkson_trace");
  if (!(p > 0.0)) throw DomainError("check_clarkson_trace: p must be > 0");

  const double ta = trace_abs_power(A, p);
  const double tb = trace_abs_power(B, p);
  const double tsum = trace_abs_power(ComplexMatrix(A.mat() + B.mat()), p);
  const double tdiff = trace_abs_power(ComplexMatrix(A.mat() - B.mat()), p);
  const double tmid_sum = trace_abs_power(half(A.mat() + B.mat()), p);
  const double tmid_diff = trace_abs_power(half(A.mat() - B.mat()), p);

  // The three displays for p >= 2; each flips for 0 < p <= 2.
  const double raw_lhs = 2.0 * (ta + tb);
  const double raw_mid = tsum + tdiff;
  const double raw_rhs = std::pow(2.0, p - 1.0) * (ta + tb);
  const double mid_lhs = tmid_sum + tmid_diff;
  const double mid_rhs = 0.5 * (ta + tb);

  std::vector<CheckDetail> details;
  const bool forward = p >= 2.0;
  const bool backward = p <= 2.0;  // both at the p = 2 boundary
  if (forward) {
    details.push_back({{0}, raw_lhs, raw_mid});
    details.push_back({{1}, raw_mid, raw_rhs});
    details.push_back({{2}, mid_lhs, mid_rhs});
  }
  if (backward) {
    details.push_back({{3}, raw_mid, raw_lhs});
    details.push_back({{4}, raw_rhs, raw_mid});
    details.push_back({{5}, mid_rhs, mid_lhs});
  }
  return finalize("clarkson_trace", std::move(details),
                  p == 2.0 ? tol::identity : tol::check);
}

CheckResult check_weak_majorization(const ComplexMatrix& A,
                                    const ComplexMatrix& B, double p) {
  require_same_square(A, B, "check_weak_majorization");
  if (!(p >= 2.0)) throw DomainError("check_weak_majorization: p must be >= 2");

  const Matrix sum_pow =
      matrix_abs_power(half(A.mat() + B.mat()), p).mat() +
      matrix_abs_power(half(A.mat() - B.mat()), p).mat();
  const Matrix mean_pow =
      0.5 * (matrix_abs_power(A, p).mat() + matrix_abs_power(B, p).mat());

  const RealVector lhs = eigenvalues_desc(sum_pow);
  const RealVector rhs = eigenvalues_desc(mean_pow);

  std::vector<CheckDetail> details;
  double lacc = 0.0, racc = 0.0;
  for (Eigen::Index k = 0; k < lhs.size(); ++k) {
    lacc += lhs(k);
    racc += rhs(k);
    details.push_back({{static_cast<int>(k) + 1}, lacc, racc});
  }
  return finalize("weak_majorization", std::move(details), tol::check);
}

CheckResult check_antinorm_superadditivity(const ComplexMatrix& A,
                                           const ComplexMatrix& B, double p,
                                           AntinormVariant variant) {
  require_same_square(A, B, "check_antinorm_superadditivity");
  if (!(p > 2.0))
    throw DomainError("check_antinorm_superadditivity: p must be > 2");

  const Eigen::Index n = A.rows();
  RealVector mean = eigenvalues_desc(
      0.5 * (matrix_abs_power(A, p).mat() + matrix_abs_power(B, p).mat()));
  RealVector plus = desc_spectrum_abs_power(half(A.mat() + B.mat()), p);
  RealVector minus = desc_spectrum_abs_power(half(A.mat() - B.mat()), p);

  auto asc = [n](const RealVector& v, Eigen::Index j) {
    return std::max(v(n - 1 - j), 0.0);
  };

  std::vector<CheckDetail> details;
  if (variant == AntinormVariant::sum) {
    double m = 0.0, a = 0.0, b = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      m += asc(mean, k);
      a += asc(plus, k);
      b += asc(minus, k);
      details.push_back({{static_cast<int>(k) + 1}, a + b, m});
    }
  } else {
    double m = 0.0, a = 0.0, b = 0.0;  // log-domain prefix products
    bool m0 = false, a0 = false, b0 = false;
    auto push = [](double& acc, bool& zero, double v) {
      if (v <= 0.0)
        zero = true;
      else
        acc += std::log(v);
    };
    auto root = [](double acc, bool zero, Eigen::Index k) {
      return zero ? 0.0 : std::exp(acc / static_cast<double>(k + 1));
    };
    for (Eigen::Index k = 0; k < n; ++k) {
      push(m, m0, asc(mean, k));
      push(a, a0, asc(plus, k));
      push(b, b0, asc(minus, k));
      details.push_back({{static_cast<int>(k) + 1},
                         root(a, a0, k) + root(b, b0, k), root(m, m0, k)});
    }
  }
  return finalize(variant == AntinormVariant::sum ? "antinorm_sum"
                                                  : "antinorm_geomean",
                  std::move(details), tol::check);
}

CheckResult check_weyl_split(const ComplexMatrix& A, const ComplexMatrix& B,
                             double exponent, int j, int k, WeylVariant which) {
  require_same_square(A, B, "check_weyl_split");
  const int n = static_cast<int>(A.rows());
  if (j < 0 || k < 0) throw DomainError("check_weyl_split: negative index");

  const RealVector mean = eigenvalues_desc(
      0.5 * (matrix_abs_power(A, exponent).mat() +
             matrix_abs_power(B, exponent).mat()));
  const RealVector plus = desc_spectrum_abs_power(half(A.mat() + B.mat()),
                                                  exponent);
  const RealVector minus = desc_spectrum_abs_power(half(A.mat() - B.mat()),
                                                   exponent);

  std::vector<CheckDetail> details;
  std::string name;
  switch (which) {
    case WeylVariant::cor3: {
      if (!(exponent > 2.0)) throw DomainError("cor3: exponent must be > 2");
      if (j + k + 1 > n) throw DomainError("cor3: j+k+1 exceeds dimension");
      const double lhs = plus(j + k) + minus(n - 1 - k);  // ascending rank k+1
      const double rhs = mean(j);
      details.push_back({{j, k}, lhs, rhs});
      name = "weyl_cor3";
      break;
    }
    case WeylVariant::cor4: {
      if (!(exponent > 0.0 && exponent < 2.0))
        throw DomainError("cor4: exponent must be in (0,2)");
      if (j + k + 1 > n) throw DomainError("cor4: j+k+1 exceeds dimension");
      const double lhs = mean(j + k);
      const double rhs = plus(j) + minus(k);
      details.push_back({{j, k}, lhs, rhs});
      name = "weyl_cor4";
      break;
    }
    case WeylVariant::cor5: {
      if (!(exponent > 2.0)) throw DomainError("cor5: exponent must be > 2");
      if (j > n - 1) throw DomainError("cor5: j exceeds dimension");
      RealVector merged(2 * n);
      merged << plus, minus;
      std::sort(merged.data(), merged.data() + merged.size(),
                std::greater<double>());
      const double lhs = merged(2 * j);
      const double rhs = mean(j);
      details.push_back({{j}, lhs, rhs});
      name = "weyl_cor5";
      break;
    }
  }
  return finalize(std::move(name), std::move(details), tol::check);
}

CheckResult check_parallelogram_identity(const ComplexMatrix& A,
                                         const ComplexMatrix& B) {
  require_same_square(A, B, "check_parallelogram_identity");
  const Matrix sum = A.mat() + B.mat();
  const Matrix diff = A.mat() - B.mat();
  const Matrix lhs = sum.adjoint() * sum + diff.adjoint() * diff;
  const Matrix rhs = 2.0 * (A.mat().adjoint() * A.mat() +
                            B.mat().adjoint() * B.mat());
  Eigen::Index bi = 0, bj = 0;
  double dev = 0.0;
  for (Eigen::Index i = 0; i < lhs.rows(); ++i)
    for (Eigen::Index j = 0; j < lhs.cols(); ++j) {
      const double d = std::abs(lhs(i, j) - rhs(i, j));
      if (d > dev) {
        dev = d;
        bi = i;
        bj = j;
      }
    }
  // Record the worst entry; margin = -max deviation.
  CheckResult r = finalize(
      "parallelogram_identity",
      {{{static_cast<int>(bi), static_cast<int>(bj)}, dev, 0.0}},
      tol::identity);
  // Scale by the matrix magnitude, not the deviation itself.
  const double scale = 1.0 + std::max(max_abs(lhs), max_abs(rhs));
  r.holds = dev <= tol::identity * scale;
  return r;
}

CheckResult check_direct_sum_majorization(const ComplexMatrix& A,
                                          const ComplexMatrix& B,
                                          double exponent) {
  require_same_square(A, B, "check_direct_sum_majorization");
  if (!(exponent > 0.0) || exponent == 2.0)
    throw DomainError(
        "check_direct_sum_majorization: exponent must be positive, != 2");

  const Eigen::Index n = A.rows();
  const RealVector plus = desc_spectrum_abs_power(half(A.mat() + B.mat()),
                                                  exponent);
  const RealVector minus = desc_spectrum_abs_power(half(A.mat() - B.mat()),
                                                   exponent);
  const RealVector mean = eigenvalues_desc(
      0.5 * (matrix_abs_power(A, exponent).mat() +
             matrix_abs_power(B, exponent).mat()));
  RealVector merged(2 * n);
  merged << plus, minus;
  std::sort(merged.data(), merged.data() + merged.size(),
            std::greater<double>());

  std::vector<CheckDetail> details;
  if (exponent > 2.0) {
    // Ky Fan consequence of the halved direct-sum theorem:
    // prefix sums of the direct sum's spectrum stay below those of the mean.
    double lacc = 0.0, racc = 0.0;
    for (Eigen::Index kk = 0; kk < 2 * n; ++kk) {
      lacc += merged(kk);
      if (kk < n) racc += mean(kk);
      details.push_back({{static_cast<int>(kk) + 1}, lacc, racc});
    }
  } else {
    // Reversed regime: ascending prefix sums are superadditive.
    double lacc = 0.0, racc = 0.0;
    for (Eigen::Index kk = 0; kk < 2 * n; ++kk) {
      lacc += std::max(merged(2 * n - 1 - kk), 0.0);
      if (kk >= n) racc += std::max(mean(n - 1 - (kk - n)), 0.0);
      details.push_back({{static_cast<int>(kk) + 1}, racc, lacc});
    }
  }
  return finalize("direct_sum_majorization", std::move(details), tol::check);
}

}  // namespace orbitcert
