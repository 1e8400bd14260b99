#include "orbitcert/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace orbitcert {

namespace {

// Index of the largest-modulus component; first index wins near-ties.
Eigen::Index pivot_index(const Eigen::VectorXcd& v) {
  Eigen::Index best = 0;
  double best_mod = std::abs(v(0));
  for (Eigen::Index k = 1; k < v.size(); ++k) {
    const double m = std::abs(v(k));
    if (m > best_mod * (1.0 + 1e-12)) {
      best = k;
      best_mod = m;
    }
  }
  return best;
}

void phase_normalize(Eigen::Ref<Eigen::VectorXcd> v) {
  const Eigen::Index piv = pivot_index(v);
  const Complex c = v(piv);
  const double mod = std::abs(c);
  if (mod > 0.0) v *= std::conj(c) / mod;
}

}  // namespace

SpectralDecomposition spectral_decomposition(const HermitianMatrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H.mat());
  if (es.info() != Eigen::Success) {
    Eigen::SelfAdjointEigenSolver<Matrix> probe(H.mat(),
                                                Eigen::EigenvaluesOnly);
    throw ConvergenceError("spectral_decomposition: eigensolver failed",
                           max_abs(H.mat()));
  }

  const Eigen::Index n = H.dim();
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.frame.resize(n, n);

  // Eigen returns nondecreasing order; reverse.
  for (Eigen::Index j = 0; j < n; ++j) {
    out.eigenvalues(j) = es.eigenvalues()(n - 1 - j);
    out.frame.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  for (Eigen::Index j = 0; j < n; ++j) phase_normalize(out.frame.col(j));

  // Deterministic order inside groups of (numerically) equal eigenvalues.
  const double tie = 1e-12 * (1.0 + out.eigenvalues.cwiseAbs().maxCoeff());
  Eigen::Index lo = 0;
  while (lo < n) {
    Eigen::Index hi = lo + 1;
    while (hi < n && out.eigenvalues(lo) - out.eigenvalues(hi) <= tie) ++hi;
    if (hi - lo > 1) {
      std::vector<Eigen::Index> order(static_cast<size_t>(hi - lo));
      std::iota(order.begin(), order.end(), lo);
      std::stable_sort(order.begin(), order.end(),
                       [&](Eigen::Index a, Eigen::Index b) {
                         return pivot_index(out.frame.col(a)) <
                                pivot_index(out.frame.col(b));
                       });
      Matrix cols(n, hi - lo);
      RealVector vals(hi - lo);
      for (Eigen::Index j = 0; j < hi - lo; ++j) {
        cols.col(j) = out.frame.col(order[static_cast<size_t>(j)]);
        vals(j) = out.eigenvalues(order[static_cast<size_t>(j)]);
      }
      out.frame.middleCols(lo, hi - lo) = cols;
      out.eigenvalues.segment(lo, hi - lo) = vals;
    }
    lo = hi;
  }
  return out;
}

HermitianMatrix apply_spectral_function(const PsdMatrix& P, const ScalarFn& g) {
  const SpectralDecomposition sd = spectral_decomposition(P.hermitian());
  RealVector mapped(sd.eigenvalues.size());
  for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
    const double v = g(sd.eigenvalues(j));
    if (!std::isfinite(v))
      throw DomainError("apply_spectral_function: g not finite at eigenvalue " +
                        std::to_string(sd.eigenvalues(j)));
    mapped(j) = v;
  }
  return HermitianMatrix(sd.frame * mapped.asDiagonal() * sd.frame.adjoint());
}

PsdMatrix matrix_abs_power(const ComplexMatrix& A, double p) {
  if (!A.square()) throw ShapeError("matrix_abs_power: matrix must be square");
  if (!(p > 0.0)) throw DomainError("matrix_abs_power: p must be positive");
  const Matrix gram = A.mat().adjoint() * A.mat();
  if (p == 2.0) return PsdMatrix(gram);
  const SpectralDecomposition sd =
      spectral_decomposition(HermitianMatrix(gram));
  RealVector powered(sd.eigenvalues.size());
  for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
    // Negatives within psd_tol are rounding; clamp before fractional powers.
    const double t = std::max(sd.eigenvalues(j), 0.0);
    powered(j) = std::pow(t, p / 2.0);
  }
  return PsdMatrix(sd.frame * powered.asDiagonal() * sd.frame.adjoint());
}

double schatten_norm(const ComplexMatrix& A, double p) {
  if (!(p >= 1.0)) throw DomainError("schatten_norm: p must be >= 1");
  const RealVector sv = singular_values(A.mat());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) acc += std::pow(sv(j), p);
  return std::pow(acc, 1.0 / p);
}

double trace_abs_power(const ComplexMatrix& A, double p) {
  if (!A.square()) throw ShapeError("trace_abs_power: matrix must be square");
  if (!(p > 0.0)) throw DomainError("trace_abs_power: p must be positive");
  const RealVector sv = singular_values(A.mat());
  double acc = 0.0;
  for (Eigen::Index j = 0; j < sv.size(); ++j) acc += std::pow(sv(j), p);
  return acc;
}

double psd_gap(const HermitianMatrix& L, const HermitianMatrix& R) {
  if (L.dim() != R.dim()) throw ShapeError("psd_gap: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(R.mat() - L.mat(),
                                           Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("psd_gap: eigensolver failed");
  return es.eigenvalues().minCoeff();
}

RealVector eigenvalues_desc(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw ConvergenceError("eigenvalues_desc: eigensolver failed");
  return es.eigenvalues().reverse();
}

RealVector singular_values(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A);
  return svd.singularValues();
}

}  // namespace orbitcert
