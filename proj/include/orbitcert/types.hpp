#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace orbitcert {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Tolerances, all relative to 1 + the relevant matrix scale.
namespace tol {
inline constexpr double hermitian = 1e-10;
inline constexpr double psd = 1e-8;
inline constexpr double ortho = 1e-10;
inline constexpr double recon = 1e-9;
inline constexpr double check = 1e-8;
inline constexpr double identity = 1e-10;
inline constexpr double align_slack = 1e-8;
inline constexpr double commute = 1e-10;
}  // namespace tol

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what, double residual_ = 0.0)
      : std::runtime_error(what), residual(residual_) {}
  double residual;
};

// Eigenvalue-dominance hypothesis violated; lists the offending ranks.
struct DominanceError : std::runtime_error {
  DominanceError(const std::string& what, std::vector<int> ranks_)
      : std::runtime_error(what), ranks(std::move(ranks_)) {}
  std::vector<int> ranks;
};

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double max_abs(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const Matrix& m) {
  return m.allFinite();
}

// Dense complex matrix validated to be finite and non-empty.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(Matrix m) : m_(std::move(m)) {
    if (m_.rows() <= 0 || m_.cols() <= 0)
      throw ShapeError("ComplexMatrix: dimensions must be positive");
    if (!all_finite(m_))
      throw DomainError("ComplexMatrix: entries must be finite");
  }

  const Matrix& mat() const { return m_; }
  Eigen::Index rows() const { return m_.rows(); }
  Eigen::Index cols() const { return m_.cols(); }
  bool square() const { return m_.rows() == m_.cols(); }

 private:
  Matrix m_;
};

// Square matrix accepted if Hermitian up to hermitian_tol; stored exactly
// symmetrized as (H + H*)/2.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(const Matrix& m) {
    if (m.rows() != m.cols())
      throw ShapeError("HermitianMatrix: matrix must be square");
    if (!all_finite(m))
      throw DomainError("HermitianMatrix: entries must be finite");
    const double dev = max_abs(m - m.adjoint());
    if (dev > tol::hermitian * (1.0 + max_abs(m)))
      throw DomainError("HermitianMatrix: deviation from Hermitian symmetry " +
                        std::to_string(dev) + " exceeds tolerance");
    m_ = 0.5 * (m + m.adjoint().eval());
  }

  const Matrix& mat() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

// Hermitian matrix whose minimal eigenvalue was checked at construction.
class PsdMatrix {
 public:
  explicit PsdMatrix(HermitianMatrix h) : h_(std::move(h)) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h_.mat(),
                                             Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw ConvergenceError("PsdMatrix: eigensolver failed");
    min_eig_ = es.eigenvalues().minCoeff();
    const double spec = es.eigenvalues().cwiseAbs().maxCoeff();
    if (min_eig_ < -tol::psd * (1.0 + spec))
      throw DomainError("PsdMatrix: minimal eigenvalue " +
                        std::to_string(min_eig_) + " below PSD tolerance");
  }

  explicit PsdMatrix(const Matrix& m) : PsdMatrix(HermitianMatrix(m)) {}

  const HermitianMatrix& hermitian() const { return h_; }
  const Matrix& mat() const { return h_.mat(); }
  Eigen::Index dim() const { return h_.dim(); }
  double min_eig_at_construction() const { return min_eig_; }

 private:
  HermitianMatrix h_;
  double min_eig_;
};

}  // namespace orbitcert
