#pragma once

#include <functional>

#include "orbitcert/types.hpp"

namespace orbitcert {

// Real function of a real variable, applied to spectra.
using ScalarFn = std::function<double(double)>;

// Eigenvalues sorted nonincreasing with the matching orthonormal frame.
// Tie-breaking and eigenvector phases are deterministic: within a group of
// equal eigenvalues, columns are ordered by the index of their
// largest-modulus component, and each column is rotated so that component
// is real positive.
struct SpectralDecomposition {
  RealVector eigenvalues;  // nonincreasing
  Matrix frame;            // columns are eigenvectors

  Matrix reconstruct() const {
    return frame * eigenvalues.asDiagonal() * frame.adjoint();
  }
  // lambda^{up}_j, j 0-based: eigenvalues read in nondecreasing order.
  double ascending(Eigen::Index j) const {
    return eigenvalues(eigenvalues.size() - 1 - j);
  }
};

SpectralDecomposition spectral_decomposition(const HermitianMatrix& H);

// frame * diag(g(lambda)) * frame^*; throws DomainError naming the
// eigenvalue if g evaluates to NaN/Inf there.
HermitianMatrix apply_spectral_function(const PsdMatrix& P, const ScalarFn& g);

// |A|^p = (A^* A)^{p/2}; p = 2 takes the exact product path.
PsdMatrix matrix_abs_power(const ComplexMatrix& A, double p);

// (sum sigma_j^p)^{1/p}, p >= 1.
double schatten_norm(const ComplexMatrix& A, double p);

// Tr |A|^p, valid for any p > 0 (unlike schatten_norm's p >= 1 contract).
double trace_abs_power(const ComplexMatrix& A, double p);

// lambda_min(R - L): nonnegative (within tolerance) iff L <= R.
double psd_gap(const HermitianMatrix& L, const HermitianMatrix& R);

// Eigenvalues of a Hermitian matrix, nonincreasing.
RealVector eigenvalues_desc(const Matrix& H);

// Singular values of A, nonincreasing.
RealVector singular_values(const Matrix& A);

}  // namespace orbitcert
