#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "orbitcert/spectral.hpp"

namespace orbitcert {

enum class Direction { lhs_le_rhs, lhs_ge_rhs, equality };
enum class TransformKind { unitary, isometry };

std::string direction_name(Direction d);
Direction direction_from_name(const std::string& s);

struct Transform {
  TransformKind kind;
  ComplexMatrix matrix;
};

// A witnessed operator inequality: the transforms that realize it, the two
// sides, and the measured PSD gap.
struct Certificate {
  std::string statement;
  std::vector<Transform> transforms;
  Direction direction;
  HermitianMatrix lhs;
  HermitianMatrix rhs;
  double gap_min_eig = 0.0;
  double tol_used = tol::psd;
};

// Builds a certificate, measuring the gap from lhs/rhs per direction.
Certificate make_certificate(std::string statement,
                             std::vector<Transform> transforms,
                             Direction direction, HermitianMatrix lhs,
                             HermitianMatrix rhs, double tol_used = tol::psd);

// Re-checks transform orthonormality, the recomputed gap against the stored
// one, and the direction condition at tol_used. Fills `why` on failure.
bool verify_certificate(const Certificate& c, std::string* why = nullptr);

nlohmann::json certificate_to_json(const Certificate& c);
Certificate certificate_from_json(const nlohmann::json& j);

// Unitary W with W S W* <= T, which exists iff the sorted eigenvalues of S
// are dominated by those of T rank by rank; throws DominanceError listing
// the violated ranks otherwise.
ComplexMatrix align_unitary(const PsdMatrix& S, const PsdMatrix& T,
                            double slack = tol::align_slack);

// Midpoint alignment certificate: convex g gives
// (g(X)+g(Y))/2 >= W g((X+Y)/2) W*, concave g the reverse.
Certificate key2_certificate(const PsdMatrix& X, const PsdMatrix& Y,
                             const ScalarFn& g, bool convex);

// For PSD H partitioned in four n-blocks with corners X, Z, returns
// unitaries U, V with H = U (X + 0) U* + V (0 + Z) V*.
std::pair<ComplexMatrix, ComplexMatrix> block_decomposition(const PsdMatrix& H);

// Direct-sum parallelogram law: |A+B|^2 (+) |A-B|^2 equals
// U (|A|^2+|B|^2) U* + V (|A|^2+|B|^2) V* for two 2n-by-n isometries.
Certificate parallelogram_isometries(const ComplexMatrix& A,
                                     const ComplexMatrix& B);

// For Z = X + iY: the squared direct-sum identity (second diagonal block
// as produced by the construction, |Z*|^2) and the square-root inequality
// |Z| (+) |Z| <= U sqrt(X^2+Y^2) U* + V sqrt(X^2+Y^2) V*.
std::pair<Certificate, Certificate> cartesian_certificates(
    const ComplexMatrix& Z);

// Supplies the unitaries (U0, V0) with
// g(X+Y) >= U0 g(X) U0* + V0 g(Y) V0* (convex; reversed when concave).
using Key1Provider = std::function<std::pair<ComplexMatrix, ComplexMatrix>(
    const PsdMatrix& X, const PsdMatrix& Y, const ScalarFn& g, bool convex)>;

// Exact path for simultaneously diagonalizable X, Y: a common eigenframe
// serves as both unitaries; throws DomainError if they do not commute.
std::pair<ComplexMatrix, ComplexMatrix> commuting_key1(const PsdMatrix& X,
                                                       const PsdMatrix& Y,
                                                       const ScalarFn& g,
                                                       bool convex);

// U |.5(A+B)|^p U* + V |.5(A-B)|^p V* <= (|A|^p+|B|^p)/2 with U = W U0,
// V = W V0; the inner (U0, V0) step comes from key1_provider.
Certificate theorem1_certificate(const ComplexMatrix& A, const ComplexMatrix& B,
                                 double p, const Key1Provider& key1_provider);

// |.5(A+B)|^p (+) |.5(A-B)|^p <= .5 {U N U* + V N V*}, N = (|A|^p+|B|^p)/2,
// with 2n-by-n isometries U, V; p > 2.
Certificate direct_sum_cm_certificate(const ComplexMatrix& A,
                                      const ComplexMatrix& B, double p);

}  // namespace orbitcert
