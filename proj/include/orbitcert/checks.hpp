#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "orbitcert/spectral.hpp"

namespace orbitcert {

struct CheckDetail {
  std::vector<int> indices;
  double lhs;
  double rhs;
};

// Outcome of one inequality check. margin is the smallest slack rhs - lhs
// over all details; holds <=> margin >= -tol * (1 + max |value| seen).
struct CheckResult {
  std::string name;
  bool holds = false;
  double margin = 0.0;
  std::vector<CheckDetail> details;
};

nlohmann::json check_result_to_json(const CheckResult& r);

enum class AntinormVariant { sum, geomean };
enum class WeylVariant { cor3, cor4, cor5 };

// McCarthy trace inequalities, both raw and midpoint forms; direction flips
// at p = 2, where both orientations are evaluated as equalities.
CheckResult check_clarkson_trace(const ComplexMatrix& A, const ComplexMatrix& B,
                                 double p);

// Prefix sums of nonincreasing eigenvalues of |.5(A+B)|^p + |.5(A-B)|^p
// dominated by those of (|A|^p + |B|^p)/2, every prefix length; p >= 2.
CheckResult check_weak_majorization(const ComplexMatrix& A,
                                    const ComplexMatrix& B, double p);

// Anti-norm superadditivity over the smallest-k eigenvalues, p > 2:
// sum variant uses prefix sums of ascending eigenvalues, geomean the k-th
// roots of their prefix products.
CheckResult check_antinorm_superadditivity(const ComplexMatrix& A,
                                           const ComplexMatrix& B, double p,
                                           AntinormVariant variant);

// Single-eigenvalue Weyl-type estimates. Indices j, k are 0-based.
// cor3: exponent > 2, j+k+1 <= n. cor4: 0 < exponent < 2, j+k+1 <= n.
// cor5: exponent > 2, j <= n-1, direct-sum form (k ignored).
CheckResult check_weyl_split(const ComplexMatrix& A, const ComplexMatrix& B,
                             double exponent, int j, int k,
                             WeylVariant which);

// |A+B|^2 + |A-B|^2 = 2(|A|^2 + |B|^2), entry-wise equality.
CheckResult check_parallelogram_identity(const ComplexMatrix& A,
                                         const ComplexMatrix& B);

// Certificate-free spectral consequence of the direct-sum statements:
// Ky-Fan weak majorization for exponent > 2, ascending-prefix
// superadditivity for 0 < exponent < 2.
CheckResult check_direct_sum_majorization(const ComplexMatrix& A,
                                          const ComplexMatrix& B,
                                          double exponent);

}  // namespace orbitcert
