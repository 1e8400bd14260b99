#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "orbitcert/certificates.hpp"

namespace orbitcert {

struct SearchConfig {
  int max_iterations = 500;
  int restarts = 8;
  double step_init = 0.1;
  double grad_eps = 1e-5;
  uint64_t seed = 0;
  double target_gap = -1e-7;  // relative acceptance threshold, <= 0
};

struct SearchTrace {
  int iterations_used = 0;
  int restarts_used = 0;
  std::vector<double> objective_history;
  bool converged = false;
  double final_gap = 0.0;
};

nlohmann::json search_trace_to_json(const SearchTrace& t);

enum class SearchDirection { sum_le_bound, sum_ge_bound };

// Minimizes lambda_max(sum_i U_i S_i U_i^* - bound) (negated for
// sum_ge_bound) over unitaries U_i = U_i^(0) exp(K_i), K_i skew-Hermitian,
// with central-difference gradients, backtracking steps, and exponential
// retraction. Never throws on non-convergence; converged=false reports it.
std::pair<Certificate, SearchTrace> orbit_optimize(
    const std::vector<std::pair<PsdMatrix, ComplexMatrix>>& terms,
    const HermitianMatrix& bound, SearchDirection direction,
    const SearchConfig& cfg);

// g(X+Y) >= U0 g(X) U0^* + V0 g(Y) V0^* (convex; reversed for concave).
// Commuting inputs take an exact zero-iteration path; otherwise the orbit
// search runs with eigen-alignment warm starts.
std::pair<Certificate, SearchTrace> key1_certificate(const PsdMatrix& X,
                                                     const PsdMatrix& Y,
                                                     const ScalarFn& g,
                                                     bool convex,
                                                     const SearchConfig& cfg);

// U |.5(A+B)|^q U^* + V |.5(A-B)|^q V^* >= (|A|^q+|B|^q)/2, 0 < q < 2.
std::pair<Certificate, SearchTrace> theorem2_certificate(
    const ComplexMatrix& A, const ComplexMatrix& B, double q,
    const SearchConfig& cfg);

// Statement selector for the direct-sum power corollaries.
enum class DirectSumStatement {
  four_term,         // exponent > 2: |A+B|^p (+) |A-B|^p >= four-term sum;
                     // 0 < q < 2: the reversed four-term inequality
  reversed_theorem,  // 0 < q < 2 halved two-term reversed theorem
};

std::pair<Certificate, SearchTrace> direct_sum_power_certificates(
    const ComplexMatrix& A, const ComplexMatrix& B, double exponent,
    const SearchConfig& cfg,
    DirectSumStatement statement = DirectSumStatement::four_term);

// Haar-distributed unitary from a seeded generator (QR with phase fix).
Matrix haar_unitary(Eigen::Index n, std::mt19937_64& rng);

// Random skew-Hermitian direction with unit Frobenius norm.
Matrix random_skew_hermitian(Eigen::Index n, std::mt19937_64& rng);

// exp(K) for skew-Hermitian K, via the Hermitian eigendecomposition of iK.
Matrix unitary_exp_skew(const Matrix& K);

// Analytic directional derivative of the orbit objective at the given
// point along per-term skew-Hermitian directions; valid where the top
// eigenvalue of the gap is simple.
double orbit_directional_derivative(
    const std::vector<std::pair<PsdMatrix, ComplexMatrix>>& terms,
    const std::vector<Matrix>& unitaries, const HermitianMatrix& bound,
    SearchDirection direction, const std::vector<Matrix>& directions);

// The raw objective at a point; exposed for gradient sanity checks.
double orbit_objective(
    const std::vector<std::pair<PsdMatrix, ComplexMatrix>>& terms,
    const std::vector<Matrix>& unitaries, const HermitianMatrix& bound,
    SearchDirection direction);

}  // namespace orbitcert
