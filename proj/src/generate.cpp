#include "orbitcert/generate.hpp"

#include <random>

#include "orbitcert/search.hpp"

namespace orbitcert {

namespace {

Matrix ginibre(Eigen::Index rows, Eigen::Index cols, double scale,
               std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(rows, cols);
  const double s = scale / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      g(i, j) = Complex(s * gauss(rng), s * gauss(rng));
  return g;
}

}  // namespace

GenKind gen_kind_from_name(const std::string& s) {
  if (s == "ginibre") return GenKind::ginibre;
  if (s == "hermitian") return GenKind::hermitian;
  if (s == "psd") return GenKind::psd;
  if (s == "commuting_pair") return GenKind::commuting_pair;
  if (s == "rank_deficient") return GenKind::rank_deficient;
  if (s == "normal") return GenKind::normal;
  if (s == "scalar") return GenKind::scalar;
  throw UsageError("unknown generator kind: " + s);
}

std::string gen_kind_name(GenKind k) {
  switch (k) {
    case GenKind::ginibre: return "ginibre";
    case GenKind::hermitian: return "hermitian";
    case GenKind::psd: return "psd";
    case GenKind::commuting_pair: return "commuting_pair";
    case GenKind::rank_deficient: return "rank_deficient";
    case GenKind::normal: return "normal";
    case GenKind::scalar: return "scalar";
  }
  return "?";
}

uint64_t derive_seed(uint64_t master, uint64_t index) {
  // splitmix64 over the combined value
  uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<ComplexMatrix> generate(const GeneratorSpec& spec) {
  if (spec.dim <= 0) throw UsageError("generate: dim must be positive");
  if (!(spec.scale > 0.0)) throw UsageError("generate: scale must be positive");
  const Eigen::Index n = spec.dim;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  switch (spec.kind) {
    case GenKind::ginibre:
      return {ComplexMatrix(ginibre(n, n, spec.scale, rng))};
    case GenKind::hermitian: {
      const Matrix g = ginibre(n, n, spec.scale, rng);
      return {ComplexMatrix(0.5 * (g + g.adjoint().eval()))};
    }
    case GenKind::psd: {
      const Matrix g = ginibre(n, n, spec.scale, rng);
      return {ComplexMatrix(g.adjoint() * g)};
    }
    case GenKind::commuting_pair: {
      const Matrix q = haar_unitary(n, rng);
      RealVector d1(n), d2(n);
      for (Eigen::Index j = 0; j < n; ++j) d1(j) = spec.scale * gauss(rng);
      for (Eigen::Index j = 0; j < n; ++j) d2(j) = spec.scale * gauss(rng);
      return {ComplexMatrix(q * d1.asDiagonal() * q.adjoint()),
              ComplexMatrix(q * d2.asDiagonal() * q.adjoint())};
    }
    case GenKind::rank_deficient: {
      if (n == 1) return {ComplexMatrix(Matrix::Zero(1, 1))};
      const Matrix a = ginibre(n, n - 1, spec.scale, rng);
      const Matrix b = ginibre(n - 1, n, 1.0, rng);
      return {ComplexMatrix(a * b)};
    }
    case GenKind::normal: {
      const Matrix q = haar_unitary(n, rng);
      Eigen::VectorXcd d(n);
      for (Eigen::Index j = 0; j < n; ++j)
        d(j) = Complex(spec.scale * gauss(rng), spec.scale * gauss(rng));
      return {ComplexMatrix(q * d.asDiagonal() * q.adjoint())};
    }
    case GenKind::scalar: {
      Matrix m(1, 1);
      m(0, 0) = Complex(spec.scale * gauss(rng), spec.scale * gauss(rng));
      return {ComplexMatrix(std::move(m))};
    }
  }
  throw UsageError("generate: unknown kind");
}

}  // namespace orbitcert
