#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orbitcert/types.hpp"

namespace orbitcert {

enum class GenKind {
  ginibre,
  hermitian,
  psd,
  commuting_pair,
  rank_deficient,
  normal,
  scalar,
};

GenKind gen_kind_from_name(const std::string& s);
std::string gen_kind_name(GenKind k);

struct GeneratorSpec {
  GenKind kind = GenKind::ginibre;
  int dim = 1;
  uint64_t seed = 0;
  double scale = 1.0;
};

// Deterministic in (kind, dim, seed, scale); one matrix, or two for
// commuting_pair.
std::vector<ComplexMatrix> generate(const GeneratorSpec& spec);

// Stable mix of a master seed and a cell index into a per-cell seed.
uint64_t derive_seed(uint64_t master, uint64_t index);

}  // namespace orbitcert
