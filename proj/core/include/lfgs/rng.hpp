#pragma once

#include <cstdint>
#include <random>

#include "lfgs/kernels.hpp"

namespace lfgs {

// Splittable seeding: one base seed plus a stream index give independent
// engines, so parallel trials never share RNG state.
inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  // splitmix64 mix of (seed, stream)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  z ^= z >> 31;
  return std::mt19937_64(z);
}

inline Matrix gaussian_matrix(Index rows, Index cols, std::mt19937_64& eng) {
  std::normal_distribution<double> g;
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = g(eng);
  return m;
}

}  // namespace lfgs
