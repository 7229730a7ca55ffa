#pragma once

#include <cstdint>
#include <string>

namespace graphopt {

/// Deterministic synthetic inputs for benchmarking and tests. Same
/// arguments, same bytes, on any platform.

/// Chain 0 -> 1 -> ... -> n-1 as an edge list.
std::string gen_chain(std::size_t n);

/// n isolated unit-weight nodes as an edge list.
std::string gen_indep(std::size_t n);

/// Random layered DAG: nodes packed into layers of `width`, each node past
/// the first layer draws `density` predecessors from the previous layer.
std::string gen_layered(std::size_t n, std::size_t width, std::size_t density,
                        std::uint64_t seed);

/// Banded lower-triangular matrix in Matrix Market format: full band of
/// `bandwidth` sub-diagonals, diagonal magnitudes in [1,2], off-diagonal
/// values in [-1,1].
std::string gen_band(std::size_t n, std::size_t bandwidth);

/// splitmix64; the deterministic hash behind the generators.
std::uint64_t splitmix64(std::uint64_t x);

} // namespace graphopt
