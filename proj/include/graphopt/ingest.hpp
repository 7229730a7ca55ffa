#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "graphopt/dag.hpp"
#include "graphopt/pipeline.hpp"

namespace graphopt {

/// Lower triangular system L x = b. Row i of L is split into its strictly
/// lower entries and the (nonzero) diagonal. The dag mirrors the sparsity:
/// edge j -> i per nonzero L[i][j] with j < i, node weight 1 plus the
/// off-diagonal count of the row.
struct TriangularSystem {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<NodeId, double>>> rows;
    std::vector<double> diag;
    std::vector<double> b; // defaults to all ones
    Dag dag;
};

/// Arithmetic circuit of sums and products over leaf inputs. The dag has an
/// edge child -> parent and node weight max(1, child count).
struct Circuit {
    enum class Kind : std::uint8_t { Leaf, Sum, Product };
    struct Node {
        Kind kind = Kind::Leaf;
        std::int32_t input_index = -1;  // leaves only
        std::vector<NodeId> children;   // sums/products; duplicates allowed
    };

    std::vector<Node> nodes;
    std::size_t num_inputs = 0;
    Dag dag;
};

/// Matrix Market coordinate reader ("real" or "integer", "general" or
/// "symmetric", 1-based). Keeps the lower triangle; symmetric inputs have
/// their upper entries mirrored down. Duplicate coordinates are summed.
TriangularSystem parse_matrix_market(std::string_view text);

/// Edge-list DAG format:
///   p dag <n> <m>
///   e <src> <dst>
///   w <node> <weight>     (optional, default 1)
/// with '#' comments and 0-based ids.
Dag parse_edgelist(std::string_view text);
std::string write_edgelist(const Dag &dag);

/// Circuit format, one node per line, ids dense and in order:
///   l <id> <input_index>
///   s <id> <child>...
///   p <id> <child>...
Circuit parse_circuit(std::string_view text);

/// Schedule text format (canonical, byte-stable):
///   graphopt-schedule v1
///   threads <P>
///   fingerprint <hex>
///   superlayers <K>
///   layer <i>
///   t <thread>: <node ids in execution order>
std::string write_schedule(const Schedule &schedule);

/// Parses and fully validates a schedule against `dag` (version line,
/// fingerprint, then every structural invariant).
Schedule read_schedule(std::string_view text, const Dag &dag);

} // namespace graphopt
