#include "graphopt/ingest.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>
#include <cstdio>
#include <map>

#include "graphopt/errors.hpp"

namespace graphopt {

namespace {

/// Line iterator that strips '\r' and reports 1-based line numbers.
class LineReader {
  public:
    explicit LineReader(std::string_view text) : text_(text) {}

    bool next(std::string_view &line) {
        if (pos_ >= text_.size())
            return false;
        std::size_t end = text_.find('\n', pos_);
        if (end == std::string_view::npos)
            end = text_.size();
        line = text_.substr(pos_, end - pos_);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        pos_ = end + 1;
        ++lineno_;
        return true;
    }

    std::size_t lineno() const { return lineno_; }

  private:
    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t lineno_ = 0;
};

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
            ++i;
        std::size_t j = i;
        while (j < line.size() && line[j] != ' ' && line[j] != '\t')
            ++j;
        if (j > i)
            out.push_back(line.substr(i, j - i));
        i = j;
    }
    return out;
}

template <typename Int>
bool parse_int(std::string_view s, Int &out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

bool parse_double(std::string_view s, double &out) {
    // from_chars for double is missing in some libstdc++ versions.
    std::string buf(s);
    char *end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return end == buf.c_str() + buf.size() && !buf.empty();
}

bool is_comment(std::string_view line) {
    return line.empty() || line.front() == '#';
}

} // namespace

TriangularSystem parse_matrix_market(std::string_view text) {
    LineReader lines(text);
    std::string_view line;
    if (!lines.next(line))
        throw BadHeader("empty input");
    auto header = split_ws(line);
    if (header.size() < 5 || header[0] != "%%MatrixMarket" || header[1] != "matrix" ||
        header[2] != "coordinate")
        throw BadHeader("expected '%%MatrixMarket matrix coordinate ...'");
    if (header[3] != "real" && header[3] != "integer")
        throw BadHeader("unsupported field '" + std::string(header[3]) + "'");
    const bool symmetric = header[4] == "symmetric";
    if (!symmetric && header[4] != "general")
        throw BadHeader("unsupported symmetry '" + std::string(header[4]) + "'");

    std::size_t rows = 0, cols = 0, nnz = 0;
    bool have_dims = false;
    while (lines.next(line)) {
        if (line.empty() || line.front() == '%')
            continue;
        auto parts = split_ws(line);
        if (parts.size() != 3 || !parse_int(parts[0], rows) || !parse_int(parts[1], cols) ||
            !parse_int(parts[2], nnz))
            throw ParseError(lines.lineno(), "expected '<rows> <cols> <nnz>'");
        have_dims = true;
        break;
    }
    if (!have_dims)
        throw BadHeader("missing dimensions line");
    if (rows != cols)
        throw NotSquare(rows, cols);

    // Accumulate the lower triangle; Matrix Market semantics sum duplicates.
    std::map<std::pair<std::size_t, std::size_t>, double> lower;
    std::size_t read = 0;
    while (lines.next(line)) {
        if (line.empty() || line.front() == '%')
            continue;
        auto parts = split_ws(line);
        std::size_t r = 0, c = 0;
        double v = 0.0;
        if (parts.size() != 3 || !parse_int(parts[0], r) || !parse_int(parts[1], c) ||
            !parse_double(parts[2], v))
            throw ParseError(lines.lineno(), "expected '<row> <col> <value>'");
        if (r < 1 || r > rows || c < 1 || c > cols)
            throw ParseError(lines.lineno(), "coordinate out of range");
        --r;
        --c;
        ++read;
        if (c > r) {
            if (!symmetric)
                continue; // general input: upper triangle is not part of L
            std::swap(r, c);
        }
        lower[{r, c}] += v;
    }
    if (read != nnz)
        throw ParseError(lines.lineno(), "entry count " + std::to_string(read) +
                                             " does not match header nnz " + std::to_string(nnz));

    TriangularSystem sys;
    sys.n = rows;
    sys.rows.resize(rows);
    sys.diag.assign(rows, 0.0);
    sys.b.assign(rows, 1.0);
    std::vector<Edge> edges;
    for (const auto &[rc, v] : lower) {
        auto [r, c] = rc;
        if (r == c)
            sys.diag[r] = v;
        else if (v != 0.0) {
            sys.rows[r].emplace_back(static_cast<NodeId>(c), v);
            edges.push_back(Edge{static_cast<NodeId>(c), static_cast<NodeId>(r)});
        }
    }
    for (std::size_t r = 0; r < rows; ++r)
        if (sys.diag[r] == 0.0)
            throw ZeroDiagonal(r);

    std::vector<std::int64_t> weights(rows);
    std::vector<std::int64_t> labels(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        weights[r] = 1 + static_cast<std::int64_t>(sys.rows[r].size());
        labels[r] = static_cast<std::int64_t>(r);
    }
    sys.dag = build_dag(edges, weights, std::move(labels));
    return sys;
}

Dag parse_edgelist(std::string_view text) {
    LineReader lines(text);
    std::string_view line;
    std::size_t n = 0, m = 0;
    bool have_header = false;
    std::vector<Edge> edges;
    std::vector<std::int64_t> weights;

    while (lines.next(line)) {
        if (is_comment(line))
            continue;
        auto parts = split_ws(line);
        if (!have_header) {
            if (parts.size() != 4 || parts[0] != "p" || parts[1] != "dag" ||
                !parse_int(parts[2], n) || !parse_int(parts[3], m))
                throw ParseError(lines.lineno(), "expected 'p dag <n> <m>'");
            have_header = true;
            weights.assign(n, 1);
            edges.reserve(m);
            continue;
        }
        if (parts[0] == "e") {
            NodeId src = 0, dst = 0;
            if (parts.size() != 3 || !parse_int(parts[1], src) || !parse_int(parts[2], dst))
                throw ParseError(lines.lineno(), "expected 'e <src> <dst>'");
            if (src >= n || dst >= n)
                throw ParseError(lines.lineno(), "node id out of range");
            if (src == dst)
                throw ParseError(lines.lineno(), "self-loop");
            edges.push_back(Edge{src, dst});
        } else if (parts[0] == "w") {
            NodeId v = 0;
            std::int64_t w = 0;
            if (parts.size() != 3 || !parse_int(parts[1], v) || !parse_int(parts[2], w))
                throw ParseError(lines.lineno(), "expected 'w <node> <weight>'");
            if (v >= n)
                throw ParseError(lines.lineno(), "node id out of range");
            if (w < 1)
                throw ParseError(lines.lineno(), "weight must be positive");
            weights[v] = w;
        } else {
            throw ParseError(lines.lineno(), "unknown record '" + std::string(parts[0]) + "'");
        }
    }
    if (!have_header)
        throw ParseError(lines.lineno(), "missing 'p dag' header");
    if (edges.size() != m)
        throw ParseError(lines.lineno(), "edge count " + std::to_string(edges.size()) +
                                             " does not match header m " + std::to_string(m));
    return build_dag(edges, weights);
}

std::string write_edgelist(const Dag &dag) {
    std::string out;
    out += "p dag " + std::to_string(dag.node_count()) + " " + std::to_string(dag.edge_count()) +
           "\n";
    for (NodeId u = 0; u < dag.node_count(); ++u)
        for (NodeId v : dag.successors(u))
            out += "e " + std::to_string(u) + " " + std::to_string(v) + "\n";
    for (NodeId v = 0; v < dag.node_count(); ++v)
        if (dag.node_weight(v) != 1)
            out += "w " + std::to_string(v) + " " + std::to_string(dag.node_weight(v)) + "\n";
    return out;
}

Circuit parse_circuit(std::string_view text) {
    LineReader lines(text);
    std::string_view line;
    Circuit c;
    std::vector<Edge> edges;
    std::vector<std::int64_t> weights;

    while (lines.next(line)) {
        if (is_comment(line))
            continue;
        auto parts = split_ws(line);
        if (parts.size() < 2)
            throw ParseError(lines.lineno(), "expected 'l|s|p <id> ...'");
        NodeId id = 0;
        if (!parse_int(parts[1], id))
            throw ParseError(lines.lineno(), "bad node id");
        if (id != c.nodes.size())
            throw ParseError(lines.lineno(), "node ids must be dense and in order (expected " +
                                                 std::to_string(c.nodes.size()) + ")");

        Circuit::Node node;
        if (parts[0] == "l") {
            if (parts.size() != 3)
                throw ParseError(lines.lineno(), "expected 'l <id> <input_index>'");
            node.kind = Circuit::Kind::Leaf;
            if (!parse_int(parts[2], node.input_index) || node.input_index < 0)
                throw ParseError(lines.lineno(), "bad input index");
            c.num_inputs = std::max(c.num_inputs, static_cast<std::size_t>(node.input_index) + 1);
        } else if (parts[0] == "s" || parts[0] == "p") {
            node.kind = parts[0] == "s" ? Circuit::Kind::Sum : Circuit::Kind::Product;
            if (parts.size() < 3)
                throw ParseError(lines.lineno(), "sum/product needs at least one child");
            for (std::size_t i = 2; i < parts.size(); ++i) {
                NodeId child = 0;
                if (!parse_int(parts[i], child))
                    throw ParseError(lines.lineno(), "bad child id");
                if (child >= id)
                    throw UnknownChild(id, child);
                node.children.push_back(child);
            }
        } else {
            throw ParseError(lines.lineno(), "unknown record '" + std::string(parts[0]) + "'");
        }
        c.nodes.push_back(std::move(node));
    }

    weights.resize(c.nodes.size());
    std::vector<std::int64_t> labels(c.nodes.size());
    for (NodeId id = 0; id < c.nodes.size(); ++id) {
        const auto &node = c.nodes[id];
        weights[id] = std::max<std::int64_t>(1, static_cast<std::int64_t>(node.children.size()));
        labels[id] = id;
        // Duplicate children count once as a dag edge.
        std::vector<NodeId> uniq(node.children);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        for (NodeId child : uniq)
            edges.push_back(Edge{child, id});
    }
    c.dag = build_dag(edges, weights, std::move(labels));
    return c;
}

std::string write_schedule(const Schedule &schedule) {
    std::string out = "graphopt-schedule v1\n";
    out += "threads " + std::to_string(schedule.threads) + "\n";
    char fp[17];
    std::snprintf(fp, sizeof fp, "%016llx",
                  static_cast<unsigned long long>(schedule.graph_fingerprint));
    out += "fingerprint ";
    out += fp;
    out += "\nsuperlayers " + std::to_string(schedule.layers.size()) + "\n";
    for (std::size_t li = 0; li < schedule.layers.size(); ++li) {
        out += "layer " + std::to_string(li) + "\n";
        const SuperLayer &layer = schedule.layers[li];
        for (std::size_t t = 0; t < layer.partitions.size(); ++t) {
            out += "t " + std::to_string(t) + ":";
            for (NodeId v : layer.partitions[t]) {
                out += ' ';
                out += std::to_string(v);
            }
            out += '\n';
        }
    }
    return out;
}

Schedule read_schedule(std::string_view text, const Dag &dag) {
    LineReader lines(text);
    std::string_view line;

    if (!lines.next(line))
        throw VersionMismatch("");
    if (line != "graphopt-schedule v1")
        throw VersionMismatch(std::string(line));

    auto expect = [&](const char *tag) -> std::vector<std::string_view> {
        if (!lines.next(line))
            throw MalformedLayer(std::string("unexpected end of file, wanted '") + tag + "'");
        auto parts = split_ws(line);
        if (parts.empty() || parts[0] != tag)
            throw MalformedLayer(std::string("expected '") + tag + "' at line " +
                                 std::to_string(lines.lineno()));
        return parts;
    };

    Schedule s;
    {
        auto parts = expect("threads");
        if (parts.size() != 2 || !parse_int(parts[1], s.threads) || s.threads < 1)
            throw MalformedLayer("bad thread count");
    }
    {
        auto parts = expect("fingerprint");
        std::uint64_t fp = 0;
        if (parts.size() != 2 ||
            std::from_chars(parts[1].data(), parts[1].data() + parts[1].size(), fp, 16).ec !=
                std::errc{})
            throw MalformedLayer("bad fingerprint");
        s.graph_fingerprint = fp;
        if (fp != dag.fingerprint())
            throw FingerprintMismatch(dag.fingerprint(), fp);
    }
    std::size_t num_layers = 0;
    {
        auto parts = expect("superlayers");
        if (parts.size() != 2 || !parse_int(parts[1], num_layers))
            throw MalformedLayer("bad superlayer count");
    }

    for (std::size_t li = 0; li < num_layers; ++li) {
        auto parts = expect("layer");
        std::size_t idx = 0;
        if (parts.size() != 2 || !parse_int(parts[1], idx) || idx != li)
            throw MalformedLayer("layer index out of sequence at line " +
                                 std::to_string(lines.lineno()));
        SuperLayer layer;
        layer.partitions.resize(static_cast<std::size_t>(s.threads));
        layer.weights.assign(static_cast<std::size_t>(s.threads), 0);
        for (int t = 0; t < s.threads; ++t) {
            if (!lines.next(line))
                throw MalformedLayer("unexpected end of file inside layer " + std::to_string(li));
            auto fields = split_ws(line);
            if (fields.size() < 2 || fields[0] != "t" ||
                fields[1] != std::to_string(t) + ":")
                throw MalformedLayer("expected 't " + std::to_string(t) + ":' at line " +
                                     std::to_string(lines.lineno()));
            for (std::size_t i = 2; i < fields.size(); ++i) {
                NodeId v = 0;
                if (!parse_int(fields[i], v))
                    throw MalformedLayer("bad node id at line " + std::to_string(lines.lineno()));
                if (v >= dag.node_count())
                    throw MalformedLayer("node id " + std::to_string(v) + " out of range");
                layer.partitions[static_cast<std::size_t>(t)].push_back(v);
                layer.weights[static_cast<std::size_t>(t)] += dag.node_weight(v);
            }
        }
        s.layers.push_back(std::move(layer));
    }
    if (lines.next(line) && !split_ws(line).empty())
        throw MalformedLayer("trailing content after last layer");

    s.placement.assign(dag.node_count(), NodePlace{});
    for (std::size_t li = 0; li < s.layers.size(); ++li)
        for (std::size_t t = 0; t < s.layers[li].partitions.size(); ++t) {
            const auto &list = s.layers[li].partitions[t];
            for (std::size_t pos = 0; pos < list.size(); ++pos)
                s.placement[list[pos]] =
                    NodePlace{static_cast<std::int32_t>(li), static_cast<std::int32_t>(t),
                              static_cast<std::int32_t>(pos)};
        }

    ValidationReport report = validate_schedule(dag, s);
    if (!report.ok())
        throw MalformedLayer(report.violations.front());
    return s;
}

} // namespace graphopt
