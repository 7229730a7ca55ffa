#include "graphopt/generators.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <vector>

namespace graphopt {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

namespace {

struct Rng {
    std::uint64_t state;
    std::uint64_t next() { return splitmix64(state++); }
    std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

double unit_double(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void append_num(std::string &out, std::uint64_t v) {
    char buf[24];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    out.append(buf, p);
}

void append_edge(std::string &out, std::uint64_t src, std::uint64_t dst) {
    out += "e ";
    append_num(out, src);
    out += ' ';
    append_num(out, dst);
    out += '\n';
}

} // namespace

std::string gen_chain(std::size_t n) {
    std::string out = "p dag ";
    append_num(out, n);
    out += ' ';
    append_num(out, n == 0 ? 0 : n - 1);
    out += '\n';
    for (std::size_t i = 0; i + 1 < n; ++i)
        append_edge(out, i, i + 1);
    return out;
}

std::string gen_indep(std::size_t n) {
    std::string out = "p dag ";
    append_num(out, n);
    out += " 0\n";
    return out;
}

std::string gen_layered(std::size_t n, std::size_t width, std::size_t density,
                        std::uint64_t seed) {
    width = std::max<std::size_t>(1, width);
    density = std::max<std::size_t>(1, density);
    Rng rng{splitmix64(seed ^ 0x6c7967656e6572ull)};

    // Strand-structured wiring: every node keeps a predecessor in its own
    // column of the previous layer; each remaining draw occasionally reaches
    // one column to the right. One-sided sparse coupling mirrors banded
    // triangular solves, where a row reads a few nearby earlier rows, and
    // keeps the strands genuinely dependent without saturating every layer.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(n * density);
    std::vector<std::uint32_t> picks;
    for (std::size_t v = width; v < n; ++v) {
        const std::size_t layer = v / width;
        const std::size_t prev_size = std::min(width, n - (layer - 1) * width);
        const std::size_t col = std::min(v % width, prev_size - 1);
        const std::size_t prev_begin = (layer - 1) * width;
        picks.push_back(static_cast<std::uint32_t>(prev_begin + col));
        for (std::size_t k = 1; k < density; ++k) {
            std::size_t c = col;
            if (rng.below(8) == 0 && c + 1 < prev_size)
                ++c;
            picks.push_back(static_cast<std::uint32_t>(prev_begin + c));
        }
        std::sort(picks.begin(), picks.end());
        picks.erase(std::unique(picks.begin(), picks.end()), picks.end());
        for (std::uint32_t u : picks)
            edges.emplace_back(u, static_cast<std::uint32_t>(v));
        picks.clear();
    }
    std::sort(edges.begin(), edges.end());

    std::string out = "p dag ";
    append_num(out, n);
    out += ' ';
    append_num(out, edges.size());
    out += '\n';
    for (auto [u, v] : edges)
        append_edge(out, u, v);
    return out;
}

std::string gen_band(std::size_t n, std::size_t bandwidth) {
    std::size_t nnz = n;
    for (std::size_t i = 0; i < n; ++i)
        nnz += std::min(i, bandwidth);

    std::string out = "%%MatrixMarket matrix coordinate real general\n";
    append_num(out, n);
    out += ' ';
    append_num(out, n);
    out += ' ';
    append_num(out, nnz);
    out += '\n';

    char buf[64];
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t first = i >= bandwidth ? i - bandwidth : 0;
        for (std::size_t j = first; j < i; ++j) {
            double v = 2.0 * unit_double(splitmix64(i * 0x1000003ull + j)) - 1.0;
            int len = std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i + 1, j + 1, v);
            out.append(buf, static_cast<std::size_t>(len));
        }
        double d = 1.0 + unit_double(splitmix64(i * 0x1000003ull + i));
        int len = std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i + 1, i + 1, d);
        out.append(buf, static_cast<std::size_t>(len));
    }
    return out;
}

} // namespace graphopt
