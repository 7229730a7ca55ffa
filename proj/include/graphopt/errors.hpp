#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace graphopt {

class Error : public std::runtime_error {
  public:
    explicit Error(const std::string &what) : std::runtime_error(what) {}
};

class CycleDetected : public Error {
  public:
    CycleDetected() : Error("graph contains a directed cycle") {}
    explicit CycleDetected(const std::string &what) : Error(what) {}
};

class BadEdge : public Error {
  public:
    BadEdge(std::uint32_t src, std::uint32_t dst, const std::string &why)
        : Error("bad edge (" + std::to_string(src) + "," + std::to_string(dst) + "): " + why),
          src(src), dst(dst) {}
    std::uint32_t src;
    std::uint32_t dst;
};

class TooLarge : public Error {
  public:
    TooLarge(std::size_t size, std::size_t budget)
        : Error("instance has " + std::to_string(size) + " nodes, exact budget is " +
                std::to_string(budget)) {}
};

class ParseError : public Error {
  public:
    ParseError(std::size_t line, const std::string &why)
        : Error("line " + std::to_string(line) + ": " + why), line(line) {}
    std::size_t line;
};

class BadHeader : public Error {
  public:
    explicit BadHeader(const std::string &why) : Error("bad header: " + why) {}
};

class NotSquare : public Error {
  public:
    NotSquare(std::size_t rows, std::size_t cols)
        : Error("matrix is " + std::to_string(rows) + "x" + std::to_string(cols) +
                ", expected square") {}
};

class ZeroDiagonal : public Error {
  public:
    explicit ZeroDiagonal(std::size_t row)
        : Error("zero or missing diagonal in row " + std::to_string(row)), row(row) {}
    std::size_t row;
};

class UnknownChild : public Error {
  public:
    UnknownChild(std::uint32_t node, std::uint32_t child)
        : Error("node " + std::to_string(node) + " references undefined child " +
                std::to_string(child)) {}
};

class VersionMismatch : public Error {
  public:
    explicit VersionMismatch(const std::string &got)
        : Error("unsupported schedule version line: \"" + got + "\"") {}
};

class FingerprintMismatch : public Error {
  public:
    FingerprintMismatch(std::uint64_t expected, std::uint64_t got)
        : Error("schedule fingerprint mismatch (graph " + std::to_string(expected) +
                ", schedule " + std::to_string(got) + ")") {}
};

class MalformedLayer : public Error {
  public:
    explicit MalformedLayer(const std::string &why) : Error("malformed schedule: " + why) {}
};

class InternalInvariantViolation : public Error {
  public:
    explicit InternalInvariantViolation(const std::string &why)
        : Error("internal invariant violated: " + why) {}
};

class PartitionTimeout : public Error {
  public:
    PartitionTimeout() : Error("partitioning exceeded its time budget") {}
};

} // namespace graphopt
