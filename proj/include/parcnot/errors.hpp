#pragma once

#include <stdexcept>
#include <string>

namespace parcnot {

/// Raised when an operation needs an invertible matrix and the input has no pivot in some column.
struct SingularMatrix : std::runtime_error {
    explicit SingularMatrix(const std::string &what) : std::runtime_error(what) {}
};

struct DimensionMismatch : std::invalid_argument {
    explicit DimensionMismatch(const std::string &what) : std::invalid_argument(what) {}
};

struct ParseError : std::runtime_error {
    explicit ParseError(const std::string &what) : std::runtime_error(what) {}
};

/// A layer whose gates reuse a wire, point a wire at itself, or leave the circuit's wire range.
struct MalformedLayer : std::invalid_argument {
    explicit MalformedLayer(const std::string &what) : std::invalid_argument(what) {}
};

struct WireCollision : std::invalid_argument {
    explicit WireCollision(const std::string &what) : std::invalid_argument(what) {}
};

struct NotTriangular : std::invalid_argument {
    explicit NotTriangular(const std::string &what) : std::invalid_argument(what) {}
};

struct LaybyFailure : std::runtime_error {
    explicit LaybyFailure(const std::string &what) : std::runtime_error(what) {}
};

struct BudgetExceeded : std::invalid_argument {
    explicit BudgetExceeded(const std::string &what) : std::invalid_argument(what) {}
};

struct LayoutError : std::invalid_argument {
    explicit LayoutError(const std::string &what) : std::invalid_argument(what) {}
};

struct MalformedTree : std::invalid_argument {
    explicit MalformedTree(const std::string &what) : std::invalid_argument(what) {}
};

struct TooLarge : std::invalid_argument {
    explicit TooLarge(const std::string &what) : std::invalid_argument(what) {}
};

}  // namespace parcnot
