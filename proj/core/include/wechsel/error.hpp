#pragma once

#include <stdexcept>
#include <string>

namespace wechsel {

// Malformed or unreadable input data (file formats, config values).
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shapes that cannot be combined (matrix dims, rotation dims).
struct DimensionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Vocab/merges files that contradict each other or the data they tokenize.
struct TokenizerError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A dictionary yielded no usable pairs against the given vocabularies.
struct NoUsablePairsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative numerics failed to converge within the configured budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace wechsel
