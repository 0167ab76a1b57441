#pragma once

#include <cstddef>

namespace missem {

inline constexpr const char* kToolName = "missem";
inline constexpr const char* kVersion = "0.1.0";

// Name of the uniform-variate generator; recorded in chain and report
// metadata so archived outputs can be reproduced.
inline constexpr const char* kRngAlgorithm = "splitmix64-counter";

// Identifier of the canonical enumeration order (pattern-index major, then
// lexicographic outcomes with coordinate 0 most significant).
inline constexpr const char* kCanonicalOrder = "pattern-major-lex-v1";

inline constexpr double kDefaultTolerance = 1e-12;

// Enumeration cap: spaces are walked exhaustively, so the coordinate count
// is bounded to keep 2^d tractable.
inline constexpr std::size_t kMaxDimension = 12;

}  // namespace missem
