#pragma once

#include <stdexcept>
#include <string>

namespace missem {

// Structural invariant broken while building a value (lengths, duplicates,
// bad bits, probability sums). The message lists every offending row.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Mixed coordinate counts between patterns, outcomes or sub-vectors.
struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Conditioning on something with zero mass; never a silent NaN.
struct UndefinedConditionalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// An empirical table was compared against an exact table over a different support.
struct SupportMismatchError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input document or data file; message carries the location.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace missem
