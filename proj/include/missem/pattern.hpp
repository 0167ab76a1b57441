#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "missem/error.hpp"

namespace missem {

// One missingness pattern over the data coordinates: bit i is 1 when
// coordinate i is observed. Immutable after construction.
class MissingnessPattern {
 public:
  explicit MissingnessPattern(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    if (bits_.empty()) throw ValidationError("pattern needs at least one coordinate");
    for (auto b : bits_) {
      if (b > 1) throw ValidationError("pattern bits must be 0 or 1");
    }
  }

  // Parses "1101"-style strings, the serialized form used everywhere.
  static MissingnessPattern from_string(std::string_view s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char c : s) {
      if (c != '0' && c != '1') {
        throw ParseError("pattern string \"" + std::string(s) + "\" contains '" +
                         std::string(1, c) + "'; only '0'/'1' allowed");
      }
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return MissingnessPattern(std::move(bits));
  }

  static MissingnessPattern ones(std::size_t d) {
    return MissingnessPattern(std::vector<std::uint8_t>(d, 1));
  }
  static MissingnessPattern zeros(std::size_t d) {
    return MissingnessPattern(std::vector<std::uint8_t>(d, 0));
  }

  std::size_t size() const { return bits_.size(); }
  bool observed(std::size_t i) const { return bits_[i] != 0; }

  // r·r: the number of values observed when this pattern is realised.
  std::size_t observed_count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  MissingnessPattern complement() const {
    std::vector<std::uint8_t> neg(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) neg[i] = bits_[i] ? 0 : 1;
    return MissingnessPattern(std::move(neg));
  }

  std::vector<std::size_t> observed_coords() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  std::vector<std::size_t> missing_coords() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (!bits_[i]) out.push_back(i);
    return out;
  }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) s[i] = '1';
    return s;
  }

  friend bool operator==(const MissingnessPattern&, const MissingnessPattern&) = default;
  friend auto operator<=>(const MissingnessPattern&, const MissingnessPattern&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// r_i <=_p r_j: everything observed under r_i is also observed under r_j.
inline bool leq_p(const MissingnessPattern& ri, const MissingnessPattern& rj) {
  if (ri.size() != rj.size()) {
    throw DimensionError("leq_p: patterns have lengths " + std::to_string(ri.size()) + " and " +
                         std::to_string(rj.size()));
  }
  for (std::size_t l = 0; l < ri.size(); ++l) {
    if (ri.observed(l) && !rj.observed(l)) return false;
  }
  return true;
}

inline bool strictly_less_p(const MissingnessPattern& ri, const MissingnessPattern& rj) {
  return ri != rj && leq_p(ri, rj);
}

// The set of distinct missingness patterns. Insertion order is kept, except
// that the all-ones pattern (complete cases), when present, is moved to the
// front so it always sits at index 0.
class PatternSet {
 public:
  explicit PatternSet(std::vector<MissingnessPattern> patterns) : patterns_(std::move(patterns)) {
    if (patterns_.empty()) throw ValidationError("pattern set must contain at least one pattern");
    const std::size_t d = patterns_[0].size();
    for (const auto& p : patterns_) {
      if (p.size() != d) {
        throw DimensionError("pattern set mixes lengths " + std::to_string(d) + " and " +
                             std::to_string(p.size()));
      }
    }
    for (std::size_t i = 0; i < patterns_.size(); ++i) {
      for (std::size_t j = i + 1; j < patterns_.size(); ++j) {
        if (patterns_[i] == patterns_[j]) {
          throw ValidationError("duplicate pattern \"" + patterns_[i].to_string() + "\"");
        }
      }
    }
    auto it = std::find(patterns_.begin(), patterns_.end(), MissingnessPattern::ones(d));
    if (it != patterns_.end()) {
      std::rotate(patterns_.begin(), it, it + 1);
    }
  }

  std::size_t size() const { return patterns_.size(); }
  std::size_t dim() const { return patterns_[0].size(); }
  const MissingnessPattern& operator[](std::size_t j) const { return patterns_[j]; }

  std::optional<std::size_t> index_of(const MissingnessPattern& r) const {
    for (std::size_t j = 0; j < patterns_.size(); ++j)
      if (patterns_[j] == r) return j;
    return std::nullopt;
  }
  bool contains(const MissingnessPattern& r) const { return index_of(r).has_value(); }

  auto begin() const { return patterns_.begin(); }
  auto end() const { return patterns_.end(); }

  friend bool operator==(const PatternSet&, const PatternSet&) = default;

 private:
  std::vector<MissingnessPattern> patterns_;
};

// Covering pairs (i, j) of <=_p restricted to ps: ps[i] <_p ps[j] with no
// member strictly between. Sorted by (i, j) for stable reports.
inline std::vector<std::pair<std::size_t, std::size_t>> lattice_edges(const PatternSet& ps) {
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  const std::size_t k = ps.size();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!strictly_less_p(ps[i], ps[j])) continue;
      bool covered = true;
      for (std::size_t m = 0; m < k; ++m) {
        if (m == i || m == j) continue;
        if (strictly_less_p(ps[i], ps[m]) && strictly_less_p(ps[m], ps[j])) {
          covered = false;
          break;
        }
      }
      if (covered) edges.emplace_back(i, j);
    }
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace missem
