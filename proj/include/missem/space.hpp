#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "missem/error.hpp"
#include "missem/pattern.hpp"
#include "missem/version.hpp"

namespace missem {

// Admissible values of one data coordinate, in declaration order. Values are
// opaque labels; all arithmetic works on their indices.
class VariableDomain {
 public:
  explicit VariableDomain(std::vector<std::string> values) : values_(std::move(values)) {
    if (values_.empty()) throw ValidationError("variable domain must be non-empty");
    for (std::size_t i = 0; i < values_.size(); ++i) {
      for (std::size_t j = i + 1; j < values_.size(); ++j) {
        if (values_[i] == values_[j]) {
          throw ValidationError("variable domain repeats value \"" + values_[i] + "\"");
        }
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  const std::string& label(std::size_t i) const { return values_[i]; }
  const std::vector<std::string>& labels() const { return values_; }

  std::optional<std::size_t> index_of(std::string_view v) const {
    for (std::size_t i = 0; i < values_.size(); ++i)
      if (values_[i] == v) return i;
    return std::nullopt;
  }

  friend bool operator==(const VariableDomain&, const VariableDomain&) = default;

 private:
  std::vector<std::string> values_;
};

// A complete (realizable) data row, stored as value indices per coordinate.
struct Outcome {
  std::vector<std::size_t> values;

  friend bool operator==(const Outcome&, const Outcome&) = default;
  friend auto operator<=>(const Outcome&, const Outcome&) = default;
};

// A point of Omega: dataset plus the missingness pattern it is paired with.
// The two field accessors are the projections onto Y and R.
struct FullPoint {
  Outcome y;
  MissingnessPattern r;

  friend bool operator==(const FullPoint&, const FullPoint&) = default;
  friend auto operator<=>(const FullPoint&, const FullPoint&) = default;
};

// Projection image: selected values together with the coordinates they came
// from, so sub-vectors from different patterns never collide and re-assembly
// is unambiguous.
struct SubVector {
  std::vector<std::size_t> coords;
  std::vector<std::size_t> values;

  std::size_t size() const { return values.size(); }

  friend bool operator==(const SubVector&, const SubVector&) = default;
  friend auto operator<=>(const SubVector&, const SubVector&) = default;
};

// Finite data domains plus the pattern set; owns the canonical enumeration
// of Y and Omega = Y x R. Immutable.
class ModelSpace {
 public:
  ModelSpace(std::vector<VariableDomain> domains, PatternSet patterns,
             std::size_t max_dim = kMaxDimension)
      : domains_(std::move(domains)), patterns_(std::move(patterns)) {
    if (domains_.empty()) throw ValidationError("model space needs at least one variable");
    if (domains_.size() > max_dim) {
      throw ValidationError("coordinate count " + std::to_string(domains_.size()) +
                            " exceeds the enumeration cap " + std::to_string(max_dim));
    }
    if (patterns_.dim() != domains_.size()) {
      throw DimensionError("pattern length " + std::to_string(patterns_.dim()) +
                           " does not match variable count " + std::to_string(domains_.size()));
    }
    strides_.assign(domains_.size(), 1);
    for (std::size_t i = domains_.size(); i-- > 1;) {
      strides_[i - 1] = strides_[i] * domains_[i].size();
    }
    num_outcomes_ = strides_[0] * domains_[0].size();
  }

  std::size_t dim() const { return domains_.size(); }
  const std::vector<VariableDomain>& domains() const { return domains_; }
  const VariableDomain& domain(std::size_t i) const { return domains_[i]; }
  const PatternSet& patterns() const { return patterns_; }
  std::size_t num_patterns() const { return patterns_.size(); }
  std::size_t num_outcomes() const { return num_outcomes_; }
  std::size_t omega_size() const { return num_outcomes_ * patterns_.size(); }

  bool contains(const Outcome& y) const {
    if (y.values.size() != dim()) return false;
    for (std::size_t i = 0; i < dim(); ++i)
      if (y.values[i] >= domains_[i].size()) return false;
    return true;
  }

  void require_outcome(const Outcome& y) const {
    if (!contains(y)) throw ValidationError("outcome " + render(y) + " is outside the domains");
  }

  // Lexicographic rank with coordinate 0 most significant.
  std::size_t outcome_index(const Outcome& y) const {
    require_outcome(y);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < dim(); ++i) idx += y.values[i] * strides_[i];
    return idx;
  }

  Outcome outcome_at(std::size_t idx) const {
    Outcome y;
    y.values.resize(dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      y.values[i] = idx / strides_[i];
      idx %= strides_[i];
    }
    return y;
  }

  // Position of (y, r_j) in the canonical pattern-major layout.
  std::size_t point_index(std::size_t pattern_idx, std::size_t outcome_idx) const {
    return pattern_idx * num_outcomes_ + outcome_idx;
  }

  // Every value-index tuple over the given coordinates, lexicographic with
  // the leftmost listed coordinate most significant. Empty coordinate list
  // yields exactly one empty tuple.
  std::vector<std::vector<std::size_t>> assignments(const std::vector<std::size_t>& coords) const {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> cur(coords.size(), 0);
    while (true) {
      out.push_back(cur);
      std::size_t i = coords.size();
      while (i > 0) {
        --i;
        if (++cur[i] < domains_[coords[i]].size()) break;
        cur[i] = 0;
        if (i == 0) return out;
      }
      if (coords.empty()) return out;
    }
  }

  // Canonical enumeration of Omega: pattern index major, then lexicographic y.
  std::vector<FullPoint> enumerate_omega() const {
    std::vector<FullPoint> pts;
    pts.reserve(omega_size());
    for (std::size_t j = 0; j < patterns_.size(); ++j) {
      for (std::size_t yi = 0; yi < num_outcomes_; ++yi) {
        pts.push_back(FullPoint{outcome_at(yi), patterns_[j]});
      }
    }
    return pts;
  }

  std::string render(const Outcome& y) const {
    std::string s = "(";
    for (std::size_t i = 0; i < y.values.size(); ++i) {
      if (i) s += ",";
      s += y.values[i] < domains_[i].size() ? domains_[i].label(y.values[i])
                                            : std::to_string(y.values[i]);
    }
    return s + ")";
  }

  std::string render(const SubVector& v) const {
    std::string s = "{";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += "y[" + std::to_string(v.coords[i]) + "]=" + domains_[v.coords[i]].label(v.values[i]);
    }
    return s + "}";
  }

  friend bool operator==(const ModelSpace&, const ModelSpace&) = default;

 private:
  std::vector<VariableDomain> domains_;
  PatternSet patterns_;
  std::vector<std::size_t> strides_;
  std::size_t num_outcomes_ = 0;
};

namespace detail {
inline SubVector select_coords(const Outcome& y, std::vector<std::size_t> coords) {
  SubVector v;
  v.values.reserve(coords.size());
  for (std::size_t c : coords) v.values.push_back(y.values[c]);
  v.coords = std::move(coords);
  return v;
}
}  // namespace detail

// Formal projections: defined on full points only, always consistent with the
// point's own pattern. y^{ob(r)} has length r·r.
inline SubVector project_ob(const FullPoint& p) {
  return detail::select_coords(p.y, p.r.observed_coords());
}

// Dual of project_ob over the unobserved coordinates; length d - r·r.
inline SubVector project_mi(const FullPoint& p) {
  return detail::select_coords(p.y, p.r.missing_coords());
}

// Temporal projections: a fixed extraction pattern applied to any outcome,
// whether or not the outcome is paired with that pattern. This is the
// "observed this time" reading and is deliberately independent of (Y, R).
inline SubVector project_ot(const Outcome& y, const MissingnessPattern& r) {
  if (y.values.size() != r.size()) {
    throw DimensionError("project_ot: outcome has " + std::to_string(y.values.size()) +
                         " coordinates, pattern has " + std::to_string(r.size()));
  }
  return detail::select_coords(y, r.observed_coords());
}

inline SubVector project_mt(const Outcome& y, const MissingnessPattern& r) {
  if (y.values.size() != r.size()) {
    throw DimensionError("project_mt: outcome has " + std::to_string(y.values.size()) +
                         " coordinates, pattern has " + std::to_string(r.size()));
  }
  return detail::select_coords(y, r.missing_coords());
}

// Inverse of the coordinate shuffle: rebuilds the outcome from complementary
// sub-vectors. The two coordinate lists must partition 0..dim-1.
inline Outcome reassemble(const SubVector& a, const SubVector& b, std::size_t dim) {
  if (a.size() + b.size() != dim) {
    throw DimensionError("reassemble: sub-vectors cover " + std::to_string(a.size() + b.size()) +
                         " of " + std::to_string(dim) + " coordinates");
  }
  Outcome y;
  y.values.assign(dim, static_cast<std::size_t>(-1));
  std::vector<bool> seen(dim, false);
  for (const SubVector* v : {&a, &b}) {
    for (std::size_t i = 0; i < v->size(); ++i) {
      const std::size_t c = v->coords[i];
      if (c >= dim || seen[c]) {
        throw DimensionError("reassemble: coordinate " + std::to_string(c) +
                             " repeated or out of range");
      }
      seen[c] = true;
      y.values[c] = v->values[i];
    }
  }
  return y;
}

// Omega_{(y,r)}: every full point sharing the observed values of (y, r).
// Members are listed in canonical outcome order and include the seed point.
struct ObservedDataEvent {
  SubVector observed;
  MissingnessPattern pattern;
  std::size_t pattern_index = 0;
  std::vector<FullPoint> members;
};

inline ObservedDataEvent observed_event(const ModelSpace& ms, const FullPoint& p) {
  ms.require_outcome(p.y);
  auto j = ms.patterns().index_of(p.r);
  if (!j) throw ValidationError("pattern \"" + p.r.to_string() + "\" is not in the model");
  const auto mi = p.r.missing_coords();
  std::vector<FullPoint> members;
  for (const auto& asg : ms.assignments(mi)) {
    Outcome y = p.y;
    for (std::size_t i = 0; i < mi.size(); ++i) y.values[mi[i]] = asg[i];
    members.push_back(FullPoint{std::move(y), p.r});
  }
  return ObservedDataEvent{project_ob(p), p.r, *j, std::move(members)};
}

// The events of one pattern, pairwise disjoint, covering Omega_r; ordered by
// ascending observed assignment.
inline std::vector<ObservedDataEvent> event_partition(const ModelSpace& ms,
                                                      const MissingnessPattern& r) {
  auto j = ms.patterns().index_of(r);
  if (!j) throw ValidationError("pattern \"" + r.to_string() + "\" is not in the model");
  std::vector<ObservedDataEvent> events;
  const auto ob = r.observed_coords();
  for (const auto& asg : ms.assignments(ob)) {
    Outcome y;
    y.values.assign(ms.dim(), 0);
    for (std::size_t i = 0; i < ob.size(); ++i) y.values[ob[i]] = asg[i];
    events.push_back(observed_event(ms, FullPoint{std::move(y), r}));
  }
  return events;
}

// A point of Omega_ob. Keyed by (pattern index, observed sub-vector): points
// from different patterns stay distinct even when their sub-vectors coincide.
struct ObPoint {
  std::size_t pattern_index = 0;
  SubVector observed;

  friend bool operator==(const ObPoint&, const ObPoint&) = default;
  friend auto operator<=>(const ObPoint&, const ObPoint&) = default;
};

// Canonical enumeration of the (irregularly shaped) observable sample space.
inline std::vector<ObPoint> enumerate_omega_ob(const ModelSpace& ms) {
  std::vector<ObPoint> pts;
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    const auto ob = ms.patterns()[j].observed_coords();
    for (const auto& asg : ms.assignments(ob)) {
      pts.push_back(ObPoint{j, SubVector{ob, asg}});
    }
  }
  return pts;
}

}  // namespace missem
