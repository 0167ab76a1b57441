#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "missem/error.hpp"
#include "missem/space.hpp"
#include "missem/version.hpp"

namespace missem {

namespace detail {
inline void append_violation(std::string& msg, const std::string& line) {
  if (!msg.empty()) msg += "; ";
  msg += line;
}
}  // namespace detail

// Full probability table h on Omega, pattern-major. Entries are nonnegative
// and sum to one within tolerance; the table covers Omega exactly.
class FullDensity {
 public:
  FullDensity(ModelSpace space, std::vector<double> table, double tol = kDefaultTolerance)
      : space_(std::move(space)), table_(std::move(table)) {
    std::string bad;
    if (table_.size() != space_.omega_size()) {
      throw ValidationError("density table has " + std::to_string(table_.size()) +
                            " entries; Omega has " + std::to_string(space_.omega_size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < table_.size(); ++i) {
      if (table_[i] < 0.0 || !std::isfinite(table_[i])) {
        detail::append_violation(bad, "h" + render_point(i) + " = " + std::to_string(table_[i]));
      }
      total += table_[i];
    }
    if (std::abs(total - 1.0) > tol) {
      detail::append_violation(bad, "total mass " + std::to_string(total) + " is not 1");
    }
    if (!bad.empty()) throw ValidationError("invalid full density: " + bad);
  }

  const ModelSpace& space() const { return space_; }
  const std::vector<double>& table() const { return table_; }

  double prob(std::size_t pattern_idx, std::size_t outcome_idx) const {
    return table_[space_.point_index(pattern_idx, outcome_idx)];
  }

  double prob(const FullPoint& p) const {
    auto j = space_.patterns().index_of(p.r);
    if (!j) throw ValidationError("pattern \"" + p.r.to_string() + "\" is not in the model");
    return prob(*j, space_.outcome_index(p.y));
  }

  double event_mass(const ObservedDataEvent& e) const {
    double m = 0.0;
    for (const auto& p : e.members) m += prob(e.pattern_index, space_.outcome_index(p.y));
    return m;
  }

  // p(r_j): pattern marginal.
  double pattern_marginal(std::size_t j) const {
    double m = 0.0;
    for (std::size_t yi = 0; yi < space_.num_outcomes(); ++yi) m += prob(j, yi);
    return m;
  }

 private:
  std::string render_point(std::size_t idx) const {
    const std::size_t j = idx / space_.num_outcomes();
    const std::size_t yi = idx % space_.num_outcomes();
    return "(" + space_.render(space_.outcome_at(yi)) + ", " + space_.patterns()[j].to_string() +
           ")";
  }

  ModelSpace space_;
  std::vector<double> table_;
};

// Selection-model factors: marginal f(y) and missingness mechanism g(r|y),
// laid out as f[yi] and g[yi * k + j].
class SelectionModel {
 public:
  SelectionModel(ModelSpace space, std::vector<double> f, std::vector<double> g,
                 double tol = kDefaultTolerance)
      : space_(std::move(space)), f_(std::move(f)), g_(std::move(g)) {
    const std::size_t n = space_.num_outcomes();
    const std::size_t k = space_.num_patterns();
    if (f_.size() != n) {
      throw ValidationError("f has " + std::to_string(f_.size()) + " entries; |Y| = " +
                            std::to_string(n));
    }
    if (g_.size() != n * k) {
      throw ValidationError("g has " + std::to_string(g_.size()) + " entries; need " +
                            std::to_string(n * k));
    }
    std::string bad;
    double fsum = 0.0;
    for (std::size_t yi = 0; yi < n; ++yi) {
      if (f_[yi] < 0.0 || !std::isfinite(f_[yi])) {
        detail::append_violation(bad, "f" + space_.render(space_.outcome_at(yi)) + " = " +
                                          std::to_string(f_[yi]));
      }
      fsum += f_[yi];
    }
    if (std::abs(fsum - 1.0) > tol) {
      detail::append_violation(bad, "f sums to " + std::to_string(fsum));
    }
    for (std::size_t yi = 0; yi < n; ++yi) {
      double row = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        const double v = g_[yi * k + j];
        if (v < 0.0 || v > 1.0 || !std::isfinite(v)) {
          detail::append_violation(bad, "g(" + space_.patterns()[j].to_string() + " | " +
                                            space_.render(space_.outcome_at(yi)) + ") = " +
                                            std::to_string(v));
        }
        row += v;
      }
      if (std::abs(row - 1.0) > tol) {
        detail::append_violation(bad, "g row for y=" + space_.render(space_.outcome_at(yi)) +
                                          " sums to " + std::to_string(row));
      }
    }
    if (!bad.empty()) throw ValidationError("invalid selection model: " + bad);
  }

  const ModelSpace& space() const { return space_; }
  const std::vector<double>& f() const { return f_; }
  const std::vector<double>& g() const { return g_; }
  double f_at(std::size_t outcome_idx) const { return f_[outcome_idx]; }
  double g_at(std::size_t outcome_idx, std::size_t pattern_idx) const {
    return g_[outcome_idx * space_.num_patterns() + pattern_idx];
  }

 private:
  ModelSpace space_;
  std::vector<double> f_;
  std::vector<double> g_;
};

// Pattern-mixture factors: p(r) and one component p(y|r) per pattern with
// positive probability. Zero-probability components are omitted, and each
// omission is noted in warnings().
class PatternMixture {
 public:
  PatternMixture(ModelSpace space, std::vector<double> pr,
                 std::vector<std::vector<double>> py_given_r, double tol = kDefaultTolerance)
      : space_(std::move(space)), pr_(std::move(pr)), py_given_r_(std::move(py_given_r)) {
    const std::size_t n = space_.num_outcomes();
    const std::size_t k = space_.num_patterns();
    if (pr_.size() != k) {
      throw ValidationError("p(r) has " + std::to_string(pr_.size()) + " entries; k = " +
                            std::to_string(k));
    }
    if (py_given_r_.size() != k) {
      throw ValidationError("pattern-mixture needs one component slot per pattern");
    }
    std::string bad;
    double prsum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double w = pr_[j];
      if (w < 0.0 || !std::isfinite(w)) {
        detail::append_violation(bad,
                                 "p(" + space_.patterns()[j].to_string() + ") = " + std::to_string(w));
      }
      prsum += w;
      if (w == 0.0) {
        if (!py_given_r_[j].empty()) {
          detail::append_violation(bad, "component for zero-probability pattern " +
                                            space_.patterns()[j].to_string() + " must be omitted");
        }
        warnings_.push_back("pattern " + space_.patterns()[j].to_string() +
                            " has zero probability; its mixture component is omitted");
        continue;
      }
      if (py_given_r_[j].size() != n) {
        detail::append_violation(bad, "component for pattern " + space_.patterns()[j].to_string() +
                                          " has " + std::to_string(py_given_r_[j].size()) +
                                          " entries; |Y| = " + std::to_string(n));
        continue;
      }
      double csum = 0.0;
      for (std::size_t yi = 0; yi < n; ++yi) {
        const double v = py_given_r_[j][yi];
        if (v < 0.0 || !std::isfinite(v)) {
          detail::append_violation(bad, "p(" + space_.render(space_.outcome_at(yi)) + " | " +
                                            space_.patterns()[j].to_string() + ") = " +
                                            std::to_string(v));
        }
        csum += v;
      }
      if (std::abs(csum - 1.0) > tol) {
        detail::append_violation(bad, "component for pattern " + space_.patterns()[j].to_string() +
                                          " sums to " + std::to_string(csum));
      }
    }
    if (std::abs(prsum - 1.0) > tol) {
      detail::append_violation(bad, "p(r) sums to " + std::to_string(prsum));
    }
    if (!bad.empty()) throw ValidationError("invalid pattern mixture: " + bad);
  }

  const ModelSpace& space() const { return space_; }
  const std::vector<double>& pr() const { return pr_; }
  bool has_component(std::size_t j) const { return pr_[j] > 0.0; }
  const std::vector<double>& component(std::size_t j) const {
    if (!has_component(j)) {
      throw UndefinedConditionalError("pattern " + space_.patterns()[j].to_string() +
                                      " has zero probability; p(y|r) is undefined");
    }
    return py_given_r_[j];
  }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  ModelSpace space_;
  std::vector<double> pr_;
  std::vector<std::vector<double>> py_given_r_;
  std::vector<std::string> warnings_;
};

// A finite family of full densities over one shared space; the labels stand
// in for parameter values.
class ModelFamily {
 public:
  explicit ModelFamily(std::vector<std::pair<std::string, FullDensity>> members)
      : members_(std::move(members)) {
    if (members_.empty()) throw ValidationError("model family must be non-empty");
    for (const auto& [label, h] : members_) {
      if (!(h.space() == members_.front().second.space())) {
        throw ValidationError("family member \"" + label + "\" uses a different model space");
      }
    }
  }

  std::size_t size() const { return members_.size(); }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  const ModelSpace& space() const { return members_.front().second.space(); }

 private:
  std::vector<std::pair<std::string, FullDensity>> members_;
};

// h(y,r) = f(y) g(r|y).
inline FullDensity compose_selection(const SelectionModel& sm, double tol = kDefaultTolerance) {
  const ModelSpace& ms = sm.space();
  std::vector<double> table(ms.omega_size());
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
      table[ms.point_index(j, yi)] = sm.f_at(yi) * sm.g_at(yi, j);
    }
  }
  return FullDensity(ms, std::move(table), tol);
}

// h(y,r) = p(r) p(y|r); zero wherever p(r) = 0.
inline FullDensity compose_pattern_mixture(const PatternMixture& pm,
                                           double tol = kDefaultTolerance) {
  const ModelSpace& ms = pm.space();
  std::vector<double> table(ms.omega_size(), 0.0);
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    if (!pm.has_component(j)) continue;
    const auto& comp = pm.component(j);
    for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
      table[ms.point_index(j, yi)] = pm.pr()[j] * comp[yi];
    }
  }
  return FullDensity(ms, std::move(table), tol);
}

// f(y) = sum_r h(y, r); equivalently the mixture of the pattern-mixture
// components weighted by p(r).
inline std::vector<double> marginal_f(const FullDensity& h) {
  const ModelSpace& ms = h.space();
  std::vector<double> f(ms.num_outcomes(), 0.0);
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) f[yi] += h.prob(j, yi);
  }
  return f;
}

// f(y) = sum_r h(y,r), g(r|y) = h(y,r)/f(y). Every marginal used as a divisor
// must be positive; the error names the first offending outcomes.
inline SelectionModel factor_selection(const FullDensity& h, double tol = kDefaultTolerance) {
  const ModelSpace& ms = h.space();
  auto f = marginal_f(h);
  std::string bad;
  for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
    if (f[yi] <= 0.0) {
      detail::append_violation(bad, "f" + ms.render(ms.outcome_at(yi)) + " = 0");
    }
  }
  if (!bad.empty()) {
    throw UndefinedConditionalError("mechanism undefined where the data marginal vanishes: " + bad);
  }
  std::vector<double> g(ms.omega_size());
  for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
    for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
      g[yi * ms.num_patterns() + j] = h.prob(j, yi) / f[yi];
    }
  }
  return SelectionModel(ms, std::move(f), std::move(g), tol);
}

// p(r) = sum_y h(y,r), p(y|r) = h(y,r)/p(r) where p(r) > 0; components of
// zero-probability patterns are omitted (the mixture records a warning).
inline PatternMixture factor_pattern_mixture(const FullDensity& h, double tol = kDefaultTolerance) {
  const ModelSpace& ms = h.space();
  std::vector<double> pr(ms.num_patterns());
  std::vector<std::vector<double>> comps(ms.num_patterns());
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    pr[j] = h.pattern_marginal(j);
    if (pr[j] <= 0.0) {
      pr[j] = 0.0;
      continue;
    }
    comps[j].resize(ms.num_outcomes());
    for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) comps[j][yi] = h.prob(j, yi) / pr[j];
  }
  return PatternMixture(ms, std::move(pr), std::move(comps), tol);
}

// Density of the observable data: one probability per point of Omega_ob, in
// canonical enumeration order.
class ObservedDensity {
 public:
  ObservedDensity(ModelSpace space, std::vector<ObPoint> points, std::vector<double> prob)
      : space_(std::move(space)), points_(std::move(points)), prob_(std::move(prob)) {
    if (points_.size() != prob_.size()) {
      throw ValidationError("observable density: point/probability size mismatch");
    }
    pattern_offset_.assign(space_.num_patterns() + 1, 0);
    for (const auto& pt : points_) pattern_offset_[pt.pattern_index + 1]++;
    for (std::size_t j = 0; j < space_.num_patterns(); ++j) {
      pattern_offset_[j + 1] += pattern_offset_[j];
    }
  }

  const ModelSpace& space() const { return space_; }
  const std::vector<ObPoint>& points() const { return points_; }
  const std::vector<double>& prob() const { return prob_; }

  double total_mass() const {
    double m = 0.0;
    for (double p : prob_) m += p;
    return m;
  }

  // Probability at (observed sub-vector, pattern). The sub-vector's
  // coordinates must be the pattern's observed coordinates.
  double prob_at(std::size_t pattern_index, const SubVector& v) const {
    const auto& r = space_.patterns()[pattern_index];
    const auto ob = r.observed_coords();
    if (v.coords != ob) {
      throw DimensionError("observable point keyed by foreign coordinates for pattern " +
                           r.to_string());
    }
    std::size_t rank = 0;
    for (std::size_t i = 0; i < ob.size(); ++i) {
      rank = rank * space_.domain(ob[i]).size() + v.values[i];
    }
    return prob_[pattern_offset_[pattern_index] + rank];
  }

 private:
  ModelSpace space_;
  std::vector<ObPoint> points_;
  std::vector<double> prob_;
  std::vector<std::size_t> pattern_offset_;
};

// h(y^{ob(r)}, r): sums h over each observed data event. Total mass 1.
inline ObservedDensity observed_data_density(const FullDensity& h) {
  const ModelSpace& ms = h.space();
  auto points = enumerate_omega_ob(ms);
  std::vector<double> prob;
  prob.reserve(points.size());
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    for (const auto& e : event_partition(ms, ms.patterns()[j])) {
      prob.push_back(h.event_mass(e));
    }
  }
  return ObservedDensity(ms, std::move(points), std::move(prob));
}

// Where a conditional's realisations live: the range of the data projection
// (a marginal-world object) or inside a fixed observed data event of Omega.
// The tag keeps the two same-valued conditionals mechanically distinct.
enum class ConditionalDomain { kRangeOfProjection, kEventInOmega };

inline std::string_view to_string(ConditionalDomain d) {
  return d == ConditionalDomain::kRangeOfProjection ? "range-of-pi_Y" : "event-in-Omega";
}

// f(y^{mt(r)} | y^{ot(r)}): conditional of the data marginal under a fixed
// extraction pattern. Lives on Y; updates drawn from it are bare value
// tuples, not completed triples.
struct TemporalConditional {
  ConditionalDomain domain = ConditionalDomain::kRangeOfProjection;
  MissingnessPattern extraction;
  SubVector given;                 // conditioning ot-values
  std::vector<SubVector> support;  // mt-assignments, canonical order
  std::vector<double> prob;
};

// f(y^{mi(r)} | y^{ob(r)}): the same values, but distributed over the members
// of an observed data event; every realisation is a completed triple whose
// pattern never changes.
struct FormalConditional {
  ConditionalDomain domain = ConditionalDomain::kEventInOmega;
  ObservedDataEvent event;
  std::vector<double> prob;  // parallel to event.members
};

inline TemporalConditional f_T_conditional(const std::vector<double>& f, const ModelSpace& ms,
                                           const MissingnessPattern& r, const SubVector& ot_values) {
  if (r.size() != ms.dim()) {
    throw DimensionError("f_T_conditional: pattern length " + std::to_string(r.size()) +
                         " does not match the space");
  }
  if (ot_values.coords != r.observed_coords()) {
    throw DimensionError("f_T_conditional: conditioning values must cover the extraction "
                         "pattern's observed coordinates");
  }
  const auto mt = r.missing_coords();
  Outcome y;
  y.values.assign(ms.dim(), 0);
  for (std::size_t i = 0; i < ot_values.size(); ++i) {
    y.values[ot_values.coords[i]] = ot_values.values[i];
  }
  double mass = 0.0;
  std::vector<double> prob;
  std::vector<SubVector> support;
  for (const auto& asg : ms.assignments(mt)) {
    for (std::size_t i = 0; i < mt.size(); ++i) y.values[mt[i]] = asg[i];
    const double v = f[ms.outcome_index(y)];
    prob.push_back(v);
    mass += v;
    support.push_back(SubVector{mt, asg});
  }
  if (mass <= 0.0) {
    throw UndefinedConditionalError("f(y^{ot}) = 0 at " + ms.render(ot_values) +
                                    "; temporal conditional undefined");
  }
  for (double& v : prob) v /= mass;
  return TemporalConditional{ConditionalDomain::kRangeOfProjection, r, ot_values,
                             std::move(support), std::move(prob)};
}

inline FormalConditional f_F_conditional(const std::vector<double>& f, const ModelSpace& ms,
                                         const ObservedDataEvent& e) {
  double mass = 0.0;
  std::vector<double> joint;
  joint.reserve(e.members.size());
  for (const auto& p : e.members) {
    const double v = f[ms.outcome_index(p.y)];
    joint.push_back(v);
    mass += v;
  }
  if (mass <= 0.0) {
    throw UndefinedConditionalError("event " + ms.render(e.observed) + " under pattern " +
                                    e.pattern.to_string() + " carries no marginal mass");
  }
  for (double& v : joint) v /= mass;
  return FormalConditional{ConditionalDomain::kEventInOmega, e, std::move(joint)};
}

// p(y^{mi(r)} | y^{ob(r)}, r): the full-density conditional over an event's
// members. Requires positive event probability.
inline std::vector<double> p_mi_given_ob_r(const FullDensity& h, const ObservedDataEvent& e) {
  const double mass = h.event_mass(e);
  if (mass <= 0.0) {
    throw UndefinedConditionalError("event " + h.space().render(e.observed) + " under pattern " +
                                    e.pattern.to_string() + " has zero probability");
  }
  std::vector<double> out;
  out.reserve(e.members.size());
  for (const auto& p : e.members) {
    out.push_back(h.prob(e.pattern_index, h.space().outcome_index(p.y)) / mass);
  }
  return out;
}

// MAR with respect to one event: the mechanism value for the event's pattern
// is constant across the event's members.
inline bool is_mar_at(const ModelSpace& ms, const std::vector<double>& g,
                      const ObservedDataEvent& e, double tol = kDefaultTolerance) {
  const std::size_t k = ms.num_patterns();
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (const auto& p : e.members) {
    const double v = g[ms.outcome_index(p.y) * k + e.pattern_index];
    if (first) {
      lo = hi = v;
      first = false;
    } else {
      if (v < lo) lo = v;
      if (v > hi) hi = v;
    }
  }
  return hi - lo <= tol;
}

// Everywhere MAR over a finite family: constancy on every observed data event
// of every pattern, for every member. Mechanism values are taken where the
// member's data marginal is positive; events with no such member are vacuous.
inline bool is_mar_everywhere(const ModelFamily& fam, double tol = kDefaultTolerance) {
  const ModelSpace& ms = fam.space();
  const std::size_t k = ms.num_patterns();
  for (const auto& [label, h] : fam) {
    auto f = marginal_f(h);
    for (std::size_t j = 0; j < k; ++j) {
      for (const auto& e : event_partition(ms, ms.patterns()[j])) {
        double lo = 0.0, hi = 0.0;
        bool first = true;
        for (const auto& p : e.members) {
          const std::size_t yi = ms.outcome_index(p.y);
          if (f[yi] <= 0.0) continue;
          const double v = h.prob(j, yi) / f[yi];
          if (first) {
            lo = hi = v;
            first = false;
          } else {
            if (v < lo) lo = v;
            if (v > hi) hi = v;
          }
        }
        if (!first && hi - lo > tol) return false;
      }
    }
  }
  return true;
}

}  // namespace missem
