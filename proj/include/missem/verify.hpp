#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "missem/density.hpp"
#include "missem/space.hpp"

namespace missem {

struct Witness {
  std::string location;
  double lhs = 0.0;
  double rhs = 0.0;
};

// Outcome of one executable identity check. Deviations are reported even when
// they stay inside tolerance, so near-violations remain visible.
struct IdentityReport {
  std::string identity;
  bool applicable = true;  // preconditions held
  bool pass = false;
  double max_abs_deviation = 0.0;
  std::vector<Witness> witnesses;    // locations whose deviation exceeded tolerance
  std::vector<std::string> notes;    // skipped steps, omitted components, context
};

namespace detail {

inline void check(IdentityReport& rep, double tol, std::string location, double lhs, double rhs) {
  const double dev = std::abs(lhs - rhs);
  if (dev > rep.max_abs_deviation) rep.max_abs_deviation = dev;
  if (dev > tol) rep.witnesses.push_back(Witness{std::move(location), lhs, rhs});
}

inline void finalize(IdentityReport& rep, double tol) {
  rep.pass = rep.applicable && rep.max_abs_deviation <= tol;
}

inline std::string event_label(const ModelSpace& ms, const ObservedDataEvent& e) {
  return "event(r=" + e.pattern.to_string() + ", ob=" + ms.render(e.observed) + ")";
}

}  // namespace detail

// The observable-data density computed four ways:
//   event-sum:                  sum of h over each observed data event;
//   selection-integral:         integrate f(y) g(r|y) over the missing coordinates;
//   restrict-then-marginalize:  p(r_j) times the component marginal on Omega_j;
//   marginalize-then-restrict:  per-extraction-pattern marginal tables of h over
//                               all of Omega, compared on their own Omega_j slice only.
// All four agree pointwise on Omega_ob for any full density, MAR or not.
inline IdentityReport verify_obs_density_paths(const FullDensity& h,
                                               double tol = kDefaultTolerance) {
  IdentityReport rep;
  rep.identity = "obs-density-paths";
  const ModelSpace& ms = h.space();
  const std::size_t k = ms.num_patterns();
  const auto obd = observed_data_density(h);
  const auto f = marginal_f(h);
  const auto pm = factor_pattern_mixture(h);
  for (const auto& w : pm.warnings()) rep.notes.push_back(w);

  // mechanism, taken as 0 where the marginal vanishes (h vanishes there too)
  std::vector<double> g(ms.omega_size(), 0.0);
  for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
    if (f[yi] <= 0.0) continue;
    for (std::size_t j = 0; j < k; ++j) g[yi * k + j] = h.prob(j, yi) / f[yi];
  }

  std::size_t pt = 0;
  for (std::size_t j = 0; j < k; ++j) {
    for (const auto& e : event_partition(ms, ms.patterns()[j])) {
      const double reference = obd.prob()[pt];
      double sel = 0.0;
      double restr = 0.0;
      for (const auto& p : e.members) {
        const std::size_t yi = ms.outcome_index(p.y);
        sel += f[yi] * g[yi * k + j];
        if (pm.has_component(j)) restr += pm.pr()[j] * pm.component(j)[yi];
      }
      const std::string at = detail::event_label(ms, e);
      detail::check(rep, tol, "selection-integral@" + at, sel, reference);
      detail::check(rep, tol, "restrict-then-marginalize@" + at, restr, reference);
      ++pt;
    }
  }

  // marginalize-then-restrict: for each extraction pattern r_j, the marginal
  // table of h over Y^{ot(r_j)} x R, checked against p(r) times the component
  // slice everywhere, then against the final density on the Omega_j slice.
  for (std::size_t j = 0; j < k; ++j) {
    const auto ot = ms.patterns()[j].observed_coords();
    const auto mt = ms.patterns()[j].missing_coords();
    for (const auto& asg : ms.assignments(ot)) {
      Outcome y;
      y.values.assign(ms.dim(), 0);
      for (std::size_t i = 0; i < ot.size(); ++i) y.values[ot[i]] = asg[i];
      std::vector<double> slice_by_pattern(k, 0.0);
      for (const auto& masg : ms.assignments(mt)) {
        for (std::size_t i = 0; i < mt.size(); ++i) y.values[mt[i]] = masg[i];
        const std::size_t yi = ms.outcome_index(y);
        for (std::size_t r = 0; r < k; ++r) slice_by_pattern[r] += h.prob(r, yi);
      }
      const SubVector v{ot, asg};
      for (std::size_t r = 0; r < k; ++r) {
        double viaComponents = 0.0;
        if (pm.has_component(r)) {
          Outcome z;
          z.values.assign(ms.dim(), 0);
          for (std::size_t i = 0; i < ot.size(); ++i) z.values[ot[i]] = asg[i];
          for (const auto& masg : ms.assignments(mt)) {
            for (std::size_t i = 0; i < mt.size(); ++i) z.values[mt[i]] = masg[i];
            viaComponents += pm.component(r)[ms.outcome_index(z)];
          }
          viaComponents *= pm.pr()[r];
        }
        detail::check(rep, tol,
                      "marginalize-then-restrict@(ot=" + ms.patterns()[j].to_string() + ", " +
                          ms.render(v) + ", r=" + ms.patterns()[r].to_string() + ")",
                      slice_by_pattern[r], viaComponents);
      }
      detail::check(rep, tol,
                    "marginalize-then-restrict-slice@(" + ms.render(v) + ", r=" +
                        ms.patterns()[j].to_string() + ")",
                    slice_by_pattern[j], obd.prob_at(j, v));
    }
  }

  detail::check(rep, tol, "total-mass", obd.total_mass(), 1.0);
  detail::finalize(rep, tol);
  return rep;
}

// The conditional-density derivation chain at one observed data event:
//   factorization-agreement:  p(r) p(y|r) = f(y) g(r|y) at each member;
//   conditional-ratio:        p(y^mi|y^ob, r) written as the ratio of the
//                             formal conditional, the observed marginal and
//                             the mechanism over p(r) p(y^ob|r);
//   observed-component:       p(y^ob|r) = f(y^ob) g(r|y) / p(r);
//   mar-conditional:          p(y^mi|y^ob, r) = f(y^mi|y^ob).
// The last two hold when the mechanism is constant on the event; they are
// evaluated regardless so MNAR models surface their deviation.
inline IdentityReport verify_mar_identity(const FullDensity& h, const ObservedDataEvent& e,
                                          double tol = kDefaultTolerance) {
  IdentityReport rep;
  rep.identity = "mar-conditional-chain";
  const ModelSpace& ms = h.space();
  const std::size_t k = ms.num_patterns();
  const double mass = h.event_mass(e);
  if (mass <= 0.0) {
    rep.applicable = false;
    rep.notes.push_back("event has zero probability; conditional chain skipped");
    return rep;
  }
  const auto f = marginal_f(h);
  const auto pm = factor_pattern_mixture(h);
  const double p_r = pm.pr()[e.pattern_index];
  const double p_ob_r = mass / p_r;
  const auto fF = f_F_conditional(f, ms, e);
  const auto cond = p_mi_given_ob_r(h, e);
  double f_ob = 0.0;
  for (const auto& p : e.members) f_ob += f[ms.outcome_index(p.y)];

  const std::string at = detail::event_label(ms, e);
  const bool mar_here = is_mar_at(ms, [&] {
    std::vector<double> g(ms.omega_size(), 0.0);
    for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
      if (f[yi] <= 0.0) continue;
      for (std::size_t j = 0; j < k; ++j) g[yi * k + j] = h.prob(j, yi) / f[yi];
    }
    return g;
  }(), e, tol);
  if (!mar_here) {
    rep.notes.push_back("mechanism is not constant on " + at +
                        "; the two final steps are expected to deviate");
  }

  for (std::size_t i = 0; i < e.members.size(); ++i) {
    const auto& p = e.members[i];
    const std::size_t yi = ms.outcome_index(p.y);
    const std::string member = ms.render(p.y);
    double g_val = 0.0;
    if (f[yi] > 0.0) {
      g_val = h.prob(e.pattern_index, yi) / f[yi];
    } else {
      rep.notes.push_back("mechanism undefined at " + member + " (f = 0); g taken as 0");
    }
    const double viaMixture = pm.has_component(e.pattern_index)
                                  ? pm.pr()[e.pattern_index] * pm.component(e.pattern_index)[yi]
                                  : 0.0;
    detail::check(rep, tol, "factorization-agreement@" + member, viaMixture, f[yi] * g_val);
    detail::check(rep, tol, "conditional-ratio@" + member, cond[i],
                  fF.prob[i] * f_ob * g_val / (p_r * p_ob_r));
    if (f[yi] > 0.0) {
      detail::check(rep, tol, "observed-component@" + member, p_ob_r, f_ob * g_val / p_r);
    }
    detail::check(rep, tol, "mar-conditional@" + member, cond[i], fF.prob[i]);
  }
  detail::finalize(rep, tol);
  return rep;
}

// How one mixture component relates to a fixed extraction pattern r under the
// coordinatewise partial order.
struct ComponentClassification {
  std::size_t pattern_index = 0;
  bool mt_all_formally_missing = false;   // r_j <=_p r
  bool ot_all_formally_observed = false;  // r <=_p r_j
  bool fully_consistent = false;          // r_j == r
};

struct MixtureClassification {
  std::vector<ComponentClassification> components;
  // whether the ot (resp. mt) block, taken across all components, mixes
  // formally observable and formally unobservable data
  bool ot_mixes_observability = false;
  bool mt_mixes_observability = false;
};

// Classifies every mixture component against the extraction pattern r. With
// at least two patterns, anti-symmetry forces at least one of the two blocks
// to mix observability; exactly one component is fully consistent.
inline MixtureClassification classify_mixture_components(const ModelSpace& ms,
                                                         const MissingnessPattern& r) {
  if (!ms.patterns().contains(r)) {
    throw ValidationError("pattern \"" + r.to_string() + "\" is not in the model");
  }
  MixtureClassification out;
  std::size_t consistent = 0;
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    const auto& rj = ms.patterns()[j];
    ComponentClassification c;
    c.pattern_index = j;
    c.mt_all_formally_missing = leq_p(rj, r);
    c.ot_all_formally_observed = leq_p(r, rj);
    c.fully_consistent = (rj == r);
    if (c.fully_consistent) ++consistent;
    if (!c.ot_all_formally_observed) out.ot_mixes_observability = true;
    if (!c.mt_all_formally_missing) out.mt_mixes_observability = true;
    out.components.push_back(c);
  }
  if (consistent != 1) {
    throw std::logic_error("mixture classification found " + std::to_string(consistent) +
                           " fully consistent components");
  }
  if (ms.num_patterns() >= 2 && !out.ot_mixes_observability && !out.mt_mixes_observability) {
    throw std::logic_error("mixture classification: two distinct patterns compared equal");
  }
  return out;
}

namespace detail {

// Temporal conditional of one mixture component under a fixed extraction
// pattern: the component table conditioned on the event's retained
// coordinates, evaluated at each event member.
struct ForeignConditional {
  std::size_t pattern_index = 0;
  double weight_prior = 0.0;       // p(r_j)
  double slice_mass = 0.0;         // p(y^{ot(r)} | r_j)
  std::vector<double> cond;        // parallel to event members
};

inline std::optional<std::vector<ForeignConditional>> foreign_conditionals(
    const PatternMixture& pm, const ObservedDataEvent& e, IdentityReport& rep) {
  const ModelSpace& ms = pm.space();
  std::vector<ForeignConditional> out;
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    if (j == e.pattern_index || !pm.has_component(j)) continue;
    ForeignConditional fc;
    fc.pattern_index = j;
    fc.weight_prior = pm.pr()[j];
    const auto& comp = pm.component(j);
    for (const auto& p : e.members) fc.slice_mass += comp[ms.outcome_index(p.y)];
    if (fc.slice_mass <= 0.0) {
      rep.applicable = false;
      rep.notes.push_back("component " + ms.patterns()[j].to_string() +
                          " puts no mass on the retained coordinates; conditional undefined");
      return std::nullopt;
    }
    for (const auto& p : e.members) {
      fc.cond.push_back(comp[ms.outcome_index(p.y)] / fc.slice_mass);
    }
    out.push_back(std::move(fc));
  }
  return out;
}

inline IdentityReport verify_marginal_removed_impl(const FullDensity& h,
                                                   const ObservedDataEvent& e, double tol,
                                                   bool reweight) {
  IdentityReport rep;
  rep.identity = reweight ? "marginal-removed-reweighted" : "marginal-removed";
  const ModelSpace& ms = h.space();
  const double mass = h.event_mass(e);
  if (mass <= 0.0) {
    rep.applicable = false;
    rep.notes.push_back("event has zero probability");
    return rep;
  }
  const auto f = marginal_f(h);
  const auto pm = factor_pattern_mixture(h);
  for (const auto& w : pm.warnings()) rep.notes.push_back(w);
  const double p_r = pm.pr()[e.pattern_index];
  if (p_r >= 1.0 - tol) {
    rep.applicable = false;
    rep.notes.push_back("p(r) = 1: the event's pattern carries all mass; decomposition inapplicable");
    return rep;
  }
  {
    std::vector<double> g(ms.omega_size(), 0.0);
    const std::size_t k = ms.num_patterns();
    for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
      if (f[yi] <= 0.0) continue;
      for (std::size_t j = 0; j < k; ++j) g[yi * k + j] = h.prob(j, yi) / f[yi];
    }
    if (!is_mar_at(ms, g, e, tol)) {
      rep.applicable = false;
      rep.notes.push_back("mechanism is not constant on " + detail::event_label(ms, e));
      return rep;
    }
  }

  const auto cond = p_mi_given_ob_r(h, e);
  const auto fT = f_T_conditional(f, ms, e.pattern, e.observed);
  // member order and temporal support share the same assignment enumeration
  if (fT.prob.size() != e.members.size()) {
    throw std::logic_error("temporal support does not match event members");
  }
  auto foreign = foreign_conditionals(pm, e, rep);
  if (!foreign) return rep;
  if (foreign->empty()) {
    rep.applicable = false;
    rep.notes.push_back("no foreign components carry mass; decomposition inapplicable");
    return rep;
  }

  double f_slice = 0.0;
  for (const auto& p : e.members) f_slice += f[ms.outcome_index(p.y)];

  // own-component weight and foreign weights; with reweighting the component
  // weights are conditioned on the retained coordinates
  double own_w = p_r;
  double foreign_total = 1.0 - p_r;
  std::vector<double> weights;
  for (const auto& fc : *foreign) weights.push_back(fc.weight_prior);
  if (reweight) {
    own_w = p_r * (mass / p_r) / f_slice;  // p(r) p(y^ob|r) / f(y^ot)
    foreign_total = 0.0;
    for (std::size_t i = 0; i < foreign->size(); ++i) {
      weights[i] = (*foreign)[i].weight_prior * (*foreign)[i].slice_mass / f_slice;
      foreign_total += weights[i];
    }
    if (foreign_total <= 0.0) {
      rep.applicable = false;
      rep.notes.push_back("no foreign component mass on the retained coordinates");
      return rep;
    }
  }

  const std::string at = detail::event_label(ms, e);
  for (std::size_t i = 0; i < e.members.size(); ++i) {
    double mix = own_w * cond[i];
    double foreign_mix = 0.0;
    for (std::size_t t = 0; t < foreign->size(); ++t) {
      foreign_mix += weights[t] * (*foreign)[t].cond[i];
    }
    mix += foreign_mix;
    const std::string member = ms.render(e.members[i].y);
    detail::check(rep, tol, "temporal-conditional-mixture@" + at + "/" + member, fT.prob[i], mix);
    detail::check(rep, tol, "foreign-component-mixture@" + at + "/" + member, cond[i],
                  foreign_mix / foreign_total);
  }
  detail::finalize(rep, tol);
  return rep;
}

}  // namespace detail

// Decomposition of the temporal conditional into the event's own conditional
// plus the other components' temporal conditionals taken with the event's
// extraction pattern, using the components' prior weights p(r_j); then the
// rearranged form with the own term removed and mass 1 - p(r) dividing the
// rest. Requires a mechanism constant on the event and p(r) < 1.
inline IdentityReport verify_marginal_removed(const FullDensity& h, const ObservedDataEvent& e,
                                              double tol = kDefaultTolerance) {
  return detail::verify_marginal_removed_impl(h, e, tol, /*reweight=*/false);
}

// Same decomposition with the component weights conditioned on the retained
// coordinates, p(r_j | y^{ot(r)}). This variant is an exact identity for any
// positive model whose mechanism is constant on the event.
inline IdentityReport verify_marginal_removed_reweighted(const FullDensity& h,
                                                         const ObservedDataEvent& e,
                                                         double tol = kDefaultTolerance) {
  return detail::verify_marginal_removed_impl(h, e, tol, /*reweight=*/true);
}

struct MarViolation {
  ObservedDataEvent event;
  double deviation = 0.0;
};

// Scans every positive-mass event and returns the one where the conditional
// p(y^mi|y^ob, r) strays farthest from the formal conditional of the data
// marginal; none when the model is MAR everywhere within tolerance. Ties keep
// the first event in canonical order.
inline std::optional<MarViolation> find_mar_violation(const FullDensity& h,
                                                      double tol = kDefaultTolerance) {
  const ModelSpace& ms = h.space();
  const auto f = marginal_f(h);
  std::optional<MarViolation> best;
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    for (auto& e : event_partition(ms, ms.patterns()[j])) {
      if (h.event_mass(e) <= 0.0) continue;
      const auto cond = p_mi_given_ob_r(h, e);
      const auto fF = f_F_conditional(f, ms, e);
      double dev = 0.0;
      for (std::size_t i = 0; i < cond.size(); ++i) {
        dev = std::max(dev, std::abs(cond[i] - fF.prob[i]));
      }
      if (!best || dev > best->deviation) {
        best = MarViolation{std::move(e), dev};
      }
    }
  }
  if (best && best->deviation <= tol) return std::nullopt;
  return best;
}

}  // namespace missem
