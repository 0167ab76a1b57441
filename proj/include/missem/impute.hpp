#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "missem/density.hpp"
#include "missem/error.hpp"
#include "missem/rng.hpp"
#include "missem/space.hpp"
#include "missem/version.hpp"

namespace missem {

// The realised pair (y~, r~): the unit whose missing values get imputed.
struct RealizedData {
  Outcome y_tilde;
  MissingnessPattern r_tilde;
};

enum class ImputeMode { F, T };

inline char to_char(ImputeMode m) { return m == ImputeMode::F ? 'F' : 'T'; }

// A seeded sequence of completed triples. F-mode draws keep the realised
// pattern fixed and fill the missing values from the formal conditional;
// T-mode draws a full value tuple from the temporal conditional and then a
// fresh pattern from the mechanism, so the pattern may drift.
struct ImputationChain {
  ImputeMode mode = ImputeMode::F;
  RealizedData real;
  std::uint64_t seed = 0;
  std::vector<FullPoint> draws;
  std::string rng = kRngAlgorithm;

  std::size_t length() const { return draws.size(); }
};

// m draws of y^{mi(r~)} from f(y^mi | y^ob) over the observed data event of
// (y~, r~); each draw consumes exactly one uniform variate, mapped by
// inverse CDF over the event members in canonical order.
inline ImputationChain impute_F(const FullDensity& h, const RealizedData& real, std::size_t m,
                                std::uint64_t seed) {
  const ModelSpace& ms = h.space();
  const auto e = observed_event(ms, FullPoint{real.y_tilde, real.r_tilde});
  const auto f = marginal_f(h);
  std::vector<double> weights;
  weights.reserve(e.members.size());
  double total = 0.0;
  for (const auto& p : e.members) {
    weights.push_back(f[ms.outcome_index(p.y)]);
    total += weights.back();
  }
  if (total <= 0.0) {
    throw UndefinedConditionalError("observed event " + ms.render(e.observed) +
                                    " carries no marginal mass; nothing to impute from");
  }
  ImputationChain chain{ImputeMode::F, real, seed, {}, kRngAlgorithm};
  chain.draws.reserve(m);
  for (std::size_t t = 0; t < m; ++t) {
    const double u = uniform01_at(seed, t);
    chain.draws.push_back(e.members[inverse_cdf_pick(weights, total, u)]);
  }
  return chain;
}

// m steps of: draw a full value tuple from the temporal conditional given
// y~^{ot(r~)}, then draw a fresh pattern from the mechanism at the drawn
// tuple. Two variates per step, value first, then pattern.
inline ImputationChain impute_T(const FullDensity& h, const RealizedData& real, std::size_t m,
                                std::uint64_t seed) {
  const ModelSpace& ms = h.space();
  const auto sm = factor_selection(h);  // zero-marginal errors propagate
  const auto e = observed_event(ms, FullPoint{real.y_tilde, real.r_tilde});
  std::vector<double> weights;
  weights.reserve(e.members.size());
  double total = 0.0;
  for (const auto& p : e.members) {
    weights.push_back(sm.f_at(ms.outcome_index(p.y)));
    total += weights.back();
  }
  if (total <= 0.0) {
    throw UndefinedConditionalError("f(y^{ot}) = 0 at " + ms.render(e.observed) +
                                    "; temporal conditional undefined");
  }
  const std::size_t k = ms.num_patterns();
  ImputationChain chain{ImputeMode::T, real, seed, {}, kRngAlgorithm};
  chain.draws.reserve(m);
  std::vector<double> grow(k);
  for (std::size_t t = 0; t < m; ++t) {
    const double u_value = uniform01_at(seed, 2 * t);
    const double u_pattern = uniform01_at(seed, 2 * t + 1);
    const Outcome& star = e.members[inverse_cdf_pick(weights, total, u_value)].y;
    const std::size_t yi = ms.outcome_index(star);
    double gtotal = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      grow[j] = sm.g_at(yi, j);
      gtotal += grow[j];
    }
    const std::size_t j = inverse_cdf_pick(grow, gtotal, u_pattern);
    chain.draws.push_back(FullPoint{star, ms.patterns()[j]});
  }
  return chain;
}

// An exact distribution over the completed triples a chain can produce.
struct ChainDistribution {
  std::vector<FullPoint> support;
  std::vector<double> prob;
};

// The F-chain target: the formal conditional spread over the event members.
inline ChainDistribution exact_chain_distribution_F(const FullDensity& h,
                                                    const RealizedData& real) {
  const ModelSpace& ms = h.space();
  const auto e = observed_event(ms, FullPoint{real.y_tilde, real.r_tilde});
  const auto fF = f_F_conditional(marginal_f(h), ms, e);
  ChainDistribution out;
  out.support = e.members;
  out.prob = fF.prob;
  return out;
}

// The T-chain target: value tuples on the retained slice crossed with every
// pattern, weighted by the temporal conditional times the mechanism.
inline ChainDistribution exact_chain_distribution_T(const FullDensity& h,
                                                    const RealizedData& real) {
  const ModelSpace& ms = h.space();
  const auto sm = factor_selection(h);
  const auto e = observed_event(ms, FullPoint{real.y_tilde, real.r_tilde});
  double slice = 0.0;
  for (const auto& p : e.members) slice += sm.f_at(ms.outcome_index(p.y));
  if (slice <= 0.0) {
    throw UndefinedConditionalError("f(y^{ot}) = 0 at " + ms.render(e.observed));
  }
  ChainDistribution out;
  for (const auto& p : e.members) {
    const std::size_t yi = ms.outcome_index(p.y);
    for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
      out.support.push_back(FullPoint{p.y, ms.patterns()[j]});
      out.prob.push_back(sm.f_at(yi) / slice * sm.g_at(yi, j));
    }
  }
  return out;
}

// Empirical distribution of the draws, over the sorted distinct draws.
inline ChainDistribution empirical_distribution(const ImputationChain& chain) {
  std::map<FullPoint, std::size_t> counts;
  for (const auto& d : chain.draws) counts[d]++;
  ChainDistribution out;
  for (const auto& [p, c] : counts) {
    out.support.push_back(p);
    out.prob.push_back(static_cast<double>(c) / static_cast<double>(chain.draws.size()));
  }
  return out;
}

// Total variation between the chain's empirical frequencies and an exact
// table over the same support. Draws outside the exact support are an error.
inline double empirical_tv(const ImputationChain& chain, const ChainDistribution& exact) {
  std::map<FullPoint, std::size_t> index;
  for (std::size_t i = 0; i < exact.support.size(); ++i) index[exact.support[i]] = i;
  std::vector<double> emp(exact.support.size(), 0.0);
  for (const auto& d : chain.draws) {
    auto it = index.find(d);
    if (it == index.end()) {
      throw SupportMismatchError("chain draw outside the exact table's support");
    }
    emp[it->second] += 1.0;
  }
  const double m = static_cast<double>(chain.draws.size());
  double tv = 0.0;
  for (std::size_t i = 0; i < emp.size(); ++i) {
    const double e = m > 0.0 ? emp[i] / m : 0.0;
    tv += std::abs(e - exact.prob[i]);
  }
  return 0.5 * tv;
}

// Frequencies of the drawn patterns over the model's pattern set.
inline std::vector<double> pattern_frequencies(const ImputationChain& chain,
                                               const PatternSet& ps) {
  std::vector<double> freq(ps.size(), 0.0);
  for (const auto& d : chain.draws) {
    auto j = ps.index_of(d.r);
    if (!j) throw SupportMismatchError("chain draw uses pattern outside the set");
    freq[*j] += 1.0;
  }
  if (!chain.draws.empty()) {
    for (double& v : freq) v /= static_cast<double>(chain.draws.size());
  }
  return freq;
}

// 1/2 sum |a - b| over two tables of equal length.
inline double total_variation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw SupportMismatchError("total_variation: table sizes differ");
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace missem
