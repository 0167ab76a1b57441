#pragma once

// Small hand-enumerable models used across the test suites.

#include <string>
#include <vector>

#include "missem/missem.hpp"

namespace fixtures {

using namespace missem;

inline ModelSpace binary_space(std::size_t d, const std::vector<std::string>& pattern_strings) {
  std::vector<VariableDomain> domains;
  std::vector<std::string> labels{"0", "1"};
  for (std::size_t i = 0; i < d; ++i) domains.emplace_back(labels);
  std::vector<MissingnessPattern> ps;
  for (const auto& s : pattern_strings) ps.push_back(MissingnessPattern::from_string(s));
  return ModelSpace(std::move(domains), PatternSet(std::move(ps)));
}

inline std::vector<std::string> var_names(std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < d; ++i) names.push_back("y" + std::to_string(i + 1));
  return names;
}

inline ModelDocument selection_doc(std::size_t d, const std::vector<std::string>& patterns,
                                   std::vector<double> f, std::vector<double> g,
                                   double tol = kDefaultTolerance) {
  ModelSpace ms = binary_space(d, patterns);
  SelectionModel sm(ms, std::move(f), std::move(g), tol);
  FullDensity h = compose_selection(sm, tol);
  return ModelDocument{var_names(d), ms,  "selection", sm, std::nullopt,
                       std::nullopt, h,   tol,         {}};
}

// d=2 binary, f uniform, mechanism depends on the always-observed first
// coordinate: MAR everywhere. Outcome order (0,0),(0,1),(1,0),(1,1);
// pattern order 11, 10.
inline ModelDocument w1() {
  std::vector<double> f{0.25, 0.25, 0.25, 0.25};
  std::vector<double> g{
      0.5, 0.5,  // y=(0,0)
      0.5, 0.5,  // y=(0,1)
      0.8, 0.2,  // y=(1,0)
      0.8, 0.2,  // y=(1,1)
  };
  return selection_doc(2, {"11", "10"}, std::move(f), std::move(g));
}

// Same shape but the mechanism tracks the sometimes-hidden second
// coordinate: MNAR at the events of pattern 10.
inline ModelDocument w2() {
  std::vector<double> f{0.25, 0.25, 0.25, 0.25};
  std::vector<double> g{
      0.5, 0.5,  // y=(0,0)
      0.8, 0.2,  // y=(0,1)
      0.5, 0.5,  // y=(1,0)
      0.8, 0.2,  // y=(1,1)
  };
  return selection_doc(2, {"11", "10"}, std::move(f), std::move(g));
}

// Three-pattern chain 00 <p 10 <p 11 with a non-uniform marginal and a
// MAR mechanism; the one geometry where the prior-weight mixture
// decomposition holds at every event.
inline ModelDocument chain3() {
  std::vector<double> f{0.1, 0.2, 0.3, 0.4};
  // pattern order 11, 10, 00
  std::vector<double> g{
      0.5,  0.3,  0.2,  // y=(0,0)
      0.5,  0.3,  0.2,  // y=(0,1)
      0.65, 0.15, 0.2,  // y=(1,0)
      0.65, 0.15, 0.2,  // y=(1,1)
  };
  return selection_doc(2, {"11", "10", "00"}, std::move(f), std::move(g));
}

inline FullDensity uniform_density(const ModelSpace& ms) {
  return FullDensity(ms, std::vector<double>(ms.omega_size(), 1.0 / ms.omega_size()));
}

inline Outcome outcome(std::initializer_list<std::size_t> values) {
  return Outcome{std::vector<std::size_t>(values)};
}

inline MissingnessPattern pat(const std::string& s) { return MissingnessPattern::from_string(s); }

}  // namespace fixtures
