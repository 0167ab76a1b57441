#include <doctest.h>

#include <cmath>

#include "missem/density.hpp"

#include "fixtures.hpp"

using namespace missem;
using fixtures::outcome;
using fixtures::pat;

namespace {
constexpr double kTol = 1e-12;

bool tables_close(const std::vector<double>& a, const std::vector<double>& b, double tol = kTol) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > tol) return false;
  }
  return true;
}
}  // namespace

TEST_CASE("W1 composes to the hand-enumerated 8-point table") {
  const auto doc = fixtures::w1();
  const auto& h = doc.density;
  CHECK(h.prob(FullPoint{outcome({0, 1}), pat("10")}) == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(h.prob(FullPoint{outcome({1, 1}), pat("10")}) == doctest::Approx(0.05).epsilon(1e-14));
  CHECK(h.prob(FullPoint{outcome({1, 0}), pat("11")}) == doctest::Approx(0.2).epsilon(1e-14));
  double total = 0.0;
  for (double v : h.table()) total += v;
  CHECK(std::abs(total - 1.0) <= kTol);
}

TEST_CASE("a constant mechanism spreads f uniformly over patterns") {
  const auto ms = fixtures::binary_space(2, {"11", "10"});
  std::vector<double> f{0.1, 0.2, 0.3, 0.4};
  std::vector<double> g(8, 0.5);
  const auto h = compose_selection(SelectionModel(ms, f, g));
  for (std::size_t j = 0; j < 2; ++j) {
    for (std::size_t yi = 0; yi < 4; ++yi) {
      CHECK(std::abs(h.prob(j, yi) - f[yi] / 2.0) <= kTol);
    }
  }
}

TEST_CASE("the two factorization routes recompose to the same density") {
  const auto h = fixtures::w1().density;
  const auto via_selection = compose_selection(factor_selection(h));
  const auto via_mixture = compose_pattern_mixture(factor_pattern_mixture(h));
  CHECK(tables_close(via_selection.table(), h.table()));
  CHECK(tables_close(via_mixture.table(), h.table()));
  CHECK(tables_close(via_selection.table(), via_mixture.table()));
}

TEST_CASE("factoring a uniform density gives a uniform mechanism") {
  const auto ms = fixtures::binary_space(2, {"11", "10", "01"});
  const auto sm = factor_selection(fixtures::uniform_density(ms));
  for (std::size_t yi = 0; yi < ms.num_outcomes(); ++yi) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(sm.g_at(yi, j) - 1.0 / 3.0) <= kTol);
    }
  }
}

TEST_CASE("mass concentrated on the complete cases degenerates the mixture") {
  const auto ms = fixtures::binary_space(2, {"11", "10"});
  std::vector<double> table(ms.omega_size(), 0.0);
  for (std::size_t yi = 0; yi < 4; ++yi) table[ms.point_index(0, yi)] = 0.25;
  const auto pm = factor_pattern_mixture(FullDensity(ms, std::move(table)));
  CHECK(pm.pr()[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(pm.pr()[1] == 0.0);
  CHECK(pm.has_component(0));
  CHECK_FALSE(pm.has_component(1));
  CHECK_THROWS_AS(pm.component(1), UndefinedConditionalError);
  REQUIRE(pm.warnings().size() == 1);
  CHECK(pm.warnings()[0].find("10") != std::string::npos);
}

TEST_CASE("factor_selection names the outcomes where the marginal vanishes") {
  const auto ms = fixtures::binary_space(2, {"11", "10"});
  std::vector<double> table(ms.omega_size(), 0.0);
  table[ms.point_index(0, 0)] = 0.5;  // all mass on y1 = 0
  table[ms.point_index(1, 1)] = 0.5;
  try {
    factor_selection(FullDensity(ms, std::move(table)));
    FAIL("expected UndefinedConditionalError");
  } catch (const UndefinedConditionalError& e) {
    CHECK(std::string(e.what()).find("f(1,0) = 0") != std::string::npos);
    CHECK(std::string(e.what()).find("f(1,1) = 0") != std::string::npos);
  }
}

TEST_CASE("validation lists every offending factor row") {
  const auto ms = fixtures::binary_space(2, {"11", "10"});
  std::vector<double> f{0.25, 0.25, 0.25, 0.25};
  std::vector<double> g{0.5, 0.4,  // sums to 0.9
                        0.5, 0.5, 0.5, 0.5, 0.5, 0.5};
  try {
    SelectionModel(ms, f, g);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("g row for y=(0,0)") != std::string::npos);
  }
}

TEST_CASE("marginal_f recovers the mixture of components") {
  // W1 was built from a uniform marginal
  const auto f1 = marginal_f(fixtures::w1().density);
  CHECK(tables_close(f1, {0.25, 0.25, 0.25, 0.25}));

  // a single pattern makes f equal to the lone component
  const auto ms1 = fixtures::binary_space(2, {"11"});
  std::vector<double> comp{0.1, 0.2, 0.3, 0.4};
  const auto h1 = compose_pattern_mixture(PatternMixture(ms1, {1.0}, {comp}));
  CHECK(tables_close(marginal_f(h1), comp));

  // two distinct components with weights (0.3, 0.7), checked against the
  // hand-computed weighted sum
  const auto ms2 = fixtures::binary_space(2, {"11", "10"});
  const auto h2 = compose_pattern_mixture(PatternMixture(
      ms2, {0.3, 0.7}, {{0.1, 0.2, 0.3, 0.4}, {0.4, 0.3, 0.2, 0.1}}));
  CHECK(tables_close(marginal_f(h2), {0.31, 0.27, 0.23, 0.19}));
}

TEST_CASE("observed-data density sums events and carries total mass one") {
  const auto h = fixtures::w1().density;
  const auto obd = observed_data_density(h);
  CHECK(std::abs(obd.prob_at(1, SubVector{{0}, {0}}) - 0.25) <= kTol);
  // complete-case points keep their full-density value
  CHECK(std::abs(obd.prob_at(0, SubVector{{0, 1}, {0, 1}}) -
                 h.prob(FullPoint{outcome({0, 1}), pat("11")})) <= kTol);
  CHECK(std::abs(obd.total_mass() - 1.0) <= kTol);
  CHECK(obd.points().size() == 6);
  CHECK_THROWS_AS(obd.prob_at(0, SubVector{{0}, {0}}), DimensionError);
}

TEST_CASE("temporal conditional over the data marginal") {
  const auto doc = fixtures::w1();
  const auto f = marginal_f(doc.density);
  const auto ms = doc.space;

  const auto tc = f_T_conditional(f, ms, pat("10"), SubVector{{0}, {0}});
  CHECK(tc.domain == ConditionalDomain::kRangeOfProjection);
  CHECK(tables_close(tc.prob, {0.5, 0.5}));
  CHECK(tc.support[0] == SubVector{{1}, {0}});
  CHECK(tc.support[1] == SubVector{{1}, {1}});

  // d = 1 complete extraction: the conditional over nothing is the constant 1
  std::vector<VariableDomain> d1;
  d1.emplace_back(std::vector<std::string>{"0", "1"});
  ModelSpace line(std::move(d1), PatternSet({pat("1")}));
  const auto trivial = f_T_conditional({0.3, 0.7}, line, pat("1"), SubVector{{0}, {1}});
  REQUIRE(trivial.prob.size() == 1);
  CHECK(trivial.prob[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(trivial.support[0].size() == 0);

  // independence: conditioning on y1 leaves the y2 marginal untouched
  const auto ms2 = fixtures::binary_space(2, {"11", "10"});
  std::vector<double> prod{0.3 * 0.2, 0.3 * 0.8, 0.7 * 0.2, 0.7 * 0.8};
  for (std::size_t v = 0; v < 2; ++v) {
    const auto c = f_T_conditional(prod, ms2, pat("10"), SubVector{{0}, {v}});
    CHECK(tables_close(c.prob, {0.2, 0.8}));
  }

  // zero conditioning marginal names the sub-vector
  std::vector<double> dead{0.0, 0.0, 0.5, 0.5};
  CHECK_THROWS_AS(f_T_conditional(dead, ms2, pat("10"), SubVector{{0}, {0}}),
                  UndefinedConditionalError);
}

TEST_CASE("formal conditional lives on the event and matches temporal values") {
  const auto doc = fixtures::w1();
  const auto& ms = doc.space;
  const auto f = marginal_f(doc.density);

  const auto e = observed_event(ms, FullPoint{outcome({0, 1}), pat("10")});
  const auto fc = f_F_conditional(f, ms, e);
  CHECK(fc.domain == ConditionalDomain::kEventInOmega);
  CHECK(tables_close(fc.prob, {0.5, 0.5}));

  const auto singleton = observed_event(ms, FullPoint{outcome({1, 0}), pat("11")});
  CHECK(tables_close(f_F_conditional(f, ms, singleton).prob, {1.0}));

  // same values, different domains, on every event of every pattern
  for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
    for (const auto& ev : event_partition(ms, ms.patterns()[j])) {
      const auto formal = f_F_conditional(f, ms, ev);
      const auto temporal = f_T_conditional(f, ms, ev.pattern, ev.observed);
      CHECK(tables_close(formal.prob, temporal.prob));
      CHECK(to_string(formal.domain) != to_string(temporal.domain));
    }
  }
}

TEST_CASE("p(y^mi | y^ob, r) at MAR and MNAR events") {
  const auto w1 = fixtures::w1();
  const auto e1 = observed_event(w1.space, FullPoint{outcome({0, 1}), pat("10")});
  CHECK(tables_close(p_mi_given_ob_r(w1.density, e1), {0.5, 0.5}));

  const auto w2 = fixtures::w2();
  const auto e2 = observed_event(w2.space, FullPoint{outcome({0, 1}), pat("10")});
  const auto cond = p_mi_given_ob_r(w2.density, e2);
  CHECK(std::abs(cond[0] - 5.0 / 7.0) <= kTol);
  CHECK(std::abs(cond[1] - 2.0 / 7.0) <= kTol);

  const auto s = observed_event(w1.space, FullPoint{outcome({1, 1}), pat("11")});
  CHECK(tables_close(p_mi_given_ob_r(w1.density, s), {1.0}));

  // conditioning on a zero-probability event is a hard error
  const auto ms = fixtures::binary_space(2, {"11", "10"});
  std::vector<double> t(ms.omega_size(), 0.0);
  for (std::size_t yi = 0; yi < 4; ++yi) t[ms.point_index(0, yi)] = 0.25;
  const FullDensity concentrated(ms, std::move(t));
  const auto dead = observed_event(ms, FullPoint{outcome({0, 0}), pat("10")});
  CHECK_THROWS_AS(p_mi_given_ob_r(concentrated, dead), UndefinedConditionalError);
}

TEST_CASE("MAR predicates: W1 everywhere, W2 fails on the hidden coordinate") {
  const auto w1 = fixtures::w1();
  const auto w2 = fixtures::w2();
  CHECK(is_mar_everywhere(ModelFamily({{"w1", w1.density}})));
  CHECK_FALSE(is_mar_everywhere(ModelFamily({{"w2", w2.density}})));

  const auto sm2 = factor_selection(w2.density);
  const auto bad = observed_event(w2.space, FullPoint{outcome({0, 0}), pat("10")});
  CHECK_FALSE(is_mar_at(w2.space, sm2.g(), bad));
  const auto fine = observed_event(w2.space, FullPoint{outcome({0, 0}), pat("11")});
  CHECK(is_mar_at(w2.space, sm2.g(), fine));

  // MCAR: constant mechanism is constant on every event
  const auto ms = fixtures::binary_space(2, {"11", "10"});
  const auto mcar = compose_selection(
      SelectionModel(ms, {0.1, 0.2, 0.3, 0.4}, std::vector<double>(8, 0.5)));
  CHECK(is_mar_everywhere(ModelFamily({{"mcar", mcar}})));
  CHECK(is_mar_everywhere(ModelFamily({{"w1", w1.density}, {"mcar", mcar}})));
  CHECK_FALSE(is_mar_everywhere(ModelFamily({{"w1", w1.density}, {"w2", w2.density}})));
}

TEST_CASE("event conditionals are normalized on every positive-mass event") {
  for (const auto& doc : {fixtures::w1(), fixtures::w2(), fixtures::chain3()}) {
    const auto& ms = doc.space;
    const auto f = marginal_f(doc.density);
    for (std::size_t j = 0; j < ms.num_patterns(); ++j) {
      for (const auto& e : event_partition(ms, ms.patterns()[j])) {
        if (doc.density.event_mass(e) <= 0.0) continue;
        double sum_cond = 0.0, sum_formal = 0.0;
        for (double v : p_mi_given_ob_r(doc.density, e)) sum_cond += v;
        for (double v : f_F_conditional(f, ms, e).prob) sum_formal += v;
        CHECK(std::abs(sum_cond - 1.0) <= kTol);
        CHECK(std::abs(sum_formal - 1.0) <= kTol);
      }
    }
  }
}

TEST_CASE("model family members must share one space") {
  const auto w1 = fixtures::w1();
  const auto other = fixtures::uniform_density(fixtures::binary_space(2, {"11", "01"}));
  CHECK_THROWS_AS(ModelFamily({{"a", w1.density}, {"b", other}}), ValidationError);
  CHECK_THROWS_AS(ModelFamily({}), ValidationError);
}

TEST_CASE("density table validation") {
  const auto ms = fixtures::binary_space(2, {"11", "10"});
  CHECK_THROWS_AS(FullDensity(ms, std::vector<double>(7, 0.125)), ValidationError);
  std::vector<double> negative(8, 0.25);
  negative[0] = -0.75;
  CHECK_THROWS_AS(FullDensity(ms, negative), ValidationError);
  CHECK_THROWS_AS(FullDensity(ms, std::vector<double>(8, 0.25)), ValidationError);  // mass 2
  // a looser tolerance admits a slightly off total
  std::vector<double> off(8, 0.125);
  off[0] += 1e-9;
  CHECK_THROWS_AS(FullDensity(ms, off), ValidationError);
  CHECK_NOTHROW(FullDensity(ms, off, 1e-6));
}
