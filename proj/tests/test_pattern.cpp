#include <doctest.h>

#include <set>

#include "missem/pattern.hpp"

#include "fixtures.hpp"

using namespace missem;
using fixtures::pat;

namespace {

std::vector<MissingnessPattern> all_patterns(std::size_t d) {
  std::vector<MissingnessPattern> out;
  for (std::size_t m = 0; m < (std::size_t{1} << d); ++m) {
    std::vector<std::uint8_t> bits(d, 0);
    for (std::size_t i = 0; i < d; ++i) bits[i] = (m >> i) & 1u;
    out.emplace_back(std::move(bits));
  }
  return out;
}

}  // namespace

TEST_CASE("leq_p is the coordinatewise order") {
  CHECK(leq_p(pat("10"), pat("11")));
  CHECK_FALSE(leq_p(pat("10"), pat("01")));
  CHECK_FALSE(leq_p(pat("01"), pat("10")));
  CHECK(leq_p(pat("1010"), pat("1010")));
  CHECK_THROWS_AS(leq_p(pat("10"), pat("100")), DimensionError);
}

TEST_CASE("partial-order laws hold exhaustively for d <= 4") {
  for (std::size_t d = 2; d <= 4; ++d) {
    const auto ps = all_patterns(d);
    for (const auto& a : ps) {
      CHECK(leq_p(a, a));
      for (const auto& b : ps) {
        if (leq_p(a, b)) {
          CHECK(a.observed_count() <= b.observed_count());
          if (leq_p(b, a)) CHECK(a == b);
        }
        for (const auto& c : ps) {
          if (leq_p(a, b) && leq_p(b, c)) CHECK(leq_p(a, c));
        }
      }
    }
  }
}

TEST_CASE("complement negates bitwise") {
  CHECK(pat("101").complement() == pat("010"));
  CHECK(MissingnessPattern::ones(3).complement() == MissingnessPattern::zeros(3));
  for (const auto& r : all_patterns(3)) {
    CHECK(r.complement().complement() == r);
    CHECK(r.complement().observed_count() == 3 - r.observed_count());
  }
}

TEST_CASE("observed_count and coordinate lists") {
  const auto r = pat("1101");
  CHECK(r.observed_count() == 3);
  CHECK(r.observed_coords() == std::vector<std::size_t>{0, 1, 3});
  CHECK(r.missing_coords() == std::vector<std::size_t>{2});
  CHECK(r.to_string() == "1101");
  CHECK(MissingnessPattern::from_string("1101") == r);
}

TEST_CASE("pattern string parsing rejects foreign characters") {
  CHECK_THROWS_AS(MissingnessPattern::from_string("10x1"), ParseError);
  CHECK_THROWS_AS(MissingnessPattern::from_string(""), ValidationError);
}

TEST_CASE("pattern set: distinctness, equal length, complete cases first") {
  CHECK_THROWS_AS(PatternSet({pat("10"), pat("10")}), ValidationError);
  CHECK_THROWS_AS(PatternSet({pat("10"), pat("100")}), DimensionError);
  CHECK_THROWS_AS(PatternSet(std::vector<MissingnessPattern>{}), ValidationError);

  PatternSet ps({pat("00"), pat("10"), pat("11")});
  CHECK(ps[0] == pat("11"));  // all-ones forced to the front
  CHECK(ps[1] == pat("00"));  // the rest keep insertion order
  CHECK(ps[2] == pat("10"));
  CHECK(ps.index_of(pat("10")) == 2);
  CHECK_FALSE(ps.index_of(pat("01")).has_value());

  // the all-zeros pattern is an admissible member
  PatternSet with_zero({pat("11"), pat("00")});
  CHECK(with_zero.contains(pat("00")));
}

TEST_CASE("lattice_edges: chain, antichain, full Boolean square") {
  PatternSet chain({pat("11"), pat("10"), pat("00")});
  // indices: 0 = 11, 1 = 10, 2 = 00; covers 00 < 10 < 11
  const auto edges = lattice_edges(chain);
  CHECK(edges == std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}, {2, 1}});

  PatternSet antichain({pat("10"), pat("01")});
  CHECK(lattice_edges(antichain).empty());

  // full Boolean set on d = 2: covers are exactly the +1-bit pairs
  PatternSet square(all_patterns(2));
  const auto cover = lattice_edges(square);
  CHECK(cover.size() == 4);
  std::set<std::pair<std::string, std::string>> got;
  for (auto [i, j] : cover) got.insert({square[i].to_string(), square[j].to_string()});
  for (auto [i, j] : cover) {
    CHECK(leq_p(square[i], square[j]));
    CHECK(square[i].observed_count() + 1 == square[j].observed_count());
  }
  CHECK(got.size() == 4);
}
