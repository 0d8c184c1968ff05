#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "recur/systems.hpp"

using namespace recur;

namespace {

Point adic_zero() { return Point(AdicDigits{{}, {0}}); }

ClopenSet random_clopen(const Space& space, std::mt19937_64& rng, int max_level) {
  int k = 1 + int(rng() % uint64_t(max_level));
  auto cells = space.cells(k);
  std::vector<std::string> pick;
  for (const auto& c : cells)
    if (rng() % 2 == 0) pick.push_back(c);
  return ClopenSet::of_cells(k, std::move(pick));
}

}  // namespace

TEST_CASE("odometer addressing") {
  auto sys = make_odometer(2);
  const Space& sp = sys->space();
  CHECK(sp.cell_of(adic_zero(), 0) == "");
  CHECK(sp.cell_of(adic_zero(), 3) == "000");
  Point succ = sys->act(GroupElement(Int{1}), adic_zero());
  CHECK(sp.cell_of(succ, 3) == "100");
  CHECK(sp.cells(2).size() == 4);
  CHECK_THROWS_AS(sp.cell_of(adic_zero(), sp.address_depth() + 1), budget_error);
}

TEST_CASE("one-dot addressing") {
  auto sys = make_one_dot();
  const Space& sp = sys->space();
  Point marked(OneDotPoint{Int{0}});
  CHECK(sp.cell_of(marked, 1) == "010");
  CHECK(sp.cells(1).size() == 4);
  CHECK(sp.cells(3).size() == 8);  // 2k+2 cells at level k
}

TEST_CASE("parent coherence") {
  std::mt19937_64 rng(7);
  for (auto sys : {make_odometer(3), make_one_dot(), make_thue_morse()}) {
    const Space& sp = sys->space();
    auto pts = sys->sample_points(6, rng);
    for (const auto& x : pts)
      for (int k = 0; k + 1 <= 5; ++k)
        CHECK(sp.parent_id(k + 1, sp.cell_of(x, k + 1)) == sp.cell_of(x, k));
  }
}

TEST_CASE("refinement") {
  auto sys = make_odometer(2);
  const Space& sp = sys->space();
  ClopenSet root = full_space(sp, 0);
  CHECK(refine(sp, root, 2).ids.size() == 4);
  ClopenSet cell = ClopenSet::of_cells(1, {"0"});
  auto fine = refine(sp, cell, 2);
  CHECK(fine.ids == std::vector<std::string>{"00", "01"});
  CHECK(refine(sp, refine(sp, cell, 2), 3) == refine(sp, cell, 3));
  CHECK_THROWS_AS(refine(sp, fine, 1), std::invalid_argument);
}

TEST_CASE("membership is stable under refinement") {
  std::mt19937_64 rng(13);
  for (auto sys : {make_odometer(2), make_one_dot()}) {
    const Space& sp = sys->space();
    auto pts = sys->sample_points(8, rng);
    for (int trial = 0; trial < 10; ++trial) {
      auto u = random_clopen(sp, rng, 3);
      auto fine = refine(sp, u, u.level + 2);
      for (const auto& x : pts) CHECK(member(sp, u, x) == member(sp, fine, x));
    }
  }
}

TEST_CASE("normal form merges full sibling families") {
  auto sys = make_odometer(2);
  const Space& sp = sys->space();
  ClopenSet all2 = full_space(sp, 2);
  auto nf = normal_form(sp, all2);
  CHECK(nf.level == 0);
  ClopenSet pair = ClopenSet::of_cells(2, {"00", "01"});  // children of "0"
  auto nf2 = normal_form(sp, pair);
  CHECK(nf2.level == 1);
  CHECK(nf2.ids == std::vector<std::string>{"0"});
}

TEST_CASE("boolean algebra laws") {
  std::mt19937_64 rng(19);
  for (auto sys : {make_odometer(2), make_one_dot(), make_thue_morse()}) {
    const Space& sp = sys->space();
    int max_level = std::min(3, sp.enumerable_depth());
    for (int trial = 0; trial < 12; ++trial) {
      auto u = random_clopen(sp, rng, max_level);
      auto v = random_clopen(sp, rng, max_level);
      CHECK(clopen_complement(sp, clopen_complement(sp, u)) == normal_form(sp, u));
      CHECK(clopen_intersect(sp, u, clopen_complement(sp, u)).empty());
      // De Morgan
      CHECK(clopen_complement(sp, clopen_union(sp, u, v)) ==
            clopen_intersect(sp, clopen_complement(sp, u), clopen_complement(sp, v)));
      // absorption
      CHECK(clopen_union(sp, u, clopen_intersect(sp, u, v)) == normal_form(sp, u));
      CHECK(is_subset(sp, clopen_intersect(sp, u, v), u));
      CHECK(is_subset(sp, u, clopen_union(sp, u, v)));
    }
    ClopenSet empty{1, {}};
    CHECK(clopen_complement(sp, empty).level == 0);
  }
}

TEST_CASE("separation levels") {
  auto sys = make_odometer(2);
  const Space& sp = sys->space();
  Point zero = adic_zero();
  CHECK(!separation_level(sp, zero, zero, 8).has_value());
  Point succ = sys->act(GroupElement(Int{1}), zero);
  CHECK(separation_level(sp, zero, succ, 8) == 1);

  auto dots = make_one_dot();
  Point marked(OneDotPoint{Int{0}});
  Point allzero(OneDotPoint{std::nullopt});
  CHECK(separation_level(dots->space(), marked, allzero, 8) == 1);
  CHECK(separation_level(dots->space(), Point(OneDotPoint{Int{5}}), allzero, 8) == 5);
}

TEST_CASE("separation is symmetric and matches shared cells") {
  std::mt19937_64 rng(23);
  for (auto sys : {make_odometer(3), make_one_dot(), make_fibonacci()}) {
    const Space& sp = sys->space();
    auto pts = sys->sample_points(8, rng);
    for (const auto& x : pts)
      for (const auto& y : pts) {
        auto sxy = separation_level(sp, x, y, 6);
        CHECK(sxy == separation_level(sp, y, x, 6));
        for (int k = 1; k <= 6; ++k) {
          bool same = sp.cell_of(x, k - 1) == sp.cell_of(y, k - 1);
          CHECK(same == (!sxy.has_value() || *sxy >= k));
        }
      }
  }
}
