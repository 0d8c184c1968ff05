#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "recur/analyzers.hpp"
#include "recur/systems.hpp"

using namespace recur;

namespace {

Point adic_zero() { return Point(AdicDigits{{}, {0}}); }
Point marked() { return Point(OneDotPoint{Int{0}}); }
Point allzero() { return Point(OneDotPoint{std::nullopt}); }

AnalyzerContext odometer_ctx(int base, int level, Int radius) {
  AnalyzerOptions opt;
  opt.budget = {level, radius, 8};
  return make_context(make_odometer(base), opt);
}

AnalyzerContext onedot_ctx(int level = 2, Int radius = 128) {
  AnalyzerOptions opt;
  opt.budget = {level, radius, 8};
  return make_context(make_one_dot(), opt);
}

}  // namespace

TEST_CASE("almost periodicity on the odometer") {
  auto ctx = odometer_ctx(2, 3, 32);
  auto v = check_ap(ctx, adic_zero());
  CHECK(v.outcome == Outcome::True);
  CHECK(v.exact);
  CHECK(v.witness.modulus == 8);
}

TEST_CASE("almost periodicity on the one-dot system") {
  auto ctx = onedot_ctx(1, 100);
  auto v = check_ap(ctx, marked());
  CHECK(v.outcome == Outcome::False);
  CHECK(v.exact);
  CHECK(v.witness.elements == std::vector<std::string>{"0"});
  auto vz = check_ap(ctx, allzero());
  CHECK(vz.outcome == Outcome::True);
  CHECK(vz.exact);
}

TEST_CASE("almost periodicity on thue-morse is window evidence") {
  AnalyzerOptions opt;
  opt.budget = {1, 1 << 12, 6};
  auto ctx = make_context(make_thue_morse(), opt);
  auto v = check_ap(ctx, ctx.sys->designated_points().front());
  CHECK(v.outcome == Outcome::True);
  CHECK_FALSE(v.exact);
  CHECK(v.witness.kind == "syndetic-cover");
}

TEST_CASE("regular almost periodicity") {
  auto ctx = odometer_ctx(2, 3, 32);
  auto v = check_regularly_ap(ctx, adic_zero());
  CHECK(v.outcome == Outcome::True);
  CHECK(v.exact);
  CHECK(v.witness.modulus == 8);

  auto dctx = onedot_ctx(1, 100);
  auto vd = check_regularly_ap(dctx, marked());
  CHECK(vd.outcome == Outcome::False);
  CHECK(vd.exact);

  AnalyzerOptions opt;
  opt.budget = {1, 1 << 12, 4};
  auto tctx = make_context(make_thue_morse(), opt);
  auto vt = check_regularly_ap(tctx, tctx.sys->designated_points().front());
  CHECK(vt.outcome == Outcome::Unknown);
}

TEST_CASE("type-one recurrence routes") {
  auto ctx = odometer_ctx(2, 3, 64);
  auto x = adic_zero();
  auto bid = check_recurrence_type1_bidirectional(ctx, x);
  auto cone = check_recurrence_type1_cone(ctx, x);
  CHECK(bid.outcome == Outcome::True);
  CHECK(bid.exact);
  CHECK(cone.outcome == Outcome::True);
  CHECK(cone.exact);

  auto dctx = onedot_ctx(1, 100);
  auto bd = check_recurrence_type1_bidirectional(dctx, marked());
  auto cd = check_recurrence_type1_cone(dctx, marked());
  CHECK(bd.outcome == Outcome::False);
  CHECK(bd.exact);
  CHECK(cd.outcome == Outcome::False);
  CHECK(cd.exact);

  // the all-zero fixed point is recurrent at every level
  auto bz = check_recurrence_type1_bidirectional(dctx, allzero());
  CHECK(bz.outcome == Outcome::True);
  CHECK(bz.exact);
}

TEST_CASE("type-two recurrence") {
  auto ctx = odometer_ctx(2, 3, 64);
  auto v = check_recurrence_type2(ctx, adic_zero());
  CHECK(v.outcome == Outcome::True);
  CHECK(v.exact);

  auto dctx = onedot_ctx(1, 100);
  auto vd = check_recurrence_type2(dctx, marked());
  CHECK(vd.outcome == Outcome::False);
  CHECK(vd.exact);

  auto vz = check_recurrence_type2(dctx, allzero());
  CHECK(vz.outcome == Outcome::True);
  CHECK(vz.exact);
}

TEST_CASE("type-two witnesses replay on finite actions") {
  AnalyzerOptions opt;
  opt.budget = {1, 16, 6};
  auto sys = make_finite_action(Group::free_group(2), 6,
                                {{1, 2, 0, 3, 4, 5}, {0, 1, 2, 4, 5, 3}}, "f2-act");
  auto ctx = make_context(sys, opt);
  Point x(FinitePoint{0});
  auto v = check_recurrence_type2(ctx, x);
  REQUIRE(v.outcome == Outcome::True);
  CHECK(v.exact);
  REQUIRE(!v.witness.elements.empty());
  for (const auto& s : v.witness.elements) {
    auto c = sys->group().parse(s);
    CHECK(sys->act(c, x) == x);  // every reported element fixes the point
  }
}

TEST_CASE("minimal decomposition") {
  auto ctx = odometer_ctx(2, 2, 32);
  CHECK(check_minimal_decomposition(ctx).outcome == Outcome::True);

  auto dctx = onedot_ctx();
  auto vd = check_minimal_decomposition(dctx);
  CHECK(vd.outcome == Outcome::False);
  CHECK(vd.exact);
  REQUIRE(vd.witness.points.size() == 2);

  AnalyzerOptions opt;
  opt.budget = {2, 64, 12};
  auto fsys = make_finite_action(Group::free_group(2), 6,
                                 {{1, 2, 0, 3, 4, 5}, {0, 1, 2, 4, 5, 3}}, "f2-act");
  auto fctx = make_context(fsys, opt);
  auto vf = check_minimal_decomposition(fctx);
  CHECK(vf.outcome == Outcome::True);
  CHECK(vf.exact);
  CHECK(vf.witness.cells.size() == 2);  // two orbits
}

TEST_CASE("orbit-closure relation closedness and the escaping witness") {
  auto ctx = odometer_ctx(2, 2, 32);
  CHECK(check_ro_closed(ctx).outcome == Outcome::True);

  auto dctx = onedot_ctx();
  RoWitness row;
  auto vd = check_ro_closed(dctx, &row);
  REQUIRE(vd.outcome == Outcome::False);
  CHECK(vd.exact);
  // replay: the limit is the all-zero point and the escaping partner keeps
  // its mark near the center
  auto sys = dctx.sys;
  CHECK(row.limit.first == "zero");
  Point escaped = sys->parse_point(row.limit.second);
  REQUIRE(row.pairs.size() >= 3);
  for (size_t i = 0; i < row.pairs.size(); ++i) {
    Point xn = sys->parse_point(row.pairs[i].first);
    Point yn = sys->parse_point(row.pairs[i].second);
    CHECK(yn == escaped);
    // the moving points approach the all-zero limit
    auto cl = sys->exact_closure_cells(xn, row.level);
    REQUIRE(cl.has_value());
    CHECK(std::binary_search(cl->begin(), cl->end(),
                             sys->space().cell_of(yn, row.level)));
  }
  auto clz = sys->exact_closure_cells(sys->parse_point(row.limit.first), row.level);
  CHECK_FALSE(std::binary_search(clz->begin(), clz->end(),
                                 sys->space().cell_of(escaped, row.level)));
}

TEST_CASE("invariant cores") {
  auto ctx = odometer_ctx(2, 2, 32);
  // a proper clopen set in a minimal system has an empty core
  ClopenSet u = ClopenSet::of_cells(2, {"00", "10"});
  auto r = compute_u_star(ctx, u);
  CHECK(r.hull.empty());
  CHECK(r.openness.outcome == Outcome::True);
  // the whole space is its own core
  auto rf = compute_u_star(ctx, full_space(ctx.space(), 1));
  CHECK(rf.openness.outcome == Outcome::True);
  CHECK(rf.hull.ids.size() == 2);

  auto dctx = onedot_ctx();
  ClopenSet zcyl = ClopenSet::of_cells(2, {"00000"});
  auto rd = compute_u_star(dctx, zcyl);
  CHECK(rd.hull.ids == std::vector<std::string>{"00000"});
  CHECK(rd.openness.outcome == Outcome::False);
  CHECK(rd.openness.exact);
  CHECK(rd.dichotomy_checked);
  CHECK(rd.dichotomy_agrees);

  auto vd = check_invariant_cores(dctx);
  CHECK(vd.outcome == Outcome::False);
  auto vo = check_invariant_cores(ctx);
  CHECK(vo.outcome == Outcome::True);
}

TEST_CASE("invariant cores on finite actions are literal") {
  AnalyzerOptions opt;
  opt.budget = {1, 16, 12};
  auto sys = make_finite_action(Group::free_group(2), 6,
                                {{1, 2, 0, 3, 4, 5}, {0, 1, 2, 4, 5, 3}}, "f2-act");
  auto ctx = make_context(sys, opt);
  // one full orbit plus half of the other: the core is the full orbit
  ClopenSet u = ClopenSet::of_cells(1, {"0", "1", "2", "3"});
  auto r = compute_u_star(ctx, u);
  CHECK(r.hull.ids == std::vector<std::string>{"0", "1", "2"});
  CHECK(r.openness.outcome == Outcome::True);
  CHECK(r.openness.exact);
  CHECK(r.dichotomy_checked);
  CHECK(r.dichotomy_agrees);
}

TEST_CASE("upper semicontinuity of the orbit-closure map") {
  auto ctx = odometer_ctx(2, 2, 32);
  CHECK(check_orbit_map_usc(ctx, adic_zero()).outcome == Outcome::True);

  auto dctx = onedot_ctx();
  auto vz = check_orbit_map_usc(dctx, allzero());
  CHECK(vz.outcome == Outcome::False);
  CHECK(vz.exact);
  REQUIRE(!vz.witness.points.empty());
  // replay: each witness neighbor has an orbit-closure cell outside the
  // neighborhood of the limit point's closure
  auto sys = dctx.sys;
  Point y = sys->parse_point(vz.witness.points.front());
  auto cy = sys->exact_closure_cells(y, dctx.opt.budget.level);
  auto cz = sys->exact_closure_cells(allzero(), dctx.opt.budget.level);
  REQUIRE(cy.has_value());
  bool escapes = false;
  for (const auto& c : *cy)
    if (!std::binary_search(cz->begin(), cz->end(), c)) escapes = true;
  CHECK(escapes);

  auto vm = check_orbit_map_usc(dctx, marked());
  CHECK(vm.outcome == Outcome::True);  // dense orbit closure: V is everything
}

TEST_CASE("local weak almost periodicity") {
  auto ctx = odometer_ctx(2, 2, 64);
  auto v = check_locally_weakly_ap(ctx);
  CHECK(v.outcome == Outcome::True);
  CHECK(v.exact);

  auto dctx = onedot_ctx();
  auto vd = check_locally_weakly_ap(dctx);
  CHECK(vd.outcome == Outcome::Unknown);  // never certified in either direction

  AnalyzerOptions opt;
  opt.budget = {1, 16, 12};
  auto fctx = make_context(make_finite_action(Group::integers(), 5,
                                              {{1, 2, 3, 4, 0}}, "cycle5"),
                           opt);
  auto vf = check_locally_weakly_ap(fctx);
  CHECK(vf.outcome == Outcome::True);
  CHECK(vf.exact);
}

TEST_CASE("equicontinuity") {
  auto ctx = odometer_ctx(2, 2, 64);
  auto v = check_equicontinuous(ctx);
  CHECK(v.outcome == Outcome::True);
  CHECK(v.exact);

  auto dctx = onedot_ctx();
  auto vd = check_equicontinuous(dctx);
  REQUIRE(vd.outcome == Outcome::False);
  CHECK(vd.exact);
  // replay: listed pairs agree deeply, their pushed images separate early
  auto sys = dctx.sys;
  REQUIRE(vd.witness.points.size() >= 2);
  REQUIRE(!vd.witness.elements.empty());
  int k = dctx.opt.budget.level;
  for (size_t i = 0; i + 1 < vd.witness.points.size(); i += 2) {
    Point a = sys->parse_point(vd.witness.points[i]);
    Point b = sys->parse_point(vd.witness.points[i + 1]);
    GroupElement g = sys->group().parse(vd.witness.elements[i / 2]);
    CHECK(separation_or(sys->space(), a, b, 16) > k + int(i / 2));
    CHECK(separation_or(sys->space(), sys->act(g, a), sys->act(g, b), 16) <= k);
  }

  AnalyzerOptions opt;
  opt.budget = {2, 512, 6};
  auto tctx = make_context(make_thue_morse(), opt);
  auto vt = check_equicontinuous(tctx);
  CHECK(vt.outcome == Outcome::False);
  CHECK(vt.exact);  // confirmed by the shared-tail rule
}

TEST_CASE("distality") {
  auto ctx = odometer_ctx(2, 2, 64);
  auto v = check_distal(ctx);
  CHECK(v.outcome == Outcome::True);
  CHECK(v.exact);

  auto dctx = onedot_ctx();
  auto vd = check_distal(dctx);
  REQUIRE(vd.outcome == Outcome::False);
  CHECK(vd.exact);
  // replay the proximal pair: separations grow along the listed elements
  auto sys = dctx.sys;
  Point a = sys->parse_point(vd.witness.points[0]);
  Point b = sys->parse_point(vd.witness.points[1]);
  int prev = 0;
  for (const auto& s : vd.witness.elements) {
    GroupElement g = sys->group().parse(s);
    int sep = separation_or(sys->space(), sys->act(g, a), sys->act(g, b), 64);
    CHECK(sep > prev);
    prev = sep;
  }

  AnalyzerOptions opt;
  opt.budget = {2, 512, 6};
  auto tctx = make_context(make_thue_morse(), opt);
  auto vt = check_distal(tctx);
  CHECK(vt.outcome == Outcome::False);
  CHECK(vt.exact);
}

TEST_CASE("quotient by the orbit-closure relation") {
  AnalyzerOptions opt;
  opt.budget = {1, 16, 12};
  auto fctx = make_context(
      make_finite_action(Group::free_group(2), 6,
                         {{1, 2, 0, 3, 4, 5}, {0, 1, 2, 4, 5, 3}}, "f2-act"),
      opt);
  auto q = quotient_by_orbit_closure(fctx);
  CHECK_FALSE(q.refused);
  CHECK(q.fiber_count == 2);
  CHECK(q.zero_dimensional);
  CHECK(q.trivial_action);
  CHECK(q.fibers_minimal);

  auto octx = odometer_ctx(2, 2, 32);
  auto qo = quotient_by_orbit_closure(octx);
  CHECK_FALSE(qo.refused);
  CHECK(qo.fiber_count == 1);

  auto dctx = onedot_ctx();
  auto qd = quotient_by_orbit_closure(dctx);
  CHECK(qd.refused);
  CHECK(!qd.diagnostic.empty());
}

TEST_CASE("equivalence suite consistency on the catalog") {
  std::vector<std::pair<std::shared_ptr<const FlowSystem>, Budget>> table = {
      {make_odometer(2), {3, 256, 8}},
      {make_thue_morse(), {2, 1024, 6}},
      {make_one_dot(), {2, 256, 8}},
  };
  for (auto& [sys, budget] : table) {
    AnalyzerOptions opt;
    opt.budget = budget;
    auto ctx = make_context(sys, opt);
    ExtraVerdicts extras{check_equicontinuous(ctx), check_distal(ctx)};
    auto rep = cross_check_equivalences(ctx, &extras);
    INFO(sys->name());
    CHECK(rep.consistent);
    CHECK(rep.constraints_ok);
    CHECK_NOTHROW(rep.require_consistent());
  }
}

TEST_CASE("one-dot discrimination pattern") {
  auto ctx = onedot_ctx();
  auto rep = cross_check_equivalences(ctx);
  // conditions 1..8 certified false, local weak almost periodicity unknown
  for (int i : {1, 2, 3, 4, 5, 6, 7, 8}) {
    INFO(rep.conditions[size_t(i - 1)].id);
    CHECK(rep.verdict(i).outcome == Outcome::False);
  }
  CHECK(rep.verdict(9).outcome == Outcome::Unknown);
  CHECK(rep.consistent);
}

TEST_CASE("implication chain is tracked per point") {
  auto ctx = onedot_ctx();
  auto rep = cross_check_equivalences(ctx);
  for (const auto& pr : rep.point_records) {
    if (pr.ap.outcome == Outcome::True) CHECK(pr.type2.outcome != Outcome::False);
    if (pr.type2.outcome == Outcome::True) CHECK(pr.type1.outcome != Outcome::False);
  }
}
