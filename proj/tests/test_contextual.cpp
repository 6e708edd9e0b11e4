#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "ntasc/contextual.hpp"

using namespace ntasc;

TEST_CASE("knowledge states keep one shared observer view") {
  for (const char* f : {"fig1.nta", "fig2.nta", "fig3.nta", "fig7.nta"}) {
    INFO(f);
    Network n = load_fixture(f);
    ContextualGraph g = build_contextual_graph(n);
    REQUIRE(g.init == 0);
    CHECK_FALSE(g.states.empty());
    std::vector<int> delay_out(g.states.size(), 0);
    for (const auto& e : g.edges)
      if (e.delay) ++delay_out[e.src];
    for (int d : delay_out) CHECK(d <= 1);
    for (const auto& st : g.states) {
      REQUIRE_FALSE(st.members.empty());
      Region view = project(st.members[0].reg, g.x2own);
      for (const auto& m : st.members) CHECK(project(m.reg, g.x2own) == view);
      // Sorted and deduplicated member lists.
      for (size_t i = 1; i < st.members.size(); ++i)
        CHECK(member_less(st.members[i - 1], st.members[i]));
    }
    CHECK_FALSE(export_dot(g).empty());
  }
}

TEST_CASE("unobservable closure includes silent successors") {
  Network n;
  n.clocks = {{"x"}, {"y"}};
  n.a1.name = "A1";
  n.a1.owned_clocks = {0};
  n.a1.locations = {{"p0", {}}, {"p1", {}}, {"p2", {}}};
  Edge free_eps;
  free_eps.src = 0;
  free_eps.tgt = 1;
  free_eps.kind = ActKind::Eps;
  n.a1.edges.push_back(free_eps);
  Edge guarded;
  guarded.src = 1;
  guarded.tgt = 2;
  guarded.kind = ActKind::Eps;
  guarded.guard.atoms.push_back({0, Rel::Ge, 1});
  n.a1.edges.push_back(guarded);
  n.a2.name = "A2";
  n.a2.owned_clocks = {1};
  n.a2.locations = {{"q0", {}}};
  FlatSys sys(n);
  Region r0 = region_of({Rat(0), Rat(0)}, sys.maxc);
  auto members = ur_set(sys, 0, 0, r0);
  REQUIRE(members.size() == 2);  // p0 and p1; the guarded hop needs x >= 1
  CHECK(members[0].loc == 0);
  CHECK(members[1].loc == 1);
  Region r1 = region_of({Rat(1), Rat(1)}, sys.maxc);
  CHECK(ur_set(sys, 0, 0, r1).size() == 3);
}

TEST_CASE("restriction verdicts per fixture") {
  for (const char* f : {"fig1.nta", "fig2.nta", "fig7.nta", "fig10.nta"}) {
    INFO(f);
    CHECK_FALSE(find_restriction(load_fixture(f)).has_value());
  }
  for (const char* f : {"fig3.nta", "fig4.nta", "fig6.nta", "fig2_plus_f.nta"}) {
    INFO(f);
    auto w = find_restriction(load_fixture(f));
    REQUIRE(w.has_value());
    CHECK_FALSE(w->state.members.empty());
    CHECK_FALSE(w->describe(FlatSys(normalize_sync_guards(load_fixture(f)))).empty());
  }
}

TEST_CASE("the fig4 witness separates the two possible worlds") {
  Network n = load_fixture("fig4.nta");
  auto w = find_restriction(n);
  REQUIRE(w.has_value());
  CHECK((w->step == "a" || w->step == "b"));
  // The two worlds disagree on x: one kept running to 2, one was reset at 1.
  std::set<int> ips = {w->enabling.reg.ip[0], w->blocking.reg.ip[0]};
  CHECK(ips == std::set<int>{1, 2});
  CHECK_FALSE(w->enabling.reg.above(0));
  CHECK_FALSE(w->blocking.reg.above(0));
}

TEST_CASE("knowledge splits on an unobservable reset") {
  Network n = load_fixture("fig3.nta");
  ContextualGraph g = build_contextual_graph(n);
  bool split = false;
  for (const auto& st : g.states) {
    std::set<std::pair<int, int>> worlds;
    for (const auto& m : st.members)
      if (!m.reg.above(0)) worlds.insert({m.loc, m.reg.ip[0]});
    std::set<int> ips;
    for (auto& [loc, ip] : worlds) ips.insert(ip);
    if (ips.size() >= 2) split = true;
  }
  CHECK(split);
}

TEST_CASE("every knowledge member is jointly reachable") {
  for (const char* f :
       {"fig1.nta", "fig2.nta", "fig3.nta", "fig4.nta", "fig6.nta", "fig7.nta"}) {
    INFO(f);
    CHECK(members_all_reachable(load_fixture(f)));
  }
}

TEST_CASE("without a restriction, knowledge ignores observer guards") {
  for (const char* f : {"fig1.nta", "fig2.nta", "fig7.nta"}) {
    INFO(f);
    CHECK(knowledge_independent_of_observer(load_fixture(f)));
  }
}

TEST_CASE("the deadline-masked read stays uniform") {
  // All members agree on the observer's guard x <= 2 in every reachable
  // knowledge state: the observer's own deadline y <= 3 hides the reset.
  Network n = load_fixture("fig1.nta");
  ContextualGraph g = build_contextual_graph(n);
  Atom read{0, Rel::Le, 2};
  for (const auto& st : g.states) {
    if (st.a2_loc != 0) continue;
    bool first = satisfies(st.members[0].reg, read);
    bool dead = !satisfies(st.members[0].reg, Atom{1, Rel::Le, 3});
    for (const auto& m : st.members) {
      if (dead) continue;  // past the deadline the edge cannot fire anyway
      CHECK(satisfies(m.reg, read) == first);
    }
  }
}
