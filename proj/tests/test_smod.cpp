#include <algorithm>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "ntasc/smod.hpp"

using namespace ntasc;

namespace {

bool has_atom(const Guard& g, const Atom& a) {
  return std::find(g.atoms.begin(), g.atoms.end(), a) != g.atoms.end();
}

}  // namespace

TEST_CASE("announced labels name the landing location") {
  Network n = load_fixture("fig2.nta");
  auto amap = announce_map(n);
  REQUIRE(amap.size() == 1);
  int ls = n.a1.loc_index("ls");
  REQUIRE(ls >= 0);
  CHECK(amap.at({"s", ls}) == "s__ls");
}

TEST_CASE("announced labels avoid collisions deterministically") {
  Network n = load_fixture("fig2.nta");
  // Rename an existing local label to the would-be announced name.
  for (auto& e : n.a2.edges)
    if (e.label == "e") e.label = "s__ls";
  auto amap = announce_map(n);
  CHECK(amap.at({"s", n.a1.loc_index("ls")}) == "s__ls_");
}

TEST_CASE("the mirror clock table shadows watched clocks") {
  Network n = load_fixture("fig2.nta");
  SModClocks ct = smod_clock_table(n, false);
  REQUIRE(ct.clocks.size() == 3);
  CHECK(ct.clocks[2].name == "x_p");
  CHECK(ct.primed == std::vector<int>{2, -1});
  CHECK(ct.z == -1);
  SModClocks wz = smod_clock_table(n, true);
  REQUIRE(wz.clocks.size() == 4);
  CHECK(wz.clocks[3].name == "z");
  CHECK(wz.z == 3);
  // Name collisions pick fresh names.
  Network m = n;
  m.clocks.push_back({"x_p"});
  SModClocks cc = smod_clock_table(m, false);
  CHECK(cc.clocks.back().name == "x_p_");
}

TEST_CASE("the relabeled watched automaton announces its landings") {
  Network n = load_fixture("fig2.nta");
  TimedAutomaton a1p = build_a1_prime(n);
  CHECK(a1p.edges.size() == n.a1.edges.size());
  std::set<std::string> syncs = a1p.labels(ActKind::Sync);
  CHECK(syncs == std::set<std::string>{"s__ls"});
  CHECK(a1p.labels(ActKind::Local) == n.a1.labels(ActKind::Local));
}

TEST_CASE("the simple estimator replays locally and copies at syncs") {
  Network n = load_fixture("fig2.nta");
  SModClocks ct = smod_clock_table(n, false);
  TimedAutomaton est = build_a12_simple(n, ct);
  CHECK(est.locations.size() == n.a1.locations.size());
  CHECK(est.owned_clocks == std::vector<int>{2});
  int nsync = 0, nlocal = 0;
  for (const auto& e : est.edges) {
    if (e.kind == ActKind::Sync) {
      ++nsync;
      CHECK(e.label == "s__ls");
      CHECK(e.copies == std::vector<std::pair<int, int>>{{2, 0}});
    } else {
      ++nlocal;
      CHECK(e.kind == ActKind::Eps);  // replays are unobservable
      for (const auto& a : e.guard.atoms) CHECK(a.clock == 2);  // shadow reads only
      for (int c : e.resets) CHECK(c == 2);
    }
  }
  CHECK(nlocal == 3);                                // a, b, c replays
  CHECK(nsync == (int)est.locations.size());         // refresh from anywhere
}

TEST_CASE("urgency detection and the urgent-estimator guard") {
  CHECK(has_urgent_sync(load_fixture("fig7.nta")));
  CHECK(has_urgent_sync(load_fixture("fig10.nta")));
  CHECK_FALSE(has_urgent_sync(load_fixture("fig2.nta")));
  CHECK_FALSE(has_urgent_sync(load_fixture("fig1.nta")));
  CHECK_FALSE(has_urgent_sync(load_fixture("fig6.nta")));
  Network n7 = load_fixture("fig7.nta");
  SModClocks ct = smod_clock_table(n7, false);
  CHECK_THROWS_AS(build_a12_simple(n7, ct), UrgentSyncPresent);
  CHECK_NOTHROW(build_a12_simple(n7, ct, /*allow_urgent=*/true));
}

TEST_CASE("longest local durations") {
  auto zero_state = [](const Network& n) {
    FlatSys sys(n);
    return RegionState{n.a1.init, region_of(Valuation(sys.clocks.size(), Rat(0)), sys.maxc)};
  };
  Network n7 = load_fixture("fig7.nta");
  DurationResult d7 = max_duration_runs(n7, zero_state(n7));
  CHECK(d7.sup.kind == SupDuration::Attained);
  CHECK(d7.sup.value == Rat(4));  // b at time 1 resets x, then dwell to x = 3
  REQUIRE(d7.path.size() == 1);
  CHECK(d7.stays == std::vector<Rat>{Rat(1)});
  CHECK(d7.loop == -1);

  Network n10 = load_fixture("fig10.nta");
  DurationResult d10 = max_duration_runs(n10, zero_state(n10));
  CHECK(d10.sup.kind == SupDuration::Supremum);
  CHECK(d10.sup.value == Rat(4));  // b before time 1: the bound is open
  CHECK(d10.loop == -1);

  Network n6 = load_fixture("fig6.nta");
  DurationResult d6 = max_duration_runs(n6, zero_state(n6));
  CHECK(d6.sup.kind == SupDuration::Infinite);
  CHECK(d6.loop >= 0);
  CHECK_FALSE(d6.path.empty());
}

TEST_CASE("scheduled estimators: attained optima versus suprema") {
  Network n7 = load_fixture("fig7.nta");
  SModClocks ct7 = smod_clock_table(n7, true);
  TimedAutomaton sched = build_a12_urgent_case1(n7, ct7);
  bool replay_at_one = false;
  for (const auto& e : sched.edges)
    if (e.kind == ActKind::Eps && has_atom(e.guard, {ct7.z, Rel::Eq, 1}) &&
        std::find(e.resets.begin(), e.resets.end(), ct7.primed[0]) != e.resets.end())
      replay_at_one = true;
  CHECK(replay_at_one);

  Network n10 = load_fixture("fig10.nta");
  SModClocks ct10 = smod_clock_table(n10, true);
  CHECK_THROWS_AS(build_a12_urgent_case1(n10, ct10), SupremumNotAttained);
  std::vector<std::string> labels;
  auto tiers = build_case2(n10, ct10, &labels);
  REQUIRE_FALSE(labels.empty());
  for (const auto& l : labels) CHECK(l.rfind("final_region__R", 0) == 0);
  // The observer copy grew one frozen tier per final region.
  bool tiered = false;
  for (const auto& loc : tiers.second.locations)
    if (loc.name.find("__R0") != std::string::npos) tiered = true;
  CHECK(tiered);
}

TEST_CASE("assembled checking systems route to both engines") {
  struct Expect {
    const char* file;
    bool reachable;
  } cases[] = {{"fig1.nta", false},         {"fig2.nta", false},
               {"fig2_plus_f.nta", true},   {"fig3.nta", true},
               {"fig4.nta", true},          {"fig6.nta", true},
               {"fig7.nta", false},         {"fig10.nta", false},
               {"pspace_reach.nta", true},  {"pspace_unreach.nta", false},
               {"pspace_vacuous.nta", true}};
  for (const auto& c : cases) {
    INFO(c.file);
    Network n = load_fixture(c.file);
    SModSystem chk = build_smod(n, true);
    CHECK(chk.sad_loc >= 0);
    auto tr = sad_reachable(chk, Engine::All);  // throws on engine disagreement
    CHECK(tr.has_value() == c.reachable);
    if (tr) {
      CHECK_FALSE(tr->steps.empty());
      CHECK(tr->steps.back().locs[2] == chk.sad_loc);
    }
  }
  SModSystem chk = build_smod(load_fixture("fig2.nta"), true);
  CHECK_THROWS_AS(sad_reachable(chk, Engine::Contextual), std::invalid_argument);
}

TEST_CASE("checking mode always uses the simple estimator") {
  Network n = load_fixture("fig10.nta");
  SModSystem chk = build_smod(n, true);
  CHECK(chk.final_region_labels.empty());
  SModSystem full = build_smod(n, false);
  CHECK_FALSE(full.final_region_labels.empty());
  SModSystem f7 = build_smod(load_fixture("fig7.nta"), false);
  CHECK(f7.final_region_labels.empty());  // the optimum is attained: no tiers
  CHECK(f7.clock_bij == std::vector<std::pair<int, int>>{{2, 0}});
}
