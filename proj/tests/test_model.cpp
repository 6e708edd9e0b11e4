#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "ntasc/model.hpp"
#include "ntasc/parser.hpp"

using namespace ntasc;

namespace {

// Minimal valid network: A1 owns x, A2 owns y, one synchronization s.
Network base_net() {
  Network n;
  n.clocks = {{"x"}, {"y"}};
  n.a1.name = "A1";
  n.a1.owned_clocks = {0};
  n.a1.locations = {{"l0", {}}, {"l1", {}}};
  n.a1.init = 0;
  Edge e1;
  e1.src = 0;
  e1.tgt = 1;
  e1.kind = ActKind::Sync;
  e1.label = "s";
  e1.guard.atoms.push_back({0, Rel::Ge, 1});
  e1.resets = {0};
  n.a1.edges.push_back(e1);
  n.a2.name = "A2";
  n.a2.owned_clocks = {1};
  n.a2.locations = {{"m0", {}}, {"m1", {}}};
  n.a2.init = 0;
  Edge e2;
  e2.src = 0;
  e2.tgt = 1;
  e2.kind = ActKind::Sync;
  e2.label = "s";
  e2.guard.atoms.push_back({1, Rel::Le, 2});
  n.a2.edges.push_back(e2);
  return n;
}

bool report_mentions(const Report& r, const std::string& part) {
  return std::any_of(r.begin(), r.end(),
                     [&](const Issue& i) { return i.msg.find(part) != std::string::npos; });
}

}  // namespace

TEST_CASE("rational rendering") {
  CHECK(rat_str(Rat(0)) == "0");
  CHECK(rat_str(Rat(2)) == "2");
  CHECK(rat_str(Rat(3, 2)) == "3/2");
  CHECK(rat_str(Rat(4, 2)) == "2");
}

TEST_CASE("relation evaluation") {
  CHECK(rel_holds(Rat(1), Rel::Lt, 2));
  CHECK_FALSE(rel_holds(Rat(2), Rel::Lt, 2));
  CHECK(rel_holds(Rat(2), Rel::Le, 2));
  CHECK_FALSE(rel_holds(Rat(5, 2), Rel::Le, 2));
  CHECK(rel_holds(Rat(2), Rel::Eq, 2));
  CHECK_FALSE(rel_holds(Rat(5, 2), Rel::Eq, 2));
  CHECK(rel_holds(Rat(2), Rel::Ge, 2));
  CHECK_FALSE(rel_holds(Rat(3, 2), Rel::Ge, 2));
  CHECK(rel_holds(Rat(5, 2), Rel::Gt, 2));
  CHECK_FALSE(rel_holds(Rat(2), Rel::Gt, 2));
}

TEST_CASE("constraint satisfaction on valuations") {
  Valuation v = {Rat(1), Rat(5, 2)};
  CHECK(atom_sat({0, Rel::Eq, 1}, v));
  CHECK(atom_sat({1, Rel::Gt, 2}, v));
  CHECK_FALSE(atom_sat({1, Rel::Le, 2}, v));
  CHECK(diag_sat({1, 0, Rel::Eq, 0}, {Rat(2), Rat(2)}));
  CHECK(diag_sat({1, 0, Rel::Gt, 1}, v));
  CHECK_FALSE(diag_sat({0, 1, Rel::Ge, 0}, v));
  Guard g;
  g.atoms = {{0, Rel::Ge, 1}, {1, Rel::Le, 3}};
  CHECK(guard_sat(g, v));
  g.atoms.push_back({0, Rel::Lt, 1});
  CHECK_FALSE(guard_sat(g, v));
  Invariant inv = {{0, Rel::Le, 1}};
  CHECK(inv_sat(inv, v));
  CHECK(inv_sat_delay(inv, v, Rat(0)));
  CHECK_FALSE(inv_sat_delay(inv, v, Rat(1, 2)));
  Invariant strict = {{0, Rel::Lt, 2}};
  CHECK(inv_sat_delay(strict, v, Rat(1, 2)));
  CHECK_FALSE(inv_sat_delay(strict, v, Rat(1)));
}

TEST_CASE("updates apply resets before copies") {
  Edge e;
  e.resets = {0};
  e.copies = {{1, 0}};
  Valuation v = {Rat(3), Rat(5)};
  Valuation out = apply_edge_updates(v, e);
  CHECK(out[0] == Rat(0));
  CHECK(out[1] == Rat(0));  // copy reads the post-reset value

  Edge e1;
  e1.resets = {0};
  Edge e2;
  e2.copies = {{1, 0}};
  Valuation both = apply_sync_updates(v, e1, e2);
  CHECK(both[0] == Rat(0));
  CHECK(both[1] == Rat(0));  // the second edge's copy sees the first edge's reset
}

TEST_CASE("delay shifts every clock") {
  Valuation v = delay({Rat(0), Rat(1, 2)}, Rat(3, 2));
  CHECK(v[0] == Rat(3, 2));
  CHECK(v[1] == Rat(2));
}

TEST_CASE("all fixtures validate cleanly") {
  const char* names[] = {"fig1.nta",          "fig2.nta",        "fig2_plus_f.nta",
                         "fig3.nta",          "fig3_paper.nta",  "fig3_a2prime.nta",
                         "fig4.nta",          "fig4_a2prime.nta", "fig6.nta",
                         "fig6_a2prime.nta",  "fig7.nta",        "fig10.nta",
                         "pspace_reach.nta",  "pspace_unreach.nta", "pspace_vacuous.nta"};
  for (const char* f : names) {
    INFO(f);
    Network n = parse_file(fixture_path(f));
    Report rep = validate_network(n);
    CHECK_FALSE(has_errors(rep));
  }
}

TEST_CASE("validation rejects a sync label without a counterpart") {
  Network n = base_net();
  n.a2.edges.clear();
  Report rep = validate_network(n);
  CHECK(has_errors(rep));
  CHECK(report_mentions(rep, "no counterpart"));
}

TEST_CASE("validation rejects copies outside the synthesized tier") {
  Network n = base_net();
  n.a2.edges[0].copies = {{1, 0}};
  Report rep = validate_network(n);
  CHECK(has_errors(rep));
  CHECK(report_mentions(rep, "copy clause"));
}

TEST_CASE("validation rejects copies on non-synchronizing edges") {
  Network n = base_net();
  n.synthesized = true;
  Edge loc_edge;
  loc_edge.src = 0;
  loc_edge.tgt = 1;
  loc_edge.kind = ActKind::Local;
  loc_edge.label = "u";
  loc_edge.copies = {{1, 1}};
  n.a2.edges.push_back(loc_edge);
  Report rep = validate_network(n);
  CHECK(has_errors(rep));
  CHECK(report_mentions(rep, "non-synchronizing"));
}

TEST_CASE("validation rejects difference constraints outside the synthesized tier") {
  Network n = base_net();
  n.a2.edges[0].guard.diags.push_back({0, 1, Rel::Le, 0});
  Report rep = validate_network(n);
  CHECK(has_errors(rep));
  CHECK(report_mentions(rep, "difference constraint"));
  n.synthesized = true;
  CHECK_FALSE(has_errors(validate_network(n)));
}

TEST_CASE("validation rejects the watched automaton reading an observer-reset clock") {
  Network n = base_net();
  n.a2.edges[0].resets = {1};
  n.a1.edges[0].guard.atoms.push_back({1, Rel::Ge, 1});
  Report rep = validate_network(n);
  CHECK(has_errors(rep));
  CHECK(report_mentions(rep, "reads clock y"));
}

TEST_CASE("validation rejects resetting a clock the component does not own") {
  Network n = base_net();
  n.a1.edges[0].resets = {0, 1};
  Report rep = validate_network(n);
  CHECK(has_errors(rep));
  CHECK(report_mentions(rep, "does not own"));
}

TEST_CASE("validation rejects label reuse across components") {
  Network n = base_net();
  Edge a1loc;
  a1loc.src = 0;
  a1loc.tgt = 1;
  a1loc.kind = ActKind::Local;
  a1loc.label = "u";
  n.a1.edges.push_back(a1loc);
  Edge a2loc = a1loc;  // same local label on the other side
  n.a2.edges.push_back(a2loc);
  Report rep = validate_network(n);
  CHECK(has_errors(rep));
  CHECK(report_mentions(rep, "is local to"));
}

TEST_CASE("validation rejects duplicate names and shared ownership") {
  Network n = base_net();
  n.clocks[1].name = "x";
  CHECK(report_mentions(validate_network(n), "duplicate clock name"));
  Network m = base_net();
  m.a2.owned_clocks = {0, 1};
  CHECK(report_mentions(validate_network(m), "owned by both"));
}

TEST_CASE("sync alphabet and reset clocks on fixtures") {
  Network f2 = load_fixture("fig2.nta");
  CHECK(sync_alphabet(f2) == std::set<std::string>{"s"});
  CHECK(reset_clocks(f2.a1) == std::set<int>{0});
  CHECK(reset_clocks(f2.a2) == std::set<int>{1});
  Network f3 = load_fixture("fig3.nta");
  CHECK(sync_alphabet(f3).empty());
}

TEST_CASE("maximal constants per clock") {
  Network f2 = load_fixture("fig2.nta");
  std::vector<long long> m = max_constants(f2);
  REQUIRE(m.size() == 2);
  CHECK(m[0] == 4);  // x: the observer's invariant x <= 4 dominates
  CHECK(m[1] == 2);  // y: the synchronization guard y >= 2
}

TEST_CASE("sync guard normalization moves watched-clock atoms") {
  Network n = base_net();
  n.a2.edges[0].guard.atoms.push_back({0, Rel::Ge, 2});
  Report rep;
  Network norm = normalize_sync_guards(n, &rep);
  // The atom over x moved to the matching A1 edge; y stays put.
  for (const auto& a : norm.a2.edges[0].guard.atoms) CHECK(a.clock == 1);
  bool found = false;
  for (const auto& a : norm.a1.edges[0].guard.atoms)
    if (a == Atom{0, Rel::Ge, 2}) found = true;
  CHECK(found);
  CHECK(rep.size() == 1);
  CHECK(report_mentions(rep, "moved 1 atom(s)"));
  // Idempotent.
  CHECK(serialize(normalize_sync_guards(norm)) == serialize(norm));
}

TEST_CASE("determinism counts the silent label as a label") {
  CHECK(is_deterministic(load_fixture("fig3.nta").a2));
  CHECK_FALSE(is_deterministic(load_fixture("fig6.nta").a2));
  CHECK_FALSE(is_deterministic(load_fixture("fig3_paper.nta").a2));
  TimedAutomaton a;
  a.locations = {{"l0", {}}, {"l1", {}}};
  Edge e;
  e.src = 0;
  e.tgt = 1;
  e.kind = ActKind::Eps;
  a.edges = {e, e};
  CHECK_FALSE(is_deterministic(a));
  a.edges.pop_back();
  Edge f;
  f.src = 0;
  f.tgt = 1;
  f.kind = ActKind::Local;
  f.label = "u";
  a.edges.push_back(f);
  CHECK(is_deterministic(a));
}

TEST_CASE("nonzeno heuristic flags unguarded cycles only") {
  // Self-loop that resets x and requires x >= 1: time must pass each round.
  CHECK(check_nonzeno(load_fixture("fig6.nta")).empty());
  Network n = base_net();
  Edge loop;
  loop.src = 0;
  loop.tgt = 0;
  loop.kind = ActKind::Local;
  loop.label = "u";
  n.a1.edges.push_back(loop);
  Report rep = check_nonzeno(n);
  CHECK_FALSE(rep.empty());
  CHECK_FALSE(has_errors(rep));  // warnings only
  CHECK(report_mentions(rep, "zeno"));
}
