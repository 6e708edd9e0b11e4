#pragma once

// What the environment component can know about its neighbour: unobservable-
// reachability closures, the knowledge-set transition graph, and the search
// for "restrictions", i.e. reachable knowledge states whose members disagree
// on a guard or invariant the observer reads.

#include <optional>
#include <string>
#include <vector>

#include "ntasc/explore.hpp"
#include "ntasc/model.hpp"

namespace ntasc {

// One possible world: a location of component 0 plus a region over the full
// clock table (the interleaving of both components' fractional parts is what
// the observer's guards can see).
struct Member {
  int loc = 0;
  Region reg;
  bool operator==(const Member&) const = default;
};

bool member_less(const Member& a, const Member& b);

struct ContextualState {
  int a2_loc = 0;
  std::vector<Member> members;  // nonempty, sorted by member_less, deduped

  bool operator==(const ContextualState&) const = default;
};

struct ContextualStateHash {
  size_t operator()(const ContextualState& s) const;
};

struct ContextualEdge {
  int src = -1;
  int tgt = -1;
  bool delay = false;
  std::string label;  // action name, "eps", enriched sync, or "delay"
};

struct ContextualGraph {
  FlatSys sys;                // two components: watched automaton, observer
  std::vector<int> x2own;     // observer-owned clock indices
  std::vector<ContextualState> states;
  std::vector<ContextualEdge> edges;
  std::vector<std::vector<int>> out;
  int init = -1;

  std::string state_str(int i) const;
};

// Zero-delay closure of one joint state under component-0 local edges, kept
// legal for both invariants. Result is sorted and includes the seed.
std::vector<Member> ur_set(const FlatSys& sys, int a1_loc, int a2_loc, const Region& reg);

// Knowledge-set graph. Delay edges advance every member in step, aligned on
// the observer-clock region so all members keep one shared observer view.
// Member sets are maintained closed under zero-delay unobservable moves.
ContextualGraph build_contextual_graph(const Network& net, size_t budget = kDefaultBudget);

std::string export_dot(const ContextualGraph& g);

struct RestrictionWitness {
  ContextualState state;   // where the disagreement shows (two-member core)
  std::string step;        // offending action label, "eps", or "delay"
  Member enabling;
  Member blocking;

  std::string describe(const FlatSys& sys) const;
};

// Exact search for a reachable knowledge state whose members disagree on an
// observer-read constraint: a local guard, or the observer invariant across a
// delay or after an action. Tracks one candidate pair of worlds at a time
// (real plus mirror over duplicated clocks), which is complete for the
// pairwise disagreement property and cheaper than full powersets.
// Returns the first witness in breadth-first order.
std::optional<RestrictionWitness> find_restriction(const Network& net,
                                                   size_t budget = kDefaultBudget);

// Every member of every reachable knowledge state is a reachable joint state
// of the plain product semantics.
bool members_all_reachable(const Network& net, size_t budget = kDefaultBudget);

// With no restriction, knowledge evolution must not depend on the observer's
// own-clock guards: rebuilding the graph with those atoms dropped yields the
// same watched-component knowledge along every common label path.
bool knowledge_independent_of_observer(const Network& net, size_t budget = kDefaultBudget);

}  // namespace ntasc
