#pragma once

// Flattening of automaton collections into one clock table plus reachable
// region-graph construction. The region graph is the finite abstraction all
// deciders and equivalence checks run on.

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ntasc/model.hpp"
#include "ntasc/regions.hpp"

namespace ntasc {

inline constexpr size_t kDefaultBudget = 1000000;

// Reads NTASC_BUDGET if set, otherwise returns the fallback.
size_t effective_budget(size_t fallback = kDefaultBudget);

// A set of automata over one shared clock table. Components synchronize
// CSP-style on shared non-eps labels; clock maxima are unified across copy
// chains so copies stay region-representable.
struct FlatSys {
  std::vector<Clock> clocks;
  std::vector<long long> maxc;
  std::vector<TimedAutomaton> comps;
  // Names used in enriched sync signatures; align_union keeps them in the
  // original coordinates so both sides of a comparison print alike.
  std::vector<std::string> label_names;

  FlatSys() = default;
  explicit FlatSys(const Network& net);
  FlatSys(std::vector<Clock> clocks_, std::vector<TimedAutomaton> comps_);

  // Components that listen on a sync label.
  std::vector<int> sync_participants(const std::string& label) const;

 private:
  void finish();
};

struct SymState {
  std::vector<int> locs;
  Region reg;
  bool operator==(const SymState&) const = default;
};

struct SymStateHash {
  size_t operator()(const SymState& s) const {
    size_t h = region_hash(s.reg);
    for (int l : s.locs) h = h * 1000003u + (size_t)(l + 1);
    return h;
  }
};

struct GraphEdge {
  int src = -1;
  int tgt = -1;
  ActKind kind = ActKind::Eps;  // meaningless when delay
  bool delay = false;
  std::string label;  // empty for eps and delay
  // Which component moved; -1 for delay and multi-party sync.
  int comp = -1;
  // (component, edge index) pairs that fired; several for a sync.
  std::vector<std::pair<int, int>> fired;
};

struct RegionGraph {
  FlatSys sys;
  std::vector<SymState> states;
  std::vector<GraphEdge> edges;
  std::vector<std::vector<int>> out;  // state -> edge indices
  int init = -1;

  const SymState& state(int i) const { return states[i]; }
  std::string state_str(int i) const;
};

// Reachable region graph, breadth-first, deterministic ordering.
// When enrich_sync is set, sync labels become "a@loc#sig" where loc is
// component 0's target location and sig canonically describes the region
// projected to component 0's owned clocks.
RegionGraph build_region_graph(const FlatSys& sys, size_t budget = kDefaultBudget,
                               bool enrich_sync = false);

std::string export_dot(const RegionGraph& g);

// Successor computation shared with game-based checks.
struct StepOptions {
  bool enrich_sync = false;
};

// All discrete successors of (locs, reg); appended as (edge-template, state).
void discrete_successors(const FlatSys& sys, const std::vector<int>& locs, const Region& reg,
                         const StepOptions& opt,
                         std::vector<std::pair<GraphEdge, SymState>>& out);

// Delay successor: next region boundary step, or the self-fixpoint when the
// region is maximal. Nullopt when an invariant blocks the step.
std::optional<SymState> delay_successor(const FlatSys& sys, const std::vector<int>& locs,
                                        const Region& reg);

bool invariants_hold(const FlatSys& sys, const std::vector<int>& locs, const Region& reg);

std::string enriched_label(const FlatSys& sys, const std::string& label, int comp0_tgt,
                           const Region& reg);

}  // namespace ntasc
