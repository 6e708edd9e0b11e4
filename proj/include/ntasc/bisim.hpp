#pragma once
// Equivalence checking: a timed-bisimulation game played on the shared region
// space of two clock-disjoint systems, a generic game for finite labeled
// graphs, the three-part validity report for synthesized networks, and a
// discrete-grid simulation oracle used to falsify equivalences.

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ntasc/contextual.hpp"
#include "ntasc/explore.hpp"
#include "ntasc/synth.hpp"

namespace ntasc {

struct BisimResult {
  bool bisimilar = true;
  // Shortest spoiler strategy found on failure: visible labels, "eps" for
  // silent moves, "delay" for time steps.
  std::vector<std::string> distinguishing;
  size_t positions = 0;

  std::string sequence_str() const;
};

using Relabel = std::function<std::string(const std::string&)>;

struct BisimOptions {
  bool weak = true;
  bool enrich_sync = false;
  Relabel relabel;  // applied to left-side visible labels; identity if unset
  size_t budget = kDefaultBudget;
};

// Both systems must live on one clock table with one maxima vector and touch
// disjoint clocks (see align_union). Time advances the joint region for both
// sides at once; a delay challenge is answered by the same boundary crossing,
// optionally surrounded by silent moves in weak mode.
BisimResult timed_bisim(const FlatSys& left, const FlatSys& right, const BisimOptions& opt);

// Re-bases two systems onto the disjoint union of their clock tables, with
// right-side clocks renamed on collision and the maxima vectors merged so
// both sides step through identical regions.
std::pair<FlatSys, FlatSys> align_union(const FlatSys& a, const FlatSys& b);

// Finite labeled graph for the time-abstract games.
struct Lts {
  struct E {
    int src = -1;
    int tgt = -1;
    std::string label;
    bool silent = false;
  };
  int init = 0;
  int nstates = 0;
  std::vector<E> edges;
};

Lts lts_of(const ContextualGraph& g, const Relabel& relabel = {});
Lts lts_of(const RegionGraph& g, const Relabel& relabel = {});

BisimResult lts_bisim(const Lts& left, const Lts& right, bool weak,
                      size_t budget = kDefaultBudget);

// The three conditions a synthesized network must satisfy against its source:
// (1) the full networks are weakly bisimilar on enriched sync labels after
// mapping the pair labels back, (2) the watched component is preserved, and
// (3) the observer's knowledge graphs match.
struct NscReport {
  BisimResult global;      // item 1
  BisimResult watched;     // item 2
  BisimResult contextual;  // item 3
  bool all() const {
    return global.bisimilar && watched.bisimilar && contextual.bisimilar;
  }
};

NscReport check_def_nsc(const Network& net, const SynthesizedNetwork& sn,
                        size_t budget = kDefaultBudget);

// Product of the watched component's actual behavior with the observer's
// knowledge view, stepped at joint-region granularity. Observer guards and
// invariants are evaluated on believed clock values (exact copies refreshed
// only at synchronizations); the watched component runs on the real ones. A
// synchronization fires only when some believed world announces the same
// landing as the actual run.
Lts knowledge_product_lts(const Network& net, size_t budget = kDefaultBudget);

// Strong game between the knowledge product and the enriched joint region
// graph. Equivalence means decisions driven by believed clock values never
// diverge from the shared-clock originals.
BisimResult product_vs_joint(const Network& net, size_t budget = kDefaultBudget);

// Exhaustive exploration with every delay a multiple of 1/denominator, total
// elapsed time capped by the horizon. Sound but incomplete: it visits a
// subset of the truly reachable states, so it can falsify an equivalence but
// never confirm one.
struct GridState {
  std::vector<int> locs;
  Valuation v;
};

std::vector<GridState> discrete_simulate(const Network& net, long long denominator,
                                         const Rat& horizon, size_t budget = kDefaultBudget);

}  // namespace ntasc
