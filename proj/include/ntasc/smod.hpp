#pragma once

// Mirror-system constructions: the relabeled watched automaton, the clock-
// copying estimator that tracks it unobservably, the guarded observer copy
// with an error location, and their assembly whose error reachability decides
// whether shared-clock reads are essential. Includes the scheduled variants
// used when the watched automaton has urgent synchronizations.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ntasc/explore.hpp"
#include "ntasc/model.hpp"
#include "ntasc/zones.hpp"

namespace ntasc {

struct UrgentSyncPresent : std::runtime_error {
  UrgentSyncPresent() : std::runtime_error("watched automaton has an urgent synchronization") {}
};

struct SupremumNotAttained : std::runtime_error {
  SupremumNotAttained()
      : std::runtime_error("an optimal stay needs a strict bound; scheduled variant required") {}
};

// Sync labels are split per announced landing location: "a" -> "a__loc".
std::string announce_label(const std::string& label, const std::string& loc_name);

// Collision-free announced name per (label, watched-automaton target location),
// deterministic for a given network. Used consistently by all builders.
std::map<std::pair<std::string, int>, std::string> announce_map(const Network& net);

// Clock table shared by the mirror constructions: the network clocks followed
// by one shadow per watched-automaton clock, plus an optional scheduler clock.
struct SModClocks {
  std::vector<Clock> clocks;
  std::vector<int> primed;  // original clock -> shadow index (-1 if none)
  int z = -1;
};

SModClocks smod_clock_table(const Network& net, bool with_z);

struct SModSystem {
  std::vector<Clock> clocks;
  TimedAutomaton a1_prime;
  TimedAutomaton a12;
  TimedAutomaton a2mod;
  int sad_loc = -1;                              // error location in a2mod
  std::vector<std::pair<int, int>> clock_bij;    // (shadow, original)
  std::vector<std::string> final_region_labels;  // empty unless scheduled case 2

  FlatSys assembly() const;
};

TimedAutomaton build_a1_prime(const Network& net);

// Estimator that replays local moves freely and refreshes its shadows at every
// synchronization. Throws UrgentSyncPresent unless told to skip the check:
// the unchecked form is sound for error-reachability but not for synthesis.
TimedAutomaton build_a12_simple(const Network& net, const SModClocks& ct,
                                bool allow_urgent = false);

// Observer copy over shadow clocks, with the error location and the
// divergence-detection edges that read the real clocks.
TimedAutomaton build_a2mod(const Network& net, const SModClocks& ct, int* sad_out = nullptr);

// True iff some region state of the watched automaton can neither delay nor
// fire a local edge but has an enabled synchronization.
bool has_urgent_sync(const Network& net, size_t budget = kDefaultBudget);

struct SupDuration {
  enum Kind { Infinite, Attained, Supremum } kind = Attained;
  Rat value = Rat(0);  // total duration; meaningless when Infinite
};

struct RegionState {
  int loc = 0;
  Region reg;  // over the full network clock table
};

struct DurationResult {
  SupDuration sup;
  // Optimal run as watched-automaton edge indices, longest first by total
  // duration with ties broken by lexicographically smallest index sequence.
  std::vector<int> path;
  std::vector<Rat> stays;  // per discrete step: time spent before firing
  // For Infinite results: position in `path` where the repeating part starts;
  // -1 otherwise. The suffix path[loop..] can be iterated forever.
  int loop = -1;
};

// Longest possible total duration of watched-automaton-local behavior from a
// state, maximizing over finitely many acyclic region paths.
DurationResult max_duration_runs(const Network& net, const RegionState& from,
                                 size_t budget = kDefaultBudget);

// Scheduled estimator: follows precomputed optimal stays, driven by a fresh
// clock. Throws SupremumNotAttained if any needed stay ends on a strict bound.
TimedAutomaton build_a12_urgent_case1(const Network& net, const SModClocks& ct,
                                      size_t budget = kDefaultBudget);

// Scheduled estimator plus duplicated-observer tiers for stays whose optimum
// is a supremum: on shadow-invariant expiry the estimator announces the final
// region and the observer continues with those shadow readings frozen.
std::pair<TimedAutomaton, TimedAutomaton> build_case2(const Network& net, const SModClocks& ct,
                                                      std::vector<std::string>* labels_out,
                                                      size_t budget = kDefaultBudget);

// Routes to the simple or scheduled builders. With for_checking set the
// estimator is always the simple one, which decides error reachability even
// for urgent inputs but may not assemble into a usable replacement.
SModSystem build_smod(const Network& net, bool for_checking = false,
                      size_t budget = kDefaultBudget);

enum class Engine { Region, Zone, Contextual, All };

std::optional<Trace> sad_reachable(const SModSystem& smod, Engine engine,
                                   size_t budget = kDefaultBudget);

}  // namespace ntasc
