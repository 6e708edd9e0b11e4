#pragma once

// Difference-bound-matrix reachability engine and concrete trace extraction.
// Zones complement the region engine: same verdicts, usually far fewer states.
// Diagonal guards are rejected here; callers route those to the region engine.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ntasc/explore.hpp"
#include "ntasc/model.hpp"

namespace ntasc {

// Packed bound: value*2 | (1 if weak <=, 0 if strict <). kInfBound compares
// greater than every finite bound.
using Bound = int64_t;
inline constexpr Bound kInfBound = INT64_MAX / 4;
inline Bound bound_le(long long k) { return (Bound)(k * 2 + 1); }
inline Bound bound_lt(long long k) { return (Bound)(k * 2); }
inline long long bound_value(Bound b) { return (long long)(b >> 1); }
inline bool bound_weak(Bound b) { return (b & 1) != 0; }
inline Bound bound_add(Bound a, Bound b) {
  if (a >= kInfBound || b >= kInfBound) return kInfBound;
  return ((a >> 1) + (b >> 1)) * 2 + ((a & 1) & (b & 1));
}

// DBM over clocks 1..n with reference clock 0. Kept canonical by the ops.
struct Dbm {
  int n = 0;                 // number of real clocks
  std::vector<Bound> m;      // (n+1)*(n+1), row-major

  static Dbm zero(int n);
  Bound& at(int i, int j) { return m[(size_t)i * (n + 1) + j]; }
  Bound at(int i, int j) const { return m[(size_t)i * (n + 1) + j]; }

  bool empty() const;
  void canonicalize();
  void up();                                   // unbounded delay
  bool constrain(int i, int j, Bound b);       // x_i - x_j <= b; false if emptied
  bool constrain(const Atom& a);               // clock indices are 1-based here
  void reset(int x);                           // x := 0
  void copy_clock(int dst, int src);           // dst := src
  void extrapolate(const std::vector<long long>& maxc);  // classic max-bound
  bool operator==(const Dbm&) const = default;
};

size_t dbm_hash(const Dbm& d);

// One discrete transition of a flat system: the component edges that fired.
struct PathStep {
  std::vector<std::pair<int, int>> fired;  // (component, edge index)
  std::string label;                       // rendered action name
};

struct TraceStep {
  Rat t;                        // absolute time of the action
  std::string label;
  std::vector<int> locs;        // locations after the step
  Valuation v;                  // clock values after the step
};

struct Trace {
  std::vector<int> init_locs;
  std::vector<TraceStep> steps;
};

std::string trace_str(const Trace& tr, const FlatSys& sys);

// Assigns concrete firing times to a feasible discrete path and replays it.
// Throws if the constraint system is infeasible (indicates an engine bug).
Trace make_trace(const FlatSys& sys, const std::vector<PathStep>& steps);

// Zone-based search for any state whose component comp sits at location loc.
// Returns the breadth-first shortest witness path, or nullopt.
std::optional<std::vector<PathStep>> zone_reach(const FlatSys& sys, int comp, int loc,
                                                size_t budget = kDefaultBudget);

// Region-based counterpart, same contract.
std::optional<std::vector<PathStep>> region_reach(const FlatSys& sys, int comp, int loc,
                                                  size_t budget = kDefaultBudget);

}  // namespace ntasc
