#pragma once
// Core data model: clocks, constraints, timed automata, two-component networks.

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ntasc {

using Rat = boost::rational<long long>;

std::string rat_str(const Rat& r);

enum class Rel : uint8_t { Lt, Le, Eq, Ge, Gt };

const char* rel_str(Rel r);
bool rel_holds(const Rat& lhs, Rel r, long long k);

// Atomic constraint over one clock: x REL k, k a natural number.
struct Atom {
  int clock = -1;
  Rel rel = Rel::Le;
  long long k = 0;
  bool operator==(const Atom&) const = default;
};

// Difference constraint x - y REL k. Only produced by the transformation
// stage; plain input models are rejected if they contain one.
struct DiagAtom {
  int x = -1;
  int y = -1;
  Rel rel = Rel::Le;
  long long k = 0;
  bool operator==(const DiagAtom&) const = default;
};

struct Guard {
  std::vector<Atom> atoms;
  std::vector<DiagAtom> diags;
  bool trivial() const { return atoms.empty() && diags.empty(); }
  bool operator==(const Guard&) const = default;
};

// Location invariants are conjunctions of upper bounds (x <= k or x < k).
using Invariant = std::vector<Atom>;

enum class ActKind : uint8_t { Eps, Local, Sync };

struct Edge {
  int src = -1;
  int tgt = -1;
  Guard guard;
  ActKind kind = ActKind::Eps;
  std::string label;                         // empty iff kind == Eps
  std::vector<int> resets;                   // clock indices, sorted
  std::vector<std::pair<int, int>> copies;   // dst := src, applied after resets
  bool operator==(const Edge&) const = default;
};

struct Location {
  std::string name;
  Invariant inv;
};

struct TimedAutomaton {
  std::string name;
  std::vector<int> owned_clocks;  // clocks this automaton may reset
  std::vector<Location> locations;
  int init = 0;
  std::vector<Edge> edges;

  int loc_index(const std::string& n) const;  // -1 if absent
  std::set<std::string> labels(ActKind kind) const;
  std::set<std::string> all_labels() const;
};

struct Clock {
  std::string name;
};

// Two-component network A1 || A2 over a shared clock table. `synthesized`
// marks transformation output, where copies and difference constraints are
// legal; plain input models may use neither.
struct Network {
  std::vector<Clock> clocks;
  TimedAutomaton a1;
  TimedAutomaton a2;
  bool synthesized = false;

  int clock_index(const std::string& n) const;  // -1 if absent
  const TimedAutomaton& comp(int i) const { return i == 0 ? a1 : a2; }
  TimedAutomaton& comp(int i) { return i == 0 ? a1 : a2; }
};

using Valuation = std::vector<Rat>;

bool atom_sat(const Atom& a, const Valuation& v);
bool diag_sat(const DiagAtom& d, const Valuation& v);
bool guard_sat(const Guard& g, const Valuation& v);
bool inv_sat(const Invariant& inv, const Valuation& v);
// Invariant still satisfiable after waiting d time units.
bool inv_sat_delay(const Invariant& inv, const Valuation& v, const Rat& d);
Valuation delay(const Valuation& v, const Rat& d);
// Resets first, then copies; copy sources read the post-reset valuation.
Valuation apply_edge_updates(const Valuation& v, const Edge& e);
Valuation apply_sync_updates(const Valuation& v, const Edge& e1, const Edge& e2);

struct Issue {
  enum Sev { Error, Warning } sev = Error;
  std::string msg;
};
using Report = std::vector<Issue>;

bool has_errors(const Report& r);
std::string report_str(const Report& r);

// Static well-formedness: ownership discipline, sync label agreement,
// invariant shape, copy placement, reserved names.
Report validate_network(const Network& net);

// Labels synchronized by both components.
std::set<std::string> sync_alphabet(const Network& net);

// Clocks reset by component i (the set C_i).
std::set<int> reset_clocks(const TimedAutomaton& a);

// Largest constant each clock is compared against anywhere in the network.
std::vector<long long> max_constants(const Network& net);

// Moves atoms over A1-owned clocks from A2's synchronizing edges onto the
// matching A1 edges. Idempotent; reports what moved.
Network normalize_sync_guards(const Network& net, Report* rep = nullptr);

// Heuristic non-zenoness check: every syntactic cycle must reset a clock
// that the same cycle bounds from below. Warnings only.
Report check_nonzeno(const Network& net);

// True if no location has two outgoing edges with the same label, counting
// the silent label as a label of its own.
bool is_deterministic(const TimedAutomaton& a);

}  // namespace ntasc
