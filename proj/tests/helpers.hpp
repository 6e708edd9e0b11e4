#pragma once
// Shared test utilities: fixture loading and trace replay against the
// concrete semantics.

#include <stdexcept>
#include <string>

#include "ntasc/explore.hpp"
#include "ntasc/model.hpp"
#include "ntasc/parser.hpp"
#include "ntasc/zones.hpp"

inline std::string fixture_path(const std::string& name) {
  return std::string(NTASC_FIXTURE_DIR) + "/" + name;
}

inline ntasc::Network load_fixture(const std::string& name) {
  ntasc::Network n = ntasc::parse_file(fixture_path(name));
  auto rep = ntasc::validate_network(n);
  if (ntasc::has_errors(rep)) throw std::runtime_error(name + ": " + ntasc::report_str(rep));
  return n;
}

// Replays a discrete path and its concretization under the exact rational
// semantics, checking time monotonicity, invariants across every delay,
// guards of every fired edge at the firing moment, the update rule (all
// resets, then copies in component order), and the recorded locations and
// valuations. Returns an error message, empty when consistent.
inline std::string replay_path(const ntasc::FlatSys& sys,
                               const std::vector<ntasc::PathStep>& steps,
                               const ntasc::Trace& tr) {
  using namespace ntasc;
  if (steps.size() != tr.steps.size()) return "step count mismatch";
  std::vector<int> locs;
  for (const auto& c : sys.comps) locs.push_back(c.init);
  if (tr.init_locs != locs) return "initial locations mismatch";
  Valuation v(sys.clocks.size(), Rat(0));
  Rat now(0);
  for (size_t i = 0; i < sys.comps.size(); ++i)
    if (!inv_sat(sys.comps[i].locations[locs[i]].inv, v)) return "initial invariant violated";
  for (size_t si = 0; si < steps.size(); ++si) {
    const TraceStep& st = tr.steps[si];
    if (st.t < now) return "time moved backwards at step " + std::to_string(si);
    Rat d = st.t - now;
    for (size_t i = 0; i < sys.comps.size(); ++i)
      if (!inv_sat_delay(sys.comps[i].locations[locs[i]].inv, v, d))
        return "delay breaks an invariant at step " + std::to_string(si);
    Valuation pre = delay(v, d);
    now = st.t;
    Valuation post = pre;
    for (auto [ci, ei] : steps[si].fired) {
      const Edge& e = sys.comps[ci].edges[ei];
      if (e.src != locs[ci]) return "edge fires from the wrong location";
      if (!guard_sat(e.guard, pre)) return "guard violated at step " + std::to_string(si);
      for (int c : e.resets) post[c] = Rat(0);
    }
    for (auto [ci, ei] : steps[si].fired)
      for (auto [dst, src] : sys.comps[ci].edges[ei].copies) post[dst] = post[src];
    for (auto [ci, ei] : steps[si].fired) locs[ci] = sys.comps[ci].edges[ei].tgt;
    if (st.locs != locs) return "locations mismatch at step " + std::to_string(si);
    if (st.v != post) return "valuation mismatch at step " + std::to_string(si);
    for (size_t i = 0; i < sys.comps.size(); ++i)
      if (!inv_sat(sys.comps[i].locations[locs[i]].inv, post))
        return "target invariant violated at step " + std::to_string(si);
    v = post;
  }
  return "";
}
