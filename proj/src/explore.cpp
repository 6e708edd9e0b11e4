#include "ntasc/explore.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <set>
#include <sstream>

namespace ntasc {

size_t effective_budget(size_t fallback) {
  if (const char* env = std::getenv("NTASC_BUDGET")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return (size_t)v;
  }
  return fallback;
}

FlatSys::FlatSys(const Network& net) {
  clocks = net.clocks;
  comps = {net.a1, net.a2};
  finish();
}

FlatSys::FlatSys(std::vector<Clock> clocks_, std::vector<TimedAutomaton> comps_)
    : clocks(std::move(clocks_)), comps(std::move(comps_)) {
  finish();
}

void FlatSys::finish() {
  label_names.clear();
  for (const auto& c : clocks) label_names.push_back(c.name);
  maxc.assign(clocks.size(), 0);
  auto bump = [&](int c, long long k) {
    if (c >= 0 && (size_t)c < maxc.size()) maxc[c] = std::max(maxc[c], k);
  };
  for (const auto& ta : comps) {
    for (const auto& loc : ta.locations)
      for (const auto& a : loc.inv) bump(a.clock, a.k);
    for (const auto& e : ta.edges) {
      for (const auto& a : e.guard.atoms) bump(a.clock, a.k);
      for (const auto& d : e.guard.diags) {
        long long m = d.k < 0 ? -d.k : d.k;
        bump(d.x, m);
        bump(d.y, m);
      }
    }
  }
  // Copies require matching maxima on both ends; unify along copy chains.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& ta : comps)
      for (const auto& e : ta.edges)
        for (auto [dst, src] : e.copies) {
          long long m = std::max(maxc[dst], maxc[src]);
          if (maxc[dst] != m || maxc[src] != m) {
            maxc[dst] = maxc[src] = m;
            changed = true;
          }
        }
  }
}

std::vector<int> FlatSys::sync_participants(const std::string& label) const {
  std::vector<int> out;
  for (size_t i = 0; i < comps.size(); ++i) {
    for (const auto& e : comps[i].edges)
      if (e.kind == ActKind::Sync && e.label == label) {
        out.push_back((int)i);
        break;
      }
  }
  return out;
}

bool invariants_hold(const FlatSys& sys, const std::vector<int>& locs, const Region& reg) {
  for (size_t i = 0; i < sys.comps.size(); ++i)
    if (!satisfies(reg, sys.comps[i].locations[locs[i]].inv)) return false;
  return true;
}

std::string enriched_label(const FlatSys& sys, const std::string& label, int comp0_tgt,
                           const Region& reg) {
  const auto& owned = sys.comps[0].owned_clocks;
  Region proj = project(reg, owned);
  std::vector<Clock> names;
  std::vector<long long> pmax;
  for (int c : owned) {
    names.push_back(sys.clocks[c]);
    pmax.push_back(sys.maxc[c]);
  }
  return label + "@" + sys.comps[0].locations[comp0_tgt].name + "#" +
         region_str(proj, names, pmax);
}

void discrete_successors(const FlatSys& sys, const std::vector<int>& locs, const Region& reg,
                         const StepOptions& opt,
                         std::vector<std::pair<GraphEdge, SymState>>& out) {
  // Local and eps moves, one component at a time.
  for (size_t i = 0; i < sys.comps.size(); ++i) {
    const auto& ta = sys.comps[i];
    for (size_t ei = 0; ei < ta.edges.size(); ++ei) {
      const Edge& e = ta.edges[ei];
      if (e.src != locs[i] || e.kind == ActKind::Sync) continue;
      if (!satisfies(reg, e.guard, sys.maxc)) continue;
      Region r2 = apply_updates(reg, e, sys.maxc);
      std::vector<int> l2 = locs;
      l2[i] = e.tgt;
      if (!invariants_hold(sys, l2, r2)) continue;
      GraphEdge ge;
      ge.kind = e.kind;
      ge.label = e.kind == ActKind::Eps ? "" : e.label;
      ge.comp = (int)i;
      ge.fired = {{(int)i, (int)ei}};
      out.push_back({ge, SymState{std::move(l2), std::move(r2)}});
    }
  }
  // Synchronizations: every listening component fires one matching edge.
  std::set<std::string> labels;
  for (size_t i = 0; i < sys.comps.size(); ++i)
    for (const auto& e : sys.comps[i].edges)
      if (e.kind == ActKind::Sync && e.src == locs[i]) labels.insert(e.label);
  for (const auto& lab : labels) {
    std::vector<int> parts = sys.sync_participants(lab);
    if (parts.empty()) continue;  // CSP: a label's sole owner fires alone
    // Candidate edges per participant, guards already checked.
    std::vector<std::vector<int>> cand(parts.size());
    bool ok = true;
    for (size_t pi = 0; pi < parts.size() && ok; ++pi) {
      const auto& edges = sys.comps[parts[pi]].edges;
      for (size_t ei = 0; ei < edges.size(); ++ei) {
        const Edge& e = edges[ei];
        if (e.kind == ActKind::Sync && e.label == lab && e.src == locs[parts[pi]] &&
            satisfies(reg, e.guard, sys.maxc))
          cand[pi].push_back((int)ei);
      }
      ok = !cand[pi].empty();
    }
    if (!ok) continue;
    std::vector<size_t> pick(parts.size(), 0);
    while (true) {
      auto edge_of = [&](size_t pi) -> const Edge& {
        return sys.comps[parts[pi]].edges[cand[pi][pick[pi]]];
      };
      // Resets of every edge first, then copies in component order.
      std::vector<int> resets;
      for (size_t pi = 0; pi < parts.size(); ++pi)
        resets.insert(resets.end(), edge_of(pi).resets.begin(), edge_of(pi).resets.end());
      std::sort(resets.begin(), resets.end());
      resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
      Region r2 = apply_reset(reg, resets);
      for (size_t pi = 0; pi < parts.size(); ++pi)
        for (auto [dst, src] : edge_of(pi).copies) r2 = apply_copy(r2, dst, src, sys.maxc);
      std::vector<int> l2 = locs;
      for (size_t pi = 0; pi < parts.size(); ++pi) l2[parts[pi]] = edge_of(pi).tgt;
      if (invariants_hold(sys, l2, r2)) {
        GraphEdge ge;
        ge.kind = ActKind::Sync;
        ge.label = opt.enrich_sync && parts[0] == 0
                       ? enriched_label(sys, lab, l2[0], r2)
                       : lab;
        ge.comp = -1;
        for (size_t pi = 0; pi < parts.size(); ++pi)
          ge.fired.push_back({parts[pi], cand[pi][pick[pi]]});
        out.push_back({ge, SymState{std::move(l2), std::move(r2)}});
      }
      // Next combination.
      size_t pi = 0;
      while (pi < parts.size() && ++pick[pi] == cand[pi].size()) {
        pick[pi] = 0;
        ++pi;
      }
      if (pi == parts.size()) break;
    }
  }
}

std::optional<SymState> delay_successor(const FlatSys& sys, const std::vector<int>& locs,
                                        const Region& reg) {
  auto next = time_successor(reg, sys.maxc);
  if (!next) {
    // Maximal region: time passes without changing anything.
    return SymState{locs, reg};
  }
  if (!invariants_hold(sys, locs, *next)) return std::nullopt;
  return SymState{locs, std::move(*next)};
}

RegionGraph build_region_graph(const FlatSys& sys, size_t budget, bool enrich_sync) {
  RegionGraph g;
  g.sys = sys;

  std::vector<int> locs0;
  for (const auto& ta : sys.comps) locs0.push_back(ta.init);
  Region r0 = region_of(Valuation(sys.clocks.size(), Rat(0)), sys.maxc);
  SymState init{std::move(locs0), std::move(r0)};
  if (!invariants_hold(sys, init.locs, init.reg))
    throw std::runtime_error("initial state violates an invariant");

  std::unordered_map<SymState, int, SymStateHash> index;
  auto intern = [&](SymState&& s) {
    auto it = index.find(s);
    if (it != index.end()) return std::pair<int, bool>{it->second, false};
    if (g.states.size() >= budget) throw StateBudgetExceeded(g.states.size());
    int id = (int)g.states.size();
    index.emplace(s, id);
    g.states.push_back(std::move(s));
    g.out.emplace_back();
    return std::pair<int, bool>{id, true};
  };

  std::deque<int> work;
  g.init = intern(std::move(init)).first;
  work.push_back(g.init);

  StepOptions opt;
  opt.enrich_sync = enrich_sync;
  while (!work.empty()) {
    int sid = work.front();
    work.pop_front();
    std::vector<std::pair<GraphEdge, SymState>> succs;
    {
      // states vector may reallocate while interning; copy what we need
      SymState cur = g.states[sid];
      discrete_successors(sys, cur.locs, cur.reg, opt, succs);
      if (auto d = delay_successor(sys, cur.locs, cur.reg)) {
        GraphEdge ge;
        ge.delay = true;
        succs.push_back({ge, std::move(*d)});
      }
    }
    for (auto& [ge, st] : succs) {
      auto [tid, fresh] = intern(std::move(st));
      GraphEdge e = ge;
      e.src = sid;
      e.tgt = tid;
      g.out[sid].push_back((int)g.edges.size());
      g.edges.push_back(std::move(e));
      if (fresh) work.push_back(tid);
    }
  }
  return g;
}

std::string RegionGraph::state_str(int i) const {
  const SymState& s = states[i];
  std::ostringstream os;
  os << "(";
  for (size_t c = 0; c < s.locs.size(); ++c) {
    if (c) os << ",";
    os << sys.comps[c].locations[s.locs[c]].name;
  }
  os << " | " << region_str(s.reg, sys.clocks, sys.maxc) << ")";
  return os.str();
}

std::string export_dot(const RegionGraph& g) {
  std::ostringstream os;
  os << "digraph regions {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
  for (size_t i = 0; i < g.states.size(); ++i) {
    os << "  s" << i << " [label=\"" << g.state_str((int)i) << "\"";
    if ((int)i == g.init) os << ", style=bold";
    os << "];\n";
  }
  for (const auto& e : g.edges) {
    os << "  s" << e.src << " -> s" << e.tgt << " [label=\"";
    if (e.delay)
      os << "delay";
    else if (e.kind == ActKind::Eps)
      os << "eps";
    else
      os << e.label;
    os << "\"";
    if (e.delay) os << ", style=dotted";
    if (!e.delay && e.kind == ActKind::Sync) os << ", style=dashed";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace ntasc
