#include "ntasc/contextual.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace ntasc {

bool member_less(const Member& a, const Member& b) {
  if (a.loc != b.loc) return a.loc < b.loc;
  if (a.reg.ip != b.reg.ip) return a.reg.ip < b.reg.ip;
  if (a.reg.block != b.reg.block) return a.reg.block < b.reg.block;
  return a.reg.zero_block < b.reg.zero_block;
}

size_t ContextualStateHash::operator()(const ContextualState& s) const {
  size_t h = (size_t)s.a2_loc * 2654435761u + 17;
  for (const auto& m : s.members) {
    h = h * 1000003u + (size_t)(m.loc + 1);
    h ^= region_hash(m.reg) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

namespace {

void canonicalize_members(std::vector<Member>& ms) {
  std::sort(ms.begin(), ms.end(), member_less);
  ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
}

bool member_legal(const FlatSys& sys, int a1_loc, int a2_loc, const Region& reg) {
  return satisfies(reg, sys.comps[0].locations[a1_loc].inv) &&
         satisfies(reg, sys.comps[1].locations[a2_loc].inv);
}

}  // namespace

std::vector<Member> ur_set(const FlatSys& sys, int a1_loc, int a2_loc, const Region& reg) {
  std::vector<Member> out;
  std::deque<Member> work;
  auto push = [&](Member&& m) {
    for (const auto& seen : out)
      if (seen == m) return;
    out.push_back(m);
    work.push_back(std::move(m));
  };
  if (member_legal(sys, a1_loc, a2_loc, reg)) push(Member{a1_loc, reg});
  const auto& ta = sys.comps[0];
  while (!work.empty()) {
    Member cur = work.front();
    work.pop_front();
    for (const auto& e : ta.edges) {
      if (e.src != cur.loc || e.kind == ActKind::Sync) continue;
      if (!satisfies(cur.reg, e.guard, sys.maxc)) continue;
      Region r2 = apply_updates(cur.reg, e, sys.maxc);
      if (!member_legal(sys, e.tgt, a2_loc, r2)) continue;
      push(Member{e.tgt, std::move(r2)});
    }
  }
  canonicalize_members(out);
  return out;
}

namespace {

// Advances one member set by one observer-region tick: unobservable local
// moves may interleave with joint time steps until the projection onto the
// observer's own clocks crosses its next boundary.
std::vector<Member> delay_tick(const FlatSys& sys, int a2_loc, const std::vector<Member>& members,
                               const std::vector<int>& x2own,
                               const std::vector<long long>& x2maxc) {
  bool aligned = !x2own.empty();
  std::optional<Region> target;
  if (aligned) {
    Region shared = project(members.front().reg, x2own);
    target = time_successor(shared, x2maxc);
    if (!target) aligned = false;  // observer clocks saturated
  }

  std::vector<Member> out;
  const auto& ta = sys.comps[0];
  auto local_succs = [&](const Member& m, std::vector<Member>& res) {
    for (const auto& e : ta.edges) {
      if (e.src != m.loc || e.kind == ActKind::Sync) continue;
      if (!satisfies(m.reg, e.guard, sys.maxc)) continue;
      Region r2 = apply_updates(m.reg, e, sys.maxc);
      if (!member_legal(sys, e.tgt, a2_loc, r2)) continue;
      res.push_back(Member{e.tgt, std::move(r2)});
    }
  };

  for (const auto& seed : members) {
    std::vector<Member> visited;
    std::deque<Member> work;
    auto push = [&](Member&& m) {
      for (const auto& seen : visited)
        if (seen == m) return;
      visited.push_back(m);
      work.push_back(std::move(m));
    };

    if (!aligned) {
      // Raw tick: one joint region step, then zero-delay closure.
      auto next = time_successor(seed.reg, sys.maxc);
      Region stepped = next ? std::move(*next) : seed.reg;
      if (!member_legal(sys, seed.loc, a2_loc, stepped)) continue;
      for (auto& m : ur_set(sys, seed.loc, a2_loc, stepped)) out.push_back(std::move(m));
      continue;
    }

    push(Member{seed.loc, seed.reg});
    while (!work.empty()) {
      Member cur = work.front();
      work.pop_front();
      bool arrived = project(cur.reg, x2own) == *target;
      if (arrived) out.push_back(cur);
      // Unobservable locals at any instant of the tick.
      std::vector<Member> ls;
      local_succs(cur, ls);
      for (auto& m : ls) push(std::move(m));
      if (arrived) continue;
      // Joint time step.
      if (auto next = time_successor(cur.reg, sys.maxc)) {
        if (member_legal(sys, cur.loc, a2_loc, *next)) push(Member{cur.loc, std::move(*next)});
      }
    }
  }
  canonicalize_members(out);
  return out;
}

}  // namespace

ContextualGraph build_contextual_graph(const Network& net, size_t budget) {
  Network norm = normalize_sync_guards(net);
  ContextualGraph g;
  g.sys = FlatSys(norm);
  g.x2own = g.sys.comps[1].owned_clocks;
  std::vector<long long> x2maxc;
  for (int c : g.x2own) x2maxc.push_back(g.sys.maxc[c]);

  const auto& a1 = g.sys.comps[0];
  const auto& a2 = g.sys.comps[1];

  Region zero = region_of(Valuation(g.sys.clocks.size(), Rat(0)), g.sys.maxc);
  ContextualState init;
  init.a2_loc = a2.init;
  init.members = ur_set(g.sys, a1.init, a2.init, zero);
  if (init.members.empty()) throw std::runtime_error("initial state violates an invariant");

  std::unordered_map<ContextualState, int, ContextualStateHash> index;
  auto intern = [&](ContextualState&& s) {
    auto it = index.find(s);
    if (it != index.end()) return std::pair<int, bool>{it->second, false};
    if (g.states.size() >= budget) throw StateBudgetExceeded(g.states.size());
    int id = (int)g.states.size();
    index.emplace(s, id);
    g.states.push_back(std::move(s));
    g.out.emplace_back();
    return std::pair<int, bool>{id, true};
  };
  g.init = intern(std::move(init)).first;

  std::deque<int> work{g.init};
  while (!work.empty()) {
    int sid = work.front();
    work.pop_front();
    ContextualState cur = g.states[sid];
    std::set<std::pair<std::string, int>> emitted;
    auto emit = [&](ContextualState&& tgt, const std::string& label, bool delay) {
      if (tgt.members.empty()) return;
      auto [tid, fresh] = intern(std::move(tgt));
      if (!emitted.insert({label, tid}).second) return;
      g.out[sid].push_back((int)g.edges.size());
      g.edges.push_back(ContextualEdge{sid, tid, delay, label});
      if (fresh) work.push_back(tid);
    };

    // Observer actions: fire when some member enables; knowledge narrows to
    // the enablers whose landing is legal, then closes under silent moves.
    for (const auto& e : a2.edges) {
      if (e.src != cur.a2_loc || e.kind == ActKind::Sync) continue;
      ContextualState tgt;
      tgt.a2_loc = e.tgt;
      for (const auto& m : cur.members) {
        if (!satisfies(m.reg, e.guard, g.sys.maxc)) continue;
        Region r2 = apply_updates(m.reg, e, g.sys.maxc);
        if (!member_legal(g.sys, m.loc, e.tgt, r2)) continue;
        for (auto& u : ur_set(g.sys, m.loc, e.tgt, r2)) tgt.members.push_back(std::move(u));
      }
      canonicalize_members(tgt.members);
      emit(std::move(tgt), e.kind == ActKind::Eps ? "eps" : e.label, false);
    }

    // Synchronizations: each enabled combination is a separate observation;
    // knowledge collapses to the closure of the announced landing state.
    for (const auto& e2 : a2.edges) {
      if (e2.src != cur.a2_loc || e2.kind != ActKind::Sync) continue;
      for (const auto& e1 : a1.edges) {
        if (e1.kind != ActKind::Sync || e1.label != e2.label) continue;
        for (const auto& m : cur.members) {
          if (e1.src != m.loc) continue;
          if (!satisfies(m.reg, e1.guard, g.sys.maxc) ||
              !satisfies(m.reg, e2.guard, g.sys.maxc))
            continue;
          std::vector<int> resets = e1.resets;
          resets.insert(resets.end(), e2.resets.begin(), e2.resets.end());
          std::sort(resets.begin(), resets.end());
          resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
          Region r2 = apply_reset(m.reg, resets);
          for (auto [dst, src] : e1.copies) r2 = apply_copy(r2, dst, src, g.sys.maxc);
          for (auto [dst, src] : e2.copies) r2 = apply_copy(r2, dst, src, g.sys.maxc);
          if (!member_legal(g.sys, e1.tgt, e2.tgt, r2)) continue;
          ContextualState tgt;
          tgt.a2_loc = e2.tgt;
          tgt.members = ur_set(g.sys, e1.tgt, e2.tgt, r2);
          std::string label = enriched_label(g.sys, e1.label, e1.tgt, r2);
          emit(std::move(tgt), label, false);
        }
      }
    }

    // Delay tick.
    ContextualState dt;
    dt.a2_loc = cur.a2_loc;
    dt.members = delay_tick(g.sys, cur.a2_loc, cur.members, g.x2own, x2maxc);
    emit(std::move(dt), "delay", true);
  }
  return g;
}

std::string ContextualGraph::state_str(int i) const {
  const ContextualState& s = states[i];
  std::ostringstream os;
  os << sys.comps[1].locations[s.a2_loc].name << " | {";
  for (size_t m = 0; m < s.members.size(); ++m) {
    if (m) os << ", ";
    os << "(" << sys.comps[0].locations[s.members[m].loc].name << " : "
       << region_str(s.members[m].reg, sys.clocks, sys.maxc) << ")";
  }
  os << "}";
  return os.str();
}

std::string export_dot(const ContextualGraph& g) {
  std::ostringstream os;
  os << "digraph knowledge {\n  rankdir=LR;\n  node [shape=box, fontsize=10];\n";
  for (size_t i = 0; i < g.states.size(); ++i) {
    os << "  s" << i << " [label=\"" << g.state_str((int)i) << "\\n|members|="
       << g.states[i].members.size() << "\"";
    if ((int)i == g.init) os << ", style=bold";
    os << "];\n";
  }
  for (const auto& e : g.edges) {
    os << "  s" << e.src << " -> s" << e.tgt << " [label=\"" << e.label << "\"";
    if (e.delay) os << ", style=dotted";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Exact restriction search over world pairs.

namespace {

struct PairState {
  int l1r = 0;  // candidate world tracked as-is
  int l1m = 0;  // alternative world over mirrored clocks
  int l2 = 0;
  Region reg;
  bool operator==(const PairState&) const = default;
};

struct PairHash {
  size_t operator()(const PairState& s) const {
    size_t h = region_hash(s.reg);
    h = h * 1000003u + (size_t)(s.l1r + 1);
    h = h * 1000003u + (size_t)(s.l1m + 1);
    h = h * 1000003u + (size_t)(s.l2 + 1);
    return h;
  }
};

struct PairCtx {
  FlatSys base;                     // the normalized two-component system
  std::vector<int> mirror;          // clock -> mirrored clock (or itself)
  std::vector<long long> maxc;      // over base clocks + mirrors
  std::vector<int> real_keep;       // projection of a pair region: real view
  std::vector<int> mirror_keep;     // projection: mirror view, base order
  std::vector<Edge> a1m_edges;      // component-0 edges over mirror clocks
  std::vector<Invariant> inv1m;     // component-0 invariants, mirrored
  std::vector<Invariant> inv2m;     // component-1 invariants, mirrored
  size_t nclocks = 0;
};

Atom remap(const Atom& a, const std::vector<int>& f) { return Atom{f[a.clock], a.rel, a.k}; }

PairCtx make_pair_ctx(const Network& norm) {
  PairCtx cx;
  cx.base = FlatSys(norm);
  size_t n = cx.base.clocks.size();
  cx.mirror.resize(n);
  for (size_t c = 0; c < n; ++c) cx.mirror[c] = (int)c;
  cx.maxc = cx.base.maxc;
  std::vector<int> extra;
  for (int c : cx.base.comps[0].owned_clocks) {
    cx.mirror[c] = (int)(n + extra.size());
    extra.push_back(c);
    cx.maxc.push_back(cx.base.maxc[c]);
  }
  cx.nclocks = n + extra.size();
  for (size_t c = 0; c < n; ++c) cx.real_keep.push_back((int)c);
  for (size_t c = 0; c < n; ++c) cx.mirror_keep.push_back(cx.mirror[c]);

  for (const auto& e : cx.base.comps[0].edges) {
    Edge em = e;
    for (auto& a : em.guard.atoms) a = remap(a, cx.mirror);
    for (auto& d : em.guard.diags) {
      d.x = cx.mirror[d.x];
      d.y = cx.mirror[d.y];
    }
    for (auto& r : em.resets) r = cx.mirror[r];
    for (auto& [dst, src] : em.copies) {
      dst = cx.mirror[dst];
      src = cx.mirror[src];
    }
    cx.a1m_edges.push_back(std::move(em));
  }
  for (const auto& loc : cx.base.comps[0].locations) {
    Invariant iv;
    for (const auto& a : loc.inv) iv.push_back(remap(a, cx.mirror));
    cx.inv1m.push_back(std::move(iv));
  }
  for (const auto& loc : cx.base.comps[1].locations) {
    Invariant iv;
    for (const auto& a : loc.inv) iv.push_back(remap(a, cx.mirror));
    cx.inv2m.push_back(std::move(iv));
  }
  return cx;
}

// Composed-system invariants: the candidate world's own automaton, plus the
// mirrored automaton and mirrored observer view. The unmirrored observer
// invariant is deliberately absent: its violation is the divergence signal.
bool pair_invariants(const PairCtx& cx, const PairState& s, const Region& reg) {
  return satisfies(reg, cx.base.comps[0].locations[s.l1r].inv) &&
         satisfies(reg, cx.inv1m[s.l1m]) && satisfies(reg, cx.inv2m[s.l2]);
}

Member real_member(const PairCtx& cx, const PairState& s) {
  return Member{s.l1r, project(s.reg, cx.real_keep)};
}
Member mirror_member(const PairCtx& cx, const PairState& s) {
  return Member{s.l1m, project(s.reg, cx.mirror_keep)};
}

std::optional<RestrictionWitness> witness_at(const PairCtx& cx, const PairState& s) {
  const auto& a2 = cx.base.comps[1];
  // Invariant read divergence: the tracked world has left the observer's
  // invariant although the mirrored view still allows running.
  for (const auto& a : a2.locations[s.l2].inv) {
    if (!satisfies(s.reg, a)) {
      RestrictionWitness w;
      w.step = "delay";
      w.enabling = mirror_member(cx, s);
      w.blocking = real_member(cx, s);
      w.state = ContextualState{s.l2, {w.enabling, w.blocking}};
      canonicalize_members(w.state.members);
      return w;
    }
  }
  // Guard read divergence on any observer-local edge.
  for (const auto& e : a2.edges) {
    if (e.src != s.l2 || e.kind == ActKind::Sync) continue;
    Guard gm = e.guard;
    for (auto& a : gm.atoms) a = remap(a, cx.mirror);
    for (auto& d : gm.diags) {
      d.x = cx.mirror[d.x];
      d.y = cx.mirror[d.y];
    }
    bool gr = satisfies(s.reg, e.guard, cx.maxc);
    bool gmi = satisfies(s.reg, gm, cx.maxc);
    if (gr != gmi) {
      RestrictionWitness w;
      w.step = e.kind == ActKind::Eps ? "eps" : e.label;
      Member rm = real_member(cx, s), mm = mirror_member(cx, s);
      w.enabling = gr ? rm : mm;
      w.blocking = gr ? mm : rm;
      w.state = ContextualState{s.l2, {std::move(rm), std::move(mm)}};
      canonicalize_members(w.state.members);
      return w;
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<RestrictionWitness> find_restriction(const Network& net, size_t budget) {
  Network norm = normalize_sync_guards(net);
  PairCtx cx = make_pair_ctx(norm);
  const auto& a1 = cx.base.comps[0];
  const auto& a2 = cx.base.comps[1];

  PairState init;
  init.l1r = a1.init;
  init.l1m = a1.init;
  init.l2 = a2.init;
  init.reg = region_of(Valuation(cx.nclocks, Rat(0)), cx.maxc);
  if (!pair_invariants(cx, init, init.reg))
    throw std::runtime_error("initial state violates an invariant");

  std::unordered_map<PairState, int, PairHash> index;
  std::vector<PairState> states;
  std::optional<RestrictionWitness> found;
  auto intern = [&](PairState&& s) -> std::pair<int, bool> {
    auto it = index.find(s);
    if (it != index.end()) return {it->second, false};
    if (states.size() >= budget) throw StateBudgetExceeded(states.size());
    if (!found) found = witness_at(cx, s);
    int id = (int)states.size();
    index.emplace(s, id);
    states.push_back(std::move(s));
    return {id, true};
  };

  std::deque<int> work;
  intern(std::move(init));
  if (found) return found;
  work.push_back(0);

  while (!work.empty() && !found) {
    int sid = work.front();
    work.pop_front();
    PairState cur = states[sid];
    auto visit = [&](PairState&& nxt) {
      if (found) return;
      auto [tid, fresh] = intern(std::move(nxt));
      if (fresh && !found) work.push_back(tid);
    };

    // Tracked world's unobservable moves.
    for (const auto& e : a1.edges) {
      if (e.src != cur.l1r || e.kind == ActKind::Sync) continue;
      if (!satisfies(cur.reg, e.guard, cx.maxc)) continue;
      PairState nxt = cur;
      nxt.l1r = e.tgt;
      nxt.reg = apply_updates(cur.reg, e, cx.maxc);
      if (!pair_invariants(cx, nxt, nxt.reg)) continue;
      visit(std::move(nxt));
      if (found) return found;
    }
    // Mirrored world's unobservable moves.
    for (size_t ei = 0; ei < cx.a1m_edges.size(); ++ei) {
      const Edge& e = cx.a1m_edges[ei];
      if (a1.edges[ei].src != cur.l1m || e.kind == ActKind::Sync) continue;
      if (!satisfies(cur.reg, e.guard, cx.maxc)) continue;
      PairState nxt = cur;
      nxt.l1m = a1.edges[ei].tgt;
      nxt.reg = apply_updates(cur.reg, e, cx.maxc);
      if (!pair_invariants(cx, nxt, nxt.reg)) continue;
      visit(std::move(nxt));
      if (found) return found;
    }
    // Observer-local moves: fire on the mirrored reading of the guard, the
    // only reading the observer would have without the shared clocks.
    for (const auto& e : a2.edges) {
      if (e.src != cur.l2 || e.kind == ActKind::Sync) continue;
      Guard gm = e.guard;
      for (auto& a : gm.atoms) a = remap(a, cx.mirror);
      for (auto& d : gm.diags) {
        d.x = cx.mirror[d.x];
        d.y = cx.mirror[d.y];
      }
      if (!satisfies(cur.reg, gm, cx.maxc)) continue;
      PairState nxt = cur;
      nxt.l2 = e.tgt;
      nxt.reg = apply_updates(cur.reg, e, cx.maxc);
      if (!pair_invariants(cx, nxt, nxt.reg)) continue;
      visit(std::move(nxt));
      if (found) return found;
    }
    // Synchronizations collapse the mirrored world onto the tracked one.
    for (const auto& e2 : a2.edges) {
      if (e2.src != cur.l2 || e2.kind != ActKind::Sync) continue;
      for (const auto& e1 : a1.edges) {
        if (e1.kind != ActKind::Sync || e1.label != e2.label || e1.src != cur.l1r) continue;
        if (!satisfies(cur.reg, e1.guard, cx.maxc) || !satisfies(cur.reg, e2.guard, cx.maxc))
          continue;
        std::vector<int> resets = e1.resets;
        resets.insert(resets.end(), e2.resets.begin(), e2.resets.end());
        std::sort(resets.begin(), resets.end());
        resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
        Region r2 = apply_reset(cur.reg, resets);
        for (auto [dst, src] : e1.copies) r2 = apply_copy(r2, dst, src, cx.maxc);
        for (auto [dst, src] : e2.copies) r2 = apply_copy(r2, dst, src, cx.maxc);
        for (int c : a1.owned_clocks) r2 = apply_copy(r2, cx.mirror[c], c, cx.maxc);
        PairState nxt;
        nxt.l1r = e1.tgt;
        nxt.l1m = e1.tgt;
        nxt.l2 = e2.tgt;
        nxt.reg = std::move(r2);
        if (!pair_invariants(cx, nxt, nxt.reg)) continue;
        visit(std::move(nxt));
        if (found) return found;
      }
    }
    // Joint delay: both worlds and the observer advance together; a mirrored
    // world that cannot follow is silently discarded knowledge, not a
    // restriction.
    if (auto next = time_successor(cur.reg, cx.maxc)) {
      PairState nxt = cur;
      nxt.reg = std::move(*next);
      if (pair_invariants(cx, nxt, nxt.reg)) {
        visit(std::move(nxt));
        if (found) return found;
      }
    }
  }
  return found;
}

std::string RestrictionWitness::describe(const FlatSys& sys) const {
  std::ostringstream os;
  os << "disagreement on ";
  if (step == "delay")
    os << "letting time pass";
  else
    os << "action '" << step << "'";
  os << " at " << sys.comps[1].locations[state.a2_loc].name << ": ("
     << sys.comps[0].locations[enabling.loc].name << " : "
     << region_str(enabling.reg, sys.clocks, sys.maxc) << ") allows it, ("
     << sys.comps[0].locations[blocking.loc].name << " : "
     << region_str(blocking.reg, sys.clocks, sys.maxc) << ") does not";
  return os.str();
}

bool members_all_reachable(const Network& net, size_t budget) {
  Network norm = normalize_sync_guards(net);
  ContextualGraph g = build_contextual_graph(norm, budget);
  RegionGraph rg = build_region_graph(FlatSys(norm), budget);
  std::unordered_set<SymState, SymStateHash> reach(rg.states.begin(), rg.states.end());
  for (const auto& cs : g.states)
    for (const auto& m : cs.members)
      if (!reach.count(SymState{{m.loc, cs.a2_loc}, m.reg})) return false;
  return true;
}

bool knowledge_independent_of_observer(const Network& net, size_t budget) {
  Network norm = normalize_sync_guards(net);
  Network weak = norm;
  const auto& owned2 = weak.a2.owned_clocks;
  auto own2 = [&](int c) {
    return std::find(owned2.begin(), owned2.end(), c) != owned2.end();
  };
  for (auto& e : weak.a2.edges) {
    auto& atoms = e.guard.atoms;
    atoms.erase(std::remove_if(atoms.begin(), atoms.end(),
                               [&](const Atom& a) { return own2(a.clock); }),
                atoms.end());
  }
  ContextualGraph g1 = build_contextual_graph(norm, budget);
  ContextualGraph g2 = build_contextual_graph(weak, budget);

  const auto& x1 = g1.sys.comps[0].owned_clocks;
  auto knowledge_sig = [&](const ContextualGraph& g, int sid) {
    std::vector<std::pair<int, Region>> sig;
    for (const auto& m : g.states[sid].members) sig.push_back({m.loc, project(m.reg, x1)});
    std::sort(sig.begin(), sig.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      if (a.second.ip != b.second.ip) return a.second.ip < b.second.ip;
      if (a.second.block != b.second.block) return a.second.block < b.second.block;
      return a.second.zero_block < b.second.zero_block;
    });
    sig.erase(std::unique(sig.begin(), sig.end()), sig.end());
    return sig;
  };

  std::set<std::pair<int, int>> seen;
  std::deque<std::pair<int, int>> work{{g1.init, g2.init}};
  seen.insert({g1.init, g2.init});
  while (!work.empty()) {
    auto [s1, s2] = work.front();
    work.pop_front();
    if (knowledge_sig(g1, s1) != knowledge_sig(g2, s2)) return false;
    for (int ei : g1.out[s1]) {
      const auto& e1 = g1.edges[ei];
      bool matched = false;
      for (int ej : g2.out[s2]) {
        const auto& e2 = g2.edges[ej];
        if (e1.label != e2.label) continue;
        matched = true;
        if (seen.insert({e1.tgt, e2.tgt}).second) work.push_back({e1.tgt, e2.tgt});
      }
      if (!matched) return false;
    }
  }
  return true;
}

}  // namespace ntasc
