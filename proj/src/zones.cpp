#include "ntasc/zones.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace ntasc {

Dbm Dbm::zero(int n_) {
  Dbm d;
  d.n = n_;
  d.m.assign((size_t)(n_ + 1) * (n_ + 1), bound_le(0));
  return d;
}

bool Dbm::empty() const {
  for (int i = 0; i <= n; ++i)
    if (at(i, i) < bound_le(0)) return true;
  return false;
}

void Dbm::canonicalize() {
  for (int k = 0; k <= n; ++k)
    for (int i = 0; i <= n; ++i) {
      Bound ik = at(i, k);
      if (ik >= kInfBound) continue;
      for (int j = 0; j <= n; ++j) {
        Bound v = bound_add(ik, at(k, j));
        if (v < at(i, j)) at(i, j) = v;
      }
    }
}

void Dbm::up() {
  for (int i = 1; i <= n; ++i) at(i, 0) = kInfBound;
}

bool Dbm::constrain(int i, int j, Bound b) {
  if (b < at(i, j)) {
    at(i, j) = b;
    canonicalize();
  }
  return !empty();
}

bool Dbm::constrain(const Atom& a) {
  int x = a.clock + 1;
  switch (a.rel) {
    case Rel::Lt: return constrain(x, 0, bound_lt(a.k));
    case Rel::Le: return constrain(x, 0, bound_le(a.k));
    case Rel::Eq: return constrain(x, 0, bound_le(a.k)) && constrain(0, x, bound_le(-a.k));
    case Rel::Ge: return constrain(0, x, bound_le(-a.k));
    case Rel::Gt: return constrain(0, x, bound_lt(-a.k));
  }
  return false;
}

void Dbm::reset(int x) {
  int c = x + 1;
  for (int j = 0; j <= n; ++j) {
    at(c, j) = at(0, j);
    at(j, c) = at(j, 0);
  }
  at(c, c) = bound_le(0);
}

void Dbm::copy_clock(int dst, int src) {
  if (dst == src) return;
  int d = dst + 1, s = src + 1;
  for (int j = 0; j <= n; ++j) {
    if (j == d) continue;
    at(d, j) = at(s, j);
    at(j, d) = at(j, s);
  }
  at(d, d) = bound_le(0);
  at(d, s) = bound_le(0);
  at(s, d) = bound_le(0);
}

void Dbm::extrapolate(const std::vector<long long>& maxc) {
  bool changed = false;
  for (int i = 0; i <= n; ++i)
    for (int j = 0; j <= n; ++j) {
      if (i == j) continue;
      Bound b = at(i, j);
      if (b >= kInfBound) continue;
      if (i > 0 && b > bound_le(maxc[i - 1])) {
        at(i, j) = kInfBound;
        changed = true;
      } else if (j > 0 && b < bound_lt(-maxc[j - 1])) {
        at(i, j) = bound_lt(-maxc[j - 1]);
        changed = true;
      }
    }
  if (changed) canonicalize();
}

size_t dbm_hash(const Dbm& d) {
  size_t h = 1469598103934665603ull;
  for (Bound b : d.m) h = (h ^ (size_t)b) * 1099511628211ull;
  return h;
}

namespace {

struct ZState {
  std::vector<int> locs;
  Dbm z;
  bool operator==(const ZState&) const = default;
};
struct ZHash {
  size_t operator()(const ZState& s) const {
    size_t h = dbm_hash(s.z);
    for (int l : s.locs) h = h * 1000003u + (size_t)(l + 1);
    return h;
  }
};

void require_plain(const Guard& g) {
  if (!g.diags.empty())
    throw std::runtime_error("zone engine does not support clock-difference guards");
}

bool constrain_invariants(Dbm& z, const FlatSys& sys, const std::vector<int>& locs) {
  for (size_t i = 0; i < sys.comps.size(); ++i)
    for (const auto& a : sys.comps[i].locations[locs[i]].inv)
      if (!z.constrain(a)) return false;
  return true;
}

std::string step_label(const FlatSys& sys, const std::vector<std::pair<int, int>>& fired) {
  const Edge& e0 = sys.comps[fired[0].first].edges[fired[0].second];
  return e0.kind == ActKind::Eps ? "eps" : e0.label;
}

}  // namespace

std::optional<std::vector<PathStep>> zone_reach(const FlatSys& sys, int comp, int loc,
                                                size_t budget) {
  int n = (int)sys.clocks.size();
  ZState init;
  for (const auto& ta : sys.comps) init.locs.push_back(ta.init);
  init.z = Dbm::zero(n);
  if (!constrain_invariants(init.z, sys, init.locs))
    throw std::runtime_error("initial state violates an invariant");
  init.z.extrapolate(sys.maxc);

  if (init.locs[comp] == loc) return std::vector<PathStep>{};

  std::unordered_map<ZState, int, ZHash> index;
  std::vector<ZState> states;
  std::vector<std::pair<int, PathStep>> parent;  // state -> (pred, step)
  auto intern = [&](ZState&& s) {
    auto it = index.find(s);
    if (it != index.end()) return std::pair<int, bool>{it->second, false};
    if (states.size() >= budget) throw StateBudgetExceeded(states.size());
    int id = (int)states.size();
    index.emplace(s, id);
    states.push_back(std::move(s));
    parent.emplace_back(-1, PathStep{});
    return std::pair<int, bool>{id, true};
  };
  intern(std::move(init));

  auto unwind = [&](int sid) {
    std::vector<PathStep> path;
    while (parent[sid].first >= 0) {
      path.push_back(parent[sid].second);
      sid = parent[sid].first;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  std::deque<int> work{0};
  while (!work.empty()) {
    int sid = work.front();
    work.pop_front();
    ZState cur = states[sid];

    // Every discrete transition fires after an arbitrary legal delay.
    Dbm base = cur.z;
    base.up();
    if (!constrain_invariants(base, sys, cur.locs)) continue;

    std::vector<std::pair<std::vector<std::pair<int, int>>, int>> options;  // fired, unused
    // Local and eps edges.
    for (size_t i = 0; i < sys.comps.size(); ++i) {
      const auto& edges = sys.comps[i].edges;
      for (size_t ei = 0; ei < edges.size(); ++ei)
        if (edges[ei].src == cur.locs[i] && edges[ei].kind != ActKind::Sync)
          options.push_back({{{(int)i, (int)ei}}, 0});
    }
    // Sync combinations.
    std::set<std::string> labels;
    for (size_t i = 0; i < sys.comps.size(); ++i)
      for (const auto& e : sys.comps[i].edges)
        if (e.kind == ActKind::Sync && e.src == cur.locs[i]) labels.insert(e.label);
    for (const auto& lab : labels) {
      std::vector<int> parts = sys.sync_participants(lab);
      if (parts.size() < 2) continue;
      std::vector<std::vector<int>> cand(parts.size());
      bool ok = true;
      for (size_t pi = 0; pi < parts.size() && ok; ++pi) {
        const auto& edges = sys.comps[parts[pi]].edges;
        for (size_t ei = 0; ei < edges.size(); ++ei)
          if (edges[ei].kind == ActKind::Sync && edges[ei].label == lab &&
              edges[ei].src == cur.locs[parts[pi]])
            cand[pi].push_back((int)ei);
        ok = !cand[pi].empty();
      }
      if (!ok) continue;
      std::vector<size_t> pick(parts.size(), 0);
      while (true) {
        std::vector<std::pair<int, int>> fired;
        for (size_t pi = 0; pi < parts.size(); ++pi)
          fired.push_back({parts[pi], cand[pi][pick[pi]]});
        options.push_back({fired, 0});
        size_t pi = 0;
        while (pi < parts.size() && ++pick[pi] == cand[pi].size()) {
          pick[pi] = 0;
          ++pi;
        }
        if (pi == parts.size()) break;
      }
    }

    for (auto& [fired, _] : options) {
      Dbm z = base;
      bool feasible = true;
      for (auto [ci, ei] : fired) {
        const Edge& e = sys.comps[ci].edges[ei];
        require_plain(e.guard);
        for (const auto& a : e.guard.atoms)
          if (!z.constrain(a)) {
            feasible = false;
            break;
          }
        if (!feasible) break;
      }
      if (!feasible) continue;
      // Resets of all edges first, then copies in component order.
      for (auto [ci, ei] : fired)
        for (int c : sys.comps[ci].edges[ei].resets) z.reset(c);
      for (auto [ci, ei] : fired)
        for (auto [dst, src] : sys.comps[ci].edges[ei].copies) z.copy_clock(dst, src);
      std::vector<int> l2 = cur.locs;
      for (auto [ci, ei] : fired) l2[ci] = sys.comps[ci].edges[ei].tgt;
      if (!constrain_invariants(z, sys, l2)) continue;
      z.extrapolate(sys.maxc);
      PathStep step{fired, step_label(sys, fired)};
      auto [tid, fresh] = intern(ZState{l2, std::move(z)});
      if (fresh) {
        parent[tid] = {sid, step};
        if (l2[comp] == loc) return unwind(tid);
        work.push_back(tid);
      }
    }
  }
  return std::nullopt;
}

std::optional<std::vector<PathStep>> region_reach(const FlatSys& sys, int comp, int loc,
                                                  size_t budget) {
  std::vector<int> locs0;
  for (const auto& ta : sys.comps) locs0.push_back(ta.init);
  Region r0 = region_of(Valuation(sys.clocks.size(), Rat(0)), sys.maxc);
  SymState init{std::move(locs0), std::move(r0)};
  if (!invariants_hold(sys, init.locs, init.reg))
    throw std::runtime_error("initial state violates an invariant");
  if (init.locs[comp] == loc) return std::vector<PathStep>{};

  std::unordered_map<SymState, int, SymStateHash> index;
  std::vector<SymState> states;
  std::vector<std::pair<int, PathStep>> parent;  // empty fired = delay
  auto intern = [&](SymState&& s) {
    auto it = index.find(s);
    if (it != index.end()) return std::pair<int, bool>{it->second, false};
    if (states.size() >= budget) throw StateBudgetExceeded(states.size());
    int id = (int)states.size();
    index.emplace(s, id);
    states.push_back(std::move(s));
    parent.emplace_back(-1, PathStep{});
    return std::pair<int, bool>{id, true};
  };
  intern(std::move(init));

  auto unwind = [&](int sid) {
    std::vector<PathStep> path;
    while (parent[sid].first >= 0) {
      if (!parent[sid].second.fired.empty()) path.push_back(parent[sid].second);
      sid = parent[sid].first;
    }
    std::reverse(path.begin(), path.end());
    return path;
  };

  StepOptions opt;
  std::deque<int> work{0};
  while (!work.empty()) {
    int sid = work.front();
    work.pop_front();
    SymState cur = states[sid];
    std::vector<std::pair<GraphEdge, SymState>> succs;
    discrete_successors(sys, cur.locs, cur.reg, opt, succs);
    if (auto d = delay_successor(sys, cur.locs, cur.reg)) {
      if (!(*d == cur)) succs.push_back({GraphEdge{}, std::move(*d)});
    }
    for (auto& [ge, st] : succs) {
      std::vector<int> l2 = st.locs;
      auto [tid, fresh] = intern(std::move(st));
      if (!fresh) continue;
      PathStep step;
      step.fired = ge.fired;
      if (!ge.fired.empty()) step.label = step_label(sys, ge.fired);
      parent[tid] = {sid, step};
      if (l2[comp] == loc) return unwind(tid);
      work.push_back(tid);
    }
  }
  return std::nullopt;
}

Trace make_trace(const FlatSys& sys, const std::vector<PathStep>& steps) {
  size_t L = steps.size();
  size_t nv = L + 1;
  std::vector<Bound> m(nv * nv, kInfBound);
  auto at = [&](size_t i, size_t j) -> Bound& { return m[i * nv + j]; };
  for (size_t i = 0; i < nv; ++i) at(i, i) = bound_le(0);
  auto tighten = [&](size_t i, size_t j, Bound b) {
    if (b < at(i, j)) at(i, j) = b;
  };
  // Time only moves forward.
  for (size_t i = 1; i < nv; ++i) tighten(i - 1, i, bound_le(0));

  // lastreset[c]: schedule variable of the clock's most recent reset.
  std::vector<size_t> lr(sys.clocks.size(), 0);
  std::vector<int> locs;
  for (const auto& ta : sys.comps) locs.push_back(ta.init);

  auto add_atom = [&](const Atom& a, size_t ti, const std::vector<size_t>& lrs) {
    size_t r = lrs[a.clock];
    switch (a.rel) {
      case Rel::Lt: tighten(ti, r, bound_lt(a.k)); break;
      case Rel::Le: tighten(ti, r, bound_le(a.k)); break;
      case Rel::Eq:
        tighten(ti, r, bound_le(a.k));
        tighten(r, ti, bound_le(-a.k));
        break;
      case Rel::Ge: tighten(r, ti, bound_le(-a.k)); break;
      case Rel::Gt: tighten(r, ti, bound_lt(-a.k)); break;
    }
  };
  auto add_diag = [&](const DiagAtom& d, const std::vector<size_t>& lrs) {
    size_t rx = lrs[d.x], ry = lrs[d.y];
    // x - y == t(ry) - t(rx)
    switch (d.rel) {
      case Rel::Lt: tighten(ry, rx, bound_lt(d.k)); break;
      case Rel::Le: tighten(ry, rx, bound_le(d.k)); break;
      case Rel::Eq:
        tighten(ry, rx, bound_le(d.k));
        tighten(rx, ry, bound_le(-d.k));
        break;
      case Rel::Ge: tighten(rx, ry, bound_le(-d.k)); break;
      case Rel::Gt: tighten(rx, ry, bound_lt(-d.k)); break;
    }
  };

  std::vector<std::vector<size_t>> lr_after;  // per step, for replay
  std::vector<std::vector<int>> locs_after;
  for (size_t i = 0; i < L; ++i) {
    size_t ti = i + 1;
    // Source invariants hold up to the firing instant.
    for (size_t ci = 0; ci < sys.comps.size(); ++ci)
      for (const auto& a : sys.comps[ci].locations[locs[ci]].inv) add_atom(a, ti, lr);
    // Guards at the firing instant.
    for (auto [ci, ei] : steps[i].fired) {
      const Edge& e = sys.comps[ci].edges[ei];
      for (const auto& a : e.guard.atoms) add_atom(a, ti, lr);
      for (const auto& d : e.guard.diags) add_diag(d, lr);
    }
    // Updates: all resets, then copies in component order.
    for (auto [ci, ei] : steps[i].fired)
      for (int c : sys.comps[ci].edges[ei].resets) lr[c] = ti;
    for (auto [ci, ei] : steps[i].fired)
      for (auto [dst, src] : sys.comps[ci].edges[ei].copies) lr[dst] = lr[src];
    for (auto [ci, ei] : steps[i].fired) locs[ci] = sys.comps[ci].edges[ei].tgt;
    // Target invariants at the firing instant.
    for (size_t ci = 0; ci < sys.comps.size(); ++ci)
      for (const auto& a : sys.comps[ci].locations[locs[ci]].inv) add_atom(a, ti, lr);
    lr_after.push_back(lr);
    locs_after.push_back(locs);
  }

  // Floyd-Warshall, then check feasibility.
  for (size_t k = 0; k < nv; ++k)
    for (size_t i = 0; i < nv; ++i) {
      if (at(i, k) >= kInfBound) continue;
      for (size_t j = 0; j < nv; ++j) {
        Bound v = bound_add(at(i, k), at(k, j));
        if (v < at(i, j)) at(i, j) = v;
      }
    }
  for (size_t i = 0; i < nv; ++i)
    if (at(i, i) < bound_le(0))
      throw std::runtime_error("internal error: infeasible witness schedule");

  // Greedy feasible point, fixing t_0 .. t_L in order.
  std::vector<Rat> t(nv, Rat(0));
  for (size_t i = 1; i < nv; ++i) {
    Rat lo(0);
    bool lo_strict = false;
    bool hi_set = false;
    Rat hi(0);
    bool hi_strict = false;
    for (size_t j = 0; j < i; ++j) {
      if (at(j, i) < kInfBound) {
        // t_j - t_i <= b  =>  t_i >= t_j - b
        Rat cand = t[j] - Rat(bound_value(at(j, i)));
        bool strict = !bound_weak(at(j, i));
        if (cand > lo || (cand == lo && strict && !lo_strict)) {
          lo = cand;
          lo_strict = strict;
        }
      }
      if (at(i, j) < kInfBound) {
        Rat cand = t[j] + Rat(bound_value(at(i, j)));
        bool strict = !bound_weak(at(i, j));
        if (!hi_set || cand < hi || (cand == hi && strict && !hi_strict)) {
          hi = cand;
          hi_strict = strict;
          hi_set = true;
        }
      }
    }
    if (!lo_strict) {
      t[i] = lo;
    } else if (hi_set) {
      t[i] = (lo + hi) / 2;
    } else {
      t[i] = lo + Rat(1, 2);
    }
  }

  Trace tr;
  for (const auto& ta : sys.comps) tr.init_locs.push_back(ta.init);
  std::vector<size_t> lr0(sys.clocks.size(), 0);
  for (size_t i = 0; i < L; ++i) {
    TraceStep st;
    st.t = t[i + 1];
    st.label = steps[i].label;
    st.locs = locs_after[i];
    st.v.resize(sys.clocks.size());
    for (size_t c = 0; c < sys.clocks.size(); ++c) st.v[c] = t[i + 1] - t[lr_after[i][c]];
    tr.steps.push_back(std::move(st));
  }
  return tr;
}

std::string trace_str(const Trace& tr, const FlatSys& sys) {
  std::ostringstream os;
  auto locs_str = [&](const std::vector<int>& locs) {
    std::string s = "(";
    for (size_t i = 0; i < locs.size(); ++i) {
      if (i) s += ",";
      s += sys.comps[i].locations[locs[i]].name;
    }
    return s + ")";
  };
  auto val_str = [&](const Valuation& v) {
    std::string s;
    for (size_t c = 0; c < v.size(); ++c) {
      s += " ";
      s += sys.clocks[c].name + "=" + rat_str(v[c]);
    }
    return s;
  };
  os << "t=0 start " << locs_str(tr.init_locs)
     << val_str(Valuation(sys.clocks.size(), Rat(0))) << "\n";
  for (const auto& st : tr.steps)
    os << "t=" << rat_str(st.t) << " " << st.label << " " << locs_str(st.locs)
       << val_str(st.v) << "\n";
  return os.str();
}

}  // namespace ntasc
