#include "ntasc/smod.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "ntasc/regions.hpp"

namespace ntasc {

namespace {

// ---------------------------------------------------------------------------
// Clock remapping helpers.

Atom remap_atom(Atom a, const std::vector<int>& f) {
  a.clock = f[a.clock];
  return a;
}

DiagAtom remap_diag(DiagAtom d, const std::vector<int>& f) {
  d.x = f[d.x];
  d.y = f[d.y];
  return d;
}

Guard remap_guard(const Guard& g, const std::vector<int>& f) {
  Guard out;
  for (const auto& a : g.atoms) out.atoms.push_back(remap_atom(a, f));
  for (const auto& d : g.diags) out.diags.push_back(remap_diag(d, f));
  return out;
}

Invariant remap_inv(const Invariant& inv, const std::vector<int>& f) {
  Invariant out;
  for (const auto& a : inv) out.push_back(remap_atom(a, f));
  return out;
}

// Identity on the extended table except watched-automaton clocks, which go to
// their shadows.
std::vector<int> prime_map(const SModClocks& ct) {
  std::vector<int> f(ct.clocks.size());
  for (size_t i = 0; i < f.size(); ++i) f[i] = (int)i;
  for (size_t c = 0; c < ct.primed.size(); ++c)
    if (ct.primed[c] >= 0) f[c] = ct.primed[c];
  return f;
}

// Negation as a disjunction of atoms, one future edge per disjunct.
// Unsatisfiable disjuncts (x < 0) are dropped.
std::vector<Atom> negate_atom(const Atom& a) {
  std::vector<Atom> out;
  auto push = [&](Rel r, long long k) {
    if (r == Rel::Lt && k <= 0) return;
    out.push_back({a.clock, r, k});
  };
  switch (a.rel) {
    case Rel::Lt: push(Rel::Ge, a.k); break;
    case Rel::Le: push(Rel::Gt, a.k); break;
    case Rel::Ge: push(Rel::Lt, a.k); break;
    case Rel::Gt: push(Rel::Le, a.k); break;
    case Rel::Eq:
      push(Rel::Lt, a.k);
      push(Rel::Gt, a.k);
      break;
  }
  return out;
}

std::vector<DiagAtom> negate_diag(const DiagAtom& d) {
  std::vector<DiagAtom> out;
  auto push = [&](Rel r, long long k) { out.push_back({d.x, d.y, r, k}); };
  switch (d.rel) {
    case Rel::Lt: push(Rel::Ge, d.k); break;
    case Rel::Le: push(Rel::Gt, d.k); break;
    case Rel::Ge: push(Rel::Lt, d.k); break;
    case Rel::Gt: push(Rel::Le, d.k); break;
    case Rel::Eq:
      push(Rel::Lt, d.k);
      push(Rel::Gt, d.k);
      break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reduced solo view of the watched automaton: only the clocks it mentions,
// with region granularity widened to cover the observer's reads of them.

struct Reduced {
  std::vector<int> to_net;    // reduced index -> network index
  std::vector<int> from_net;  // network index -> reduced index or -1
  FlatSys sys;                // single component

  const TimedAutomaton& a1() const { return sys.comps[0]; }
};

Reduced reduce_a1(const Network& net) {
  std::set<int> rel(net.a1.owned_clocks.begin(), net.a1.owned_clocks.end());
  auto add_guard = [&](const Guard& g) {
    for (const auto& a : g.atoms) rel.insert(a.clock);
    for (const auto& d : g.diags) {
      rel.insert(d.x);
      rel.insert(d.y);
    }
  };
  for (const auto& e : net.a1.edges) {
    add_guard(e.guard);
    for (int c : e.resets) rel.insert(c);
    for (auto [dst, src] : e.copies) {
      rel.insert(dst);
      rel.insert(src);
    }
  }
  for (const auto& l : net.a1.locations)
    for (const auto& a : l.inv) rel.insert(a.clock);

  Reduced rd;
  rd.from_net.assign(net.clocks.size(), -1);
  std::vector<Clock> clocks;
  for (int c : rel) {
    rd.from_net[c] = (int)rd.to_net.size();
    rd.to_net.push_back(c);
    clocks.push_back(net.clocks[c]);
  }

  TimedAutomaton a = net.a1;
  for (auto& c : a.owned_clocks) c = rd.from_net[c];
  for (auto& e : a.edges) {
    e.guard = remap_guard(e.guard, rd.from_net);
    for (auto& c : e.resets) c = rd.from_net[c];
    for (auto& [dst, src] : e.copies) {
      dst = rd.from_net[dst];
      src = rd.from_net[src];
    }
  }
  for (auto& l : a.locations) l.inv = remap_inv(l.inv, rd.from_net);
  rd.sys = FlatSys(std::move(clocks), {std::move(a)});

  // The observer's constraints on these clocks must stay region-visible, or
  // frozen-knowledge folding later would misjudge them.
  auto bump = [&](int netc, long long k) {
    if (netc < (int)rd.from_net.size() && rd.from_net[netc] >= 0) {
      long long& m = rd.sys.maxc[rd.from_net[netc]];
      m = std::max(m, k);
    }
  };
  auto bump_guard = [&](const Guard& g) {
    for (const auto& a : g.atoms) bump(a.clock, a.k);
    for (const auto& d : g.diags) {
      long long k = d.k < 0 ? -d.k : d.k;
      bump(d.x, k);
      bump(d.y, k);
    }
  };
  for (const auto& e : net.a2.edges) bump_guard(e.guard);
  for (const auto& l : net.a2.locations)
    for (const auto& a : l.inv) bump(a.clock, a.k);
  // Keep copy chains within the watched automaton unified after the bump.
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& e : rd.a1().edges)
      for (auto [dst, src] : e.copies) {
        long long m = std::max(rd.sys.maxc[dst], rd.sys.maxc[src]);
        if (rd.sys.maxc[dst] != m || rd.sys.maxc[src] != m) {
          rd.sys.maxc[dst] = rd.sys.maxc[src] = m;
          changed = true;
        }
      }
  }
  return rd;
}

Region zero_region(const FlatSys& sys) {
  return region_of(Valuation(sys.clocks.size(), Rat(0)), sys.maxc);
}

// ---------------------------------------------------------------------------
// Region graph of the watched automaton alone.

struct SoloGraph {
  struct E {
    int src = -1;
    int tgt = -1;
    int edge = -1;  // automaton edge index; -1 for a delay step
  };
  std::vector<std::pair<int, Region>> states;
  std::vector<E> edges;
  std::vector<std::vector<int>> out;
};

SoloGraph solo_graph(const Reduced& rd, int loc0, const Region& r0, bool with_sync,
                     size_t budget) {
  SoloGraph g;
  std::unordered_map<SymState, int, SymStateHash> id;
  auto intern = [&](int loc, Region reg) {
    SymState key{{loc}, std::move(reg)};
    auto it = id.find(key);
    if (it != id.end()) return it->second;
    int n = (int)g.states.size();
    if ((size_t)n >= budget) throw StateBudgetExceeded(g.states.size());
    g.states.push_back({loc, key.reg});
    g.out.emplace_back();
    id.emplace(std::move(key), n);
    return n;
  };
  intern(loc0, r0);
  std::vector<std::pair<GraphEdge, SymState>> succ;
  for (size_t qi = 0; qi < g.states.size(); ++qi) {
    auto [loc, reg] = g.states[qi];
    succ.clear();
    discrete_successors(rd.sys, {loc}, reg, {}, succ);
    for (auto& [ge, st] : succ) {
      int ei = ge.fired[0].second;
      if (!with_sync && rd.a1().edges[ei].kind == ActKind::Sync) continue;
      int t = intern(st.locs[0], st.reg);
      g.out[qi].push_back((int)g.edges.size());
      g.edges.push_back({(int)qi, t, ei});
    }
    if (auto d = delay_successor(rd.sys, {loc}, reg)) {
      int t = intern(d->locs[0], d->reg);
      g.out[qi].push_back((int)g.edges.size());
      g.edges.push_back({(int)qi, t, -1});
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Difference-constraint system over firing times, used to compute maximal
// stay schedules. Bounds are packed as value*2 | weak-bit, like the zone
// engine; smaller is tighter.

constexpr long long kInfB = INT64_MAX / 4;

long long pack(long long v, bool weak) { return v * 2 + (weak ? 1 : 0); }
long long pval(long long b) { return b >= 0 ? b / 2 : -((-b + 1) / 2); }
bool pweak(long long b) { return b - 2 * pval(b) == 1; }

struct DiffSys {
  int n = 0;
  std::vector<long long> b;

  explicit DiffSys(int n_) : n(n_), b((size_t)n_ * n_, kInfB) {
    for (int i = 0; i < n; ++i) at(i, i) = pack(0, true);
  }
  long long& at(int i, int j) { return b[(size_t)i * n + j]; }
  long long get(int i, int j) const { return b[(size_t)i * n + j]; }
  // x_i - x_j <= (v, weak)
  void tighten(int i, int j, long long v, bool weak) {
    long long p = pack(v, weak);
    if (p < at(i, j)) at(i, j) = p;
  }
  bool close() {
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        long long ik = get(i, k);
        if (ik >= kInfB) continue;
        for (int j = 0; j < n; ++j) {
          long long kj = get(k, j);
          if (kj >= kInfB) continue;
          long long cand = pack(pval(ik) + pval(kj), pweak(ik) && pweak(kj));
          if (cand < at(i, j)) at(i, j) = cand;
        }
      }
    for (int i = 0; i < n; ++i)
      if (get(i, i) < pack(0, true)) return false;
    return true;
  }
  // Restrict to integer solutions: a strict integral bound is one less, weak.
  void integerize() {
    for (auto& x : b)
      if (x < kInfB && !pweak(x)) x = pack(pval(x) - 1, true);
  }
};

void add_atom_at(DiffSys& d, int tvar, const std::vector<int>& lr, const Atom& a) {
  switch (a.rel) {
    case Rel::Lt: d.tighten(tvar, lr[a.clock], a.k, false); break;
    case Rel::Le: d.tighten(tvar, lr[a.clock], a.k, true); break;
    case Rel::Gt: d.tighten(lr[a.clock], tvar, -a.k, false); break;
    case Rel::Ge: d.tighten(lr[a.clock], tvar, -a.k, true); break;
    case Rel::Eq:
      d.tighten(tvar, lr[a.clock], a.k, true);
      d.tighten(lr[a.clock], tvar, -a.k, true);
      break;
  }
}

void add_diag_at(DiffSys& d, const std::vector<int>& lr, const DiagAtom& dg) {
  // x - y REL k at any instant is lr[y] - lr[x] REL k.
  switch (dg.rel) {
    case Rel::Lt: d.tighten(lr[dg.y], lr[dg.x], dg.k, false); break;
    case Rel::Le: d.tighten(lr[dg.y], lr[dg.x], dg.k, true); break;
    case Rel::Gt: d.tighten(lr[dg.x], lr[dg.y], -dg.k, false); break;
    case Rel::Ge: d.tighten(lr[dg.x], lr[dg.y], -dg.k, true); break;
    case Rel::Eq:
      d.tighten(lr[dg.y], lr[dg.x], dg.k, true);
      d.tighten(lr[dg.x], lr[dg.y], -dg.k, true);
      break;
  }
}

void add_guard_at(DiffSys& d, int tvar, const std::vector<int>& lr, const Guard& g) {
  for (const auto& a : g.atoms) add_atom_at(d, tvar, lr, a);
  for (const auto& dg : g.diags) add_diag_at(d, lr, dg);
}

void add_inv_at(DiffSys& d, int tvar, const std::vector<int>& lr, const Invariant& inv) {
  for (const auto& a : inv) add_atom_at(d, tvar, lr, a);
}

// Pins "the valuation seen at tvar lies in R".
void constrain_region_at(DiffSys& d, int tvar, const std::vector<int>& lr, const Region& R,
                         const std::vector<long long>& maxc) {
  int ncl = (int)R.nclocks();
  for (int c = 0; c < ncl; ++c) {
    if (R.above(c)) {
      d.tighten(lr[c], tvar, -maxc[c], false);  // t - r > maxc
    } else if (R.frac_zero(c)) {
      d.tighten(tvar, lr[c], R.ip[c], true);
      d.tighten(lr[c], tvar, -R.ip[c], true);
    } else {
      d.tighten(tvar, lr[c], R.ip[c] + 1, false);
      d.tighten(lr[c], tvar, -R.ip[c], false);
    }
  }
  // Fractional ordering between positive-fraction clocks.
  for (int c1 = 0; c1 < ncl; ++c1) {
    if (R.above(c1) || R.frac_zero(c1)) continue;
    for (int c2 = c1 + 1; c2 < ncl; ++c2) {
      if (R.above(c2) || R.frac_zero(c2)) continue;
      long long k = (long long)R.ip[c1] - R.ip[c2];
      if (R.block[c1] == R.block[c2]) {
        d.tighten(lr[c2], lr[c1], k, true);
        d.tighten(lr[c1], lr[c2], -k, true);
      } else if (R.block[c1] < R.block[c2]) {
        d.tighten(lr[c2], lr[c1], k, false);  // frac(c1) < frac(c2)
      } else {
        d.tighten(lr[c1], lr[c2], -k, false);
      }
    }
  }
}

struct SeqEval {
  bool feasible = false;
  long long sup = -1;  // value of t_end - t0
  bool weak = false;
  bool unbounded = false;
  std::vector<Rat> times;  // t_0..t_L plus t_end, when extracted
  Valuation v0;            // clock values at the entry instant of the extracted point
};

// Evaluates a discrete edge sequence of the reduced watched automaton from
// (loc0, R0), ending inside Rf at locf. Variables: 0..L firing times (0 is
// the entry), L+1 the end instant, then one initial-reset var per clock.
SeqEval eval_sequence(const Reduced& rd, int loc0, const Region& R0, const std::vector<int>& seq,
                      int locf, const Region* Rf, bool pin_max, bool extract,
                      const Region* loop_reg = nullptr, int loop_tvar = -1) {
  const TimedAutomaton& a = rd.a1();
  int L = (int)seq.size();
  int C = (int)rd.sys.clocks.size();
  int vend = L + 1;
  DiffSys d(L + 2 + C);
  std::vector<int> lr(C);
  for (int c = 0; c < C; ++c) {
    lr[c] = L + 2 + c;
    d.tighten(lr[c], 0, 0, true);  // resets happened before entry
  }
  for (int i = 0; i < L; ++i) d.tighten(i, i + 1, 0, true);
  d.tighten(L, vend, 0, true);

  constrain_region_at(d, 0, lr, R0, rd.sys.maxc);
  int cur = loc0;
  for (int i = 0; i < L; ++i) {
    const Edge& e = a.edges[seq[i]];
    int tv = i + 1;
    add_inv_at(d, tv, lr, a.locations[cur].inv);
    add_guard_at(d, tv, lr, e.guard);
    for (int c : e.resets) lr[c] = tv;
    for (auto [dst, src] : e.copies) lr[dst] = lr[src];
    add_inv_at(d, tv, lr, a.locations[e.tgt].inv);
    if (loop_reg && loop_tvar == tv)
      constrain_region_at(d, tv, lr, *loop_reg, rd.sys.maxc);
    cur = e.tgt;
  }
  add_inv_at(d, vend, lr, a.locations[locf].inv);
  if (Rf) constrain_region_at(d, vend, lr, *Rf, rd.sys.maxc);

  SeqEval ev;
  if (!d.close()) return ev;
  ev.feasible = true;
  long long bb = d.get(vend, 0);
  if (bb >= kInfB) {
    ev.unbounded = true;
  } else {
    ev.sup = pval(bb);
    ev.weak = pweak(bb);
  }
  if (!extract) return ev;

  if (pin_max) {
    if (ev.unbounded) return ev;
    d.tighten(0, vend, -ev.sup, true);
    if (!d.close()) {
      ev.feasible = false;  // only possible when the sup is strict
      return ev;
    }
  }
  // Only the firing times must land on the entry's integer grid; the entry
  // clock offsets may sit anywhere in their (possibly fractional) region.
  // Round on the projection onto the time variables, then extend.
  int T = vend + 1;
  DiffSys ts(T);
  for (int i = 0; i < T; ++i)
    for (int j = 0; j < T; ++j) {
      long long bb2 = d.get(i, j);
      if (i != j && bb2 < kInfB) ts.tighten(i, j, pval(bb2), pweak(bb2));
    }
  ts.integerize();
  if (!ts.close()) return ev;  // no integer-timed realization
  // Greedy minimal integer point; all bounds are weak after integerize.
  std::vector<Rat> x(d.n, Rat(0));
  std::vector<bool> fixed(d.n, false);
  fixed[0] = true;
  for (int vi = 1; vi < T; ++vi) {
    bool has_lo = false;
    Rat lo(0);
    for (int j = 0; j < T; ++j) {
      if (!fixed[j]) continue;
      long long bji = ts.get(j, vi);  // x_j - x_vi <= bji
      if (bji < kInfB) {
        Rat cand = x[j] - Rat(pval(bji));
        if (!has_lo || cand > lo) {
          lo = cand;
          has_lo = true;
        }
      }
    }
    x[vi] = has_lo ? lo : Rat(0);
    fixed[vi] = true;
  }
  // Pin the chosen times back into the full system; the projection is exact,
  // so the point extends to the clock-offset variables over the reals.
  for (int i = 1; i < T; ++i) {
    long long k = x[i].numerator();
    d.tighten(i, 0, k, true);
    d.tighten(0, i, -k, true);
  }
  if (!d.close()) {
    ev.times.clear();
    return ev;
  }
  // Extract the offsets respecting strict bounds from fractional regions.
  for (int c = 0; c < C; ++c) {
    int vi = L + 2 + c;
    bool has_lo = false, has_hi = false, lo_weak = true, hi_weak = true;
    Rat lo(0), hi(0);
    for (int j = 0; j < d.n; ++j) {
      if (!fixed[j]) continue;
      long long bji = d.get(j, vi);  // x_j - x_vi <= bji
      if (bji < kInfB) {
        Rat cand = x[j] - Rat(pval(bji));
        if (!has_lo || cand > lo) {
          lo = cand;
          lo_weak = pweak(bji);
          has_lo = true;
        } else if (cand == lo && !pweak(bji)) {
          lo_weak = false;
        }
      }
      long long bij = d.get(vi, j);  // x_vi - x_j <= bij
      if (bij < kInfB) {
        Rat cand = x[j] + Rat(pval(bij));
        if (!has_hi || cand < hi) {
          hi = cand;
          hi_weak = pweak(bij);
          has_hi = true;
        } else if (cand == hi && !pweak(bij)) {
          hi_weak = false;
        }
      }
    }
    Rat v(0);
    if (has_lo && lo_weak) {
      v = lo;
    } else if (has_hi && hi_weak) {
      v = hi;
    } else if (has_lo && has_hi) {
      v = (lo + hi) / Rat(2);  // open interval, nonempty since d is closed
    } else if (has_lo) {
      v = lo + Rat(1);
    } else if (has_hi) {
      v = hi - Rat(1);
    }
    x[vi] = v;
    fixed[vi] = true;
  }
  ev.times.assign(x.begin(), x.begin() + T);
  ev.v0.assign(C, Rat(0));
  for (int c = 0; c < C; ++c) ev.v0[c] = x[0] - x[L + 2 + c];
  return ev;
}

// ---------------------------------------------------------------------------
// Maximal-duration analysis from one region state.

struct DurationInternal {
  SupDuration sup;
  std::vector<int> seq;  // watched-automaton edge indices
  std::vector<Rat> stays;
  int loop = -1;
  Region final_reg;  // reduced table; meaningful for finite results
  int final_loc = 0;
  bool schedule_ok = false;
};

// Does any reachable state of g close a cycle (delay self-loops included)?
bool find_cycle(const SoloGraph& g, std::vector<int>& stem_to, int& cyc_state) {
  int n = (int)g.states.size();
  // On-cycle states: nontrivial SCC membership or a self-edge.
  std::vector<int> idx(n, -1), low(n, 0), st;
  std::vector<bool> on(n, false), oncyc(n, false);
  int counter = 0;
  // Iterative Tarjan.
  struct Frame {
    int v;
    size_t ei;
  };
  for (int root = 0; root < n; ++root) {
    if (idx[root] != -1) continue;
    std::vector<Frame> stack{{root, 0}};
    while (!stack.empty()) {
      auto& fr = stack.back();
      int v = fr.v;
      if (fr.ei == 0) {
        idx[v] = low[v] = counter++;
        st.push_back(v);
        on[v] = true;
      }
      if (fr.ei < g.out[v].size()) {
        int w = g.edges[g.out[v][fr.ei++]].tgt;
        if (idx[w] == -1)
          stack.push_back({w, 0});
        else if (on[w])
          low[v] = std::min(low[v], idx[w]);
      } else {
        if (low[v] == idx[v]) {
          std::vector<int> comp;
          while (true) {
            int w = st.back();
            st.pop_back();
            on[w] = false;
            comp.push_back(w);
            if (w == v) break;
          }
          bool cyc = comp.size() > 1;
          if (!cyc)
            for (int eid : g.out[v])
              if (g.edges[eid].tgt == v) cyc = true;
          if (cyc)
            for (int w : comp) oncyc[w] = true;
        }
        stack.pop_back();
        if (!stack.empty()) low[stack.back().v] = std::min(low[stack.back().v], low[v]);
      }
    }
  }
  // Breadth-first stem to the nearest on-cycle state.
  std::vector<int> pre(n, -2);
  std::vector<int> q{0};
  pre[0] = -1;
  for (size_t h = 0; h < q.size(); ++h) {
    int v = q[h];
    if (oncyc[v]) {
      cyc_state = v;
      stem_to.clear();
      for (int w = v; pre[w] >= 0; w = g.edges[pre[w]].src) stem_to.push_back(pre[w]);
      std::reverse(stem_to.begin(), stem_to.end());
      return true;
    }
    for (int eid : g.out[v]) {
      int w = g.edges[eid].tgt;
      if (pre[w] == -2) {
        pre[w] = eid;
        q.push_back(w);
      }
    }
  }
  return false;
}

// Shortest cycle through s over graph edges; returns edge ids.
std::vector<int> cycle_through(const SoloGraph& g, int s) {
  std::vector<int> pre(g.states.size(), -2);
  std::vector<int> q;
  for (int eid : g.out[s]) {
    int w = g.edges[eid].tgt;
    if (w == s) return {eid};
    if (pre[w] == -2) {
      pre[w] = eid;
      q.push_back(w);
    }
  }
  for (size_t h = 0; h < q.size(); ++h) {
    int v = q[h];
    for (int eid : g.out[v]) {
      int w = g.edges[eid].tgt;
      if (w == s) {
        std::vector<int> path{eid};
        for (int u = v; u != s; u = g.edges[pre[u]].src) path.push_back(pre[u]);
        std::reverse(path.begin(), path.end());
        return path;
      }
      if (pre[w] == -2) {
        pre[w] = eid;
        q.push_back(w);
      }
    }
  }
  throw std::logic_error("internal error: no cycle through an on-cycle state");
}

std::vector<Rat> stays_from_times(const std::vector<Rat>& times, int L) {
  std::vector<Rat> stays;
  for (int i = 0; i < L; ++i) stays.push_back(times[i + 1] - times[i]);
  return stays;
}

DurationInternal duration_from(const Reduced& rd, int loc0, const Region& r0, size_t budget,
                               bool need_schedule) {
  SoloGraph g = solo_graph(rd, loc0, r0, false, budget);
  DurationInternal out;
  std::vector<int> stem_edges;
  int cyc = -1;
  if (find_cycle(g, stem_edges, cyc)) {
    out.sup.kind = SupDuration::Infinite;
    std::vector<int> loop_edges = cycle_through(g, cyc);
    std::vector<int> seq;
    for (int eid : stem_edges)
      if (g.edges[eid].edge >= 0) seq.push_back(g.edges[eid].edge);
    out.loop = (int)seq.size();
    for (int eid : loop_edges)
      if (g.edges[eid].edge >= 0) seq.push_back(g.edges[eid].edge);
    out.seq = seq;
    out.final_loc = g.states[cyc].first;
    out.final_reg = g.states[cyc].second;
    if (!need_schedule) return out;
    const Region& cr = g.states[cyc].second;
    SeqEval ev = eval_sequence(rd, loc0, r0, seq, g.states[cyc].first, &cr,
                               /*pin_max=*/false, /*extract=*/true, &cr, out.loop);
    if (ev.feasible && !ev.times.empty()) {
      // The loop must recur exactly under these stays, or the fixed schedule
      // would drift away from any legal run.
      Valuation v = ev.v0;
      Valuation at_entry = v;
      Rat t = ev.times[0];
      for (size_t i = 0; i < seq.size(); ++i) {
        const Edge& e = rd.a1().edges[seq[i]];
        v = apply_edge_updates(delay(v, ev.times[i + 1] - t), e);
        t = ev.times[i + 1];
        if ((int)(i + 1) == out.loop) at_entry = v;
      }
      if (v == at_entry) {
        out.stays = stays_from_times(ev.times, (int)seq.size());
        out.schedule_ok = true;
      }
    }
    return out;
  }

  // Acyclic: every prefix of every path is a candidate run.
  struct Best {
    long long sup = -1;
    bool weak = false;
    std::vector<int> seq;
    int state = 0;
    bool any = false;
    std::vector<Rat> times;  // nonempty when an integer schedule exists
  } best;
  std::set<std::pair<std::vector<int>, int>> seen;
  struct Frame {
    int state;
    size_t ei = 0;
  };
  std::vector<Frame> stack;
  std::vector<int> seq;
  size_t evals = 0;
  // Returns false when this (prefix, state) was already explored or is
  // infeasible; either way the subtree can be skipped.
  auto consider = [&](int state) {
    if (!seen.insert({seq, state}).second) return false;
    if (++evals > budget) throw StateBudgetExceeded(evals);
    SeqEval ev = eval_sequence(rd, g.states[0].first, g.states[0].second, seq,
                               g.states[state].first, &g.states[state].second, false, false);
    if (!ev.feasible) return false;
    if (ev.unbounded) throw std::logic_error("internal error: unbounded duration without cycle");
    bool improves = !best.any || ev.sup > best.sup ||
                    (ev.sup == best.sup && ev.weak && !best.weak);
    bool ties = best.any && ev.sup == best.sup && ev.weak == best.weak;
    if (!improves && !ties) return true;
    std::vector<Rat> times;
    if (need_schedule) {
      // Among optimum-realizing candidates prefer one with an integer-timed
      // schedule: several end regions can tie on the same duration bound but
      // only some of them are hit by integer stays.
      SeqEval ex = eval_sequence(rd, g.states[0].first, g.states[0].second, seq,
                                 g.states[state].first, &g.states[state].second,
                                 /*pin_max=*/ev.weak, /*extract=*/true);
      if (ex.feasible) times = std::move(ex.times);
    }
    bool take = improves;
    if (!take) {
      bool cand_ok = !times.empty(), best_ok = !best.times.empty();
      take = (cand_ok && !best_ok) || (cand_ok == best_ok && seq < best.seq);
    }
    if (take) best = {ev.sup, ev.weak, seq, state, true, std::move(times)};
    return true;
  };
  if (consider(0)) stack.push_back({0, 0});
  while (!stack.empty()) {
    Frame& fr = stack.back();
    if (fr.ei < g.out[fr.state].size()) {
      int eid = g.out[fr.state][fr.ei++];
      const auto& e = g.edges[eid];
      if (e.edge >= 0) seq.push_back(e.edge);
      if (consider(e.tgt)) {
        stack.push_back({e.tgt, 0});
      } else if (e.edge >= 0) {
        seq.pop_back();
      }
    } else {
      stack.pop_back();
      if (!stack.empty()) {
        const Frame& parent = stack.back();
        int eid = g.out[parent.state][parent.ei - 1];
        if (g.edges[eid].edge >= 0) seq.pop_back();
      }
    }
  }
  if (!best.any) throw std::logic_error("internal error: start state infeasible");
  out.sup.kind = best.weak ? SupDuration::Attained : SupDuration::Supremum;
  out.sup.value = Rat(best.sup);
  out.seq = best.seq;
  out.final_loc = g.states[best.state].first;
  out.final_reg = g.states[best.state].second;
  if (need_schedule && !best.times.empty()) {
    out.stays = stays_from_times(best.times, (int)best.seq.size());
    out.schedule_ok = true;
  }
  return out;
}

std::set<std::string> all_net_labels(const Network& net) {
  std::set<std::string> s = net.a1.all_labels();
  auto s2 = net.a2.all_labels();
  s.insert(s2.begin(), s2.end());
  return s;
}

bool a1_reads_foreign(const Network& net) {
  std::set<int> own(net.a1.owned_clocks.begin(), net.a1.owned_clocks.end());
  auto foreign = [&](int c) { return !own.count(c); };
  for (const auto& e : net.a1.edges) {
    for (const auto& a : e.guard.atoms)
      if (foreign(a.clock)) return true;
    for (const auto& d : e.guard.diags)
      if (foreign(d.x) || foreign(d.y)) return true;
  }
  for (const auto& l : net.a1.locations)
    for (const auto& a : l.inv)
      if (foreign(a.clock)) return true;
  return false;
}

// Guard over network clocks selecting the synchronization landings that end
// up in region R. Clocks the firing edge overwrites pass no information, so
// only the surviving clocks are constrained: exact integer parts plus the
// pairwise fractional ordering. Decidable in any region because the plain
// atoms are checked before the difference atoms.
Guard gamma_preimage(const Region& R, const std::vector<bool>& overwritten, const Reduced& rd) {
  Guard g;
  int ncl = (int)R.nclocks();
  for (int c = 0; c < ncl; ++c) {
    if (overwritten[c]) continue;
    int nc = rd.to_net[c];
    if (R.above(c)) {
      g.atoms.push_back({nc, Rel::Gt, rd.sys.maxc[c]});
    } else if (R.frac_zero(c)) {
      g.atoms.push_back({nc, Rel::Eq, (long long)R.ip[c]});
    } else {
      g.atoms.push_back({nc, Rel::Gt, (long long)R.ip[c]});
      g.atoms.push_back({nc, Rel::Lt, (long long)R.ip[c] + 1});
    }
  }
  for (int c1 = 0; c1 < ncl; ++c1) {
    if (overwritten[c1] || R.above(c1) || R.frac_zero(c1)) continue;
    for (int c2 = c1 + 1; c2 < ncl; ++c2) {
      if (overwritten[c2] || R.above(c2) || R.frac_zero(c2)) continue;
      long long k = (long long)R.ip[c1] - R.ip[c2];
      int x = rd.to_net[c1], y = rd.to_net[c2];
      if (R.block[c1] == R.block[c2])
        g.diags.push_back({x, y, Rel::Eq, k});
      else if (R.block[c1] < R.block[c2])
        g.diags.push_back({x, y, Rel::Lt, k});
      else
        g.diags.push_back({x, y, Rel::Gt, k});
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// Scheduled estimator (urgent synchronizations present).

struct SchedOut {
  TimedAutomaton a12;
  std::vector<Region> final_regs;  // reduced-table regions, deduplicated
  std::vector<std::string> final_labels;
  bool any_supremum = false;
};

SchedOut build_scheduled(const Network& net, const SModClocks& ct, bool allow_sup,
                         size_t budget) {
  if (a1_reads_foreign(net))
    throw std::runtime_error(
        "scheduled transformation unsupported: watched automaton reads observer clocks");
  if (ct.z < 0) throw std::logic_error("scheduled estimator needs the scheduler clock");
  Reduced rd = reduce_a1(net);
  SoloGraph full = solo_graph(rd, net.a1.init, zero_region(rd.sys), true, budget);
  auto amap = announce_map(net);
  auto pm = prime_map(ct);

  // Entry states: the initial one plus every synchronization landing.
  std::vector<std::pair<int, Region>> entries;
  std::unordered_map<SymState, int, SymStateHash> entry_id;
  auto intern_entry = [&](int loc, const Region& reg) {
    SymState key{{loc}, reg};
    auto it = entry_id.find(key);
    if (it != entry_id.end()) return it->second;
    int n = (int)entries.size();
    entries.push_back({loc, reg});
    entry_id.emplace(std::move(key), n);
    return n;
  };
  intern_entry(net.a1.init, zero_region(rd.sys));

  struct SyncRec {
    int e1 = -1;                   // watched automaton edge
    std::vector<bool> overwritten; // reduced clocks the edge resets or copies into
    int entry = -1;                // chain it lands on
  };
  std::vector<SyncRec> recs;
  std::set<std::tuple<std::string, std::vector<bool>, int>> rec_seen;
  for (size_t si = 0; si < full.states.size(); ++si) {
    auto& [loc, reg] = full.states[si];
    for (size_t ei = 0; ei < rd.a1().edges.size(); ++ei) {
      const Edge& e = rd.a1().edges[ei];
      if (e.kind != ActKind::Sync || e.src != loc) continue;
      if (!satisfies(reg, e.guard, rd.sys.maxc)) continue;
      Region post = apply_updates(reg, e, rd.sys.maxc);
      if (!invariants_hold(rd.sys, {e.tgt}, post)) continue;
      int ent = intern_entry(e.tgt, post);
      std::vector<bool> over(rd.sys.clocks.size(), false);
      for (int c : e.resets) over[c] = true;
      for (auto [dst, src] : e.copies) over[dst] = true;
      const std::string& lab = amap.at({net.a1.edges[ei].label, e.tgt});
      auto key = std::make_tuple(lab, over, ent);
      if (!rec_seen.insert(key).second) continue;
      recs.push_back({(int)ei, std::move(over), ent});
    }
  }

  // Stay schedules per entry.
  std::vector<DurationInternal> durs;
  for (auto& [loc, reg] : entries) {
    DurationInternal di = duration_from(rd, loc, reg, budget, true);
    if (di.sup.kind == SupDuration::Supremum && !allow_sup) throw SupremumNotAttained();
    if (!di.schedule_ok)
      throw std::runtime_error(
          "no integer-timed schedule realizes the optimal run; transformation unsupported");
    durs.push_back(std::move(di));
  }

  SchedOut so;
  TimedAutomaton& a12 = so.a12;
  a12.name = net.a1.name + "_est";
  for (size_t c = 0; c < ct.primed.size(); ++c)
    if (ct.primed[c] >= 0) a12.owned_clocks.push_back(ct.primed[c]);
  a12.owned_clocks.push_back(ct.z);
  std::sort(a12.owned_clocks.begin(), a12.owned_clocks.end());

  std::unordered_map<Region, int, RegionHash> freg_id;
  auto final_label_for = [&](const Region& R) {
    auto it = freg_id.find(R);
    if (it != freg_id.end()) return so.final_labels[it->second];
    int k = (int)so.final_regs.size();
    std::string lab = "final_region__R" + std::to_string(k);
    auto taken = all_net_labels(net);
    while (taken.count(lab)) lab += "_";
    freg_id.emplace(R, k);
    so.final_regs.push_back(R);
    so.final_labels.push_back(lab);
    return lab;
  };

  // Chains: one location per position of each entry's optimal run.
  std::vector<int> chain_head(entries.size(), -1);
  std::vector<int> wait_loc(entries.size(), -1);
  std::vector<std::vector<int>> chain_pos(entries.size());
  for (size_t en = 0; en < entries.size(); ++en) {
    const DurationInternal& di = durs[en];
    int L = (int)di.seq.size();
    bool infinite = di.sup.kind == SupDuration::Infinite;
    int npos = infinite ? (di.loop == L ? L + 1 : L) : L + 1;
    for (int j = 0; j < npos; ++j) {
      Location loc;
      loc.name = "q" + std::to_string(en) + "_" + std::to_string(j);
      bool loop_state = infinite && di.loop <= j;
      if (j < L && !loop_state) {
        long long d = di.stays[j].numerator();
        loc.inv.push_back({ct.z, Rel::Le, d});
      } else if (!infinite && j == L) {
        // Terminal: the shadow mirror of the watched invariant takes over.
        int l1 = di.final_loc;
        loc.inv = remap_inv(net.a1.locations[l1].inv, pm);
      }
      chain_pos[en].push_back((int)a12.locations.size());
      a12.locations.push_back(std::move(loc));
    }
    chain_head[en] = chain_pos[en][0];
    // Position-advancing edges.
    for (int j = 0; j < L; ++j) {
      const Edge& oe = net.a1.edges[di.seq[j]];
      Edge e;
      e.src = chain_pos[en][j];
      e.tgt = (j + 1 < npos) ? chain_pos[en][j + 1] : chain_pos[en][di.loop];
      e.kind = ActKind::Eps;
      e.guard.atoms.push_back({ct.z, Rel::Eq, di.stays[j].numerator()});
      for (int c : oe.resets) e.resets.push_back(pm[c]);
      e.resets.push_back(ct.z);
      std::sort(e.resets.begin(), e.resets.end());
      for (auto [dst, src] : oe.copies) e.copies.push_back({pm[dst], pm[src]});
      a12.edges.push_back(std::move(e));
    }
    if (!infinite && di.sup.kind == SupDuration::Supremum) {
      // On shadow-invariant expiry, announce the final region and wait.
      const Invariant& inv1 = net.a1.locations[di.final_loc].inv;
      for (const auto& a : inv1)
        if (a.rel == Rel::Lt)
          throw std::runtime_error(
              "strict invariant bound in a terminal stay; transformation unsupported");
      Location w;
      w.name = "q" + std::to_string(en) + "_w";
      wait_loc[en] = (int)a12.locations.size();
      a12.locations.push_back(std::move(w));
      std::string lab = final_label_for(di.final_reg);
      for (const auto& a : inv1) {
        Edge e;
        e.src = chain_pos[en][L];
        e.tgt = wait_loc[en];
        e.kind = ActKind::Sync;
        e.label = lab;
        e.guard.atoms.push_back({pm[a.clock], Rel::Eq, a.k});
        e.resets.push_back(ct.z);
        a12.edges.push_back(std::move(e));
      }
      so.any_supremum = true;
    }
  }
  a12.init = chain_head[0];

  // Synchronization edges from every location. The sync itself only receives
  // the clock values into the shadows; the landing chain is then selected in
  // a zero-time branch location by the region the shadows ended up in, so the
  // estimator never reads the real clocks.
  std::vector<std::pair<int, int>> full_copy;
  for (size_t c = 0; c < ct.primed.size(); ++c)
    if (ct.primed[c] >= 0) full_copy.push_back({ct.primed[c], (int)c});
  std::map<std::string, std::vector<int>> by_label;
  for (size_t ri = 0; ri < recs.size(); ++ri) {
    const auto& rec = recs[ri];
    by_label[amap.at({net.a1.edges[rec.e1].label, net.a1.edges[rec.e1].tgt})].push_back((int)ri);
  }
  int nloc = (int)a12.locations.size();
  for (const auto& [lab, group] : by_label) {
    Location sel;
    sel.name = "sel_" + lab;
    sel.inv.push_back({ct.z, Rel::Le, 0});
    int sel_id = (int)a12.locations.size();
    a12.locations.push_back(std::move(sel));
    for (int q = 0; q < nloc; ++q) {
      Edge e;
      e.src = q;
      e.tgt = sel_id;
      e.kind = ActKind::Sync;
      e.label = lab;
      e.resets.push_back(ct.z);
      e.copies = full_copy;
      a12.edges.push_back(std::move(e));
    }
    for (int ri : group) {
      const auto& rec = recs[ri];
      Edge e;
      e.src = sel_id;
      e.tgt = chain_head[rec.entry];
      e.kind = ActKind::Eps;
      e.guard = remap_guard(gamma_preimage(entries[rec.entry].second, rec.overwritten, rd), pm);
      a12.edges.push_back(std::move(e));
    }
  }
  return so;
}

// Folds shadow atoms to their truth value in R (reduced table). Returns false
// when the guard is unsatisfiable there.
bool fold_shadow_guard(Guard& g, const Region& R, const SModClocks& ct, const Reduced& rd) {
  std::vector<int> shadow_to_red(ct.clocks.size(), -1);
  for (size_t c = 0; c < ct.primed.size(); ++c)
    if (ct.primed[c] >= 0) shadow_to_red[ct.primed[c]] = rd.from_net[c];
  Guard out;
  for (const auto& a : g.atoms) {
    int red = a.clock < (int)shadow_to_red.size() ? shadow_to_red[a.clock] : -1;
    if (red < 0) {
      out.atoms.push_back(a);
      continue;
    }
    if (!satisfies(R, Atom{red, a.rel, a.k})) return false;
  }
  for (const auto& d : g.diags) {
    int rx = d.x < (int)shadow_to_red.size() ? shadow_to_red[d.x] : -1;
    int ry = d.y < (int)shadow_to_red.size() ? shadow_to_red[d.y] : -1;
    if (rx < 0 && ry < 0) {
      out.diags.push_back(d);
      continue;
    }
    if (rx < 0 || ry < 0)
      throw std::runtime_error(
          "difference constraint mixes live and frozen clocks; transformation unsupported");
    if (!satisfies(R, DiagAtom{rx, ry, d.rel, d.k}, rd.sys.maxc)) return false;
  }
  g = std::move(out);
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string announce_label(const std::string& label, const std::string& loc_name) {
  return label + "__" + loc_name;
}

std::map<std::pair<std::string, int>, std::string> announce_map(const Network& net) {
  std::set<std::string> taken = all_net_labels(net);
  std::map<std::pair<std::string, int>, std::string> m;
  for (const auto& e : net.a1.edges) {
    if (e.kind != ActKind::Sync) continue;
    auto key = std::make_pair(e.label, e.tgt);
    if (m.count(key)) continue;
    std::string cand = announce_label(e.label, net.a1.locations[e.tgt].name);
    while (taken.count(cand)) cand += "_";
    taken.insert(cand);
    m.emplace(std::move(key), std::move(cand));
  }
  return m;
}

SModClocks smod_clock_table(const Network& net, bool with_z) {
  SModClocks ct;
  ct.clocks = net.clocks;
  ct.primed.assign(net.clocks.size(), -1);
  auto taken = [&](const std::string& n) {
    for (const auto& c : ct.clocks)
      if (c.name == n) return true;
    return false;
  };
  for (int c : net.a1.owned_clocks) {
    std::string n = net.clocks[c].name + "_p";
    while (taken(n)) n += "_";
    ct.primed[c] = (int)ct.clocks.size();
    ct.clocks.push_back({n});
  }
  if (with_z) {
    std::string n = "z";
    while (taken(n)) n += "_";
    ct.z = (int)ct.clocks.size();
    ct.clocks.push_back({n});
  }
  return ct;
}

TimedAutomaton build_a1_prime(const Network& net) {
  Network n = normalize_sync_guards(net);
  auto amap = announce_map(n);
  TimedAutomaton a = n.a1;
  for (auto& e : a.edges)
    if (e.kind == ActKind::Sync) e.label = amap.at({e.label, e.tgt});
  return a;
}

TimedAutomaton build_a12_simple(const Network& net, const SModClocks& ct, bool allow_urgent) {
  Network n = normalize_sync_guards(net);
  if (!allow_urgent && has_urgent_sync(n)) throw UrgentSyncPresent();
  auto amap = announce_map(n);
  auto pm = prime_map(ct);

  TimedAutomaton a;
  a.name = n.a1.name + "_est";
  for (size_t c = 0; c < ct.primed.size(); ++c)
    if (ct.primed[c] >= 0) a.owned_clocks.push_back(ct.primed[c]);
  a.init = n.a1.init;
  for (const auto& l : n.a1.locations) a.locations.push_back({l.name, remap_inv(l.inv, pm)});

  for (const auto& e : n.a1.edges) {
    if (e.kind == ActKind::Sync) continue;
    Edge m;
    m.src = e.src;
    m.tgt = e.tgt;
    m.kind = ActKind::Eps;
    m.guard = remap_guard(e.guard, pm);
    for (int c : e.resets) m.resets.push_back(pm[c]);
    std::sort(m.resets.begin(), m.resets.end());
    for (auto [dst, src] : e.copies) m.copies.push_back({pm[dst], pm[src]});
    a.edges.push_back(std::move(m));
  }

  std::vector<std::pair<int, int>> full_copy;
  for (size_t c = 0; c < ct.primed.size(); ++c)
    if (ct.primed[c] >= 0) full_copy.push_back({ct.primed[c], (int)c});
  std::set<std::tuple<int, std::string, int>> seen;
  for (const auto& e : n.a1.edges) {
    if (e.kind != ActKind::Sync) continue;
    const std::string& lab = amap.at({e.label, e.tgt});
    for (int src = 0; src < (int)a.locations.size(); ++src) {
      if (!seen.insert({src, lab, e.tgt}).second) continue;
      Edge m;
      m.src = src;
      m.tgt = e.tgt;
      m.kind = ActKind::Sync;
      m.label = lab;
      m.copies = full_copy;
      a.edges.push_back(std::move(m));
    }
  }
  return a;
}

TimedAutomaton build_a2mod(const Network& net, const SModClocks& ct, int* sad_out) {
  Network n = normalize_sync_guards(net);
  auto amap = announce_map(n);
  auto pm = prime_map(ct);
  std::set<int> x1(n.a1.owned_clocks.begin(), n.a1.owned_clocks.end());
  auto mentions_x1_atom = [&](const Atom& a) { return x1.count(a.clock) > 0; };
  auto mentions_x1_diag = [&](const DiagAtom& d) { return x1.count(d.x) || x1.count(d.y); };

  TimedAutomaton a;
  a.name = n.a2.name + "_obs";
  a.owned_clocks = n.a2.owned_clocks;
  a.init = n.a2.init;
  for (const auto& l : n.a2.locations) a.locations.push_back({l.name, remap_inv(l.inv, pm)});
  std::string sad_name = "SAD";
  while (n.a2.loc_index(sad_name) >= 0) sad_name += "_";
  int sad = (int)a.locations.size();
  a.locations.push_back({sad_name, {}});
  if (sad_out) *sad_out = sad;

  for (const auto& e : n.a2.edges) {
    if (e.kind == ActKind::Sync) {
      for (const auto& [key, lab] : amap) {
        if (key.first != e.label) continue;
        Edge m;
        m.src = e.src;
        m.tgt = e.tgt;
        m.kind = ActKind::Sync;
        m.label = lab;
        m.guard = remap_guard(e.guard, pm);
        m.resets = e.resets;
        for (auto [dst, src] : e.copies) m.copies.push_back({dst, pm[src]});
        a.edges.push_back(std::move(m));
      }
      continue;
    }
    Edge m;
    m.src = e.src;
    m.tgt = e.tgt;
    m.kind = e.kind;
    m.label = e.label;
    m.guard = remap_guard(e.guard, pm);
    m.resets = e.resets;
    for (auto [dst, src] : e.copies) m.copies.push_back({dst, pm[src]});
    a.edges.push_back(std::move(m));
  }

  // Divergence detection. Invariant family: some watched-clock bound of the
  // observer's invariant fails on the real clocks.
  for (size_t li = 0; li < n.a2.locations.size(); ++li) {
    for (const auto& atom : n.a2.locations[li].inv) {
      if (!mentions_x1_atom(atom)) continue;
      for (const auto& neg : negate_atom(atom)) {
        Edge m;
        m.src = (int)li;
        m.tgt = sad;
        m.kind = ActKind::Eps;
        m.guard.atoms.push_back(neg);
        a.edges.push_back(std::move(m));
      }
    }
  }
  // Guard family: a local guard that holds on the shadows but not on the real
  // clocks, or the other way around.
  for (const auto& e : n.a2.edges) {
    if (e.kind == ActKind::Sync) continue;
    for (const auto& atom : e.guard.atoms) {
      if (!mentions_x1_atom(atom)) continue;
      for (const auto& neg : negate_atom(atom)) {
        Edge m;
        m.src = e.src;
        m.tgt = sad;
        m.kind = ActKind::Eps;
        m.guard = remap_guard(e.guard, pm);
        m.guard.atoms.push_back(neg);
        a.edges.push_back(std::move(m));
      }
      for (const auto& neg : negate_atom(remap_atom(atom, pm))) {
        Edge m;
        m.src = e.src;
        m.tgt = sad;
        m.kind = ActKind::Eps;
        m.guard = e.guard;
        m.guard.atoms.push_back(neg);
        a.edges.push_back(std::move(m));
      }
    }
    for (const auto& dg : e.guard.diags) {
      if (!mentions_x1_diag(dg)) continue;
      for (const auto& neg : negate_diag(dg)) {
        Edge m;
        m.src = e.src;
        m.tgt = sad;
        m.kind = ActKind::Eps;
        m.guard = remap_guard(e.guard, pm);
        m.guard.diags.push_back(neg);
        a.edges.push_back(std::move(m));
      }
      for (const auto& neg : negate_diag(remap_diag(dg, pm))) {
        Edge m;
        m.src = e.src;
        m.tgt = sad;
        m.kind = ActKind::Eps;
        m.guard = e.guard;
        m.guard.diags.push_back(neg);
        a.edges.push_back(std::move(m));
      }
    }
  }
  return a;
}

bool has_urgent_sync(const Network& net, size_t budget) {
  Network n = normalize_sync_guards(net);
  Reduced rd = reduce_a1(n);
  SoloGraph g = solo_graph(rd, n.a1.init, zero_region(rd.sys), true, budget);
  for (const auto& [loc, reg] : g.states) {
    if (delay_successor(rd.sys, {loc}, reg)) continue;
    bool local_en = false, sync_en = false;
    for (const auto& e : rd.a1().edges) {
      if (e.src != loc || !satisfies(reg, e.guard, rd.sys.maxc)) continue;
      Region post = apply_updates(reg, e, rd.sys.maxc);
      if (!invariants_hold(rd.sys, {e.tgt}, post)) continue;
      (e.kind == ActKind::Sync ? sync_en : local_en) = true;
    }
    if (!local_en && sync_en) return true;
  }
  return false;
}

DurationResult max_duration_runs(const Network& net, const RegionState& from, size_t budget) {
  Network n = normalize_sync_guards(net);
  Reduced rd = reduce_a1(n);
  Region r0 = project(from.reg, rd.to_net);
  DurationInternal di = duration_from(rd, from.loc, r0, budget, true);
  DurationResult out;
  out.sup = di.sup;
  out.path = di.seq;
  out.stays = di.schedule_ok ? di.stays : std::vector<Rat>{};
  out.loop = di.loop;
  return out;
}

TimedAutomaton build_a12_urgent_case1(const Network& net, const SModClocks& ct, size_t budget) {
  Network n = normalize_sync_guards(net);
  SchedOut so = build_scheduled(n, ct, /*allow_sup=*/false, budget);
  return so.a12;
}

std::pair<TimedAutomaton, TimedAutomaton> build_case2(const Network& net, const SModClocks& ct,
                                                      std::vector<std::string>* labels_out,
                                                      size_t budget) {
  Network n = normalize_sync_guards(net);
  SchedOut so = build_scheduled(n, ct, /*allow_sup=*/true, budget);
  int sad = -1;
  TimedAutomaton obs = build_a2mod(n, ct, &sad);
  Reduced rd = reduce_a1(n);

  // Frozen-knowledge tiers, one per announced final region.
  int nbase = (int)obs.locations.size();
  size_t nbase_edges = obs.edges.size();
  std::vector<std::vector<int>> dup(so.final_regs.size(), std::vector<int>(nbase, -1));
  for (size_t k = 0; k < so.final_regs.size(); ++k) {
    for (int li = 0; li < nbase; ++li) {
      if (li == sad) continue;
      Location l;
      l.name = obs.locations[li].name + "__R" + std::to_string(k);
      while (obs.loc_index(l.name) >= 0) l.name += "_";
      Guard ig;
      ig.atoms = obs.locations[li].inv;
      bool alive = fold_shadow_guard(ig, so.final_regs[k], ct, rd);
      l.inv = alive ? ig.atoms : Invariant{{0, Rel::Lt, 0}};
      dup[k][li] = (int)obs.locations.size();
      obs.locations.push_back(std::move(l));
    }
    for (size_t ei = 0; ei < nbase_edges; ++ei) {
      Edge e = obs.edges[ei];
      if (!fold_shadow_guard(e.guard, so.final_regs[k], ct, rd)) continue;
      e.src = dup[k][e.src];
      if (e.kind != ActKind::Sync && e.tgt != sad) e.tgt = dup[k][e.tgt];
      obs.edges.push_back(std::move(e));
    }
    for (int li = 0; li < nbase; ++li) {
      if (li == sad) continue;
      Edge e;
      e.src = li;
      e.tgt = dup[k][li];
      e.kind = ActKind::Sync;
      e.label = so.final_labels[k];
      obs.edges.push_back(std::move(e));
    }
  }
  if (labels_out) *labels_out = so.final_labels;
  return {so.a12, obs};
}

SModSystem build_smod(const Network& net, bool for_checking, size_t budget) {
  Network n = normalize_sync_guards(net);
  SModSystem sm;
  bool urgent = !for_checking && has_urgent_sync(n, budget);
  SModClocks ct = smod_clock_table(n, urgent);
  if (!urgent) {
    sm.a12 = build_a12_simple(n, ct, /*allow_urgent=*/true);
    sm.a2mod = build_a2mod(n, ct, &sm.sad_loc);
  } else {
    SchedOut so = build_scheduled(n, ct, /*allow_sup=*/true, budget);
    if (so.any_supremum) {
      auto pair = build_case2(n, ct, &sm.final_region_labels, budget);
      sm.a12 = std::move(pair.first);
      sm.a2mod = std::move(pair.second);
      std::string sad_name = "SAD";
      while (n.a2.loc_index(sad_name) >= 0) sad_name += "_";
      sm.sad_loc = sm.a2mod.loc_index(sad_name);
    } else {
      sm.a12 = std::move(so.a12);
      sm.a2mod = build_a2mod(n, ct, &sm.sad_loc);
    }
  }
  sm.a1_prime = build_a1_prime(n);
  sm.clocks = ct.clocks;
  for (size_t c = 0; c < ct.primed.size(); ++c)
    if (ct.primed[c] >= 0) sm.clock_bij.push_back({ct.primed[c], (int)c});
  return sm;
}

FlatSys SModSystem::assembly() const { return FlatSys(clocks, {a1_prime, a12, a2mod}); }

std::optional<Trace> sad_reachable(const SModSystem& smod, Engine engine, size_t budget) {
  FlatSys sys = smod.assembly();
  std::optional<std::vector<PathStep>> path;
  switch (engine) {
    case Engine::Region:
      path = region_reach(sys, 2, smod.sad_loc, budget);
      break;
    case Engine::Zone:
      path = zone_reach(sys, 2, smod.sad_loc, budget);
      break;
    case Engine::All: {
      path = region_reach(sys, 2, smod.sad_loc, budget);
      auto zp = zone_reach(sys, 2, smod.sad_loc, budget);
      if (path.has_value() != zp.has_value())
        throw std::logic_error("engine disagreement on error reachability");
      break;
    }
    case Engine::Contextual:
      throw std::invalid_argument("the knowledge engine decides via find_restriction");
  }
  if (!path) return std::nullopt;
  return make_trace(sys, *path);
}

}  // namespace ntasc
