#include "ntasc/bisim.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace ntasc {
namespace {

struct Pos {
  std::vector<int> la, lb;
  Region reg;
  bool operator==(const Pos&) const = default;
};

struct PosHash {
  size_t operator()(const Pos& p) const {
    size_t h = region_hash(p.reg);
    for (int l : p.la) h = h * 1000003u + (size_t)(l + 1);
    h = h * 99991u + 7u;
    for (int l : p.lb) h = h * 1000003u + (size_t)(l + 1);
    return h;
  }
};

struct GMove {
  std::string lab;  // empty = silent
  int tgt = -1;
};

bool silent_label(const std::string& lab) {
  return lab.empty() || lab == "eps" || lab.rfind("final_region", 0) == 0;
}

void shift_automaton(TimedAutomaton& a, int shift) {
  for (int& c : a.owned_clocks) c += shift;
  auto fix_guard = [&](Guard& g) {
    for (auto& at : g.atoms) at.clock += shift;
    for (auto& d : g.diags) {
      d.x += shift;
      d.y += shift;
    }
  };
  for (auto& e : a.edges) {
    fix_guard(e.guard);
    for (int& c : e.resets) c += shift;
    for (auto& [dst, src] : e.copies) {
      dst += shift;
      src += shift;
    }
  }
  for (auto& l : a.locations)
    for (auto& at : l.inv) at.clock += shift;
}

// Restriction of one automaton to the clocks it touches, reindexed densely.
std::pair<std::vector<Clock>, TimedAutomaton> restrict_clocks(const std::vector<Clock>& table,
                                                              const TimedAutomaton& a) {
  std::set<int> keep(a.owned_clocks.begin(), a.owned_clocks.end());
  for (const auto& e : a.edges) {
    for (const auto& at : e.guard.atoms) keep.insert(at.clock);
    for (const auto& d : e.guard.diags) {
      keep.insert(d.x);
      keep.insert(d.y);
    }
    for (int c : e.resets) keep.insert(c);
    for (auto [dst, src] : e.copies) {
      keep.insert(dst);
      keep.insert(src);
    }
  }
  for (const auto& l : a.locations)
    for (const auto& at : l.inv) keep.insert(at.clock);

  std::vector<int> remap(table.size(), -1);
  std::vector<Clock> clocks;
  for (int c : keep) {
    remap[c] = (int)clocks.size();
    clocks.push_back(table[c]);
  }
  TimedAutomaton out = a;
  for (int& c : out.owned_clocks) c = remap[c];
  for (auto& e : out.edges) {
    for (auto& at : e.guard.atoms) at.clock = remap[at.clock];
    for (auto& d : e.guard.diags) {
      d.x = remap[d.x];
      d.y = remap[d.y];
    }
    for (int& c : e.resets) c = remap[c];
    for (auto& [dst, src] : e.copies) {
      dst = remap[dst];
      src = remap[src];
    }
  }
  for (auto& l : out.locations)
    for (auto& at : l.inv) at.clock = remap[at.clock];
  return {std::move(clocks), std::move(out)};
}

}  // namespace

std::string BisimResult::sequence_str() const {
  std::ostringstream os;
  for (size_t i = 0; i < distinguishing.size(); ++i) {
    if (i) os << ' ';
    os << distinguishing[i];
  }
  return os.str();
}

std::pair<FlatSys, FlatSys> align_union(const FlatSys& a, const FlatSys& b) {
  std::vector<Clock> table = a.clocks;
  std::set<std::string> used;
  for (const auto& c : table) used.insert(c.name);
  int shift = (int)a.clocks.size();
  for (const auto& c : b.clocks) {
    Clock nc = c;
    while (!used.insert(nc.name).second) nc.name += "_r";
    table.push_back(std::move(nc));
  }
  std::vector<TimedAutomaton> bcomps = b.comps;
  for (auto& aut : bcomps) shift_automaton(aut, shift);
  FlatSys ls(table, a.comps);
  FlatSys rs(table, bcomps);
  std::vector<long long> mx(table.size());
  for (size_t i = 0; i < table.size(); ++i) mx[i] = std::max(ls.maxc[i], rs.maxc[i]);
  ls.maxc = mx;
  rs.maxc = std::move(mx);
  return {std::move(ls), std::move(rs)};
}

BisimResult timed_bisim(const FlatSys& left, const FlatSys& right, const BisimOptions& opt) {
  if (left.clocks.size() != right.clocks.size() || left.maxc != right.maxc)
    throw std::invalid_argument("timed_bisim requires aligned clock tables");
  const auto& maxc = left.maxc;

  std::vector<Pos> poss;
  std::unordered_map<Pos, int, PosHash> ids;
  std::vector<std::array<std::vector<GMove>, 2>> moves;
  std::vector<std::array<bool, 2>> dcan;
  std::vector<int> dtgt;

  std::queue<int> work;
  auto intern = [&](Pos p) {
    auto it = ids.find(p);
    if (it != ids.end()) return it->second;
    int n = (int)poss.size();
    if ((size_t)n >= opt.budget) throw StateBudgetExceeded(poss.size());
    ids.emplace(p, n);
    poss.push_back(std::move(p));
    work.push(n);
    return n;
  };
  std::vector<int> la0, lb0;
  for (const auto& c : left.comps) la0.push_back(c.init);
  for (const auto& c : right.comps) lb0.push_back(c.init);
  int init = intern(Pos{std::move(la0), std::move(lb0),
                        region_of(Valuation(maxc.size(), Rat(0)), maxc)});

  StepOptions so;
  so.enrich_sync = opt.enrich_sync;
  auto canon = [&](int side, const GraphEdge& ge) -> std::string {
    if (ge.kind == ActKind::Eps || silent_label(ge.label)) return {};
    if (side == 0 && opt.relabel) return opt.relabel(ge.label);
    return ge.label;
  };

  std::vector<std::pair<GraphEdge, SymState>> succ;
  while (!work.empty()) {
    int pi = work.front();
    work.pop();
    Pos p = poss[pi];  // by value: interning below may reallocate
    std::array<std::vector<GMove>, 2> mv;
    for (int side = 0; side < 2; ++side) {
      const FlatSys& sys = side == 0 ? left : right;
      const auto& locs = side == 0 ? p.la : p.lb;
      succ.clear();
      discrete_successors(sys, locs, p.reg, so, succ);
      for (auto& [ge, st] : succ) {
        Pos q = p;
        (side == 0 ? q.la : q.lb) = st.locs;
        q.reg = st.reg;
        mv[side].push_back({canon(side, ge), intern(std::move(q))});
      }
    }
    auto ts = time_successor(p.reg, maxc);
    const Region& rn = ts ? *ts : p.reg;
    std::array<bool, 2> dc = {invariants_hold(left, p.la, rn),
                              invariants_hold(right, p.lb, rn)};
    int dt = -1;
    if (dc[0] && dc[1]) {
      Pos q = p;
      q.reg = rn;
      dt = intern(std::move(q));
    }
    if (moves.size() < poss.size()) {
      moves.resize(poss.size());
      dcan.resize(poss.size(), {false, false});
      dtgt.resize(poss.size(), -1);
    }
    moves[pi] = std::move(mv);
    dcan[pi] = dc;
    dtgt[pi] = dt;
  }

  size_t npos = poss.size();
  std::vector<std::array<std::vector<int>, 2>> clos(npos);
  std::vector<std::array<bool, 2>> clos_done(npos, {false, false});
  auto closure = [&](int p, int side) -> const std::vector<int>& {
    if (!clos_done[p][side]) {
      std::vector<int> out{p};
      std::set<int> seen{p};
      for (size_t i = 0; i < out.size(); ++i)
        for (const auto& m : moves[out[i]][side])
          if (m.lab.empty() && seen.insert(m.tgt).second) out.push_back(m.tgt);
      clos[p][side] = std::move(out);
      clos_done[p][side] = true;
    }
    return clos[p][side];
  };

  std::vector<char> alive(npos, 1);
  std::vector<int> round(npos, 0);

  // All duplicator answers to a challenge at p by `side` (delay when m is
  // null). Early-exits on the first living answer unless collecting.
  auto responds = [&](int p, int side, const GMove* m, std::vector<int>* collect) {
    int other = 1 - side;
    bool found = false;
    auto offer = [&](int r) {
      if (collect) collect->push_back(r);
      if (alive[r]) found = true;
      return found && !collect;
    };
    if (!opt.weak) {
      if (!m) {
        if (dcan[p][0] && dcan[p][1]) offer(dtgt[p]);
      } else {
        for (const auto& m2 : moves[m->tgt][other])
          if (m2.lab == m->lab && offer(m2.tgt)) break;
      }
      return found;
    }
    if (!m) {
      for (int q : closure(p, other)) {
        if (!dcan[q][0] || !dcan[q][1]) continue;
        bool stop = false;
        for (int r : closure(dtgt[q], other))
          if (offer(r)) {
            stop = true;
            break;
          }
        if (stop) break;
      }
    } else if (m->lab.empty()) {
      for (int r : closure(m->tgt, other))
        if (offer(r)) break;
    } else {
      bool stop = false;
      for (int q : closure(m->tgt, other)) {
        for (const auto& m2 : moves[q][other]) {
          if (m2.lab != m->lab) continue;
          for (int r : closure(m2.tgt, other))
            if (offer(r)) {
              stop = true;
              break;
            }
          if (stop) break;
        }
        if (stop) break;
      }
    }
    return found;
  };

  bool changed = true;
  int iter = 0;
  while (changed) {
    changed = false;
    ++iter;
    for (size_t p = 0; p < npos; ++p) {
      if (!alive[p]) continue;
      bool ok = true;
      for (int side = 0; side < 2 && ok; ++side) {
        if (dcan[p][side] && !responds((int)p, side, nullptr, nullptr)) ok = false;
        for (const auto& m : moves[p][side]) {
          if (!ok) break;
          if (!responds((int)p, side, &m, nullptr)) ok = false;
        }
      }
      if (!ok) {
        alive[p] = 0;
        round[p] = iter;
        changed = true;
      }
    }
  }

  BisimResult res;
  res.positions = npos;
  res.bisimilar = alive[init] != 0;
  if (!res.bisimilar) {
    int cur = init;
    for (size_t guard = 0; guard <= npos && !alive[cur]; ++guard) {
      bool advanced = false;
      for (int side = 0; side < 2 && !advanced; ++side) {
        std::vector<int> rs;
        if (dcan[cur][side] && !responds(cur, side, nullptr, &rs)) {
          res.distinguishing.push_back("delay");
          if (rs.empty()) return res;
          cur = *std::max_element(rs.begin(), rs.end(),
                                  [&](int a, int b) { return round[a] < round[b]; });
          advanced = true;
          break;
        }
        for (const auto& m : moves[cur][side]) {
          rs.clear();
          if (responds(cur, side, &m, &rs)) continue;
          res.distinguishing.push_back(m.lab.empty() ? "eps" : m.lab);
          if (rs.empty()) return res;
          cur = *std::max_element(rs.begin(), rs.end(),
                                  [&](int a, int b) { return round[a] < round[b]; });
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  return res;
}

Lts lts_of(const ContextualGraph& g, const Relabel& relabel) {
  Lts l;
  l.init = g.init;
  l.nstates = (int)g.states.size();
  for (const auto& e : g.edges) {
    Lts::E le;
    le.src = e.src;
    le.tgt = e.tgt;
    if (e.delay) {
      le.label = "delay";
    } else if (silent_label(e.label)) {
      le.silent = true;
    } else {
      le.label = relabel ? relabel(e.label) : e.label;
    }
    l.edges.push_back(std::move(le));
  }
  return l;
}

Lts lts_of(const RegionGraph& g, const Relabel& relabel) {
  Lts l;
  l.init = g.init;
  l.nstates = (int)g.states.size();
  for (const auto& e : g.edges) {
    Lts::E le;
    le.src = e.src;
    le.tgt = e.tgt;
    if (e.delay) {
      le.label = "delay";
    } else if (e.kind == ActKind::Eps || silent_label(e.label)) {
      le.silent = true;
    } else {
      le.label = relabel ? relabel(e.label) : e.label;
    }
    l.edges.push_back(std::move(le));
  }
  return l;
}

BisimResult lts_bisim(const Lts& left, const Lts& right, bool weak, size_t budget) {
  int na = std::max(left.nstates, 1), nb = std::max(right.nstates, 1);
  if ((size_t)na * (size_t)nb > budget) throw StateBudgetExceeded((size_t)na * nb);

  std::vector<std::vector<const Lts::E*>> outa(na), outb(nb);
  for (const auto& e : left.edges) outa[e.src].push_back(&e);
  for (const auto& e : right.edges) outb[e.src].push_back(&e);

  // Per-side silent closures.
  auto closures = [](int n, const std::vector<std::vector<const Lts::E*>>& out) {
    std::vector<std::vector<int>> c(n);
    for (int s = 0; s < n; ++s) {
      std::vector<int>& cl = c[s];
      cl.push_back(s);
      std::set<int> seen{s};
      for (size_t i = 0; i < cl.size(); ++i)
        for (const auto* e : out[cl[i]])
          if (e->silent && seen.insert(e->tgt).second) cl.push_back(e->tgt);
    }
    return c;
  };
  std::vector<std::vector<int>> cla = closures(na, outa), clb = closures(nb, outb);

  size_t npos = (size_t)na * nb;
  auto id = [&](int sa, int sb) { return (size_t)sa * nb + sb; };
  std::vector<char> alive(npos, 1);
  std::vector<int> round(npos, 0);

  // side 0: spoiler moves on the left state; side 1: on the right state.
  auto responds = [&](int sa, int sb, int side, const Lts::E* m, std::vector<size_t>* collect) {
    bool found = false;
    auto offer = [&](size_t r) {
      if (collect) collect->push_back(r);
      if (alive[r]) found = true;
      return found && !collect;
    };
    int mover_tgt = m->tgt;
    int other_state = side == 0 ? sb : sa;
    const auto& oout = side == 0 ? outb : outa;
    const auto& ocl = side == 0 ? clb : cla;
    auto pos_of = [&](int moved, int resp) {
      return side == 0 ? id(moved, resp) : id(resp, moved);
    };
    if (!weak) {
      for (const auto* e2 : oout[other_state]) {
        bool match = m->silent ? e2->silent : (!e2->silent && e2->label == m->label);
        if (match && offer(pos_of(mover_tgt, e2->tgt))) break;
      }
      return found;
    }
    if (m->silent) {
      for (int r : ocl[other_state])
        if (offer(pos_of(mover_tgt, r))) break;
      return found;
    }
    bool stop = false;
    for (int q : ocl[other_state]) {
      for (const auto* e2 : oout[q]) {
        if (e2->silent || e2->label != m->label) continue;
        for (int r : ocl[e2->tgt])
          if (offer(pos_of(mover_tgt, r))) {
            stop = true;
            break;
          }
        if (stop) break;
      }
      if (stop) break;
    }
    return found;
  };

  bool changed = true;
  int iter = 0;
  while (changed) {
    changed = false;
    ++iter;
    for (int sa = 0; sa < na; ++sa) {
      for (int sb = 0; sb < nb; ++sb) {
        size_t p = id(sa, sb);
        if (!alive[p]) continue;
        bool ok = true;
        for (const auto* m : outa[sa]) {
          if (!responds(sa, sb, 0, m, nullptr)) {
            ok = false;
            break;
          }
        }
        if (ok)
          for (const auto* m : outb[sb]) {
            if (!responds(sa, sb, 1, m, nullptr)) {
              ok = false;
              break;
            }
          }
        if (!ok) {
          alive[p] = 0;
          round[p] = iter;
          changed = true;
        }
      }
    }
  }

  BisimResult res;
  res.positions = npos;
  size_t start = id(left.init, right.init);
  res.bisimilar = alive[start] != 0;
  if (!res.bisimilar) {
    size_t cur = start;
    for (size_t guard = 0; guard <= npos && !alive[cur]; ++guard) {
      int sa = (int)(cur / nb), sb = (int)(cur % nb);
      bool advanced = false;
      for (int side = 0; side < 2 && !advanced; ++side) {
        const auto& mout = side == 0 ? outa[sa] : outb[sb];
        for (const auto* m : mout) {
          std::vector<size_t> rs;
          if (responds(sa, sb, side, m, &rs)) continue;
          res.distinguishing.push_back(m->silent ? "eps" : m->label);
          if (rs.empty()) return res;
          cur = *std::max_element(rs.begin(), rs.end(),
                                  [&](size_t a, size_t b) { return round[a] < round[b]; });
          advanced = true;
          break;
        }
      }
      if (!advanced) break;
    }
  }
  return res;
}

NscReport check_def_nsc(const Network& net, const SynthesizedNetwork& sn, size_t budget) {
  NscReport rep;
  Network n = normalize_sync_guards(net);
  Relabel psi = [&sn](const std::string& lab) { return psi_apply(sn, lab); };

  {
    auto [ls, rs] = align_union(FlatSys(sn.net), FlatSys(n));
    BisimOptions opt;
    opt.enrich_sync = true;
    opt.relabel = psi;
    opt.budget = budget;
    rep.global = timed_bisim(ls, rs, opt);
  }
  {
    auto [cl, al] = restrict_clocks(sn.net.clocks, sn.net.a1);
    auto [cr, ar] = restrict_clocks(n.clocks, n.a1);
    auto [ls, rs] = align_union(FlatSys(std::move(cl), {std::move(al)}),
                                FlatSys(std::move(cr), {std::move(ar)}));
    BisimOptions opt;
    opt.enrich_sync = true;
    opt.relabel = psi;
    opt.budget = budget;
    rep.watched = timed_bisim(ls, rs, opt);
  }
  {
    ContextualGraph gl = build_contextual_graph(sn.net, budget);
    ContextualGraph gr = build_contextual_graph(n, budget);
    rep.contextual = lts_bisim(lts_of(gl, psi), lts_of(gr), true, budget);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Knowledge product: actual watched component x observer knowledge view.

namespace {

// One believed world: a watched location plus a region over the combined
// coordinate system (the real clock table followed by one believed coordinate
// per watched-owned clock). The real part is shared with the actual run; the
// believed part is what the observer would act on.
struct KMember {
  int loc = 0;
  Region reg;
  bool operator==(const KMember&) const = default;
};

bool kmember_less(const KMember& a, const KMember& b) {
  if (a.loc != b.loc) return a.loc < b.loc;
  if (a.reg.ip != b.reg.ip) return a.reg.ip < b.reg.ip;
  if (a.reg.block != b.reg.block) return a.reg.block < b.reg.block;
  return a.reg.zero_block < b.reg.zero_block;
}

struct KState {
  int l1 = 0;  // actual watched location
  int l2 = 0;  // observer location
  std::vector<KMember> members;  // sorted, deduped; all share one real projection
  bool operator==(const KState&) const = default;
};

struct KStateHash {
  size_t operator()(const KState& s) const {
    size_t h = (size_t)(s.l1 + 1) * 2654435761u + (size_t)(s.l2 + 1);
    for (const auto& m : s.members) {
      h = h * 1000003u + (size_t)(m.loc + 1);
      h ^= region_hash(m.reg) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

struct KCtx {
  FlatSys sys;                   // normalized base system
  std::vector<int> mirror;       // real clock -> believed coordinate (or itself)
  std::vector<long long> maxc;   // combined maxima
  std::vector<int> real_keep;    // projection onto the real table
  std::vector<int> own1;         // watched-owned clocks, real indices
  std::vector<int> bown1;        // the same clocks, believed indices
  std::vector<Edge> believed1;   // watched edges over believed coordinates
  std::vector<Invariant> binv1;  // watched invariants, believed
  std::vector<Invariant> binv2;  // observer invariants, believed
  size_t ncomb = 0;
};

Guard remap_guard(const Guard& g, const std::vector<int>& f) {
  Guard out = g;
  for (auto& a : out.atoms) a.clock = f[a.clock];
  for (auto& d : out.diags) {
    d.x = f[d.x];
    d.y = f[d.y];
  }
  return out;
}

KCtx make_kctx(const Network& norm) {
  KCtx cx;
  cx.sys = FlatSys(norm);
  size_t n = cx.sys.clocks.size();
  cx.mirror.resize(n);
  for (size_t c = 0; c < n; ++c) cx.mirror[c] = (int)c;
  cx.maxc = cx.sys.maxc;
  cx.own1 = cx.sys.comps[0].owned_clocks;
  for (int c : cx.own1) {
    cx.mirror[c] = (int)cx.maxc.size();
    cx.maxc.push_back(cx.sys.maxc[c]);
  }
  cx.ncomb = cx.maxc.size();
  for (size_t c = 0; c < n; ++c) cx.real_keep.push_back((int)c);
  for (int c : cx.own1) cx.bown1.push_back(cx.mirror[c]);
  for (const auto& e : cx.sys.comps[0].edges) {
    Edge em = e;
    em.guard = remap_guard(em.guard, cx.mirror);
    for (int& r : em.resets) r = cx.mirror[r];
    for (auto& [dst, src] : em.copies) {
      dst = cx.mirror[dst];
      src = cx.mirror[src];
    }
    cx.believed1.push_back(std::move(em));
  }
  auto remap_inv = [&](const Invariant& inv) {
    Invariant out = inv;
    for (auto& a : out) a.clock = cx.mirror[a.clock];
    return out;
  };
  for (const auto& l : cx.sys.comps[0].locations) cx.binv1.push_back(remap_inv(l.inv));
  for (const auto& l : cx.sys.comps[1].locations) cx.binv2.push_back(remap_inv(l.inv));
  return cx;
}

bool believed_legal(const KCtx& cx, int mloc, int l2, const Region& reg) {
  return satisfies(reg, cx.binv1[mloc]) && satisfies(reg, cx.binv2[l2]);
}

// Zero-delay closure under believed watched moves; illegal seeds are dropped
// as impossible worlds.
std::vector<KMember> believed_close(const KCtx& cx, int l2, std::vector<KMember> seeds) {
  std::vector<KMember> out;
  std::deque<KMember> work;
  auto push = [&](KMember&& m) {
    for (const auto& seen : out)
      if (seen == m) return;
    out.push_back(m);
    work.push_back(std::move(m));
  };
  for (auto& s : seeds)
    if (believed_legal(cx, s.loc, l2, s.reg)) push(std::move(s));
  while (!work.empty()) {
    KMember cur = work.front();
    work.pop_front();
    for (const Edge& be : cx.believed1) {
      if (be.src != cur.loc || be.kind == ActKind::Sync) continue;
      if (!satisfies(cur.reg, be.guard, cx.maxc)) continue;
      Region r2 = apply_updates(cur.reg, be, cx.maxc);
      if (!believed_legal(cx, be.tgt, l2, r2)) continue;
      push(KMember{be.tgt, std::move(r2)});
    }
  }
  std::sort(out.begin(), out.end(), kmember_less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// One joint-region tick of a believed world: believed moves may interleave
// with combined time steps until the real projection reaches the target.
void member_tick(const KCtx& cx, int l2, const KMember& seed, const Region& target,
                 std::vector<KMember>& out) {
  std::vector<KMember> visited;
  std::deque<KMember> work;
  auto push = [&](KMember&& m) {
    for (const auto& seen : visited)
      if (seen == m) return;
    visited.push_back(m);
    work.push_back(std::move(m));
  };
  push(KMember{seed.loc, seed.reg});
  while (!work.empty()) {
    KMember cur = work.front();
    work.pop_front();
    bool arrived = project(cur.reg, cx.real_keep) == target;
    if (arrived) out.push_back(cur);
    for (const Edge& be : cx.believed1) {
      if (be.src != cur.loc || be.kind == ActKind::Sync) continue;
      if (!satisfies(cur.reg, be.guard, cx.maxc)) continue;
      Region r2 = apply_updates(cur.reg, be, cx.maxc);
      if (!believed_legal(cx, be.tgt, l2, r2)) continue;
      push(KMember{be.tgt, std::move(r2)});
    }
    if (arrived) continue;
    if (auto next = time_successor(cur.reg, cx.maxc)) {
      if (believed_legal(cx, cur.loc, l2, *next)) push(KMember{cur.loc, std::move(*next)});
    }
  }
}

}  // namespace

Lts knowledge_product_lts(const Network& net, size_t budget) {
  Network norm = normalize_sync_guards(net);
  KCtx cx = make_kctx(norm);
  const auto& a1 = cx.sys.comps[0];
  const auto& a2 = cx.sys.comps[1];
  const auto& rmaxc = cx.sys.maxc;

  Region comb0 = region_of(Valuation(cx.ncomb, Rat(0)), cx.maxc);
  KState init;
  init.l1 = a1.init;
  init.l2 = a2.init;
  init.members = believed_close(cx, a2.init, {KMember{a1.init, comb0}});
  if (init.members.empty() || !satisfies(project(comb0, cx.real_keep), a1.locations[a1.init].inv))
    throw std::runtime_error("initial state violates an invariant");

  Lts lts;
  std::vector<KState> states;
  std::unordered_map<KState, int, KStateHash> index;
  std::deque<int> work;
  auto intern = [&](KState&& s) {
    auto it = index.find(s);
    if (it != index.end()) return it->second;
    if (states.size() >= budget) throw StateBudgetExceeded(states.size());
    int id = (int)states.size();
    index.emplace(s, id);
    states.push_back(std::move(s));
    work.push_back(id);
    return id;
  };
  lts.init = intern(std::move(init));

  while (!work.empty()) {
    int sid = work.front();
    work.pop_front();
    KState cur = states[sid];
    Region creal = project(cur.members.front().reg, cx.real_keep);
    std::set<std::pair<std::string, int>> emitted;
    auto emit = [&](KState&& tgt, const std::string& label, bool silent) {
      if (tgt.members.empty()) return;
      int tid = intern(std::move(tgt));
      if (!emitted.insert({label, tid}).second) return;
      Lts::E e;
      e.src = sid;
      e.tgt = tid;
      if (!silent) e.label = label;
      e.silent = silent;
      lts.edges.push_back(std::move(e));
    };

    // Actual watched moves: knowledge is a bystander, so believed views stay
    // put while the real coordinates change under every world at once.
    for (const Edge& e : a1.edges) {
      if (e.src != cur.l1 || e.kind == ActKind::Sync) continue;
      if (!satisfies(creal, e.guard, rmaxc)) continue;
      Region rpost = apply_updates(creal, e, rmaxc);
      if (!satisfies(rpost, a1.locations[e.tgt].inv)) continue;
      std::vector<KMember> ms;
      for (const auto& m : cur.members) ms.push_back({m.loc, apply_updates(m.reg, e, cx.maxc)});
      KState nxt;
      nxt.l1 = e.tgt;
      nxt.l2 = cur.l2;
      nxt.members = believed_close(cx, cur.l2, std::move(ms));
      bool silent = e.kind == ActKind::Eps || silent_label(e.label);
      emit(std::move(nxt), silent ? std::string() : e.label, silent);
    }

    // Observer moves run on believed readings; knowledge narrows to the
    // believers, whatever the real values say.
    for (const Edge& e : a2.edges) {
      if (e.src != cur.l2 || e.kind == ActKind::Sync) continue;
      for (auto [dst, src] : e.copies)
        if (cx.mirror[src] != src || cx.mirror[dst] != dst)
          throw std::runtime_error("observer local edge copies a watched clock");
      Guard bg = remap_guard(e.guard, cx.mirror);
      std::vector<KMember> ms;
      for (const auto& m : cur.members) {
        if (!satisfies(m.reg, bg, cx.maxc)) continue;
        ms.push_back({m.loc, apply_updates(m.reg, e, cx.maxc)});
      }
      KState nxt;
      nxt.l1 = cur.l1;
      nxt.l2 = e.tgt;
      nxt.members = believed_close(cx, e.tgt, std::move(ms));
      bool silent = e.kind == ActKind::Eps || silent_label(e.label);
      emit(std::move(nxt), silent ? std::string() : e.label, silent);
    }

    // Synchronizations: the actual run and some believed world must announce
    // the same landing; knowledge then collapses onto the real values.
    for (const Edge& e2 : a2.edges) {
      if (e2.src != cur.l2 || e2.kind != ActKind::Sync) continue;
      Guard bg2 = remap_guard(e2.guard, cx.mirror);
      for (const Edge& e1 : a1.edges) {
        if (e1.kind != ActKind::Sync || e1.label != e2.label || e1.src != cur.l1) continue;
        if (!satisfies(creal, e1.guard, rmaxc) || !satisfies(creal, e2.guard, rmaxc)) continue;
        std::vector<int> resets = e1.resets;
        resets.insert(resets.end(), e2.resets.begin(), e2.resets.end());
        std::sort(resets.begin(), resets.end());
        resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
        Region rpost = apply_reset(creal, resets);
        for (auto [dst, src] : e1.copies) rpost = apply_copy(rpost, dst, src, rmaxc);
        for (auto [dst, src] : e2.copies) rpost = apply_copy(rpost, dst, src, rmaxc);
        if (!satisfies(rpost, a1.locations[e1.tgt].inv) ||
            !satisfies(rpost, a2.locations[e2.tgt].inv))
          continue;
        Region rsig = project(rpost, cx.own1);

        bool offered = false;
        for (const auto& m : cur.members) {
          if (offered) break;
          for (const Edge& be1 : cx.believed1) {
            if (be1.kind != ActKind::Sync || be1.label != e1.label || be1.src != m.loc ||
                be1.tgt != e1.tgt)
              continue;
            if (!satisfies(m.reg, be1.guard, cx.maxc) || !satisfies(m.reg, bg2, cx.maxc)) continue;
            std::vector<int> bresets = be1.resets;
            for (int c : e2.resets) bresets.push_back(cx.mirror[c]);
            std::sort(bresets.begin(), bresets.end());
            bresets.erase(std::unique(bresets.begin(), bresets.end()), bresets.end());
            Region bpost = apply_reset(m.reg, bresets);
            for (auto [dst, src] : be1.copies) bpost = apply_copy(bpost, dst, src, cx.maxc);
            for (auto [dst, src] : e2.copies)
              bpost = apply_copy(bpost, cx.mirror[dst], cx.mirror[src], cx.maxc);
            if (project(bpost, cx.bown1) == rsig) {
              offered = true;
              break;
            }
          }
        }
        if (!offered) continue;

        Region comb = apply_reset(cur.members.front().reg, resets);
        for (auto [dst, src] : e1.copies) comb = apply_copy(comb, dst, src, cx.maxc);
        for (auto [dst, src] : e2.copies) comb = apply_copy(comb, dst, src, cx.maxc);
        for (int c : cx.own1) comb = apply_copy(comb, cx.mirror[c], c, cx.maxc);
        KState nxt;
        nxt.l1 = e1.tgt;
        nxt.l2 = e2.tgt;
        nxt.members = believed_close(cx, e2.tgt, {KMember{e1.tgt, std::move(comb)}});
        std::string lab = enriched_label(cx.sys, e1.label, e1.tgt, rpost);
        bool silent = silent_label(lab);
        emit(std::move(nxt), silent ? std::string() : lab, silent);
      }
    }

    // Delay: one joint-region boundary step, gated by the actual watched
    // invariant; every believed world walks its combined chain to the same
    // real landing or dies trying.
    auto ts = time_successor(creal, rmaxc);
    const Region& rn = ts ? *ts : creal;
    if (satisfies(rn, a1.locations[cur.l1].inv)) {
      std::vector<KMember> ms;
      if (!ts) {
        // Real clocks saturated: believed coordinates may still be catching up.
        for (const auto& m : cur.members) {
          auto nx = time_successor(m.reg, cx.maxc);
          Region stepped = nx ? std::move(*nx) : m.reg;
          ms.push_back({m.loc, std::move(stepped)});
        }
      } else {
        for (const auto& m : cur.members) member_tick(cx, cur.l2, m, rn, ms);
      }
      KState nxt;
      nxt.l1 = cur.l1;
      nxt.l2 = cur.l2;
      nxt.members = believed_close(cx, cur.l2, std::move(ms));
      emit(std::move(nxt), "delay", false);
    }
  }

  lts.nstates = (int)states.size();
  return lts;
}

BisimResult product_vs_joint(const Network& net, size_t budget) {
  Network norm = normalize_sync_guards(net);
  Lts left = knowledge_product_lts(norm, budget);
  RegionGraph rg = build_region_graph(FlatSys(norm), budget, true);
  return lts_bisim(left, lts_of(rg), false, budget);
}

std::vector<GridState> discrete_simulate(const Network& net, long long denominator,
                                         const Rat& horizon, size_t budget) {
  if (denominator < (long long)net.clocks.size() + 1)
    throw std::invalid_argument("grid denominator must be at least the clock count plus one");
  FlatSys sys(net);

  auto sat_atom = [](const Valuation& v, const Atom& a) {
    Rat k(a.k);
    switch (a.rel) {
      case Rel::Lt: return v[a.clock] < k;
      case Rel::Le: return v[a.clock] <= k;
      case Rel::Eq: return v[a.clock] == k;
      case Rel::Ge: return v[a.clock] >= k;
      case Rel::Gt: return v[a.clock] > k;
    }
    return false;
  };
  auto sat_guard = [&](const Valuation& v, const Guard& g) {
    for (const auto& a : g.atoms)
      if (!sat_atom(v, a)) return false;
    for (const auto& d : g.diags) {
      Rat diff = v[d.x] - v[d.y];
      Rat k(d.k);
      bool ok = d.rel == Rel::Lt   ? diff < k
                : d.rel == Rel::Le ? diff <= k
                : d.rel == Rel::Eq ? diff == k
                : d.rel == Rel::Ge ? diff >= k
                                   : diff > k;
      if (!ok) return false;
    }
    return true;
  };
  auto sat_inv = [&](const Valuation& v, const std::vector<int>& locs) {
    for (size_t i = 0; i < sys.comps.size(); ++i)
      for (const auto& a : sys.comps[i].locations[locs[i]].inv)
        if (!sat_atom(v, a)) return false;
    return true;
  };

  struct Key {
    std::vector<int> locs;
    Valuation v;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    size_t operator()(const Key& k) const {
      size_t h = 14695981039346656037ull;
      for (int l : k.locs) h = (h ^ (size_t)(l + 1)) * 1099511628211ull;
      for (const auto& r : k.v) {
        h = (h ^ (size_t)r.numerator()) * 1099511628211ull;
        h = (h ^ (size_t)r.denominator()) * 1099511628211ull;
      }
      return h;
    }
  };

  std::unordered_map<Key, Rat, KeyHash> best;
  std::queue<std::pair<Key, Rat>> work;
  auto push = [&](Key k, const Rat& elapsed) {
    auto it = best.find(k);
    if (it != best.end() && it->second <= elapsed) return;
    if (it == best.end() && best.size() >= budget) throw StateBudgetExceeded(best.size());
    if (it == best.end())
      best.emplace(k, elapsed);
    else
      it->second = elapsed;
    work.push({std::move(k), elapsed});
  };

  std::vector<int> locs0;
  for (const auto& c : sys.comps) locs0.push_back(c.init);
  Valuation v0(sys.clocks.size(), Rat(0));
  if (!sat_inv(v0, locs0))
    throw std::runtime_error("initial state violates an invariant");
  push(Key{locs0, v0}, Rat(0));

  std::set<std::string> sync_labels;
  for (const auto& c : sys.comps)
    for (const auto& e : c.edges)
      if (e.kind == ActKind::Sync) sync_labels.insert(e.label);

  Rat step(1, denominator);
  while (!work.empty()) {
    auto [key, elapsed] = work.front();
    work.pop();
    auto it = best.find(key);
    if (it == best.end() || it->second < elapsed) continue;  // stale entry

    // Local and eps moves.
    for (size_t i = 0; i < sys.comps.size(); ++i) {
      const auto& comp = sys.comps[i];
      for (const auto& e : comp.edges) {
        if (e.kind == ActKind::Sync || e.src != key.locs[i]) continue;
        if (!sat_guard(key.v, e.guard)) continue;
        Valuation v = key.v;
        for (int c : e.resets) v[c] = Rat(0);
        for (auto [dst, src] : e.copies) v[dst] = v[src];
        std::vector<int> locs = key.locs;
        locs[i] = e.tgt;
        if (sat_inv(v, locs)) push(Key{std::move(locs), std::move(v)}, elapsed);
      }
    }
    // Synchronizations: all participants fire; resets of every fired edge
    // apply first, then copies in component order.
    for (const auto& lab : sync_labels) {
      std::vector<int> parts = sys.sync_participants(lab);
      if (parts.empty()) continue;
      std::vector<std::vector<const Edge*>> cand(parts.size());
      bool feasible = true;
      for (size_t pi = 0; pi < parts.size() && feasible; ++pi) {
        for (const auto& e : sys.comps[parts[pi]].edges)
          if (e.kind == ActKind::Sync && e.label == lab && e.src == key.locs[parts[pi]] &&
              sat_guard(key.v, e.guard))
            cand[pi].push_back(&e);
        feasible = !cand[pi].empty();
      }
      if (!feasible) continue;
      std::vector<size_t> pick(parts.size(), 0);
      while (true) {
        Valuation v = key.v;
        for (size_t pi = 0; pi < parts.size(); ++pi)
          for (int c : cand[pi][pick[pi]]->resets) v[c] = Rat(0);
        for (size_t pi = 0; pi < parts.size(); ++pi)
          for (auto [dst, src] : cand[pi][pick[pi]]->copies) v[dst] = v[src];
        std::vector<int> locs = key.locs;
        for (size_t pi = 0; pi < parts.size(); ++pi) locs[parts[pi]] = cand[pi][pick[pi]]->tgt;
        if (sat_inv(v, locs)) push(Key{std::move(locs), std::move(v)}, elapsed);
        size_t d = 0;
        while (d < pick.size() && ++pick[d] == cand[d].size()) pick[d++] = 0;
        if (d == pick.size()) break;
      }
    }
    // Grid delay.
    if (elapsed + step <= horizon) {
      Valuation v = key.v;
      for (auto& r : v) r += step;
      if (sat_inv(v, key.locs)) push(Key{key.locs, std::move(v)}, elapsed + step);
    }
  }

  std::vector<GridState> out;
  out.reserve(best.size());
  for (const auto& [k, e] : best) out.push_back({k.locs, k.v});
  std::sort(out.begin(), out.end(), [](const GridState& a, const GridState& b) {
    if (a.locs != b.locs) return a.locs < b.locs;
    return std::lexicographical_compare(a.v.begin(), a.v.end(), b.v.begin(), b.v.end());
  });
  return out;
}

}  // namespace ntasc
