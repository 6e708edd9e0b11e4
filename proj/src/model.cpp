#include "ntasc/model.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ntasc {

std::string rat_str(const Rat& r) {
  std::ostringstream os;
  if (r.denominator() == 1) {
    os << r.numerator();
  } else {
    os << r.numerator() << '/' << r.denominator();
  }
  return os.str();
}

const char* rel_str(Rel r) {
  switch (r) {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Eq: return "==";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
  }
  return "?";
}

bool rel_holds(const Rat& lhs, Rel r, long long k) {
  Rat rk(k);
  switch (r) {
    case Rel::Lt: return lhs < rk;
    case Rel::Le: return lhs <= rk;
    case Rel::Eq: return lhs == rk;
    case Rel::Ge: return lhs >= rk;
    case Rel::Gt: return lhs > rk;
  }
  return false;
}

int TimedAutomaton::loc_index(const std::string& n) const {
  for (size_t i = 0; i < locations.size(); ++i)
    if (locations[i].name == n) return (int)i;
  return -1;
}

std::set<std::string> TimedAutomaton::labels(ActKind kind) const {
  std::set<std::string> out;
  for (const auto& e : edges)
    if (e.kind == kind) out.insert(e.label);
  return out;
}

std::set<std::string> TimedAutomaton::all_labels() const {
  std::set<std::string> out;
  for (const auto& e : edges)
    if (e.kind != ActKind::Eps) out.insert(e.label);
  return out;
}

int Network::clock_index(const std::string& n) const {
  for (size_t i = 0; i < clocks.size(); ++i)
    if (clocks[i].name == n) return (int)i;
  return -1;
}

bool atom_sat(const Atom& a, const Valuation& v) { return rel_holds(v[a.clock], a.rel, a.k); }

bool diag_sat(const DiagAtom& d, const Valuation& v) {
  return rel_holds(v[d.x] - v[d.y], d.rel, d.k);
}

bool guard_sat(const Guard& g, const Valuation& v) {
  for (const auto& a : g.atoms)
    if (!atom_sat(a, v)) return false;
  for (const auto& d : g.diags)
    if (!diag_sat(d, v)) return false;
  return true;
}

bool inv_sat(const Invariant& inv, const Valuation& v) {
  for (const auto& a : inv)
    if (!atom_sat(a, v)) return false;
  return true;
}

bool inv_sat_delay(const Invariant& inv, const Valuation& v, const Rat& d) {
  // Upper-bound invariants are convex downward in time, so checking the end
  // point of the delay suffices.
  for (const auto& a : inv)
    if (!rel_holds(v[a.clock] + d, a.rel, a.k)) return false;
  return true;
}

Valuation delay(const Valuation& v, const Rat& d) {
  Valuation out = v;
  for (auto& x : out) x += d;
  return out;
}

Valuation apply_edge_updates(const Valuation& v, const Edge& e) {
  Valuation out = v;
  for (int c : e.resets) out[c] = Rat(0);
  Valuation base = out;
  for (auto [dst, src] : e.copies) out[dst] = base[src];
  return out;
}

Valuation apply_sync_updates(const Valuation& v, const Edge& e1, const Edge& e2) {
  Valuation out = v;
  for (int c : e1.resets) out[c] = Rat(0);
  for (int c : e2.resets) out[c] = Rat(0);
  Valuation base = out;
  for (auto [dst, src] : e1.copies) out[dst] = base[src];
  for (auto [dst, src] : e2.copies) out[dst] = base[src];
  return out;
}

bool has_errors(const Report& r) {
  return std::any_of(r.begin(), r.end(), [](const Issue& i) { return i.sev == Issue::Error; });
}

std::string report_str(const Report& r) {
  std::ostringstream os;
  for (const auto& i : r)
    os << (i.sev == Issue::Error ? "error: " : "warning: ") << i.msg << '\n';
  return os.str();
}

std::set<int> reset_clocks(const TimedAutomaton& a) {
  std::set<int> out;
  for (const auto& e : a.edges) out.insert(e.resets.begin(), e.resets.end());
  return out;
}

namespace {

std::set<int> read_clocks(const TimedAutomaton& a) {
  std::set<int> out;
  auto add_guard = [&out](const Guard& g) {
    for (const auto& at : g.atoms) out.insert(at.clock);
    for (const auto& d : g.diags) {
      out.insert(d.x);
      out.insert(d.y);
    }
  };
  for (const auto& e : a.edges) add_guard(e.guard);
  for (const auto& l : a.locations)
    for (const auto& at : l.inv) out.insert(at.clock);
  return out;
}

void check_component(const Network& net, int ci, Report& rep) {
  const TimedAutomaton& a = net.comp(ci);
  const std::string who = a.name;
  if (a.locations.empty()) {
    rep.push_back({Issue::Error, who + ": automaton has no locations"});
    return;
  }
  if (a.init < 0 || a.init >= (int)a.locations.size())
    rep.push_back({Issue::Error, who + ": initial location out of range"});
  std::set<int> owned(a.owned_clocks.begin(), a.owned_clocks.end());
  for (const auto& l : a.locations) {
    for (const auto& at : l.inv)
      if (at.rel != Rel::Le && at.rel != Rel::Lt)
        rep.push_back({Issue::Error, who + ": invariant of " + l.name +
                                         " must use only upper bounds"});
  }
  for (const auto& e : a.edges) {
    std::string where = who + ": edge " + a.locations[e.src].name + " -> " +
                        a.locations[e.tgt].name;
    if ((e.kind == ActKind::Eps) != e.label.empty())
      rep.push_back({Issue::Error, where + ": label/kind mismatch"});
    for (int c : e.resets)
      if (!owned.count(c))
        rep.push_back({Issue::Error, where + ": resets clock " + net.clocks[c].name +
                                         " it does not own"});
    if (!e.copies.empty() && !net.synthesized)
      rep.push_back({Issue::Error, where + ": copy clause outside synthesized output"});
    if (!e.copies.empty() && e.kind != ActKind::Sync)
      rep.push_back({Issue::Error, where + ": copy clause on a non-synchronizing edge"});
    std::set<int> dsts;
    for (auto [dst, src] : e.copies) {
      (void)src;
      if (!owned.count(dst))
        rep.push_back({Issue::Error, where + ": copies into clock " + net.clocks[dst].name +
                                         " it does not own"});
      if (!dsts.insert(dst).second)
        rep.push_back({Issue::Error, where + ": clock " + net.clocks[dst].name +
                                         " assigned twice in one copy clause"});
    }
    if (!e.guard.diags.empty() && !net.synthesized)
      rep.push_back({Issue::Error, where + ": difference constraint outside synthesized output"});
  }
  std::set<std::string> local = a.labels(ActKind::Local);
  std::set<std::string> sync = a.labels(ActKind::Sync);
  for (const auto& s : sync)
    if (local.count(s))
      rep.push_back({Issue::Error, who + ": label " + s + " used both as do and as sync"});
}

}  // namespace

Report validate_network(const Network& net) {
  Report rep;
  for (size_t i = 0; i < net.clocks.size(); ++i)
    for (size_t j = i + 1; j < net.clocks.size(); ++j)
      if (net.clocks[i].name == net.clocks[j].name)
        rep.push_back({Issue::Error, "duplicate clock name " + net.clocks[i].name});
  {
    std::set<int> o1(net.a1.owned_clocks.begin(), net.a1.owned_clocks.end());
    for (int c : net.a2.owned_clocks)
      if (o1.count(c))
        rep.push_back({Issue::Error, "clock " + net.clocks[c].name + " owned by both components"});
  }
  check_component(net, 0, rep);
  check_component(net, 1, rep);

  // Label discipline across the two components.
  auto l1 = net.a1.labels(ActKind::Local), l2 = net.a2.labels(ActKind::Local);
  auto s1 = net.a1.labels(ActKind::Sync), s2 = net.a2.labels(ActKind::Sync);
  for (const auto& s : l1)
    if (net.a2.all_labels().count(s))
      rep.push_back({Issue::Error, "label " + s + " is local to " + net.a1.name +
                                       " but also appears in " + net.a2.name});
  for (const auto& s : l2)
    if (net.a1.all_labels().count(s))
      rep.push_back({Issue::Error, "label " + s + " is local to " + net.a2.name +
                                       " but also appears in " + net.a1.name});
  for (const auto& s : s1)
    if (!s2.count(s))
      rep.push_back({Issue::Error, "sync label " + s + " has no counterpart in " + net.a2.name});
  for (const auto& s : s2)
    if (!s1.count(s))
      rep.push_back({Issue::Error, "sync label " + s + " has no counterpart in " + net.a1.name});

  // Sharing must flow one way: A2 may read clocks A1 resets, never the
  // reverse, and a clock only one side declares may not be written by the
  // other side anyway (ownership already covers writes).
  std::set<int> r2 = reset_clocks(net.a2);
  for (int c : read_clocks(net.a1))
    if (r2.count(c))
      rep.push_back({Issue::Error, net.a1.name + " reads clock " + net.clocks[c].name +
                                       " which " + net.a2.name + " resets"});
  return rep;
}

std::set<std::string> sync_alphabet(const Network& net) {
  auto s1 = net.a1.labels(ActKind::Sync);
  auto s2 = net.a2.labels(ActKind::Sync);
  std::set<std::string> out;
  for (const auto& s : s1)
    if (s2.count(s)) out.insert(s);
  return out;
}

std::vector<long long> max_constants(const Network& net) {
  std::vector<long long> maxc(net.clocks.size(), 0);
  auto add_guard = [&maxc](const Guard& g) {
    for (const auto& a : g.atoms) maxc[a.clock] = std::max(maxc[a.clock], a.k);
    for (const auto& d : g.diags) {
      long long k = d.k < 0 ? -d.k : d.k;
      maxc[d.x] = std::max(maxc[d.x], k);
      maxc[d.y] = std::max(maxc[d.y], k);
    }
  };
  for (int ci = 0; ci < 2; ++ci) {
    const TimedAutomaton& a = net.comp(ci);
    for (const auto& e : a.edges) add_guard(e.guard);
    for (const auto& l : a.locations)
      for (const auto& at : l.inv) maxc[at.clock] = std::max(maxc[at.clock], at.k);
  }
  return maxc;
}

Network normalize_sync_guards(const Network& net, Report* rep) {
  Network out = net;
  std::set<int> x1(net.a1.owned_clocks.begin(), net.a1.owned_clocks.end());
  for (auto& e2 : out.a2.edges) {
    if (e2.kind != ActKind::Sync) continue;
    std::vector<Atom> keep, move;
    for (const auto& at : e2.guard.atoms)
      (x1.count(at.clock) ? move : keep).push_back(at);
    if (move.empty()) continue;
    e2.guard.atoms = keep;
    int touched = 0;
    for (auto& e1 : out.a1.edges) {
      if (e1.kind != ActKind::Sync || e1.label != e2.label) continue;
      for (const auto& at : move)
        if (std::find(e1.guard.atoms.begin(), e1.guard.atoms.end(), at) == e1.guard.atoms.end())
          e1.guard.atoms.push_back(at);
      ++touched;
    }
    if (rep) {
      std::ostringstream os;
      os << "moved " << move.size() << " atom(s) from " << out.a2.name << " edge "
         << out.a2.locations[e2.src].name << " -> " << out.a2.locations[e2.tgt].name << " ("
         << e2.label << ") onto " << touched << " " << out.a1.name << " edge(s)";
      rep->push_back({Issue::Warning, os.str()});
    }
  }
  return out;
}

namespace {

// Enumerates elementary cycles with a path-based DFS; good enough for the
// small control graphs this tool deals with.
void cycles_from(const TimedAutomaton& a, int start, std::vector<int>& path_edges,
                 std::vector<bool>& on_path, int cur,
                 const std::function<void(const std::vector<int>&)>& emit, int& budget) {
  if (budget <= 0) return;
  for (size_t ei = 0; ei < a.edges.size(); ++ei) {
    const Edge& e = a.edges[ei];
    if (e.src != cur || e.tgt < start) continue;
    if (e.tgt == start) {
      path_edges.push_back((int)ei);
      emit(path_edges);
      path_edges.pop_back();
      if (--budget <= 0) return;
    } else if (!on_path[e.tgt]) {
      on_path[e.tgt] = true;
      path_edges.push_back((int)ei);
      cycles_from(a, start, path_edges, on_path, e.tgt, emit, budget);
      path_edges.pop_back();
      on_path[e.tgt] = false;
    }
  }
}

}  // namespace

Report check_nonzeno(const Network& net) {
  Report rep;
  for (int ci = 0; ci < 2; ++ci) {
    const TimedAutomaton& a = net.comp(ci);
    int budget = 20000;
    auto inspect = [&](const std::vector<int>& cyc) {
      std::set<int> reset;
      std::set<int> bounded;
      for (int ei : cyc) {
        const Edge& e = a.edges[ei];
        reset.insert(e.resets.begin(), e.resets.end());
        for (const auto& at : e.guard.atoms)
          if (at.k >= 1 && (at.rel == Rel::Ge || at.rel == Rel::Gt || at.rel == Rel::Eq))
            bounded.insert(at.clock);
      }
      bool ok = false;
      for (int c : reset)
        if (bounded.count(c)) ok = true;
      if (!ok) {
        std::ostringstream os;
        os << a.name << ": cycle";
        for (int ei : cyc) os << ' ' << a.locations[a.edges[ei].src].name;
        os << ' ' << a.locations[a.edges[cyc.front()].src].name
           << " has no clock that is both reset and bounded from below; zeno runs possible";
        rep.push_back({Issue::Warning, os.str()});
      }
    };
    for (int s = 0; s < (int)a.locations.size(); ++s) {
      std::vector<int> path;
      std::vector<bool> on_path(a.locations.size(), false);
      on_path[s] = true;
      cycles_from(a, s, path, on_path, s, inspect, budget);
    }
  }
  return rep;
}

bool is_deterministic(const TimedAutomaton& a) {
  std::set<std::pair<int, std::string>> seen;
  for (const auto& e : a.edges)
    if (!seen.insert({e.src, e.label}).second) return false;
  return true;
}

}  // namespace ntasc
