#include "ntasc/synth.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "ntasc/explore.hpp"

namespace ntasc {
namespace {

bool guard_mentions(const Guard& g, const std::vector<bool>& set) {
  for (const auto& a : g.atoms)
    if (set[a.clock]) return true;
  for (const auto& d : g.diags)
    if (set[d.x] || set[d.y]) return true;
  return false;
}

// Estimator x rewritten observer as one component. The dead location and its
// incoming edges are dropped, announced-landing pairs become internal steps.
TimedAutomaton pair_product(const SModSystem& sm, const std::string& name) {
  const TimedAutomaton& A = sm.a12;
  const TimedAutomaton& B = sm.a2mod;
  std::set<std::string> finals(sm.final_region_labels.begin(), sm.final_region_labels.end());

  std::vector<std::vector<int>> asrc(A.locations.size()), bsrc(B.locations.size());
  for (size_t i = 0; i < A.edges.size(); ++i) asrc[A.edges[i].src].push_back((int)i);
  for (size_t i = 0; i < B.edges.size(); ++i) bsrc[B.edges[i].src].push_back((int)i);

  TimedAutomaton P;
  P.name = name;
  P.owned_clocks = A.owned_clocks;
  P.owned_clocks.insert(P.owned_clocks.end(), B.owned_clocks.begin(), B.owned_clocks.end());
  std::sort(P.owned_clocks.begin(), P.owned_clocks.end());
  P.owned_clocks.erase(std::unique(P.owned_clocks.begin(), P.owned_clocks.end()),
                       P.owned_clocks.end());

  std::map<std::pair<int, int>, int> id;
  std::vector<std::pair<int, int>> list;
  std::set<std::string> names;
  std::queue<int> work;
  auto intern = [&](int q, int p) {
    auto it = id.find({q, p});
    if (it != id.end()) return it->second;
    int s = (int)list.size();
    list.push_back({q, p});
    id.emplace(std::pair<int, int>{q, p}, s);
    Location loc;
    loc.name = A.locations[q].name + "__" + B.locations[p].name;
    while (!names.insert(loc.name).second) loc.name += "_";
    loc.inv = A.locations[q].inv;
    loc.inv.insert(loc.inv.end(), B.locations[p].inv.begin(), B.locations[p].inv.end());
    P.locations.push_back(std::move(loc));
    work.push(s);
    return s;
  };
  P.init = intern(A.init, B.init);
  while (!work.empty()) {
    int s = work.front();
    work.pop();
    auto [q, p] = list[s];
    for (int ai : asrc[q]) {
      const Edge& ea = A.edges[ai];
      if (ea.kind != ActKind::Sync) {
        Edge e = ea;
        e.src = s;
        e.tgt = intern(ea.tgt, p);
        P.edges.push_back(std::move(e));
        continue;
      }
      for (int bi : bsrc[p]) {
        const Edge& eb = B.edges[bi];
        if (eb.kind != ActKind::Sync || eb.label != ea.label) continue;
        if (eb.tgt == sm.sad_loc) continue;
        Edge e;
        e.src = s;
        e.tgt = intern(ea.tgt, eb.tgt);
        bool internal = finals.count(ea.label) > 0;
        e.kind = internal ? ActKind::Eps : ActKind::Sync;
        e.label = internal ? std::string() : ea.label;
        e.guard = ea.guard;
        e.guard.atoms.insert(e.guard.atoms.end(), eb.guard.atoms.begin(), eb.guard.atoms.end());
        e.guard.diags.insert(e.guard.diags.end(), eb.guard.diags.begin(), eb.guard.diags.end());
        e.resets = ea.resets;
        e.resets.insert(e.resets.end(), eb.resets.begin(), eb.resets.end());
        std::sort(e.resets.begin(), e.resets.end());
        e.resets.erase(std::unique(e.resets.begin(), e.resets.end()), e.resets.end());
        e.copies = ea.copies;
        e.copies.insert(e.copies.end(), eb.copies.begin(), eb.copies.end());
        P.edges.push_back(std::move(e));
      }
    }
    for (int bi : bsrc[p]) {
      const Edge& eb = B.edges[bi];
      if (eb.kind == ActKind::Sync) continue;
      if (eb.tgt == sm.sad_loc) continue;
      Edge e = eb;
      e.src = s;
      e.tgt = intern(q, eb.tgt);
      P.edges.push_back(std::move(e));
    }
  }
  return P;
}

// Folds every estimator-clock atom (watched clock or its shadow) whose truth
// is the same in all reachable regions of the edge's source location into the
// corresponding constant: true atoms disappear, false atoms delete the edge.
void simplify_guards(Network& net, const std::vector<bool>& eligible, size_t budget) {
  RegionGraph rg;
  try {
    rg = build_region_graph(FlatSys(net), budget, false);
  } catch (const StateBudgetExceeded&) {
    return;  // out of budget: keep the guards as constructed
  }
  std::vector<std::vector<const Region*>> byloc(net.a2.locations.size());
  for (const auto& st : rg.states) byloc[st.locs[1]].push_back(&st.reg);
  const auto& maxc = rg.sys.maxc;

  std::vector<Edge> kept;
  for (Edge& e : net.a2.edges) {
    const auto& regs = byloc[e.src];
    if (regs.empty()) {  // source never visited: nothing to compare against
      kept.push_back(std::move(e));
      continue;
    }
    bool drop_edge = false;
    Guard g;
    for (const auto& a : e.guard.atoms) {
      if (!eligible[a.clock]) {
        g.atoms.push_back(a);
        continue;
      }
      bool all_true = true, all_false = true;
      for (const Region* r : regs) {
        bool v = satisfies(*r, a);
        all_true = all_true && v;
        all_false = all_false && !v;
      }
      if (all_true) continue;
      if (all_false) {
        drop_edge = true;
        break;
      }
      g.atoms.push_back(a);
    }
    if (!drop_edge) {
      for (const auto& d : e.guard.diags) {
        if (!(eligible[d.x] && eligible[d.y])) {
          g.diags.push_back(d);
          continue;
        }
        bool all_true = true, all_false = true, undecided = false;
        for (const Region* r : regs) {
          try {
            bool v = satisfies(*r, d, maxc);
            all_true = all_true && v;
            all_false = all_false && !v;
          } catch (const ConstantAboveMax&) {
            undecided = true;
            break;
          }
        }
        if (undecided) {
          g.diags.push_back(d);
          continue;
        }
        if (all_true) continue;
        if (all_false) {
          drop_edge = true;
          break;
        }
        g.diags.push_back(d);
      }
    }
    if (drop_edge) continue;
    e.guard = std::move(g);
    kept.push_back(std::move(e));
  }
  net.a2.edges = std::move(kept);
}

void build_psi(SynthesizedNetwork& sn, size_t budget) {
  RegionGraph rg;
  try {
    rg = build_region_graph(FlatSys(sn.net), budget, true);
  } catch (const StateBudgetExceeded&) {
    sn.psi_lines.push_back("# psi omitted: state budget exceeded");
    return;
  }
  std::set<std::string> enriched;
  for (const auto& e : rg.edges)
    if (!e.delay && e.kind == ActKind::Sync && !e.label.empty()) enriched.insert(e.label);

  std::map<std::string, std::string> rid;
  std::vector<std::string> legend;
  auto region_id = [&](const std::string& part) {
    auto it = rid.find(part);
    if (it != rid.end()) return it->second;
    std::string r = "R" + std::to_string(rid.size());
    rid.emplace(part, r);
    legend.push_back("# " + r + " = " + part);
    return r;
  };
  for (const auto& lab : enriched) {
    auto at = lab.find('@');
    std::string base = at == std::string::npos ? lab : lab.substr(0, at);
    std::string part = at == std::string::npos ? std::string() : lab.substr(at + 1);
    auto it = sn.label_map.find(base);
    const std::string& orig = it != sn.label_map.end() ? it->second : base;
    std::string r = part.empty() ? std::string("-") : region_id(part);
    sn.psi_lines.push_back("(" + base + "," + r + ") -> (" + orig + "," + r + ")");
  }
  sn.psi_lines.insert(sn.psi_lines.end(), legend.begin(), legend.end());
}

bool network_has_diags(const Network& net) {
  for (int i = 0; i < 2; ++i)
    for (const auto& e : net.comp(i).edges)
      if (!e.guard.diags.empty()) return true;
  return false;
}

}  // namespace

SynthesizedNetwork synthesize(const Network& net, size_t budget) {
  Network n = normalize_sync_guards(net);
  {
    SModSystem chk = build_smod(n, true, budget);
    if (sad_reachable(chk, Engine::Region, budget).has_value()) throw NeedDetected();
  }
  SModSystem sm = build_smod(n, false, budget);

  SynthesizedNetwork sn;
  sn.net.clocks = sm.clocks;
  sn.net.synthesized = true;
  sn.net.a1 = sm.a1_prime;
  sn.net.a2 = pair_product(sm, n.a2.name + "_nsc");

  std::vector<bool> eligible(sm.clocks.size(), false);
  for (auto [shadow, real] : sm.clock_bij) {
    eligible[shadow] = true;
    eligible[real] = true;
  }
  simplify_guards(sn.net, eligible, budget);

  for (const auto& [key, pl] : announce_map(n)) sn.label_map[pl] = key.first;
  build_psi(sn, budget);
  return sn;
}

std::string psi_apply(const SynthesizedNetwork& sn, const std::string& enriched) {
  auto at = enriched.find('@');
  std::string base = at == std::string::npos ? enriched : enriched.substr(0, at);
  auto it = sn.label_map.find(base);
  if (it == sn.label_map.end()) return enriched;
  return at == std::string::npos ? it->second : it->second + enriched.substr(at);
}

bool verify_no_shared_reads(const SynthesizedNetwork& sn) {
  const Network& n = sn.net;
  std::vector<bool> own1(n.clocks.size(), false);
  for (int c : n.a1.owned_clocks) own1[c] = true;
  for (const auto& e : n.a2.edges)
    if (guard_mentions(e.guard, own1)) return false;
  for (const auto& l : n.a2.locations)
    for (const auto& a : l.inv)
      if (own1[a.clock]) return false;
  for (const auto& e : n.a1.edges) {
    for (const auto& a : e.guard.atoms)
      if (!own1[a.clock]) return false;
    for (const auto& d : e.guard.diags)
      if (!own1[d.x] || !own1[d.y]) return false;
  }
  for (const auto& l : n.a1.locations)
    for (const auto& a : l.inv)
      if (!own1[a.clock]) return false;
  return true;
}

Verdict decide_need(const Network& net, Engine engine, size_t budget) {
  Network n = normalize_sync_guards(net);
  std::optional<Trace> tr;
  std::optional<RestrictionWitness> wit;
  bool restricted = false;
  if (engine == Engine::Contextual) {
    wit = find_restriction(n, budget);
    restricted = wit.has_value();
  } else {
    SModSystem chk = build_smod(n, true, budget);
    if (engine == Engine::All) {
      tr = sad_reachable(chk, Engine::Region, budget);
      if (!network_has_diags(n)) {
        auto zt = sad_reachable(chk, Engine::Zone, budget);
        if (tr.has_value() != zt.has_value())
          throw std::logic_error("engine disagreement on clock need");
      }
      wit = find_restriction(n, budget);
      if (tr.has_value() != wit.has_value())
        throw std::logic_error("engine disagreement on clock need");
    } else {
      tr = sad_reachable(chk, engine, budget);
    }
    restricted = tr.has_value();
  }

  Verdict v;
  if (!restricted) {
    v.kind = Verdict::NotNeeded;
    v.synth = synthesize(net, budget);
    return v;
  }
  if (is_deterministic(n.a2)) {
    v.kind = Verdict::Needed;
    v.trace = std::move(tr);
    v.witness = std::move(wit);
  } else {
    v.kind = Verdict::Inconclusive;
    if (!wit) wit = find_restriction(n, budget);
    v.witness = std::move(wit);
    v.trace = std::move(tr);
  }
  return v;
}

}  // namespace ntasc
