#pragma once
// Seeded random two-component networks for differential testing: at most
// three locations and two clocks per side, constants at most 3, observer
// guards and invariants free to read the watched component's clocks.

#include <random>
#include <string>
#include <vector>

#include "ntasc/model.hpp"

namespace ntasc {

inline Network random_network(std::mt19937& rng) {
  auto pick = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  auto rel_of = [](int r) {
    switch (r) {
      case 0: return Rel::Lt;
      case 1: return Rel::Le;
      case 2: return Rel::Eq;
      case 3: return Rel::Ge;
      default: return Rel::Gt;
    }
  };

  Network net;
  int n1 = pick(1, 2);  // watched-owned clocks
  int n2 = pick(0, 2);  // observer-owned clocks
  for (int i = 0; i < n1; ++i) net.clocks.push_back({"x" + std::to_string(i + 1)});
  for (int i = 0; i < n2; ++i) net.clocks.push_back({"y" + std::to_string(i + 1)});
  net.a1.name = "A1";
  net.a2.name = "A2";
  for (int i = 0; i < n1; ++i) net.a1.owned_clocks.push_back(i);
  for (int i = 0; i < n2; ++i) net.a2.owned_clocks.push_back(n1 + i);

  int nl1 = pick(1, 3), nl2 = pick(1, 3);
  for (int i = 0; i < nl1; ++i) net.a1.locations.push_back({"p" + std::to_string(i), {}});
  for (int i = 0; i < nl2; ++i) net.a2.locations.push_back({"q" + std::to_string(i), {}});

  // Sparse upper-bound invariants with constants 1..3 keep time zero legal.
  for (auto& loc : net.a1.locations)
    if (pick(0, 3) == 0)
      loc.inv.push_back({pick(0, n1 - 1), pick(0, 1) ? Rel::Le : Rel::Lt, (long long)pick(1, 3)});
  for (auto& loc : net.a2.locations)
    if (pick(0, 3) == 0)
      loc.inv.push_back({pick(0, (int)net.clocks.size() - 1), pick(0, 1) ? Rel::Le : Rel::Lt,
                         (long long)pick(1, 3)});

  auto guard_over = [&](int lo, int hi, int maxatoms) {
    Guard g;
    int na = pick(0, maxatoms);
    for (int i = 0; i < na; ++i)
      g.atoms.push_back({pick(lo, hi), rel_of(pick(0, 4)), (long long)pick(0, 3)});
    return g;
  };
  auto resets_over = [&](const std::vector<int>& owned) {
    std::vector<int> rs;
    for (int c : owned)
      if (pick(0, 2) == 0) rs.push_back(c);
    return rs;
  };

  // Watched component: eps and local moves over its own clocks.
  int ne1 = pick(1, 4);
  for (int i = 0; i < ne1; ++i) {
    Edge e;
    e.src = pick(0, nl1 - 1);
    e.tgt = pick(0, nl1 - 1);
    e.guard = guard_over(0, n1 - 1, 2);
    if (pick(0, 2) == 0) {
      e.kind = ActKind::Eps;
    } else {
      e.kind = ActKind::Local;
      e.label = pick(0, 1) ? "u" : "v";
    }
    e.resets = resets_over(net.a1.owned_clocks);
    net.a1.edges.push_back(std::move(e));
  }
  // Observer: guards may read every clock in the network.
  int ne2 = pick(1, 4);
  for (int i = 0; i < ne2; ++i) {
    Edge e;
    e.src = pick(0, nl2 - 1);
    e.tgt = pick(0, nl2 - 1);
    e.guard = guard_over(0, (int)net.clocks.size() - 1, 2);
    if (pick(0, 2) == 0) {
      e.kind = ActKind::Eps;
    } else {
      e.kind = ActKind::Local;
      e.label = pick(0, 1) ? "c" : "d";
    }
    e.resets = resets_over(net.a2.owned_clocks);
    net.a2.edges.push_back(std::move(e));
  }
  // Optional synchronization; the label needs an edge on each side to pass
  // validation.
  if (pick(0, 1) == 1) {
    int ns = pick(1, 2);
    for (int i = 0; i < ns; ++i) {
      Edge e1;
      e1.src = pick(0, nl1 - 1);
      e1.tgt = pick(0, nl1 - 1);
      e1.guard = guard_over(0, n1 - 1, 1);
      e1.kind = ActKind::Sync;
      e1.label = "s";
      e1.resets = resets_over(net.a1.owned_clocks);
      net.a1.edges.push_back(std::move(e1));
      Edge e2;
      e2.src = pick(0, nl2 - 1);
      e2.tgt = pick(0, nl2 - 1);
      if (n2 > 0) e2.guard = guard_over(n1, n1 + n2 - 1, 1);
      e2.kind = ActKind::Sync;
      e2.label = "s";
      e2.resets = resets_over(net.a2.owned_clocks);
      net.a2.edges.push_back(std::move(e2));
    }
  }
  return net;
}

}  // namespace ntasc
