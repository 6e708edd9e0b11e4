#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "ntasc/regions.hpp"

using namespace ntasc;

namespace {

// Every combination of values k/denom per clock, from 0 to maxc+1 inclusive,
// so each sample set covers all regions including the above-maximum ones.
std::vector<Valuation> grid_vals(const std::vector<long long>& maxc, long long denom) {
  std::vector<Valuation> out{{}};
  for (long long m : maxc) {
    std::vector<Valuation> next;
    for (const auto& partial : out)
      for (long long num = 0; num <= (m + 1) * denom; ++num) {
        Valuation v = partial;
        v.push_back(Rat(num, denom));
        next.push_back(std::move(v));
      }
    out = std::move(next);
  }
  return out;
}

struct RegionLess {
  bool operator()(const Region& a, const Region& b) const {
    if (a.ip != b.ip) return a.ip < b.ip;
    if (a.block != b.block) return a.block < b.block;
    if (a.zero_block != b.zero_block) return a.zero_block < b.zero_block;
    return a.nblocks < b.nblocks;
  }
};

}  // namespace

TEST_CASE("regions decide atoms exactly") {
  std::vector<long long> maxc = {2, 3};
  for (const Valuation& v : grid_vals(maxc, 4)) {
    Region r = region_of(v, maxc);
    for (int c = 0; c < 2; ++c)
      for (long long k = 0; k <= maxc[c]; ++k)
        for (Rel rel : {Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt}) {
          Atom a{c, rel, k};
          CHECK(satisfies(r, a) == atom_sat(a, v));
        }
  }
}

TEST_CASE("representatives map back to their region") {
  for (auto maxc : std::vector<std::vector<long long>>{{2}, {1, 2}, {1, 1, 1}}) {
    for (const Region& r : enumerate_regions(maxc)) {
      Valuation v = representative(r, maxc);
      CHECK(region_of(v, maxc) == r);
    }
  }
}

TEST_CASE("region equivalence classes match the sampled quotient") {
  // Denominator >= clocks+1 realizes every fractional ordering, so the grid
  // hits every region at least once and never merges two.
  for (auto maxc : std::vector<std::vector<long long>>{{1, 2}, {1, 1, 1}}) {
    std::set<Region, RegionLess> seen;
    for (const Valuation& v : grid_vals(maxc, (long long)maxc.size() + 1))
      seen.insert(region_of(v, maxc));
    std::vector<Region> all = enumerate_regions(maxc);
    std::set<Region, RegionLess> expect(all.begin(), all.end());
    CHECK(all.size() == expect.size());  // enumeration has no duplicates
    CHECK(seen == expect);
  }
}

TEST_CASE("one clock with maximum m has exactly 2m+2 regions") {
  for (long long m = 0; m <= 4; ++m)
    CHECK(enumerate_regions({m}).size() == (size_t)(2 * m + 2));
}

TEST_CASE("time successor is the next region on the line") {
  for (auto maxc : std::vector<std::vector<long long>>{{2}, {2, 3}, {1, 1, 1}}) {
    for (const Region& r : enumerate_regions(maxc)) {
      bool all_above = true;
      for (size_t c = 0; c < maxc.size(); ++c) all_above = all_above && r.above((int)c);
      auto succ = time_successor(r, maxc);
      if (all_above) {
        CHECK_FALSE(succ.has_value());
        continue;
      }
      REQUIRE(succ.has_value());
      // The representative's fractional parts sit on a 1/12 grid, and so do
      // the distances to the next boundary, so stepping in 1/12 increments
      // finds the immediate successor exactly.
      Valuation rep = representative(r, maxc);
      bool found = false;
      for (long long k = 1; k <= 12 && !found; ++k) {
        Region stepped = region_of(delay(rep, Rat(k, 12)), maxc);
        if (stepped == r) continue;
        CHECK(stepped == *succ);
        found = true;
      }
      CHECK(found);
    }
  }
}

TEST_CASE("successor chains terminate above all maxima") {
  std::vector<long long> maxc = {2, 3};
  Region r = region_of({Rat(0), Rat(0)}, maxc);
  int steps = 0;
  while (auto s = time_successor(r, maxc)) {
    r = *s;
    REQUIRE(++steps < 100);
  }
  for (int c = 0; c < 2; ++c) CHECK(r.above(c));
}

TEST_CASE("resets and copies against the concrete semantics") {
  std::vector<long long> maxc = {2, 2};
  for (const Valuation& v : grid_vals(maxc, 3)) {
    Region r = region_of(v, maxc);
    Valuation vr = v;
    vr[0] = Rat(0);
    CHECK(apply_reset(r, {0}) == region_of(vr, maxc));
    Valuation vc = v;
    vc[1] = vc[0];
    CHECK(apply_copy(r, 1, 0, maxc) == region_of(vc, maxc));
    Edge e;
    e.resets = {0};
    e.copies = {{1, 0}};
    CHECK(apply_updates(r, e, maxc) == region_of(apply_edge_updates(v, e), maxc));
  }
}

TEST_CASE("projection commutes with region abstraction") {
  std::vector<long long> maxc = {1, 2, 1};
  std::vector<long long> sub = {2, 1};  // keep clocks 1 and 2, in that order
  for (const Valuation& v : grid_vals(maxc, 4)) {
    Region r = region_of(v, maxc);
    Valuation w = {v[1], v[2]};
    CHECK(project(r, {1, 2}) == region_of(w, sub));
  }
}

TEST_CASE("difference atoms are decided exactly while tracked") {
  std::vector<long long> maxc = {2, 2};
  for (const Valuation& v : grid_vals(maxc, 3)) {
    if (v[0] > Rat(2) || v[1] > Rat(2)) continue;  // both tracked
    Region r = region_of(v, maxc);
    for (long long k = -2; k <= 2; ++k)
      for (Rel rel : {Rel::Lt, Rel::Le, Rel::Eq, Rel::Ge, Rel::Gt}) {
        DiagAtom d{0, 1, rel, k};
        CHECK(satisfies(r, d, maxc) == diag_sat(d, v));
      }
  }
}

TEST_CASE("difference atoms above the maxima: forced or refused") {
  std::vector<long long> maxc = {3, 1};
  Region r = region_of({Rat(7, 2), Rat(1, 2)}, maxc);  // x above, y in (0,1)
  // x - y is strictly above 3 - 0 - 1 = 2 and unbounded.
  CHECK(satisfies(r, DiagAtom{0, 1, Rel::Gt, 2}, maxc));
  CHECK_FALSE(satisfies(r, DiagAtom{0, 1, Rel::Le, 1}, maxc));
  CHECK_THROWS_AS((void)satisfies(r, DiagAtom{0, 1, Rel::Gt, 5}, maxc), ConstantAboveMax);
  Region both = region_of({Rat(5), Rat(4)}, {1, 1});
  CHECK_THROWS_AS((void)satisfies(both, DiagAtom{0, 1, Rel::Le, 0}, {1, 1}), ConstantAboveMax);
}

TEST_CASE("guards check plain atoms before difference atoms") {
  // An unsatisfied atom decides the guard even when the difference part would
  // be undecidable in this region.
  std::vector<long long> maxc = {1, 1};
  Region r = region_of({Rat(3), Rat(3)}, maxc);
  Guard g;
  g.atoms.push_back({0, Rel::Le, 1});
  g.diags.push_back({0, 1, Rel::Le, 0});
  CHECK_FALSE(satisfies(r, g, maxc));
}

TEST_CASE("region strings are canonical signatures") {
  std::vector<long long> maxc = {1, 1};
  std::vector<Clock> clocks = {{"x"}, {"y"}};
  std::set<std::string> seen;
  for (const Region& r : enumerate_regions(maxc)) {
    std::string s = region_str(r, clocks, maxc);
    CHECK_FALSE(s.empty());
    CHECK(seen.insert(s).second);  // distinct regions render distinctly
  }
}
