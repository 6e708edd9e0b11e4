#pragma once
// Clock regions: integer parts clipped at per-clock maxima, plus the ordering
// of fractional parts. The usual equivalence: two valuations are in the same
// region iff they satisfy the same atoms and stay equivalent under delays.

#include <optional>
#include <string>
#include <vector>

#include "ntasc/model.hpp"

namespace ntasc {

struct StateBudgetExceeded : std::runtime_error {
  size_t count;
  explicit StateBudgetExceeded(size_t n)
      : std::runtime_error("state budget exceeded at " + std::to_string(n) + " states"),
        count(n) {}
};

// Raised when a constraint cannot be decided because every clock involved
// sits above its tracked maximum.
struct ConstantAboveMax : std::runtime_error {
  ConstantAboveMax() : std::runtime_error("difference constraint undecidable above clock maxima") {}
};

struct Region {
  // Per clock: integer part (meaningful when tracked) and fractional class.
  // block[c] == -1 means the clock is above its maximum and untracked;
  // otherwise block[c] indexes the ascending fractional classes. Class 0
  // holds fraction zero iff zero_block.
  std::vector<int> ip;
  std::vector<int> block;
  bool zero_block = false;
  int nblocks = 0;

  bool operator==(const Region&) const = default;
  size_t nclocks() const { return ip.size(); }
  bool above(int c) const { return block[c] < 0; }
  bool frac_zero(int c) const { return block[c] == 0 && zero_block; }
};

size_t region_hash(const Region& r);

struct RegionHash {
  size_t operator()(const Region& r) const { return region_hash(r); }
};

Region region_of(const Valuation& v, const std::vector<long long>& maxc);

// One representative valuation: integer points stay exact, positive
// fractions are spread as i/(B+1) by ascending class.
Valuation representative(const Region& r, const std::vector<long long>& maxc);

// Immediate time successor. nullopt when the region is invariant under
// delay (every clock above its maximum).
std::optional<Region> time_successor(const Region& r, const std::vector<long long>& maxc);

Region apply_reset(const Region& r, const std::vector<int>& clocks);
// dst takes src's class exactly; requires maxc[dst] == maxc[src].
Region apply_copy(const Region& r, int dst, int src, const std::vector<long long>& maxc);
Region apply_updates(const Region& r, const Edge& e, const std::vector<long long>& maxc);

bool satisfies(const Region& r, const Atom& a);
// Difference atoms are decided exactly while at least one side is tracked
// and the decision is forced; otherwise ConstantAboveMax.
bool satisfies(const Region& r, const DiagAtom& d, const std::vector<long long>& maxc);
bool satisfies(const Region& r, const Guard& g, const std::vector<long long>& maxc);
bool satisfies(const Region& r, const Invariant& inv);

// Restriction to a clock subset; order of `keep` defines the new indices.
Region project(const Region& r, const std::vector<int>& keep);

// All regions over the given maxima (small clock counts only).
std::vector<Region> enumerate_regions(const std::vector<long long>& maxc);

std::string region_str(const Region& r, const std::vector<Clock>& clocks,
                       const std::vector<long long>& maxc);

}  // namespace ntasc
