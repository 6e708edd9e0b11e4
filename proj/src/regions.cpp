#include "ntasc/regions.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace ntasc {

size_t region_hash(const Region& r) {
  size_t h = 1469598103934665603ull;
  auto mix = [&h](size_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  for (size_t c = 0; c < r.ip.size(); ++c) {
    mix((size_t)(r.block[c] + 1));
    mix(r.block[c] < 0 ? 0u : (size_t)r.ip[c]);
  }
  mix(r.zero_block ? 1u : 2u);
  return h;
}

namespace {

// Classes as explicit clock lists, ascending fraction order.
std::vector<std::vector<int>> to_classes(const Region& r) {
  std::vector<std::vector<int>> cls(r.nblocks);
  for (size_t c = 0; c < r.block.size(); ++c)
    if (r.block[c] >= 0) cls[r.block[c]].push_back((int)c);
  return cls;
}

Region from_classes(const Region& base, std::vector<std::vector<int>> cls, bool zero_block) {
  Region out = base;
  // Drop empty classes, keeping order.
  std::vector<std::vector<int>> kept;
  for (size_t i = 0; i < cls.size(); ++i) {
    if (cls[i].empty()) {
      if (i == 0) zero_block = false;
    } else {
      kept.push_back(std::move(cls[i]));
    }
  }
  out.nblocks = (int)kept.size();
  out.zero_block = zero_block && !kept.empty();
  std::fill(out.block.begin(), out.block.end(), -1);
  for (size_t b = 0; b < kept.size(); ++b)
    for (int c : kept[b]) out.block[c] = (int)b;
  for (size_t c = 0; c < out.block.size(); ++c)
    if (out.block[c] < 0) out.ip[c] = 0;
  return out;
}

}  // namespace

Region region_of(const Valuation& v, const std::vector<long long>& maxc) {
  size_t n = v.size();
  Region r;
  r.ip.assign(n, 0);
  r.block.assign(n, -1);
  std::map<Rat, std::vector<int>> by_frac;
  for (size_t c = 0; c < n; ++c) {
    if (v[c] > Rat(maxc[c])) continue;
    long long ip = v[c].numerator() / v[c].denominator();
    r.ip[c] = (int)ip;
    by_frac[v[c] - Rat(ip)].push_back((int)c);
  }
  int b = 0;
  for (const auto& [frac, clocks] : by_frac) {
    if (b == 0) r.zero_block = (frac == Rat(0));
    for (int c : clocks) r.block[c] = b;
    ++b;
  }
  r.nblocks = b;
  return r;
}

Valuation representative(const Region& r, const std::vector<long long>& maxc) {
  int pos_classes = r.nblocks - (r.zero_block ? 1 : 0);
  Valuation v(r.nclocks());
  for (size_t c = 0; c < r.nclocks(); ++c) {
    if (r.above((int)c)) {
      v[c] = Rat(maxc[c] + 1);
    } else if (r.frac_zero((int)c)) {
      v[c] = Rat(r.ip[c]);
    } else {
      int pos_idx = r.block[c] - (r.zero_block ? 1 : 0) + 1;  // 1-based
      v[c] = Rat(r.ip[c]) + Rat(pos_idx, pos_classes + 1);
    }
  }
  return v;
}

std::optional<Region> time_successor(const Region& r, const std::vector<long long>& maxc) {
  if (r.nblocks == 0) return std::nullopt;
  auto cls = to_classes(r);
  Region out = r;
  if (r.zero_block) {
    // Zero fractions lift into the open interval; clocks already at their
    // maximum leave the tracked range.
    for (int c : cls[0])
      if (out.ip[c] >= (int)maxc[c]) out.block[c] = -2;  // mark for removal
    auto& lifted = cls[0];
    lifted.erase(std::remove_if(lifted.begin(), lifted.end(),
                                [&](int c) { return out.block[c] == -2; }),
                 lifted.end());
    return from_classes(out, std::move(cls), false);
  }
  // Highest fractional class reaches the next integer.
  auto& top = cls.back();
  for (int c : top) {
    out.ip[c] += 1;
    if (out.ip[c] > (int)maxc[c]) out.block[c] = -2;
  }
  std::vector<int> landed;
  for (int c : top)
    if (out.block[c] != -2) landed.push_back(c);
  cls.pop_back();
  bool zero = !landed.empty();
  if (zero) cls.insert(cls.begin(), std::move(landed));
  return from_classes(out, std::move(cls), zero);
}

Region apply_reset(const Region& r, const std::vector<int>& clocks) {
  if (clocks.empty()) return r;
  auto cls = to_classes(r);
  Region out = r;
  for (auto& cl : cls)
    cl.erase(std::remove_if(cl.begin(), cl.end(),
                            [&](int c) {
                              return std::find(clocks.begin(), clocks.end(), c) != clocks.end();
                            }),
             cl.end());
  bool zero = r.zero_block && !cls.empty() && !cls[0].empty();
  if (!zero) {
    cls.emplace(cls.begin());
  }
  for (int c : clocks) {
    out.ip[c] = 0;
    cls[0].push_back(c);
  }
  std::sort(cls[0].begin(), cls[0].end());
  return from_classes(out, std::move(cls), true);
}

Region apply_copy(const Region& r, int dst, int src, const std::vector<long long>& maxc) {
  if (dst == src) return r;
  auto cls = to_classes(r);
  Region out = r;
  for (auto& cl : cls) cl.erase(std::remove(cl.begin(), cl.end(), dst), cl.end());
  if (r.above(src)) {
    if (maxc[dst] > maxc[src]) throw ConstantAboveMax();
    out.block[dst] = -1;
    return from_classes(out, std::move(cls), r.zero_block);
  }
  bool src_frac_zero = r.frac_zero(src);
  bool dst_above = r.ip[src] > (int)maxc[dst] ||
                   (r.ip[src] == (int)maxc[dst] && !src_frac_zero);
  if (dst_above) {
    out.block[dst] = -1;
    return from_classes(out, std::move(cls), r.zero_block);
  }
  out.ip[dst] = r.ip[src];
  cls[r.block[src]].push_back(dst);
  std::sort(cls[r.block[src]].begin(), cls[r.block[src]].end());
  return from_classes(out, std::move(cls), r.zero_block);
}

Region apply_updates(const Region& r, const Edge& e, const std::vector<long long>& maxc) {
  Region out = apply_reset(r, e.resets);
  for (auto [dst, src] : e.copies) out = apply_copy(out, dst, src, maxc);
  return out;
}

bool satisfies(const Region& r, const Atom& a) {
  if (r.above(a.clock)) {
    // Value exceeds the tracked maximum, which is at least k for every atom
    // collected into maxc.
    switch (a.rel) {
      case Rel::Lt:
      case Rel::Le:
      case Rel::Eq: return false;
      case Rel::Ge:
      case Rel::Gt: return true;
    }
  }
  long long ip = r.ip[a.clock];
  if (r.frac_zero(a.clock)) return rel_holds(Rat(ip), a.rel, a.k);
  // Value lies strictly between ip and ip+1.
  switch (a.rel) {
    case Rel::Lt:
    case Rel::Le: return a.k >= ip + 1;
    case Rel::Eq: return false;
    case Rel::Ge:
    case Rel::Gt: return a.k <= ip;
  }
  return false;
}

bool satisfies(const Region& r, const DiagAtom& d, const std::vector<long long>& maxc) {
  bool ax = r.above(d.x), ay = r.above(d.y);
  if (ax && ay) throw ConstantAboveMax();
  if (!ax && !ay) {
    long long d0 = (long long)r.ip[d.x] - r.ip[d.y];
    if (r.block[d.x] == r.block[d.y]) return rel_holds(Rat(d0), d.rel, d.k);
    // Difference lies in an open unit interval around d0.
    long long lo = r.block[d.x] > r.block[d.y] ? d0 : d0 - 1;  // value in (lo, lo+1)
    switch (d.rel) {
      case Rel::Lt:
      case Rel::Le: return d.k >= lo + 1;
      case Rel::Eq: return false;
      case Rel::Ge:
      case Rel::Gt: return d.k <= lo;
    }
  }
  if (ax) {
    // x - y exceeds maxc[x] - ip[y] - 1 strictly; unbounded above.
    long long lo = maxc[d.x] - r.ip[d.y] - 1;
    switch (d.rel) {
      case Rel::Ge:
      case Rel::Gt:
        if (d.k <= lo) return true;
        throw ConstantAboveMax();
      case Rel::Lt:
      case Rel::Le:
      case Rel::Eq:
        if (d.k <= lo) return false;
        throw ConstantAboveMax();
    }
  }
  // y above: x - y stays strictly below ip[x] (+1 if fractional) - maxc[y].
  long long hi = (long long)r.ip[d.x] + (r.frac_zero(d.x) ? 0 : 1) - maxc[d.y];
  switch (d.rel) {
    case Rel::Lt:
    case Rel::Le:
      if (hi <= d.k) return true;
      throw ConstantAboveMax();
    case Rel::Eq:
    case Rel::Ge:
    case Rel::Gt:
      if (hi <= d.k) return false;
      throw ConstantAboveMax();
  }
  return false;
}

bool satisfies(const Region& r, const Guard& g, const std::vector<long long>& maxc) {
  for (const auto& a : g.atoms)
    if (!satisfies(r, a)) return false;
  for (const auto& d : g.diags)
    if (!satisfies(r, d, maxc)) return false;
  return true;
}

bool satisfies(const Region& r, const Invariant& inv) {
  for (const auto& a : inv)
    if (!satisfies(r, a)) return false;
  return true;
}

Region project(const Region& r, const std::vector<int>& keep) {
  Region out;
  out.ip.reserve(keep.size());
  out.block.reserve(keep.size());
  for (int c : keep) {
    out.ip.push_back(r.ip[c]);
    out.block.push_back(r.block[c]);
  }
  // Renumber surviving classes.
  std::vector<int> seen;
  for (int b : out.block)
    if (b >= 0 && std::find(seen.begin(), seen.end(), b) == seen.end()) seen.push_back(b);
  std::sort(seen.begin(), seen.end());
  bool zero = false;
  for (auto& b : out.block) {
    if (b < 0) continue;
    int nb = (int)(std::find(seen.begin(), seen.end(), b) - seen.begin());
    if (b == 0 && r.zero_block && nb == 0) zero = true;
    b = nb;
  }
  // Zero survives only if the original zero class kept a clock.
  zero = zero && !seen.empty() && seen[0] == 0 && r.zero_block;
  out.zero_block = zero;
  out.nblocks = (int)seen.size();
  for (size_t c = 0; c < out.block.size(); ++c)
    if (out.block[c] < 0) out.ip[c] = 0;
  return out;
}

namespace {

void enum_rec(size_t c, const std::vector<long long>& maxc, Region& cur,
              std::vector<std::vector<int>>& pos_classes, std::vector<Region>& out) {
  if (c == maxc.size()) {
    // Materialize: zero class first when present, then positive classes in
    // every order already fixed by pos_classes.
    Region r = cur;
    int b = r.zero_block ? 1 : 0;
    for (const auto& cl : pos_classes) {
      for (int cc : cl) r.block[cc] = b;
      ++b;
    }
    r.nblocks = b;
    out.push_back(r);
    return;
  }
  // Above max.
  cur.block[c] = -1;
  cur.ip[c] = 0;
  enum_rec(c + 1, maxc, cur, pos_classes, out);
  // Integer value, fraction zero.
  bool had_zero = cur.zero_block;
  for (long long ip = 0; ip <= maxc[c]; ++ip) {
    cur.block[c] = 0;
    cur.ip[c] = (int)ip;
    cur.zero_block = true;
    enum_rec(c + 1, maxc, cur, pos_classes, out);
    cur.zero_block = had_zero;
  }
  // Positive fraction: join an existing class or open a new one anywhere.
  for (long long ip = 0; ip < maxc[c]; ++ip) {
    cur.ip[c] = (int)ip;
    cur.block[c] = 1;  // placeholder; real class set at materialization
    for (size_t i = 0; i < pos_classes.size(); ++i) {
      pos_classes[i].push_back((int)c);
      enum_rec(c + 1, maxc, cur, pos_classes, out);
      pos_classes[i].pop_back();
    }
    for (size_t i = 0; i <= pos_classes.size(); ++i) {
      pos_classes.insert(pos_classes.begin() + i, {(int)c});
      enum_rec(c + 1, maxc, cur, pos_classes, out);
      pos_classes.erase(pos_classes.begin() + i);
    }
  }
  cur.block[c] = -1;
  cur.ip[c] = 0;
}

}  // namespace

std::vector<Region> enumerate_regions(const std::vector<long long>& maxc) {
  Region cur;
  cur.ip.assign(maxc.size(), 0);
  cur.block.assign(maxc.size(), -1);
  cur.zero_block = false;
  cur.nblocks = 0;
  std::vector<std::vector<int>> pos;
  std::vector<Region> out;
  enum_rec(0, maxc, cur, pos, out);
  return out;
}

std::string region_str(const Region& r, const std::vector<Clock>& clocks,
                       const std::vector<long long>& maxc) {
  std::ostringstream os;
  for (size_t c = 0; c < r.nclocks(); ++c) {
    if (c) os << ",";
    const std::string& n = clocks[c].name;
    if (r.above((int)c)) {
      os << n << ">" << maxc[c];
    } else if (r.frac_zero((int)c)) {
      os << n << "=" << r.ip[c];
    } else {
      os << r.ip[c] << "<" << n << "<" << r.ip[c] + 1;
    }
  }
  int pos_clocks = 0;
  for (size_t c = 0; c < r.nclocks(); ++c)
    if (r.block[c] >= 0 && !r.frac_zero((int)c)) ++pos_clocks;
  if (pos_clocks >= 2) {
    os << ";";
    bool first_class = true;
    for (int b = r.zero_block ? 1 : 0; b < r.nblocks; ++b) {
      if (!first_class) os << "<";
      first_class = false;
      bool first = true;
      for (size_t c = 0; c < r.nclocks(); ++c) {
        if (r.block[c] != b) continue;
        if (!first) os << "=";
        first = false;
        os << "fr(" << clocks[c].name << ")";
      }
    }
  }
  return os.str();
}

}  // namespace ntasc
