#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/lattice.hpp"

namespace lampwalk::tsp {

// Shortest walk from start to end visiting every point: the value is
// d(start, p_1) + sum d(p_i, p_{i+1}) + d(p_k, end) minimized over visit
// orders.
template <class G>
struct Instance {
  typename G::Element start;
  typename G::Element end;
  std::vector<typename G::Element> points;
};

struct Solution {
  std::int64_t value = 0;
  std::vector<std::size_t> order;  // indices into Instance::points
  bool exact = true;
};

inline constexpr std::size_t kDpCap = 20;
inline constexpr std::size_t kBruteCap = 9;

// Drops duplicate points, keeping first occurrences so index-based tie
// breaking stays stable.
template <class G>
Instance<G> make_instance(typename G::Element start, typename G::Element end,
                          std::vector<typename G::Element> points) {
  Instance<G> inst{std::move(start), std::move(end), {}};
  for (auto& p : points)
    if (std::find(inst.points.begin(), inst.points.end(), p) == inst.points.end())
      inst.points.push_back(std::move(p));
  return inst;
}

// Group-tagged overload so G can be deduced at call sites.
template <class G>
Instance<G> make_instance(const G&, typename G::Element start, typename G::Element end,
                          std::vector<typename G::Element> points) {
  return make_instance<G>(std::move(start), std::move(end), std::move(points));
}

template <class G>
std::int64_t evaluate(const G& g, const Instance<G>& inst, const std::vector<std::size_t>& order) {
  std::int64_t total = 0;
  const typename G::Element* cur = &inst.start;
  for (const std::size_t i : order) {
    total += g.distance(*cur, inst.points[i]);
    cur = &inst.points[i];
  }
  return total + g.distance(*cur, inst.end);
}

namespace detail {

template <class G>
std::vector<std::int64_t> distance_table(const G& g, const Instance<G>& inst) {
  // Row-major (k+2)x(k+2): indices 0..k-1 are points, k is start, k+1 is end.
  const std::size_t k = inst.points.size();
  std::vector<const typename G::Element*> all;
  all.reserve(k + 2);
  for (const auto& p : inst.points) all.push_back(&p);
  all.push_back(&inst.start);
  all.push_back(&inst.end);
  std::vector<std::int64_t> d((k + 2) * (k + 2), 0);
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      d[i * (k + 2) + j] = d[j * (k + 2) + i] = g.distance(*all[i], *all[j]);
  return d;
}

}  // namespace detail

// Exhaustive reference: tries every permutation, keeps the lexicographically
// smallest optimal order.
template <class G>
Solution brute_force(const G& g, const Instance<G>& inst) {
  const std::size_t k = inst.points.size();
  if (k > kBruteCap) throw GuardError("brute-force solver capped at 9 points");
  const auto d = detail::distance_table(g, inst);
  const std::size_t n = k + 2;
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  Solution best{d[k * n + (k + 1)], {}, true};
  if (k == 0) return best;
  bool first = true;
  do {
    std::int64_t total = d[k * n + perm[0]];
    for (std::size_t i = 0; i + 1 < k; ++i) total += d[perm[i] * n + perm[i + 1]];
    total += d[perm[k - 1] * n + (k + 1)];
    if (first || total < best.value) {
      best.value = total;
      best.order = perm;
      first = false;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Held-Karp over subsets. rem[T][j] is the cheapest way to stand at point j,
// still owe the set T, and finish at the end vertex; the optimal order is
// rebuilt front-to-back greedily, which yields the lexicographically smallest
// optimal order.
template <class G>
Solution solve_dp(const G& g, const Instance<G>& inst, std::size_t cap = kDpCap) {
  const std::size_t k = inst.points.size();
  if (k > cap) throw GuardError("instance exceeds the exact subset-DP cap");
  const auto d = detail::distance_table(g, inst);
  const std::size_t n = k + 2;
  if (k == 0) return {d[k * n + (k + 1)], {}, true};

  const std::size_t full = (std::size_t{1} << k) - 1;
  std::vector<std::int64_t> rem((full + 1) * k);
  for (std::size_t j = 0; j < k; ++j) rem[j] = d[j * n + (k + 1)];
  for (std::size_t t = 1; t <= full; ++t) {
    for (std::size_t j = 0; j < k; ++j) {
      if (t & (std::size_t{1} << j)) continue;
      std::int64_t best = INT64_MAX;
      for (std::size_t l = 0; l < k; ++l) {
        if (!(t & (std::size_t{1} << l))) continue;
        const std::int64_t c = d[j * n + l] + rem[(t ^ (std::size_t{1} << l)) * k + l];
        if (c < best) best = c;
      }
      rem[t * k + j] = best;
    }
  }

  Solution sol;
  sol.order.reserve(k);
  std::size_t t = full;
  std::size_t cur = k;  // start vertex
  std::int64_t remaining = INT64_MAX;
  for (std::size_t j = 0; j < k; ++j)
    remaining = std::min(remaining, d[k * n + j] + rem[(full ^ (std::size_t{1} << j)) * k + j]);
  sol.value = remaining;
  while (t != 0) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!(t & (std::size_t{1} << j))) continue;
      if (d[cur * n + j] + rem[(t ^ (std::size_t{1} << j)) * k + j] == remaining) {
        sol.order.push_back(j);
        remaining -= d[cur * n + j];
        t ^= std::size_t{1} << j;
        cur = j;
        break;
      }
    }
  }
  return sol;
}

// Tree closed form. With the instance translated so the start sits at the
// identity, the minimal subtree T spanning start, end and all points is the
// union of their root paths, and the optimal value is 2*W(T) - d(start,end):
// a walk must cross every T-edge, twice if the edge is off the start-end
// geodesic. The visit order of a depth-first traversal that defers the branch
// containing the end vertex attains the value.
inline Solution solve_tree(const FreeGroup& g, const Instance<FreeGroup>& inst) {
  const Word inv_start = g.inverse(inst.start);
  const Word sig_end = g.multiply(inv_start, inst.end);
  const std::size_t k = inst.points.size();
  std::vector<Word> sig(k);
  for (std::size_t i = 0; i < k; ++i) sig[i] = g.multiply(inv_start, inst.points[i]);

  // W(T) = number of distinct nonempty prefixes: sort, then sum the part of
  // each word not shared with its predecessor.
  std::vector<const Word*> sorted;
  sorted.reserve(k + 1);
  for (const auto& s : sig) sorted.push_back(&s);
  sorted.push_back(&sig_end);
  std::sort(sorted.begin(), sorted.end(), [](const Word* a, const Word* b) { return *a < *b; });
  std::int64_t w = static_cast<std::int64_t>(sorted[0]->size());
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    const std::size_t p = common_prefix(*sorted[i - 1], *sorted[i]);
    w += static_cast<std::int64_t>(sorted[i]->size() - p);
  }

  Solution sol;
  sol.value = 2 * w - static_cast<std::int64_t>(sig_end.size());
  sol.order.resize(k);
  std::iota(sol.order.begin(), sol.order.end(), 0);
  std::sort(sol.order.begin(), sol.order.end(), [&](std::size_t x, std::size_t y) {
    const Word& sx = sig[x];
    const Word& sy = sig[y];
    const std::size_t c = common_prefix(sx, sy);
    if (c == sx.size() && c == sy.size()) return x < y;  // duplicate points
    if (c == sx.size()) return true;  // ancestor is reached first
    if (c == sy.size()) return false;
    const bool x_on_end_branch = common_prefix(sx, sig_end) > c;
    const bool y_on_end_branch = common_prefix(sy, sig_end) > c;
    if (x_on_end_branch != y_on_end_branch) return y_on_end_branch;
    return sx[c] < sy[c];
  });
  return sol;
}

// The rank-1 lattice is a path graph, so the same closed form applies: cover
// the interval hull, sweeping toward the near extreme first.
inline Solution solve_tree(const IntegerLattice& g, const Instance<IntegerLattice>& inst) {
  if (g.dim() != 1)
    throw ConfigError("tree solver needs a tree geometry (free group or 1-dimensional lattice)");
  const std::int64_t a = inst.start[0];
  const std::int64_t b = inst.end[0];
  std::int64_t lo = std::min(a, b);
  std::int64_t hi = std::max(a, b);
  for (const auto& p : inst.points) {
    lo = std::min(lo, p[0]);
    hi = std::max(hi, p[0]);
  }
  const std::int64_t left_first = (a - lo) + (hi - lo) + (hi - b);
  const std::int64_t right_first = (hi - a) + (hi - lo) + (b - lo);

  Solution sol;
  sol.value = std::min(left_first, right_first);
  sol.order.resize(inst.points.size());
  std::iota(sol.order.begin(), sol.order.end(), 0);
  const bool left = left_first <= right_first;
  std::stable_sort(sol.order.begin(), sol.order.end(), [&](std::size_t x, std::size_t y) {
    const std::int64_t px = inst.points[x][0];
    const std::int64_t py = inst.points[y][0];
    const bool x_back = left ? px <= a : px >= a;  // covered during the first sweep
    const bool y_back = left ? py <= a : py >= a;
    if (x_back != y_back) return x_back;
    if (x_back) return left ? px > py : px < py;
    return left ? px < py : px > py;
  });
  return sol;
}

// Nearest-neighbour start followed by 2-opt segment reversals. Not exact;
// the solution is labeled accordingly.
template <class G>
Solution approx_two_opt(const G& g, const Instance<G>& inst) {
  const std::size_t k = inst.points.size();
  const auto d = detail::distance_table(g, inst);
  const std::size_t n = k + 2;
  Solution sol;
  sol.exact = false;
  std::vector<bool> used(k, false);
  std::size_t cur = k;
  for (std::size_t step = 0; step < k; ++step) {
    std::size_t pick = k;
    for (std::size_t j = 0; j < k; ++j)
      if (!used[j] && (pick == k || d[cur * n + j] < d[cur * n + pick])) pick = j;
    used[pick] = true;
    sol.order.push_back(pick);
    cur = pick;
  }
  bool improved = k > 1;
  while (improved) {
    improved = false;
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const std::size_t before = i == 0 ? k : sol.order[i - 1];
        const std::size_t after = j + 1 == k ? k + 1 : sol.order[j + 1];
        const std::int64_t delta = d[before * n + sol.order[j]] + d[sol.order[i] * n + after] -
                                   d[before * n + sol.order[i]] - d[sol.order[j] * n + after];
        if (delta < 0) {
          std::reverse(sol.order.begin() + static_cast<std::ptrdiff_t>(i),
                       sol.order.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          improved = true;
        }
      }
    }
  }
  sol.value = evaluate(g, inst, sol.order);
  return sol;
}

// Exact-mode policy: tree geometries get the closed form at any size, other
// metrics go through the subset DP up to its cap.
inline Solution solve(const FreeGroup& g, const Instance<FreeGroup>& inst) {
  return solve_tree(g, inst);
}

inline Solution solve(const IntegerLattice& g, const Instance<IntegerLattice>& inst,
                      std::size_t cap = kDpCap) {
  if (g.dim() == 1) return solve_tree(g, inst);
  return solve_dp(g, inst, cap);
}

}  // namespace lampwalk::tsp
