#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/lattice.hpp"
#include "lampwalk/rng.hpp"
#include "lampwalk/tsp.hpp"
#include "lampwalk/wreath.hpp"

namespace lampwalk::walk {

// One step law for a random walk on a wreath product: a finite list of atoms
// plus an optional heavy-tailed component.
template <class W>
class StepDistribution {
 public:
  using Element = typename W::Element;

  struct Atom {
    Element value;
    double prob = 0;
  };

  // With probability prob the step is instead: a geometric(geom_p) number of
  // non-backtracking base generator moves, preceded with probability
  // lamp_prob by a uniformly random lamp move at the step's origin, the whole
  // thing inverted with probability 1/2 so the component stays symmetric.
  struct Tail {
    double prob = 0;
    double geom_p = 0.5;
    double lamp_prob = 0.5;
  };

  StepDistribution(const W& g, std::vector<Atom> atoms, std::optional<Tail> tail = std::nullopt,
                   bool require_symmetric = true)
      : atoms_(std::move(atoms)), tail_(std::move(tail)) {
    double total = 0;
    for (const auto& a : atoms_) {
      if (!(a.prob >= 0) || !std::isfinite(a.prob))
        throw ConfigError("atom probabilities must be finite and nonnegative");
      total += a.prob;
    }
    if (tail_) {
      if (!(tail_->prob >= 0) || !std::isfinite(tail_->prob))
        throw ConfigError("tail probability must be finite and nonnegative");
      if (!(tail_->geom_p > 0) || !(tail_->geom_p <= 1))
        throw ConfigError("tail geometric parameter must be in (0, 1]");
      if (!(tail_->lamp_prob >= 0) || !(tail_->lamp_prob <= 1))
        throw ConfigError("tail lamp probability must be in [0, 1]");
      total += tail_->prob;
      if (tail_->prob == 0) tail_.reset();
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw ConfigError("step probabilities must sum to 1");
    if (atoms_.empty() && !tail_) throw ConfigError("step distribution is empty");
    cum_.reserve(atoms_.size());
    double acc = 0;
    for (const auto& a : atoms_) {
      acc += a.prob / total;
      cum_.push_back(acc);
    }
    if (require_symmetric) {
      std::map<Element, double> mass;
      for (const auto& a : atoms_) mass[a.value] += a.prob;
      for (const auto& [e, p] : mass) {
        const auto it = mass.find(g.inverse(e));
        const double q = it == mass.end() ? 0.0 : it->second;
        if (std::abs(p - q) > 1e-12)
          throw ConfigError("step distribution is not symmetric");
      }
      symmetric_ = true;
    }
    base_gens_ = g.base().generators();
    lamp_gens_ = g.lamp().generators();
  }

  // Uniform on the standard generators.
  static StepDistribution uniform_standard(const W& g) {
    const auto gens = g.generators();
    std::vector<Atom> atoms;
    atoms.reserve(gens.size());
    for (const auto& e : gens) atoms.push_back({e, 1.0 / static_cast<double>(gens.size())});
    return StepDistribution(g, std::move(atoms));
  }

  bool symmetric() const { return symmetric_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<Tail>& tail() const { return tail_; }

  // Consumes a deterministic number of draws for a given outcome: one for the
  // atom pick; a tail pick adds one for the length, one for the lamp coin,
  // one for the lamp value, one per base move, and one for the inversion coin.
  Element sample(const W& g, PhiloxRng& rng) const {
    const double u = rng.next_unit();
    for (std::size_t i = 0; i < atoms_.size(); ++i)
      if (u < cum_[i]) return atoms_[i].value;
    if (!tail_) return atoms_.back().value;  // guard against rounding at u ~ 1

    const double u_len = rng.next_unit();
    std::int64_t len = 0;
    if (tail_->geom_p < 1.0)
      len = static_cast<std::int64_t>(std::floor(std::log1p(-u_len) / std::log1p(-tail_->geom_p)));

    Element step = g.identity();
    const double u_lamp = rng.next_unit();
    const std::uint64_t lamp_pick = rng.next_below(lamp_gens_.size());
    if (u_lamp < tail_->lamp_prob) {
      Element lamp_move{{{g.base().identity(), lamp_gens_[lamp_pick]}}, g.base().identity()};
      step = g.multiply(step, lamp_move);
    }
    std::size_t prev = static_cast<std::size_t>(-1);
    for (std::int64_t i = 0; i < len; ++i) {
      std::size_t pick;
      if (prev == static_cast<std::size_t>(-1)) {
        pick = rng.next_below(base_gens_.size());
      } else {
        pick = rng.next_below(base_gens_.size() - 1);
        if (pick >= (prev ^ 1)) ++pick;  // skip the inverse of the last move
      }
      step = g.multiply(step, Element{{}, base_gens_[pick]});
      prev = pick;
    }
    if (rng.next_unit() < 0.5) step = g.inverse(step);
    return step;
  }

 private:
  std::vector<Atom> atoms_;
  std::vector<double> cum_;
  std::optional<Tail> tail_;
  bool symmetric_ = false;
  std::vector<typename W::BaseElement> base_gens_;
  std::vector<typename W::LampValue> lamp_gens_;
};

// Value-typed trajectory with states and exact word lengths at checkpoints.
// This is the reference route; the per-sample engines below are cross-checked
// against it.
template <class W>
struct Trajectory {
  struct Checkpoint {
    std::int64_t step = 0;
    typename W::Element state;
    std::int64_t length = 0;
  };
  std::uint64_t seed = 0;
  std::vector<Checkpoint> checkpoints;
};

inline std::vector<std::int64_t> default_checkpoints(std::int64_t n) {
  std::vector<std::int64_t> cps;
  for (std::int64_t p = 1; p < n; p *= 2) cps.push_back(p);
  cps.push_back(n);
  return cps;
}

template <class W>
Trajectory<W> run_trajectory(const W& g, const StepDistribution<W>& mu, std::int64_t n,
                             std::uint64_t seed, std::vector<std::int64_t> checkpoints = {}) {
  if (n < 0) throw ConfigError("horizon must be nonnegative");
  if (checkpoints.empty()) checkpoints = default_checkpoints(n);
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 0 || checkpoints[i] > n)
      throw ConfigError("checkpoints must lie in [0, horizon]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw ConfigError("checkpoints must be strictly increasing");
  }
  Trajectory<W> traj;
  traj.seed = seed;
  PhiloxRng rng(seed, 0);
  typename W::Element cur = g.identity();
  std::size_t next_cp = 0;
  for (std::int64_t k = 0; k <= n; ++k) {
    if (next_cp < checkpoints.size() && checkpoints[next_cp] == k) {
      traj.checkpoints.push_back({k, cur, g.word_length(cur)});
      ++next_cp;
    }
    if (k < n) cur = g.multiply(cur, mu.sample(g, rng));
  }
  return traj;
}

// Per-sample engine over a free base: positions are interned tree nodes, the
// lamp support is a node -> value map, and word lengths come from the
// root-anchored tree tour closed form (twice the Steiner tree weight of
// {root, support, position} minus the position depth, plus lamp costs).
template <class Lamp>
class FreeWalker {
 public:
  using W = Wreath<Lamp, FreeGroup>;
  using Element = typename W::Element;

  explicit FreeWalker(const W& g) : g_(&g), arena_(g.base().rank()) {}

  void apply(const Element& step) {
    for (const auto& [site, v] : step.lamps) toggle(arena_.walk(pos_, site), v);
    pos_ = arena_.walk(pos_, step.pos);
  }

  // Base projection of apply; used where lamps cannot affect the measurement.
  void apply_base(const Element& step) { pos_ = arena_.walk(pos_, step.pos); }

  std::int64_t length() {
    ++epoch_;
    stamp_.resize(arena_.size(), 0);
    std::int64_t w = 0;
    const auto mark = [&](std::int32_t node) {
      while (node != TreeArena::kRoot && stamp_[static_cast<std::size_t>(node)] != epoch_) {
        stamp_[static_cast<std::size_t>(node)] = epoch_;
        ++w;
        node = arena_.parent(node);
      }
    };
    mark(pos_);
    std::int64_t cost = 0;
    for (const auto& [node, v] : lamps_) {
      mark(node);
      cost += g_->lamp().cost(v);
    }
    return 2 * w - arena_.depth(pos_) + cost;
  }

  std::int64_t base_dist() const { return arena_.depth(pos_); }
  std::int32_t pos_node() const { return pos_; }
  const TreeArena& arena() const { return arena_; }

  Element state() const {
    Element out = g_->identity();
    for (const auto& [node, v] : lamps_) out.lamps.emplace(arena_.word(node), v);
    out.pos = arena_.word(pos_);
    return out;
  }

 private:
  void toggle(std::int32_t node, const typename Lamp::Element& v) {
    const auto it = lamps_.find(node);
    const auto merged = it == lamps_.end() ? v : g_->lamp().multiply(it->second, v);
    if (merged == g_->lamp().identity()) {
      if (it != lamps_.end()) lamps_.erase(it);
    } else if (it == lamps_.end()) {
      lamps_.emplace(node, merged);
    } else {
      it->second = merged;
    }
  }

  const W* g_;
  TreeArena arena_;
  std::int32_t pos_ = TreeArena::kRoot;
  std::unordered_map<std::int32_t, typename Lamp::Element> lamps_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t epoch_ = 0;
};

// Per-sample engine over a lattice base. Rank 1 uses the interval-sweep
// closed form; higher ranks fall back to the subset DP and inherit its
// support cap.
template <class Lamp>
class LatticeWalker {
 public:
  using W = Wreath<Lamp, IntegerLattice>;
  using Element = typename W::Element;
  using Site = typename IntegerLattice::Element;

  explicit LatticeWalker(const W& g) : g_(&g), pos_(g.base().identity()) {}

  void apply(const Element& step) {
    for (const auto& [site, v] : step.lamps) toggle(g_->base().multiply(pos_, site), v);
    pos_ = g_->base().multiply(pos_, step.pos);
  }

  void apply_base(const Element& step) { pos_ = g_->base().multiply(pos_, step.pos); }

  std::int64_t length() const {
    std::int64_t cost = 0;
    for (const auto& [site, v] : lamps_) cost += g_->lamp().cost(v);
    if (g_->base().dim() == 1) {
      std::int64_t lo = std::min<std::int64_t>(0, pos_[0]);
      std::int64_t hi = std::max<std::int64_t>(0, pos_[0]);
      for (const auto& [site, v] : lamps_) {
        lo = std::min(lo, site[0]);
        hi = std::max(hi, site[0]);
      }
      const std::int64_t b = pos_[0];
      const std::int64_t left_first = (0 - lo) + (hi - lo) + (hi - b);
      const std::int64_t right_first = (hi - 0) + (hi - lo) + (b - lo);
      return std::min(left_first, right_first) + cost;
    }
    std::vector<Site> sites;
    sites.reserve(lamps_.size());
    for (const auto& [site, v] : lamps_) sites.push_back(site);
    const auto inst = tsp::make_instance(g_->base(), g_->base().identity(), pos_, sites);
    return tsp::solve(g_->base(), inst).value + cost;
  }

  std::int64_t base_dist() const { return g_->base().length(pos_); }

  Element state() const {
    Element out = g_->identity();
    out.lamps = lamps_;
    out.pos = pos_;
    return out;
  }

 private:
  void toggle(const Site& site, const typename Lamp::Element& v) {
    const auto it = lamps_.find(site);
    const auto merged = it == lamps_.end() ? v : g_->lamp().multiply(it->second, v);
    if (merged == g_->lamp().identity()) {
      if (it != lamps_.end()) lamps_.erase(it);
    } else if (it == lamps_.end()) {
      lamps_.emplace(site, merged);
    } else {
      it->second = merged;
    }
  }

  const W* g_;
  Site pos_;
  std::map<Site, typename Lamp::Element> lamps_;
};

template <class W>
struct WalkerFor;
template <class L>
struct WalkerFor<Wreath<L, FreeGroup>> {
  using type = FreeWalker<L>;
};
template <class L>
struct WalkerFor<Wreath<L, IntegerLattice>> {
  using type = LatticeWalker<L>;
};

struct CocycleRecord {
  std::int64_t horizon = 0, sample = 0;
  std::int64_t length = 0;     // word length of the walk at the horizon
  std::int64_t base_dist = 0;  // distance of the base projection from the origin
};

struct DefectRecord {
  std::int64_t m = 0, n = 0, sample = 0;
  std::int64_t q_m = 0;    // word length at time m
  std::int64_t d_mid = 0;  // distance between the time-m and time-(m+n) states
  std::int64_t q_mn = 0;   // word length at time m+n
  std::int64_t defect = 0; // q_m + d_mid - q_mn, always nonnegative
};

struct TrackingRecord {
  std::int64_t horizon = 0, sample = 0;
  std::int64_t max_dev = 0;      // peak distance of the base walk from its final geodesic
  std::int64_t end_dist = 0;     // base distance at the horizon
  std::int64_t violations = -1;  // speed-floor violations; -1 when not measured
};

inline int resolve_threads(int threads) {
  if (threads < 0) throw ConfigError("thread count must be nonnegative");
  if (threads > 0) return threads;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc ? static_cast<int>(hc) : 1;
}

// Runs body(0..count-1) over a work-stealing pool. Results must go into
// preallocated per-index slots; with that discipline the output is identical
// for every thread count.
template <class F>
void parallel_for(std::int64_t count, int threads, F&& body) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::mutex err_mu;
  std::exception_ptr err;
  const auto worker = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lk(err_mu);
        if (!err) err = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

namespace detail {

inline void check_samples(std::int64_t samples) {
  if (samples < 1) throw ConfigError("samples must be positive");
}

inline void check_horizons(const std::vector<std::int64_t>& horizons) {
  if (horizons.empty()) throw ConfigError("horizons must be nonempty");
  for (std::size_t i = 0; i < horizons.size(); ++i) {
    if (horizons[i] < 1) throw ConfigError("horizons must be positive");
    if (i > 0 && horizons[i] <= horizons[i - 1])
      throw ConfigError("horizons must be strictly increasing");
  }
}

}  // namespace detail

// Word length and base distance for every (horizon, sample) cell. Sample s
// draws from stream s of the seed and walks once through all horizons;
// records are laid out horizon-major, so output does not depend on the
// thread count.
template <class W>
std::vector<CocycleRecord> batch_cocycle(const W& g, const StepDistribution<W>& mu,
                                         const std::vector<std::int64_t>& horizons,
                                         std::int64_t samples, std::uint64_t seed, int threads) {
  detail::check_horizons(horizons);
  detail::check_samples(samples);
  std::vector<CocycleRecord> out(horizons.size() * static_cast<std::size_t>(samples));
  parallel_for(samples, threads, [&](std::int64_t s) {
    PhiloxRng rng(seed, static_cast<std::uint64_t>(s));
    typename WalkerFor<W>::type walker(g);
    std::int64_t k = 0;
    for (std::size_t hi = 0; hi < horizons.size(); ++hi) {
      for (; k < horizons[hi]; ++k) walker.apply(mu.sample(g, rng));
      out[hi * static_cast<std::size_t>(samples) + static_cast<std::size_t>(s)] = {
          horizons[hi], s, walker.length(), walker.base_dist()};
    }
  });
  return out;
}

// One defect draw per (grid cell, sample): walk to m, measure, walk on to
// m+n while a second walker started fresh at m accumulates the same
// increments, so its length is exactly the distance between the two states.
// Task t = cell * samples + sample draws from stream t.
template <class W>
std::vector<DefectRecord> batch_defect(const W& g, const StepDistribution<W>& mu,
                                       const std::vector<std::pair<std::int64_t, std::int64_t>>& grid,
                                       std::int64_t samples, std::uint64_t seed, int threads) {
  if (grid.empty()) throw ConfigError("defect grid must be nonempty");
  for (const auto& [m, n] : grid) {
    if (m < 0) throw ConfigError("defect grid start times must be nonnegative");
    if (n < 1) throw ConfigError("defect grid gaps must be positive");
  }
  detail::check_samples(samples);
  const std::int64_t count = static_cast<std::int64_t>(grid.size()) * samples;
  std::vector<DefectRecord> out(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](std::int64_t task) {
    const auto [m, n] = grid[static_cast<std::size_t>(task / samples)];
    const std::int64_t s = task % samples;
    PhiloxRng rng(seed, static_cast<std::uint64_t>(task));
    typename WalkerFor<W>::type full(g);
    typename WalkerFor<W>::type rel(g);
    for (std::int64_t k = 0; k < m; ++k) full.apply(mu.sample(g, rng));
    const std::int64_t q_m = full.length();
    for (std::int64_t k = 0; k < n; ++k) {
      const auto step = mu.sample(g, rng);
      full.apply(step);
      rel.apply(step);
    }
    const std::int64_t d_mid = rel.length();
    const std::int64_t q_mn = full.length();
    const std::int64_t defect = q_m + d_mid - q_mn;
    if (defect < 0) throw std::logic_error("defect invariant violated");
    out[static_cast<std::size_t>(task)] = {m, n, s, q_m, d_mid, q_mn, defect};
  });
  return out;
}

// Reference route for one defect draw, all value types, stream 0.
template <class W>
DefectRecord sample_defect(const W& g, const StepDistribution<W>& mu, std::int64_t m,
                           std::int64_t n, std::uint64_t seed) {
  if (m < 0 || n < 1) throw ConfigError("defect times must satisfy m >= 0, n >= 1");
  PhiloxRng rng(seed, 0);
  typename W::Element cur = g.identity();
  for (std::int64_t k = 0; k < m; ++k) cur = g.multiply(cur, mu.sample(g, rng));
  const typename W::Element at_m = cur;
  const std::int64_t q_m = g.word_length(cur);
  for (std::int64_t k = 0; k < n; ++k) cur = g.multiply(cur, mu.sample(g, rng));
  const std::int64_t q_mn = g.word_length(cur);
  const std::int64_t d_mid = g.word_length(g.multiply(g.inverse(at_m), cur));
  const std::int64_t defect = q_m + d_mid - q_mn;
  if (defect < 0) throw std::logic_error("defect invariant violated");
  return {m, n, 0, q_m, d_mid, q_mn, defect};
}

// How far the base projection of one walk strays from the geodesic to its
// own endpoint, plus optional pair-speed floor violations: pairs (i, j) with
// j - i >= window and d(pos_i, pos_j) < (j - i) / k0.
template <class L>
TrackingRecord run_tracking(const Wreath<L, FreeGroup>& g,
                            const StepDistribution<Wreath<L, FreeGroup>>& mu, std::int64_t n,
                            PhiloxRng& rng, std::optional<double> k0 = std::nullopt,
                            std::int64_t window = 1) {
  if (n < 1) throw ConfigError("horizon must be positive");
  if (k0 && *k0 <= 0) throw ConfigError("speed-floor constant must be positive");
  if (window < 1) throw ConfigError("pair window must be positive");
  FreeWalker<L> walker(g);
  std::vector<std::int32_t> nodes(static_cast<std::size_t>(n) + 1);
  nodes[0] = TreeArena::kRoot;
  for (std::int64_t k = 1; k <= n; ++k) {
    walker.apply_base(mu.sample(g, rng));
    nodes[static_cast<std::size_t>(k)] = walker.pos_node();
  }
  const TreeArena& arena = walker.arena();
  const Word final_word = arena.word(nodes.back());

  // Walk the node log once, maintaining the match length against a fixed
  // word: a child move extends the match only when the whole current prefix
  // matches, a parent move clamps it.
  const auto scan = [&](std::size_t from, const Word& target, const auto& visit) {
    std::int64_t depth = arena.depth(nodes[from]);
    // Both uses start with match == lcp(nodes[from], target): the root
    // matches nothing, an interior start is its own target.
    std::int64_t match = depth;
    for (std::size_t j = from + 1; j < nodes.size(); ++j) {
      const std::int64_t d_new = arena.depth(nodes[j]);
      if (d_new > depth) {
        if (depth == match && match < static_cast<std::int64_t>(target.size()) &&
            target[static_cast<std::size_t>(match)] == arena.letter(nodes[j]))
          ++match;
      } else {
        match = std::min(match, d_new);
      }
      depth = d_new;
      visit(j, depth, match);
    }
  };

  TrackingRecord rec;
  rec.horizon = n;
  rec.end_dist = arena.depth(nodes.back());
  scan(0, final_word, [&](std::size_t, std::int64_t depth, std::int64_t match) {
    rec.max_dev = std::max(rec.max_dev, depth - match);
  });

  if (k0) {
    rec.violations = 0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
      const Word w_i = arena.word(nodes[i]);
      const std::int64_t d_i = arena.depth(nodes[i]);
      scan(i, w_i, [&](std::size_t j, std::int64_t depth, std::int64_t match) {
        const std::int64_t gap = static_cast<std::int64_t>(j - i);
        if (gap < window) return;
        const std::int64_t dist = d_i + depth - 2 * match;
        if (static_cast<double>(dist) * *k0 < static_cast<double>(gap)) ++rec.violations;
      });
    }
  }
  return rec;
}

// Tracking statistics per (horizon, sample) cell; task t = cell * samples +
// sample draws from stream t, one independent walk per task.
template <class L>
std::vector<TrackingRecord> batch_tracking(const Wreath<L, FreeGroup>& g,
                                           const StepDistribution<Wreath<L, FreeGroup>>& mu,
                                           const std::vector<std::int64_t>& horizons,
                                           std::int64_t samples, std::uint64_t seed, int threads,
                                           std::optional<double> k0 = std::nullopt,
                                           std::int64_t window = 1) {
  detail::check_horizons(horizons);
  detail::check_samples(samples);
  const std::int64_t count = static_cast<std::int64_t>(horizons.size()) * samples;
  std::vector<TrackingRecord> out(static_cast<std::size_t>(count));
  parallel_for(count, threads, [&](std::int64_t task) {
    const std::int64_t n = horizons[static_cast<std::size_t>(task / samples)];
    PhiloxRng rng(seed, static_cast<std::uint64_t>(task));
    TrackingRecord rec = run_tracking(g, mu, n, rng, k0, window);
    rec.sample = task % samples;
    out[static_cast<std::size_t>(task)] = rec;
  });
  return out;
}

}  // namespace lampwalk::walk
