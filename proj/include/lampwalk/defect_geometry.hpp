#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/free_group.hpp"
#include "lampwalk/rng.hpp"
#include "lampwalk/tsp.hpp"

namespace lampwalk::lemma {

// A tour-splitting scenario on the free group: two point clouds near a common
// geodesic axis, split at a waypoint. All words must be reduced.
struct Instance {
  Word a, b, c;            // start, waypoint, end
  std::vector<Word> axis;  // the geodesic from a to c, listed vertex by vertex
  std::vector<Word> l1, l2;
  std::int64_t d = 1;      // neighborhood width
};

// Outcome of checking the splitting hypotheses. b1 and b2 are the axis
// vertices at offsets r - 4d and r + 4d from the start; they are filled
// whenever those offsets exist.
struct Certificate {
  bool pass = false;
  bool waypoint_near_axis = false;  // d(b, axis) <= d
  bool spread_ok = false;           // r >= 4d
  bool axis_reaches = false;        // d(a, c) >= r + 4d
  bool points_near_axis = false;    // every point within d of the axis
  bool window_ok = false;           // l1 below r + 4d, l2 above r - 4d
  std::int64_t r = 0;               // d(a, b)
  std::int64_t n_window = 0;        // distinct points with d(a, x) in [r - 4d, r + 4d]
  Word b1, b2;
};

enum class Region { inner, middle, outer };

// A walk written as its vertex sequence; length is the sum of the leg
// distances.
struct NodePath {
  std::vector<Word> nodes;
  std::int64_t length = 0;
};

inline std::int64_t path_length(const FreeGroup& g, const std::vector<Word>& nodes) {
  std::int64_t len = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i) len += g.distance(nodes[i - 1], nodes[i]);
  return len;
}

inline std::vector<Word> set_union_of(const std::vector<Word>& l1, const std::vector<Word>& l2) {
  std::set<Word> s(l1.begin(), l1.end());
  s.insert(l2.begin(), l2.end());
  return {s.begin(), s.end()};
}

inline std::vector<Word> set_sym_diff(const std::vector<Word>& l1, const std::vector<Word>& l2) {
  const std::set<Word> s1(l1.begin(), l1.end());
  const std::set<Word> s2(l2.begin(), l2.end());
  std::vector<Word> out;
  std::set_symmetric_difference(s1.begin(), s1.end(), s2.begin(), s2.end(),
                                std::back_inserter(out));
  return out;
}

namespace detail {

inline void require_reduced(const FreeGroup& g, const Word& w, const char* what) {
  if (!g.is_reduced(w)) throw ConfigError(std::string(what) + " is not a reduced word");
}

inline void validate_instance(const FreeGroup& g, const Instance& inst) {
  if (inst.d < 1) throw ConfigError("neighborhood width must be positive");
  require_reduced(g, inst.a, "start");
  require_reduced(g, inst.b, "waypoint");
  require_reduced(g, inst.c, "end");
  for (const auto& w : inst.l1) require_reduced(g, w, "first-cloud point");
  for (const auto& w : inst.l2) require_reduced(g, w, "second-cloud point");
  if (inst.axis.empty() || inst.axis.front() != inst.a || inst.axis.back() != inst.c)
    throw ConfigError("axis must run from the start to the end");
  const std::int64_t span = g.distance(inst.a, inst.c);
  if (static_cast<std::int64_t>(inst.axis.size()) != span + 1)
    throw ConfigError("axis must have d(a, c) + 1 vertices");
  for (std::size_t i = 0; i < inst.axis.size(); ++i) {
    require_reduced(g, inst.axis[i], "axis vertex");
    if (i > 0 && g.distance(inst.axis[i - 1], inst.axis[i]) != 1)
      throw ConfigError("axis vertices must be adjacent");
  }
}

}  // namespace detail

inline Certificate certify(const FreeGroup& g, const Instance& inst) {
  detail::validate_instance(g, inst);
  Certificate cert;
  cert.r = g.distance(inst.a, inst.b);
  const std::int64_t lo = cert.r - 4 * inst.d;
  const std::int64_t hi = cert.r + 4 * inst.d;
  const std::int64_t span = g.distance(inst.a, inst.c);

  cert.waypoint_near_axis = g.project_to_geodesic(inst.b, inst.axis).distance <= inst.d;
  cert.spread_ok = cert.r >= 4 * inst.d;
  cert.axis_reaches = span >= hi;

  cert.points_near_axis = true;
  cert.window_ok = true;
  for (const auto& x : inst.l1) {
    if (g.project_to_geodesic(x, inst.axis).distance > inst.d) cert.points_near_axis = false;
    if (g.distance(inst.a, x) > hi) cert.window_ok = false;
  }
  for (const auto& y : inst.l2) {
    if (g.project_to_geodesic(y, inst.axis).distance > inst.d) cert.points_near_axis = false;
    if (g.distance(inst.a, y) < lo) cert.window_ok = false;
  }

  std::set<Word> window;
  for (const auto& pts : {inst.l1, inst.l2})
    for (const auto& x : pts) {
      const std::int64_t dx = g.distance(inst.a, x);
      if (dx >= lo && dx <= hi) window.insert(x);
    }
  cert.n_window = static_cast<std::int64_t>(window.size());

  if (cert.spread_ok && cert.axis_reaches) {
    cert.b1 = inst.axis[static_cast<std::size_t>(lo)];
    cert.b2 = inst.axis[static_cast<std::size_t>(hi)];
  }
  cert.pass = cert.waypoint_near_axis && cert.spread_ok && cert.axis_reaches &&
              cert.points_near_axis && cert.window_ok;
  return cert;
}

// Partition of the certified neighborhood by distance from the start: the
// inner and outer regions are closed, the middle band is open.
inline Region classify(const FreeGroup& g, const Instance& inst, const Certificate& cert,
                       const Word& x) {
  if (!cert.pass) throw ConfigError("classification needs a passing certificate");
  if (g.project_to_geodesic(x, inst.axis).distance > inst.d)
    throw ConfigError("point is outside the certified neighborhood of the axis");
  const std::int64_t dx = g.distance(inst.a, x);
  if (dx <= cert.r - 4 * inst.d) return Region::inner;
  if (dx >= cert.r + 4 * inst.d) return Region::outer;
  return Region::middle;
}

struct SandwichReport {
  std::int64_t t_first = 0;   // tour start -> l1 -> waypoint
  std::int64_t t_second = 0;  // tour waypoint -> l2 -> end
  std::int64_t t_joint = 0;   // tour start -> l3 -> end
  std::int64_t defect = 0;    // t_first + t_second - t_joint
  std::int64_t bound = 0;     // 24 * (n_window + 1) * d
  bool lower_ok = false;      // defect >= 0
  bool upper_ok = false;      // defect <= bound
};

// Compares the split tours against the joint tour for any l3 between the
// symmetric difference and the union of the clouds.
inline SandwichReport defect_sandwich(const FreeGroup& g, const Instance& inst,
                                      const Certificate& cert, const std::vector<Word>& l3) {
  if (!cert.pass) throw ConfigError("sandwich needs a passing certificate");
  const std::set<Word> s3(l3.begin(), l3.end());
  const std::set<Word> su = [&] {
    const auto u = set_union_of(inst.l1, inst.l2);
    return std::set<Word>(u.begin(), u.end());
  }();
  for (const auto& x : set_sym_diff(inst.l1, inst.l2))
    if (!s3.count(x)) throw ConfigError("joint cloud must contain the symmetric difference");
  for (const auto& x : s3)
    if (!su.count(x)) throw ConfigError("joint cloud must stay inside the union");

  SandwichReport rep;
  rep.t_first = tsp::solve_tree(g, tsp::make_instance(g, inst.a, inst.b, inst.l1)).value;
  rep.t_second = tsp::solve_tree(g, tsp::make_instance(g, inst.b, inst.c, inst.l2)).value;
  rep.t_joint = tsp::solve_tree(g, tsp::make_instance(g, inst.a, inst.c, l3)).value;
  rep.defect = rep.t_first + rep.t_second - rep.t_joint;
  rep.bound = 24 * (cert.n_window + 1) * inst.d;
  rep.lower_ok = rep.defect >= 0;
  rep.upper_ok = rep.defect <= rep.bound;
  return rep;
}

// The optimal joint tour through the symmetric difference of the clouds,
// materialized as a vertex path from start to end.
inline NodePath joint_tour(const FreeGroup& g, const Instance& inst) {
  const auto pts = set_sym_diff(inst.l1, inst.l2);
  const auto ti = tsp::make_instance(g, inst.a, inst.c, pts);
  const auto sol = tsp::solve_tree(g, ti);
  NodePath path;
  path.nodes.push_back(inst.a);
  for (const auto idx : sol.order) path.nodes.push_back(ti.points[idx]);
  path.nodes.push_back(inst.c);
  path.length = sol.value;
  return path;
}

// Rebuilds an optimal joint tour into a split-friendly one: points far from
// the waypoint are kept in tour order, points in the middle band are routed
// through b1, the waypoint, and b2. The result visits every point of both
// clouds (middle-band points shared by the clouds twice) and its length
// exceeds the input tour by at most 24 * (n_window + 1) * d.
inline NodePath surgery(const FreeGroup& g, const Instance& inst, const Certificate& cert,
                        const NodePath& alpha) {
  if (!cert.pass) throw ConfigError("surgery needs a passing certificate");
  if (alpha.nodes.size() < 2 || alpha.nodes.front() != inst.a || alpha.nodes.back() != inst.c)
    throw ConfigError("tour must run from the start to the end");
  const auto sym = set_sym_diff(inst.l1, inst.l2);
  {
    const std::set<Word> interior(alpha.nodes.begin() + 1, alpha.nodes.end() - 1);
    const std::set<Word> expected(sym.begin(), sym.end());
    if (interior != expected)
      throw ConfigError("tour interior must visit exactly the symmetric difference");
  }
  const std::int64_t actual = path_length(g, alpha.nodes);
  if (actual != alpha.length) throw ConfigError("tour length does not match its nodes");
  const std::int64_t optimal = tsp::solve_tree(g, tsp::make_instance(g, inst.a, inst.c, sym)).value;
  if (actual != optimal) throw ConfigError("tour must be an optimal joint tour");

  const std::int64_t lo = cert.r - 4 * inst.d;
  const std::int64_t hi = cert.r + 4 * inst.d;
  // Shifted partition: the band is closed here so that every point shared by
  // the clouds falls in it, while the start and end are forced outward.
  enum class Band { in, mid, out };
  const auto band_of = [&](const Word& x, std::size_t idx, std::size_t last) {
    if (idx == 0) return Band::in;
    if (idx == last) return Band::out;
    const std::int64_t dx = g.distance(inst.a, x);
    if (dx < lo) return Band::in;
    if (dx > hi) return Band::out;
    return Band::mid;
  };

  const std::size_t last = alpha.nodes.size() - 1;
  std::vector<Band> band(alpha.nodes.size());
  for (std::size_t i = 0; i < alpha.nodes.size(); ++i)
    band[i] = band_of(alpha.nodes[i], i, last);

  std::map<Word, std::size_t> first_idx;
  for (std::size_t i = 0; i < alpha.nodes.size(); ++i) first_idx.emplace(alpha.nodes[i], i);

  // Middle-band points of one cloud, tour-order first, then the points the
  // tour never visits (the shared ones) in word order.
  const auto middle_batch = [&](const std::vector<Word>& cloud) {
    std::set<Word> seen;
    std::vector<Word> pts;
    for (const auto& x : cloud) {
      const std::int64_t dx = g.distance(inst.a, x);
      if (dx < lo || dx > hi) continue;
      if (seen.insert(x).second) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end(), [&](const Word& x, const Word& y) {
      const auto ix = first_idx.find(x);
      const auto iy = first_idx.find(y);
      const bool ax = ix != first_idx.end();
      const bool ay = iy != first_idx.end();
      if (ax != ay) return ax;
      if (ax && ix->second != iy->second) return ix->second < iy->second;
      return x < y;
    });
    return pts;
  };

  std::vector<Word> out;
  for (std::size_t i = 0; i <= last; ++i) {
    if (band[i] != Band::in) continue;
    out.push_back(alpha.nodes[i]);
    if (i == last || band[i + 1] != Band::in) out.push_back(cert.b1);
  }
  for (const auto& x : middle_batch(inst.l1)) out.push_back(x);
  out.push_back(inst.b);
  for (const auto& x : middle_batch(inst.l2)) out.push_back(x);
  out.push_back(cert.b2);
  bool first_out_run = true;
  for (std::size_t i = 0; i <= last; ++i) {
    if (band[i] != Band::out) continue;
    if (!first_out_run && i > 0 && band[i - 1] != Band::out) out.push_back(cert.b2);
    out.push_back(alpha.nodes[i]);
    first_out_run = false;
  }

  NodePath beta;
  for (auto& node : out)
    if (beta.nodes.empty() || beta.nodes.back() != node) beta.nodes.push_back(std::move(node));
  beta.length = path_length(g, beta.nodes);
  return beta;
}

struct RandomInstanceParams {
  std::int64_t d_min = 1, d_max = 3;
  std::int64_t axis_min = 48, axis_max = 160;
  std::int64_t max_points = 12;
  double shared_fraction = 0.25;  // chance a doubly eligible point joins both clouds
};

namespace detail {

inline std::int32_t letter_from_index(std::uint64_t idx) {
  const std::int32_t base = static_cast<std::int32_t>(idx / 2) + 1;
  return (idx % 2 == 0) ? base : -base;
}

inline Word random_reduced_word(const FreeGroup& g, std::int64_t len, PhiloxRng& rng) {
  Word w;
  w.reserve(static_cast<std::size_t>(len));
  const std::uint64_t all = 2 * static_cast<std::uint64_t>(g.rank());
  for (std::int64_t i = 0; i < len; ++i) {
    if (w.empty()) {
      w.push_back(letter_from_index(rng.next_below(all)));
      continue;
    }
    std::uint64_t pick = rng.next_below(all - 1);
    std::int32_t letter = 0;
    for (std::uint64_t j = 0; j < all; ++j) {
      const std::int32_t cand = letter_from_index(j);
      if (cand == -w.back()) continue;
      if (pick == 0) {
        letter = cand;
        break;
      }
      --pick;
    }
    w.push_back(letter);
  }
  return w;
}

// A point within the given offset of a base vertex: multiply by a freely
// random (possibly cancelling) short word.
inline Word random_nearby(const FreeGroup& g, const Word& base, std::int64_t max_off,
                          PhiloxRng& rng) {
  const std::int64_t len = static_cast<std::int64_t>(rng.next_below(
      static_cast<std::uint64_t>(max_off) + 1));
  Word off;
  const std::uint64_t all = 2 * static_cast<std::uint64_t>(g.rank());
  for (std::int64_t i = 0; i < len; ++i) off.push_back(letter_from_index(rng.next_below(all)));
  return g.multiply(base, g.reduce(off));
}

}  // namespace detail

// One attempt at a random certified instance; returns nothing when the draw
// cannot satisfy the hypotheses. Construction keeps the waypoint within d of
// the axis and every point within d of the axis, so most draws certify.
inline std::optional<Instance> random_instance(const FreeGroup& g,
                                               const RandomInstanceParams& params,
                                               PhiloxRng& rng) {
  if (params.d_min < 1 || params.d_max < params.d_min)
    throw ConfigError("neighborhood width range is empty or nonpositive");
  if (params.axis_min < 2 || params.axis_max < params.axis_min)
    throw ConfigError("axis length range is empty or too short");
  if (params.max_points < 0) throw ConfigError("point budget must be nonnegative");

  Instance inst;
  inst.d = params.d_min + static_cast<std::int64_t>(rng.next_below(
      static_cast<std::uint64_t>(params.d_max - params.d_min) + 1));
  const std::int64_t axis_len = params.axis_min + static_cast<std::int64_t>(rng.next_below(
      static_cast<std::uint64_t>(params.axis_max - params.axis_min) + 1));
  if (axis_len < 10 * inst.d) return std::nullopt;

  const Word axis_word = detail::random_reduced_word(g, axis_len, rng);
  inst.axis.reserve(static_cast<std::size_t>(axis_len) + 1);
  for (std::int64_t i = 0; i <= axis_len; ++i)
    inst.axis.emplace_back(axis_word.begin(), axis_word.begin() + i);
  inst.a = inst.axis.front();
  inst.c = inst.axis.back();

  // Keeping the waypoint target 5d away from both ends leaves r in
  // [4d, span - 4d] even after the off-axis nudge of up to d.
  const std::int64_t r_target = 5 * inst.d + static_cast<std::int64_t>(rng.next_below(
      static_cast<std::uint64_t>(axis_len - 10 * inst.d) + 1));
  inst.b = detail::random_nearby(g, inst.axis[static_cast<std::size_t>(r_target)], inst.d, rng);

  const std::int64_t r = g.distance(inst.a, inst.b);
  const std::int64_t lo = r - 4 * inst.d;
  const std::int64_t hi = r + 4 * inst.d;

  std::set<Word> s1, s2;
  const std::int64_t n_pts = static_cast<std::int64_t>(rng.next_below(
      static_cast<std::uint64_t>(params.max_points) + 1));
  for (std::int64_t i = 0; i < n_pts; ++i) {
    const std::size_t t = static_cast<std::size_t>(rng.next_below(
        static_cast<std::uint64_t>(axis_len) + 1));
    const Word x = detail::random_nearby(g, inst.axis[t], inst.d, rng);
    const std::int64_t dx = g.distance(inst.a, x);
    const bool e1 = dx <= hi;
    const bool e2 = dx >= lo;
    if (e1 && e2) {
      if (rng.next_unit() < params.shared_fraction) {
        s1.insert(x);
        s2.insert(x);
      } else if (rng.next_unit() < 0.5) {
        s1.insert(x);
      } else {
        s2.insert(x);
      }
    } else if (e1) {
      s1.insert(x);
    } else {
      s2.insert(x);
    }
  }
  inst.l1.assign(s1.begin(), s1.end());
  inst.l2.assign(s2.begin(), s2.end());

  if (!certify(g, inst).pass) return std::nullopt;
  return inst;
}

}  // namespace lampwalk::lemma
