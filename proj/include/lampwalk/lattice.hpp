#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <vector>

#include "lampwalk/errors.hpp"

namespace lampwalk {

// Z^d with the standard generators, so the word metric is the l1 metric.
class IntegerLattice {
 public:
  using Element = std::vector<std::int64_t>;

  struct Projection {
    Element vertex;
    std::int64_t distance = 0;
    std::size_t index = 0;  // position of the vertex in the segment
  };

  explicit IntegerLattice(int dim) : dim_(dim) {
    if (dim < 1) throw ConfigError("lattice dimension must be at least 1");
  }

  int dim() const { return dim_; }

  Element identity() const { return Element(static_cast<std::size_t>(dim_), 0); }

  // Unit steps, each followed by its inverse, so the inverse of
  // generators()[i] is generators()[i ^ 1].
  std::vector<Element> generators() const {
    std::vector<Element> out;
    out.reserve(2 * static_cast<std::size_t>(dim_));
    for (int i = 0; i < dim_; ++i)
      for (const std::int64_t sign : {std::int64_t{1}, std::int64_t{-1}}) {
        Element e = identity();
        e[static_cast<std::size_t>(i)] = sign;
        out.push_back(std::move(e));
      }
    return out;
  }

  Element multiply(const Element& a, const Element& b) const {
    Element out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
  }

  Element inverse(const Element& a) const {
    Element out = a;
    for (auto& v : out) v = -v;
    return out;
  }

  std::int64_t length(const Element& a) const {
    std::int64_t s = 0;
    for (const auto v : a) s += std::abs(v);
    return s;
  }

  std::int64_t distance(const Element& a, const Element& b) const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return s;
  }

  // Canonical geodesic: adjust coordinate 0 one unit at a time, then
  // coordinate 1, and so on. Geodesics are not unique for d >= 2; this picks
  // a fixed representative.
  std::vector<Element> geodesic(const Element& a, const Element& b) const {
    std::vector<Element> path{a};
    Element cur = a;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const std::int64_t dir = b[i] > cur[i] ? 1 : -1;
      while (cur[i] != b[i]) {
        cur[i] += dir;
        path.push_back(cur);
      }
    }
    return path;
  }

  // Nearest vertex of the segment; ties go to the lexicographically smallest
  // vertex.
  Projection project_to_geodesic(const Element& x, const std::vector<Element>& segment) const {
    if (segment.empty()) throw ConfigError("cannot project onto an empty segment");
    Projection best{segment[0], distance(x, segment[0]), 0};
    for (std::size_t i = 1; i < segment.size(); ++i) {
      const std::int64_t d = distance(x, segment[i]);
      if (d < best.distance || (d == best.distance && segment[i] < best.vertex))
        best = {segment[i], d, i};
    }
    return best;
  }

  // Same letter syntax as the free group: 'a' is +e1, 'B' is -e2, and so on.
  Element parse(std::string_view s) const {
    Element out = identity();
    if (s == "1") return out;
    for (const char c : s) {
      int coord;
      std::int64_t delta;
      if (c >= 'a' && c <= 'z') {
        coord = c - 'a';
        delta = 1;
      } else if (c >= 'A' && c <= 'Z') {
        coord = c - 'A';
        delta = -1;
      } else {
        throw ConfigError(std::string("invalid word character '") + c + "'");
      }
      if (coord >= dim_)
        throw ConfigError(std::string("letter '") + c + "' outside lattice dimension");
      out[static_cast<std::size_t>(coord)] += delta;
    }
    return out;
  }

  std::string str(const Element& a) const {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const char pos = static_cast<char>('a' + i);
      const char neg = static_cast<char>('A' + i);
      for (std::int64_t v = a[i]; v > 0; --v) out.push_back(pos);
      for (std::int64_t v = a[i]; v < 0; ++v) out.push_back(neg);
    }
    return out.empty() ? "1" : out;
  }

 private:
  int dim_;
};

}  // namespace lampwalk
