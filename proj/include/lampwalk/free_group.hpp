#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lampwalk/errors.hpp"

namespace lampwalk {

// Reduced word in a free group: letters +i / -i stand for the i-th generator
// and its inverse, i in 1..rank. The empty word is the identity.
using Word = std::vector<std::int32_t>;

// Letters shared by two reduced words before they first diverge.
inline std::size_t common_prefix(const Word& a, const Word& b) {
  const std::size_t m = std::min(a.size(), b.size());
  std::size_t i = 0;
  while (i < m && a[i] == b[i]) ++i;
  return i;
}

class FreeGroup {
 public:
  using Element = Word;

  struct Projection {
    Word vertex;
    std::int64_t distance = 0;
    std::size_t index = 0;  // position of the vertex in the segment
  };

  explicit FreeGroup(int rank) : rank_(rank) {
    if (rank < 2) throw ConfigError("free group rank must be at least 2");
  }

  int rank() const { return rank_; }

  Element identity() const { return {}; }

  // Single-letter words, each generator followed by its inverse, so the
  // inverse of generators()[i] is generators()[i ^ 1].
  std::vector<Element> generators() const {
    std::vector<Element> out;
    out.reserve(2 * static_cast<std::size_t>(rank_));
    for (std::int32_t i = 1; i <= rank_; ++i) {
      out.push_back({i});
      out.push_back({-i});
    }
    return out;
  }

  bool is_reduced(const Word& w) const {
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] == 0 || w[i] > rank_ || w[i] < -rank_) return false;
      if (i > 0 && w[i] == -w[i - 1]) return false;
    }
    return true;
  }

  // Stack cancellation of adjacent inverse pairs. Confluent: any cancellation
  // order yields the same reduced word.
  Word reduce(const Word& raw) const {
    Word out;
    out.reserve(raw.size());
    for (const std::int32_t letter : raw) {
      if (letter == 0 || letter > rank_ || letter < -rank_)
        throw ConfigError("letter index out of range for free group rank");
      if (!out.empty() && out.back() == -letter)
        out.pop_back();
      else
        out.push_back(letter);
    }
    return out;
  }

  Word multiply(const Word& a, const Word& b) const {
    std::size_t cut = 0;  // boundary cancellation length
    while (cut < a.size() && cut < b.size() && a[a.size() - 1 - cut] == -b[cut]) ++cut;
    Word out(a.begin(), a.end() - static_cast<std::ptrdiff_t>(cut));
    out.insert(out.end(), b.begin() + static_cast<std::ptrdiff_t>(cut), b.end());
    return out;
  }

  Word inverse(const Word& a) const {
    Word out(a.rbegin(), a.rend());
    for (auto& letter : out) letter = -letter;
    return out;
  }

  std::int64_t length(const Word& a) const { return static_cast<std::int64_t>(a.size()); }

  // d(a,b) = |a| + |b| - 2*lcp(a,b): inverting a against b cancels exactly the
  // common prefix when both are reduced.
  std::int64_t distance(const Word& a, const Word& b) const {
    const std::size_t p = common_prefix(a, b);
    return static_cast<std::int64_t>(a.size() + b.size()) - 2 * static_cast<std::int64_t>(p);
  }

  // Vertices of the unique geodesic from a to b, endpoints included.
  std::vector<Word> geodesic(const Word& a, const Word& b) const {
    const std::size_t p = common_prefix(a, b);
    std::vector<Word> path;
    path.reserve(a.size() - p + b.size() - p + 1);
    for (std::size_t i = a.size(); i > p; --i)
      path.emplace_back(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(i));
    for (std::size_t i = p; i <= b.size(); ++i)
      path.emplace_back(b.begin(), b.begin() + static_cast<std::ptrdiff_t>(i));
    return path;
  }

  // Nearest vertex of the segment; ties go to the lexicographically smallest
  // vertex (cannot occur on a geodesic here, where the minimum is unique).
  Projection project_to_geodesic(const Word& x, const std::vector<Word>& segment) const {
    if (segment.empty()) throw ConfigError("cannot project onto an empty segment");
    Projection best{segment[0], distance(x, segment[0]), 0};
    for (std::size_t i = 1; i < segment.size(); ++i) {
      const std::int64_t d = distance(x, segment[i]);
      if (d < best.distance || (d == best.distance && segment[i] < best.vertex))
        best = {segment[i], d, i};
    }
    return best;
  }

  // "abA" parses to [1,2,-1]; capitals are inverses; "" and "1" are the
  // identity. The result is reduced.
  Word parse(std::string_view s) const {
    if (s == "1") return {};
    Word raw;
    raw.reserve(s.size());
    for (const char c : s) {
      if (c >= 'a' && c <= 'z')
        raw.push_back(c - 'a' + 1);
      else if (c >= 'A' && c <= 'Z')
        raw.push_back(-(c - 'A' + 1));
      else
        throw ConfigError(std::string("invalid word character '") + c + "'");
      if (raw.back() > rank_ || raw.back() < -rank_)
        throw ConfigError(std::string("letter '") + c + "' outside generator range");
    }
    return reduce(raw);
  }

  std::string str(const Word& w) const {
    if (w.empty()) return "1";
    std::string out;
    out.reserve(w.size());
    for (const std::int32_t letter : w)
      out.push_back(letter > 0 ? static_cast<char>('a' + letter - 1)
                               : static_cast<char>('A' - letter - 1));
    return out;
  }

 private:
  int rank_;
};

// Lazily interned ball of the Cayley tree of a free group. Node 0 is the
// identity; every other node knows its parent, last letter and depth, so
// distances and meets reduce to pointer walks. Used by the walk engine to
// avoid materializing one word per lamp site.
class TreeArena {
 public:
  static constexpr std::int32_t kRoot = 0;

  explicit TreeArena(int rank) : rank_(rank) {
    nodes_.push_back({-1, 0, 0});
    children_.assign(2 * static_cast<std::size_t>(rank_), -1);
  }

  std::int32_t step(std::int32_t node, std::int32_t letter) {
    const Node& cur = nodes_[static_cast<std::size_t>(node)];
    if (cur.letter == -letter) return cur.parent;
    const std::size_t slot =
        2 * static_cast<std::size_t>(rank_) * static_cast<std::size_t>(node) + letter_slot(letter);
    std::int32_t child = children_[slot];
    if (child < 0) {
      child = static_cast<std::int32_t>(nodes_.size());
      nodes_.push_back({node, letter, cur.depth + 1});
      children_.resize(children_.size() + 2 * static_cast<std::size_t>(rank_), -1);
      children_[slot] = child;
    }
    return child;
  }

  std::int32_t walk(std::int32_t node, const Word& w) {
    for (const std::int32_t letter : w) node = step(node, letter);
    return node;
  }

  std::int32_t parent(std::int32_t node) const { return nodes_[static_cast<std::size_t>(node)].parent; }
  std::int32_t letter(std::int32_t node) const { return nodes_[static_cast<std::size_t>(node)].letter; }
  std::int64_t depth(std::int32_t node) const { return nodes_[static_cast<std::size_t>(node)].depth; }
  std::size_t size() const { return nodes_.size(); }

  std::int32_t lca(std::int32_t a, std::int32_t b) const {
    while (depth(a) > depth(b)) a = parent(a);
    while (depth(b) > depth(a)) b = parent(b);
    while (a != b) {
      a = parent(a);
      b = parent(b);
    }
    return a;
  }

  std::int64_t dist(std::int32_t a, std::int32_t b) const {
    return depth(a) + depth(b) - 2 * depth(lca(a, b));
  }

  Word word(std::int32_t node) const {
    Word out(static_cast<std::size_t>(depth(node)));
    for (auto i = out.size(); node != kRoot; node = parent(node)) out[--i] = letter(node);
    return out;
  }

 private:
  struct Node {
    std::int32_t parent;
    std::int32_t letter;
    std::int32_t depth;
  };

  std::size_t letter_slot(std::int32_t letter) const {
    return 2 * static_cast<std::size_t>((letter > 0 ? letter : -letter) - 1) +
           static_cast<std::size_t>(letter < 0);
  }

  int rank_;
  std::vector<Node> nodes_;
  std::vector<std::int32_t> children_;
};

}  // namespace lampwalk
