#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#include "lampwalk/errors.hpp"

namespace lampwalk {

// Finite lamp group given by an explicit multiplication table. The word cost
// of a nontrivial value is 1: the generating set contains every nontrivial
// element.
class FiniteLampGroup {
 public:
  using Element = std::int32_t;

  FiniteLampGroup(std::int32_t order, std::vector<std::int32_t> mul)
      : order_(order), mul_(std::move(mul)) {
    if (order < 1 || order > 256) throw ConfigError("lamp table order must be in 1..256");
    if (mul_.size() != static_cast<std::size_t>(order) * static_cast<std::size_t>(order))
      throw ConfigError("lamp table must be order x order");
    for (const auto v : mul_)
      if (v < 0 || v >= order) throw ConfigError("lamp table entry out of range");
    id_ = -1;
    for (std::int32_t e = 0; e < order; ++e) {
      bool ok = true;
      for (std::int32_t x = 0; x < order && ok; ++x)
        ok = at(e, x) == x && at(x, e) == x;
      if (ok) {
        id_ = e;
        break;
      }
    }
    if (id_ < 0) throw ConfigError("lamp table has no identity element");
    inv_.assign(static_cast<std::size_t>(order), -1);
    for (std::int32_t a = 0; a < order; ++a) {
      for (std::int32_t b = 0; b < order; ++b)
        if (at(a, b) == id_ && at(b, a) == id_) {
          inv_[static_cast<std::size_t>(a)] = b;
          break;
        }
      if (inv_[static_cast<std::size_t>(a)] < 0)
        throw ConfigError("lamp table element has no inverse");
    }
    for (std::int32_t a = 0; a < order; ++a)
      for (std::int32_t b = 0; b < order; ++b)
        for (std::int32_t c = 0; c < order; ++c)
          if (at(at(a, b), c) != at(a, at(b, c)))
            throw ConfigError("lamp table is not associative");
  }

  static FiniteLampGroup z2() { return FiniteLampGroup(2, {0, 1, 1, 0}); }

  std::int32_t order() const { return order_; }
  Element identity() const { return id_; }
  Element multiply(Element a, Element b) const { return at(a, b); }
  Element inverse(Element a) const { return inv_[static_cast<std::size_t>(a)]; }
  std::int64_t cost(Element a) const { return a == id_ ? 0 : 1; }

  std::vector<Element> generators() const {
    std::vector<Element> out;
    for (std::int32_t a = 0; a < order_; ++a)
      if (a != id_) out.push_back(a);
    return out;
  }

  std::string str_value(Element a) const { return std::to_string(a); }

  Element parse_value(const std::string& s) const {
    std::size_t pos = 0;
    int v;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      throw ConfigError("lamp value '" + s + "' is not an integer");
    }
    if (pos != s.size() || v < 0 || v >= order_)
      throw ConfigError("lamp value '" + s + "' out of range");
    return v;
  }

 private:
  Element at(Element a, Element b) const {
    return mul_[static_cast<std::size_t>(a) * static_cast<std::size_t>(order_) +
                static_cast<std::size_t>(b)];
  }

  std::int32_t order_;
  std::vector<std::int32_t> mul_;
  std::int32_t id_;
  std::vector<std::int32_t> inv_;
};

// Z^d lamp values; the word cost is the l1 norm over the unit generators.
class ZdLampGroup {
 public:
  using Element = std::vector<std::int64_t>;

  explicit ZdLampGroup(int dim) : dim_(dim) {
    if (dim < 1) throw ConfigError("lamp lattice dimension must be at least 1");
  }

  int dim() const { return dim_; }
  Element identity() const { return Element(static_cast<std::size_t>(dim_), 0); }

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

  std::int64_t cost(const Element& a) const {
    std::int64_t s = 0;
    for (const auto v : a) s += std::abs(v);
    return s;
  }

  std::vector<Element> generators() const {
    std::vector<Element> out;
    for (int i = 0; i < dim_; ++i)
      for (const std::int64_t sign : {std::int64_t{1}, std::int64_t{-1}}) {
        Element e = identity();
        e[static_cast<std::size_t>(i)] = sign;
        out.push_back(std::move(e));
      }
    return out;
  }

  // Components joined by ':' so values stay comma-free inside CSV cells.
  std::string str_value(const Element& a) const {
    std::string out;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i) out.push_back(':');
      out += std::to_string(a[i]);
    }
    return out;
  }

  Element parse_value(const std::string& s) const {
    Element out;
    std::size_t begin = 0;
    while (begin <= s.size()) {
      const std::size_t sep = std::min(s.find(':', begin), s.size());
      try {
        std::size_t pos = 0;
        const std::string piece = s.substr(begin, sep - begin);
        out.push_back(std::stoll(piece, &pos));
        if (pos != piece.size()) throw ConfigError("");
      } catch (const std::exception&) {
        throw ConfigError("lamp value '" + s + "' is not a ':'-joined integer vector");
      }
      begin = sep + 1;
    }
    if (out.size() != static_cast<std::size_t>(dim_))
      throw ConfigError("lamp value '" + s + "' has wrong dimension");
    return out;
  }

 private:
  int dim_;
};

}  // namespace lampwalk
