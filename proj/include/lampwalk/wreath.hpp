#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lampwalk/errors.hpp"
#include "lampwalk/tsp.hpp"

namespace lampwalk {

// Restricted wreath product of a lamp group over a base group. Elements are a
// finitely supported lamp assignment over base positions plus a base position.
// Invariant: the lamp map never stores identity lamp values, so equality of
// elements is equality of the representation.
template <class Lamp, class Base>
class Wreath {
 public:
  using LampValue = typename Lamp::Element;
  using BaseElement = typename Base::Element;

  struct Element {
    std::map<BaseElement, LampValue> lamps;
    BaseElement pos;

    bool operator==(const Element& o) const { return pos == o.pos && lamps == o.lamps; }
    bool operator!=(const Element& o) const { return !(*this == o); }
    bool operator<(const Element& o) const {
      if (pos != o.pos) return pos < o.pos;
      return lamps < o.lamps;
    }
  };

  Wreath(Lamp lamp, Base base) : lamp_(std::move(lamp)), base_(std::move(base)) {}

  const Lamp& lamp() const { return lamp_; }
  const Base& base() const { return base_; }

  Element identity() const { return Element{{}, base_.identity()}; }

  // (f, h)(f', h') = (f * h.f', h h') where (h.f')(x) = f'(h^-1 x), so the
  // second factor's lamp at site s lands at h s.
  Element multiply(const Element& x, const Element& y) const {
    Element out = x;
    for (const auto& [site, v] : y.lamps) set_lamp(out, base_.multiply(x.pos, site), v);
    out.pos = base_.multiply(x.pos, y.pos);
    return out;
  }

  // (f, h)^-1 = (h^-1.f^-1, h^-1): the lamp at site s moves to h^-1 s and is
  // inverted.
  Element inverse(const Element& x) const {
    Element out;
    out.pos = base_.inverse(x.pos);
    for (const auto& [site, v] : x.lamps)
      out.lamps.emplace(base_.multiply(out.pos, site), lamp_.inverse(v));
    return out;
  }

  std::int64_t lamp_cost(const Element& x) const {
    std::int64_t s = 0;
    for (const auto& [site, v] : x.lamps) s += lamp_.cost(v);
    return s;
  }

  // Word length over the standard generators: cheapest tour from the identity
  // through every lit site to the final position, plus the cost of setting
  // the lamps. Exact; throws GuardError when the tour needs the subset DP and
  // the support exceeds its cap.
  std::int64_t word_length(const Element& x) const {
    std::vector<BaseElement> sites;
    sites.reserve(x.lamps.size());
    for (const auto& [site, v] : x.lamps) sites.push_back(site);
    const auto inst = tsp::make_instance(base_, base_.identity(), x.pos, sites);
    return tsp::solve(base_, inst).value + lamp_cost(x);
  }

  // Standard generators: one per nontrivial lamp move at the current
  // position, one per base generator.
  std::vector<Element> generators() const {
    std::vector<Element> out;
    for (const auto& v : lamp_.generators())
      out.push_back(Element{{{base_.identity(), v}}, base_.identity()});
    for (const auto& b : base_.generators()) out.push_back(Element{{}, b});
    return out;
  }

  // Breadth-first ball of the given radius around the identity, sorted by
  // (distance, element). Guards against runaway growth.
  std::vector<std::pair<Element, std::int64_t>> bfs_ball(
      std::int64_t radius, std::size_t max_elements = 10'000'000) const {
    if (radius < 0) throw ConfigError("ball radius must be nonnegative");
    const auto gens = generators();
    std::map<Element, std::int64_t> dist;
    std::deque<Element> frontier;
    dist.emplace(identity(), 0);
    frontier.push_back(identity());
    while (!frontier.empty()) {
      const Element cur = std::move(frontier.front());
      frontier.pop_front();
      const std::int64_t d = dist.at(cur);
      if (d == radius) continue;
      for (const auto& g : gens) {
        Element next = multiply(cur, g);
        auto [it, inserted] = dist.emplace(std::move(next), d + 1);
        if (inserted) {
          if (dist.size() > max_elements) throw GuardError("ball exceeds the element guard");
          frontier.push_back(it->first);
        }
      }
    }
    std::vector<std::pair<Element, std::int64_t>> out(dist.begin(), dist.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second < b.second;
      return a.first < b.first;
    });
    return out;
  }

  // Text form "site=value+site=value;pos" with sites in map order; an element
  // with no lamps is ";pos" and the identity is ";1".
  std::string str(const Element& x) const {
    std::string out;
    bool first = true;
    for (const auto& [site, v] : x.lamps) {
      if (!first) out.push_back('+');
      first = false;
      out += base_.str(site);
      out.push_back('=');
      out += lamp_.str_value(v);
    }
    out.push_back(';');
    out += base_.str(x.pos);
    return out;
  }

  Element parse(const std::string& s) const {
    const auto semi = s.find(';');
    if (semi == std::string::npos)
      throw ConfigError("element '" + s + "' is missing the ';' between lamps and position");
    Element out = identity();
    out.pos = base_.parse(s.substr(semi + 1));
    std::size_t begin = 0;
    while (begin < semi) {
      const std::size_t sep = std::min(s.find('+', begin), semi);
      const std::string item = s.substr(begin, sep - begin);
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw ConfigError("lamp entry '" + item + "' is missing '='");
      const auto site = base_.parse(item.substr(0, eq));
      const auto value = lamp_.parse_value(item.substr(eq + 1));
      set_lamp(out, site, value);
      begin = sep + 1;
    }
    return out;
  }

 private:
  void set_lamp(Element& e, const BaseElement& site, const LampValue& v) const {
    auto it = e.lamps.find(site);
    const LampValue merged = it == e.lamps.end() ? v : lamp_.multiply(it->second, v);
    if (merged == lamp_.identity()) {
      if (it != e.lamps.end()) e.lamps.erase(it);
    } else if (it == e.lamps.end()) {
      e.lamps.emplace(site, merged);
    } else {
      it->second = merged;
    }
  }

  Lamp lamp_;
  Base base_;
};

}  // namespace lampwalk
