#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tfm/grid.hpp"
#include "tfm/mechanism.hpp"
#include "tfm/tabulated.hpp"

namespace tfm::test {

inline Money q(long long num, long long den = 1) { return Money(num, den); }

inline BidVector bids(std::initializer_list<Money> b) { return BidVector(b); }

// Tabulated mechanism whose cells come from `rule`.
inline Mechanism tabulate(const std::vector<Money>& values, std::size_t n,
                          const std::function<Outcome(const BidVector&)>& rule, std::string name = "test-table") {
  ProfileSpace space(values, n);
  std::vector<Outcome> table;
  for (std::size_t p = 0; p < space.size(); ++p) table.push_back(rule(space.profile(p)));
  return make_tabulated(std::move(name), space.grid(), n, std::move(table));
}

// Programmatic mechanism accepting any length.
inline Mechanism programmatic(std::string name, std::function<Outcome(const BidVector&)> rule) {
  return Mechanism({std::move(name), {}, Domain::continuous(), std::nullopt},
                   [rule](std::span<const Money> b) { return rule(BidVector(b.begin(), b.end())); });
}

}  // namespace tfm::test
