#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tfm/mechanism.hpp"

namespace tfm {

// All zoo rules break ties among equal bids toward the lowest index.

/// Single item: highest bid >= r wins, pays its bid, burns r.
Mechanism first_price_burned_reserve(const Money& r);
/// Every bid >= r confirmed, pays r, all burned.
Mechanism fully_burned_posted_price(const Money& r);
/// Single item: highest bid wins, pays the second-highest (0 alone), all burned.
Mechanism fully_burned_second_price();
/// f(t) = r for t <= 10 and r/2 above; t* is the largest t with at least
/// t bids strictly above f(t); the top t* bids pay f(t*), all burned.
Mechanism discount_auction(const Money& r);
/// A winner is confirmed only next to a losing bid >= 8; with some bid >= 10
/// every bid >= 8 is confirmed at 13/2. All payments burned.
Mechanism salsa_counterexample();
/// first_price_burned_reserve with payment max(bid - shade, 0) and burn
/// min(r, payment): the shaded rule used to refute collusion-proofness.
Mechanism shaded_first_price(const Money& r, const Money& shade);

enum class Property {
  individually_rational,
  burn_balanced,
  anonymous,
  consistent_tie_breaking,
  scp1_passive,
  scp1_active,
  scp2,
  scp,
  uic,
};

std::string to_string(Property p);

struct ExpectedProperty {
  Property property;
  bool holds;
  std::string provenance;
};

struct ZooEntry {
  Mechanism mechanism;
  std::vector<ExpectedProperty> expected;
};

/// Zoo names accepted by make_zoo_mechanism.
std::vector<std::string> zoo_names();

/// Builds a zoo mechanism from its name and string parameters, e.g.
/// ("first-price-burned-reserve", {{"r", "1"}}). Missing parameters use
/// defaults (r = 1, shade = 1/2); unknown names or keys throw.
Mechanism make_zoo_mechanism(const std::string& name, const std::map<std::string, std::string>& params);

ZooEntry zoo_entry(const std::string& name, const std::map<std::string, std::string>& params);

}  // namespace tfm
