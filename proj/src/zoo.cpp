#include "tfm/zoo.hpp"

#include <algorithm>
#include <cassert>
#include <stdexcept>

namespace tfm {
namespace {

// Index of the highest bid, lowest index on ties.
std::size_t top_index(std::span<const Money> b) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < b.size(); ++i) {
    if (b[i] > b[best]) best = i;
  }
  return best;
}

Outcome audited(Outcome o, std::span<const Money> b) {
#ifndef NDEBUG
  for (std::size_t i = 0; i < b.size(); ++i) {
    assert(o.burn[i] <= o.pay[i]);
    assert(o.confirmed[i] ? o.pay[i] <= b[i] : o.pay[i].is_zero());
  }
#else
  (void)b;
#endif
  return o;
}

std::map<std::string, std::string> r_param(const Money& r) { return {{"r", r.str()}}; }

}  // namespace

Mechanism first_price_burned_reserve(const Money& r) {
  return Mechanism({"first-price-burned-reserve", r_param(r), Domain::continuous(), std::nullopt},
                   [r](std::span<const Money> b) {
                     Outcome o = Outcome::nobody(b.size());
                     std::size_t w = top_index(b);
                     if (b[w] >= r) {
                       o.confirmed[w] = true;
                       o.pay[w] = b[w];
                       o.burn[w] = r;
                     }
                     return audited(std::move(o), b);
                   });
}

Mechanism shaded_first_price(const Money& r, const Money& shade) {
  return Mechanism({"shaded-first-price", {{"r", r.str()}, {"shade", shade.str()}}, Domain::continuous(),
                    std::nullopt},
                   [r, shade](std::span<const Money> b) {
                     Outcome o = Outcome::nobody(b.size());
                     std::size_t w = top_index(b);
                     if (b[w] >= r) {
                       o.confirmed[w] = true;
                       Rational p = b[w].value() - shade.value();
                       o.pay[w] = p.sign() > 0 ? Money(p) : Money(0);
                       o.burn[w] = std::min(r, o.pay[w]);
                     }
                     return audited(std::move(o), b);
                   });
}

Mechanism fully_burned_posted_price(const Money& r) {
  return Mechanism({"fully-burned-posted-price", r_param(r), Domain::continuous(), std::nullopt},
                   [r](std::span<const Money> b) {
                     Outcome o = Outcome::nobody(b.size());
                     for (std::size_t i = 0; i < b.size(); ++i) {
                       if (b[i] >= r) {
                         o.confirmed[i] = true;
                         o.pay[i] = r;
                         o.burn[i] = r;
                       }
                     }
                     return audited(std::move(o), b);
                   });
}

Mechanism fully_burned_second_price() {
  return Mechanism({"fully-burned-second-price", {}, Domain::continuous(), std::nullopt},
                   [](std::span<const Money> b) {
                     Outcome o = Outcome::nobody(b.size());
                     std::size_t w = top_index(b);
                     Money second(0);
                     for (std::size_t i = 0; i < b.size(); ++i) {
                       if (i != w) second = std::max(second, b[i]);
                     }
                     o.confirmed[w] = true;
                     o.pay[w] = second;
                     o.burn[w] = second;
                     return audited(std::move(o), b);
                   });
}

Mechanism discount_auction(const Money& r) {
  if (r.is_zero()) throw std::invalid_argument("discount auction needs r > 0");
  return Mechanism({"discount-auction", r_param(r), Domain::continuous(), std::nullopt},
                   [r](std::span<const Money> b) {
                     const std::size_t n = b.size();
                     auto f = [&](std::size_t t) { return t <= 10 ? r : Money(r.value() / 2); };
                     std::size_t t_star = 0;
                     for (std::size_t t = n; t >= 1; --t) {
                       Money ft = f(t);
                       auto above = static_cast<std::size_t>(
                           std::count_if(b.begin(), b.end(), [&](const Money& x) { return x > ft; }));
                       if (above >= t) {
                         t_star = t;
                         break;
                       }
                     }
                     Outcome o = Outcome::nobody(n);
                     if (t_star == 0) return o;
                     std::vector<std::size_t> order(n);
                     for (std::size_t i = 0; i < n; ++i) order[i] = i;
                     std::stable_sort(order.begin(), order.end(),
                                      [&](std::size_t x, std::size_t y) { return b[x] > b[y]; });
                     Money price = f(t_star);
                     for (std::size_t k = 0; k < t_star; ++k) {
                       o.confirmed[order[k]] = true;
                       o.pay[order[k]] = price;
                       o.burn[order[k]] = price;
                     }
                     return audited(std::move(o), b);
                   });
}

Mechanism salsa_counterexample() {
  return Mechanism({"salsa-counterexample", {}, Domain::continuous(), std::nullopt},
                   [](std::span<const Money> b) {
                     const std::size_t n = b.size();
                     Outcome o = Outcome::nobody(n);
                     std::size_t w = top_index(b);
                     bool loser_at_8 = false;
                     for (std::size_t i = 0; i < n; ++i) {
                       if (i != w && b[i] >= Money(8)) loser_at_8 = true;
                     }
                     if (!loser_at_8) return o;
                     if (b[w] >= Money(10)) {
                       for (std::size_t i = 0; i < n; ++i) {
                         if (b[i] >= Money(8)) {
                           o.confirmed[i] = true;
                           o.pay[i] = Money(13, 2);
                           o.burn[i] = Money(13, 2);
                         }
                       }
                     } else {
                       o.confirmed[w] = true;
                       o.pay[w] = b[w];
                       o.burn[w] = b[w];
                     }
                     return audited(std::move(o), b);
                   });
}

std::string to_string(Property p) {
  switch (p) {
    case Property::individually_rational: return "IR";
    case Property::burn_balanced: return "BB";
    case Property::anonymous: return "anonymous";
    case Property::consistent_tie_breaking: return "consistent-tie-breaking";
    case Property::scp1_passive: return "1-SCP-passive";
    case Property::scp1_active: return "1-SCP-active";
    case Property::scp2: return "2-SCP";
    case Property::scp: return "SCP";
    case Property::uic: return "UIC";
  }
  return "?";
}

std::vector<std::string> zoo_names() {
  return {"first-price-burned-reserve", "fully-burned-posted-price", "fully-burned-second-price",
          "discount-auction", "salsa-counterexample", "shaded-first-price"};
}

namespace {

Money param(const std::map<std::string, std::string>& params, const std::string& key, const Money& fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : Money::parse(it->second);
}

void only_keys(const std::string& name, const std::map<std::string, std::string>& params,
               std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw std::invalid_argument("mechanism " + name + " has no parameter '" + k + "'");
  }
}

}  // namespace

Mechanism make_zoo_mechanism(const std::string& name, const std::map<std::string, std::string>& params) {
  if (name == "first-price-burned-reserve") {
    only_keys(name, params, {"r"});
    return first_price_burned_reserve(param(params, "r", Money(1)));
  }
  if (name == "fully-burned-posted-price") {
    only_keys(name, params, {"r"});
    return fully_burned_posted_price(param(params, "r", Money(1)));
  }
  if (name == "fully-burned-second-price") {
    only_keys(name, params, {});
    return fully_burned_second_price();
  }
  if (name == "discount-auction") {
    only_keys(name, params, {"r"});
    return discount_auction(param(params, "r", Money(1)));
  }
  if (name == "salsa-counterexample") {
    only_keys(name, params, {});
    return salsa_counterexample();
  }
  if (name == "shaded-first-price") {
    only_keys(name, params, {"r", "shade"});
    return shaded_first_price(param(params, "r", Money(1)), param(params, "shade", Money(1, 2)));
  }
  throw std::invalid_argument("unknown zoo mechanism '" + name + "'");
}

ZooEntry zoo_entry(const std::string& name, const std::map<std::string, std::string>& params) {
  ZooEntry e{make_zoo_mechanism(name, params), {}};
  auto add = [&](Property p, bool holds, std::string why) { e.expected.push_back({p, holds, std::move(why)}); };
  add(Property::individually_rational, true, "rule pays at most the bid and charges unconfirmed bids nothing");
  add(Property::burn_balanced, true, "burn never exceeds payment by construction");
  add(Property::anonymous, true, "rule depends on the bid multiset; ties go to the lowest index");
  if (name == "first-price-burned-reserve") {
    add(Property::consistent_tie_breaking, true, "exhaustive check on small grids");
    add(Property::scp, true, "single-item characterization of collusion-proof auctions");
    add(Property::scp2, true, "implied by SCP");
  } else if (name == "fully-burned-posted-price") {
    add(Property::consistent_tie_breaking, true, "confirmation depends only on the own bid");
    add(Property::uic, true, "posted price with a critical bid");
    add(Property::scp, true, "posted-price theorem: miner revenue is always 0");
  } else if (name == "fully-burned-second-price") {
    add(Property::scp1_passive, true, "active/passive separation lemma");
    add(Property::scp1_active, false, "miner and winner drop the second-highest bid");
  } else if (name == "salsa-counterexample") {
    add(Property::consistent_tie_breaking, false, "raising a losing bid to 8 flips the winner");
    add(Property::scp2, false, "(10,1) -> (9,8) gains 1 for two bidders");
  } else if (name == "shaded-first-price") {
    add(Property::scp1_passive, false, "a loser outbids the shaded winner and the miner gains the difference");
  }
  return e;
}

}  // namespace tfm
