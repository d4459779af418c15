#include "tfm/axioms.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <tuple>

#include "tfm/grid.hpp"
#include "tfm/utility.hpp"

namespace tfm {
namespace {

CheckReport violation(CheckReport r, BidVector profile, std::string message) {
  r.pass = false;
  r.profile = std::move(profile);
  r.message = std::move(message);
  return r;
}

using Row = std::tuple<Money, bool, Money, Money>;

std::vector<Row> outcome_rows(const BidVector& b, const Outcome& o) {
  std::vector<Row> rows;
  rows.reserve(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) rows.emplace_back(b[i], o.confirmed[i], o.pay[i], o.burn[i]);
  std::sort(rows.begin(), rows.end());
  return rows;
}

BidVector permuted(const BidVector& b, const std::vector<std::size_t>& perm) {
  BidVector out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] = b[perm[i]];
  return out;
}

}  // namespace

nlohmann::json CheckReport::to_json() const {
  nlohmann::json j;
  j["check"] = check;
  j["pass"] = pass;
  j["cases"] = cases;
  j["sampled"] = sampled;
  if (profile) j["profile"] = bids_to_json(*profile);
  if (other_profile) j["other_profile"] = bids_to_json(*other_profile);
  if (bidder) j["bidder"] = *bidder;
  if (!message.empty()) j["message"] = message;
  if (witness) {
    j["witness"] = witness_to_json(*witness);
    j["witness_verified"] = witness_verified;
  }
  return j;
}

CheckReport check_individual_rationality(const Mechanism& mech, const std::vector<Money>& grid,
                                         std::size_t n) {
  ProfileSpace space(grid, n);
  CheckReport r{.check = "individual-rationality"};
  for (std::size_t p = 0; p < space.size(); ++p) {
    BidVector b = space.profile(p);
    Outcome o = mech.evaluate(b);
    ++r.cases;
    for (std::size_t i = 0; i < n; ++i) {
      if (!o.confirmed[i] && !o.pay[i].is_zero()) {
        r.bidder = i;
        return violation(std::move(r), b, "unconfirmed bidder " + std::to_string(i) + " pays " + o.pay[i].str());
      }
      SignedMoney u = bidder_utility(o, Setting::honest(b), i, b[i]);
      if (u.sign() < 0) {
        r.bidder = i;
        return violation(std::move(r), b,
                         "bidder " + std::to_string(i) + " has utility " + u.str() + " at its own bid");
      }
    }
  }
  return r;
}

CheckReport check_burn_balance(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n) {
  ProfileSpace space(grid, n);
  CheckReport r{.check = "burn-balance"};
  for (std::size_t p = 0; p < space.size(); ++p) {
    BidVector b = space.profile(p);
    Outcome o = mech.evaluate(b);
    ++r.cases;
    for (std::size_t i = 0; i < n; ++i) {
      if (o.burn[i] > o.pay[i]) {
        r.bidder = i;
        return violation(std::move(r), b,
                         "bidder " + std::to_string(i) + " burns " + o.burn[i].str() + " > pays " +
                             o.pay[i].str());
      }
    }
  }
  return r;
}

CheckReport check_anonymity_on(const Mechanism& mech, const std::vector<BidVector>& profiles) {
  CheckReport r{.check = "anonymity"};
  for (const auto& b : profiles) {
    const auto base = outcome_rows(b, mech.evaluate(b));
    std::vector<std::size_t> perm(b.size());
    std::iota(perm.begin(), perm.end(), 0);
    do {
      BidVector pb = permuted(b, perm);
      ++r.cases;
      if (outcome_rows(pb, mech.evaluate(pb)) != base) {
        r.other_profile = pb;
        return violation(std::move(r), b, "permuting the bids changes the outcome multiset");
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return r;
}

CheckReport check_anonymity(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n,
                            std::uint64_t seed, std::size_t sample_limit) {
  ProfileSpace space(grid, n);
  if (n < 5) {
    std::vector<BidVector> all;
    all.reserve(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) all.push_back(space.profile(p));
    return check_anonymity_on(mech, all);
  }
  CheckReport r{.check = "anonymity", .sampled = true};
  std::mt19937_64 rng(seed);
  std::optional<CheckReport> first;
  std::size_t first_index = 0;
  for (std::size_t s = 0; s < sample_limit; ++s) {
    std::size_t p = std::uniform_int_distribution<std::size_t>(0, space.size() - 1)(rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    BidVector b = space.profile(p);
    BidVector pb = permuted(b, perm);
    ++r.cases;
    if (outcome_rows(pb, mech.evaluate(pb)) != outcome_rows(b, mech.evaluate(b))) {
      if (!first || p < first_index) {
        first = violation(r, b, "permuting the bids changes the outcome multiset");
        first->other_profile = pb;
        first_index = p;
      }
    }
  }
  if (first) {
    first->cases = r.cases;
    return *first;
  }
  return r;
}

std::vector<UtilityClass> classify_zero_utility(const Mechanism& mech, const Setting& s) {
  Outcome o = mech.evaluate(s);
  std::vector<UtilityClass> out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.push_back(is_zero_utility(o, s.bids(), i) ? UtilityClass::zero_utility
                                                   : UtilityClass::non_zero_utility);
  }
  return out;
}

CheckReport check_consistent_tie_breaking(const Mechanism& mech, const std::vector<Money>& grid,
                                          std::size_t n) {
  ProfileSpace space(grid, n);
  const auto table = materialize(mech, space);
  CheckReport r{.check = "consistent-tie-breaking"};
  // Visit (profile, mover, new bid) in lexicographic order of the first profile.
  for (std::size_t p = 0; p < space.size(); ++p) {
    auto d = space.digits(p);
    const Outcome& oa = table[p];
    BidVector a = space.profile(p);
    for (std::size_t j = 0; j < n; ++j) {
      if (oa.confirmed[j]) continue;
      for (std::size_t v = 0; v < space.k(); ++v) {
        if (v == d[j]) continue;
        auto e = d;
        e[j] = v;
        std::size_t q = space.index(e);
        const Outcome& ob = table[q];
        if (ob.confirmed[j]) continue;
        ++r.cases;
        BidVector b = space.profile(q);
        for (std::size_t i = 0; i < n; ++i) {
          if (i == j) continue;
          if (is_zero_utility(oa, a, i) && is_zero_utility(ob, b, i) && oa.confirmed[i] != ob.confirmed[i]) {
            r.bidder = i;
            r.other_profile = b;
            return violation(std::move(r), a,
                             "bidder " + std::to_string(j) + " moving " + a[j].str() + " -> " + b[j].str() +
                                 " while unconfirmed flips zero-utility bidder " + std::to_string(i));
          }
        }
      }
    }
  }
  return r;
}

CheckReport check_prefix_confirmation(const Mechanism& mech, const std::vector<Money>& grid,
                                      std::size_t n) {
  ProfileSpace space(grid, n);
  CheckReport r{.check = "prefix-confirmation"};
  for (std::size_t p = 0; p < space.size(); ++p) {
    BidVector b = space.profile(p);
    Outcome o = mech.evaluate(b);
    ++r.cases;
    for (std::size_t i = 0; i < n; ++i) {
      if (o.confirmed[i]) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!o.confirmed[j] || !(b[i] > b[j])) continue;
        // Bidders i and j swap bids so the higher value takes the confirmed slot.
        SideContract sc;
        sc.coalition = normalized({i, j});
        sc.new_bids = {{i, b[j]}, {j, b[i]}};
        Witness w = make_witness(mech, Setting::honest(b), sc);
        r.witness_verified = verify_witness(mech, w);
        r.witness = std::move(w);
        r.bidder = i;
        return violation(std::move(r), b,
                         "bid " + b[i].str() + " of bidder " + std::to_string(i) +
                             " is unconfirmed while lower bid " + b[j].str() + " of bidder " +
                             std::to_string(j) + " is confirmed");
      }
    }
  }
  return r;
}

std::vector<CheckReport> check_all_axioms(const Mechanism& mech, const std::vector<Money>& grid,
                                          std::size_t n) {
  return {check_individual_rationality(mech, grid, n), check_burn_balance(mech, grid, n),
          check_anonymity(mech, grid, n), check_consistent_tie_breaking(mech, grid, n),
          check_prefix_confirmation(mech, grid, n)};
}

}  // namespace tfm
