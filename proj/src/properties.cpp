#include "tfm/properties.hpp"

#include <optional>
#include <stdexcept>

#include "tfm/grid.hpp"
#include "tfm/utility.hpp"

namespace tfm {
namespace {

std::size_t non_zero_count(const Outcome& o, const BidVector& bids) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < bids.size(); ++i) c += is_zero_utility(o, bids, i) ? 0 : 1;
  return c;
}

Witness pair_contract(const Mechanism& mech, const BidVector& from, const BidVector& to, std::size_t i,
                      std::size_t j) {
  SideContract sc;
  sc.coalition = normalized({i, j});
  for (std::size_t k : sc.coalition) sc.new_bids.emplace(k, to[k]);
  return make_witness(mech, Setting::honest(from), std::move(sc));
}

// Does `small` hold only bidders also in `big`?
bool subset_of(const std::vector<bool>& small, const std::vector<bool>& big) {
  for (std::size_t i = 0; i < small.size(); ++i) {
    if (small[i] && !big[i]) return false;
  }
  return true;
}

std::vector<bool> flipped(const std::vector<bool>& v) {
  std::vector<bool> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = !v[i];
  return out;
}

}  // namespace

CheckReport check_nonbossiness(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n) {
  ProfileSpace space(grid, n);
  const auto table = materialize(mech, space);
  CheckReport r{.check = "non-bossiness"};
  for (std::size_t p = 0; p < space.size(); ++p) {
    const BidVector a = space.profile(p);
    const Outcome& oa = table[p];
    for (std::size_t j = 0; j < n; ++j) {
      if (!is_zero_utility(oa, a, j)) continue;
      for (const auto& v : space.grid()) {
        if (v == a[j]) continue;
        BidVector b = a;
        b[j] = v;
        const Outcome& ob = table[space.index([&] {
          auto d = space.digits(p);
          d[j] = space.find(v);
          return d;
        }())];
        if (!is_zero_utility(ob, b, j) || ob.confirmed[j] != oa.confirmed[j]) continue;
        ++r.cases;
        if (non_zero_count(oa, a) == non_zero_count(ob, b)) continue;
        std::size_t other = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i != j && is_zero_utility(oa, a, i) != is_zero_utility(ob, b, i)) {
            other = i;
            break;
          }
        }
        r.pass = false;
        r.profile = a;
        r.other_profile = b;
        r.bidder = j;
        r.message = "bidder " + std::to_string(j) + " moving " + a[j].str() + " -> " + v.str() +
                    " changes the non-zero-utility count from " + std::to_string(non_zero_count(oa, a)) +
                    " to " + std::to_string(non_zero_count(ob, b)) + " (bidder " + std::to_string(other) + ")";
        Witness forward = pair_contract(mech, a, b, j, other);
        if (verify_witness(mech, forward)) {
          r.witness = forward;
          r.witness_verified = true;
        } else {
          Witness back = pair_contract(mech, b, a, j, other);
          r.witness_verified = verify_witness(mech, back);
          r.witness = r.witness_verified ? back : forward;
        }
        return r;
      }
    }
  }
  return r;
}

std::string to_string(MonotonicityDirection d) {
  return d == MonotonicityDirection::increase ? "increase" : "decrease";
}

MonotonicityDirection parse_direction(const std::string& text) {
  if (text == "increase") return MonotonicityDirection::increase;
  if (text == "decrease") return MonotonicityDirection::decrease;
  throw std::invalid_argument("unknown direction '" + text + "' (expected increase|decrease)");
}

CheckReport check_monotonicity(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n,
                               MonotonicityDirection direction) {
  ProfileSpace space(grid, n);
  const auto table = materialize(mech, space);
  const bool up = direction == MonotonicityDirection::increase;
  CheckReport r{.check = up ? "increase-monotonicity" : "decrease-monotonicity"};
  for (std::size_t p = 0; p < space.size(); ++p) {
    const BidVector a = space.profile(p);
    const Outcome& oa = table[p];
    // Bound from the other side: lowest confirmed bid (increase) or highest unconfirmed (decrease).
    std::optional<Money> bound;
    for (std::size_t i = 0; i < n; ++i) {
      if (oa.confirmed[i] != up) continue;
      if (!bound || (up ? a[i] < *bound : a[i] > *bound)) bound = a[i];
    }
    const auto digits = space.digits(p);
    for (std::size_t l = 0; l < n; ++l) {
      if (oa.confirmed[l] == up) continue;  // mover must be unconfirmed (increase) / confirmed (decrease)
      for (std::size_t t = 0; t < space.k(); ++t) {
        const Money& v = space.grid()[t];
        if (up ? !(v > a[l]) : !(v < a[l])) continue;
        if (bound && (up ? !(v < *bound) : !(v > *bound))) continue;
        auto d = digits;
        d[l] = t;
        const Outcome& ob = table[space.index(d)];
        ++r.cases;
        const bool mover_flipped = ob.confirmed[l] == up;
        const bool grows = up ? subset_of(oa.confirmed, ob.confirmed)
                              : subset_of(flipped(oa.confirmed), flipped(ob.confirmed));
        if (mover_flipped || grows) continue;
        BidVector b = a;
        b[l] = v;
        r.pass = false;
        r.profile = a;
        r.other_profile = b;
        r.bidder = l;
        r.message = "bidder " + std::to_string(l) + " moving " + a[l].str() + " -> " + v.str() + " keeps its status while the " +
                    (up ? "confirmed" : "unconfirmed") + " set loses a member";
        return r;
      }
    }
  }
  return r;
}

}  // namespace tfm
