#pragma once

#include <cstddef>

#include "tfm/mechanism.hpp"
#include "tfm/types.hpp"

namespace tfm {

// v_i * a_i - p_i, with an omitted bidder counted as unconfirmed.
SignedMoney bidder_utility(const Outcome& out, const Setting& s, std::size_t i, const Money& v_i);
SignedMoney bidder_utility(const Mechanism& mech, const Setting& s, std::size_t i, const Money& v_i);

// Sum of (p - burn) over real bidders minus the burn of every fake bid.
SignedMoney miner_utility(const Outcome& out, const Setting& s);
SignedMoney miner_utility(const Mechanism& mech, const Setting& s);

/// Coalition utility u_C(outcome_setting ; value_setting): outcomes from the
/// first setting's bids, values from the second's.
SignedMoney coalition_utility(const Mechanism& mech, const Setting& outcome_setting,
                              const Setting& value_setting, const BidderSet& coalition);
SignedMoney coalition_utility(const Outcome& out, const Setting& outcome_setting,
                              const Setting& value_setting, const BidderSet& coalition);

bool is_zero_utility(const Outcome& out, const BidVector& bids, std::size_t i);

}  // namespace tfm
