#include "tfm/utility.hpp"

#include <stdexcept>
#include <string>

namespace tfm {

SignedMoney bidder_utility(const Outcome& out, const Setting& s, std::size_t i, const Money& v_i) {
  if (i >= s.size() || i >= out.size()) {
    throw std::out_of_range("bidder index " + std::to_string(i) + " out of range");
  }
  if (s.is_omitted(i) || !out.confirmed[i]) return -out.pay[i].value();
  return v_i.value() - out.pay[i].value();
}

SignedMoney bidder_utility(const Mechanism& mech, const Setting& s, std::size_t i, const Money& v_i) {
  if (i >= s.size()) throw std::out_of_range("bidder index " + std::to_string(i) + " out of range");
  return bidder_utility(mech.evaluate(s), s, i, v_i);
}

SignedMoney miner_utility(const Outcome& out, const Setting& s) {
  SignedMoney total;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.is_fake(i)) {
      total -= out.burn[i];
    } else {
      total += out.pay[i].value() - out.burn[i].value();
    }
  }
  return total;
}

SignedMoney miner_utility(const Mechanism& mech, const Setting& s) {
  return miner_utility(mech.evaluate(s), s);
}

SignedMoney coalition_utility(const Outcome& out, const Setting& outcome_setting,
                              const Setting& value_setting, const BidderSet& coalition) {
  SignedMoney total;
  for (std::size_t i : coalition) {
    if (i >= value_setting.real_count() || i >= outcome_setting.size()) {
      throw std::invalid_argument("coalition member " + std::to_string(i) +
                                  " is not a real bidder of both settings");
    }
    total += bidder_utility(out, outcome_setting, i, value_setting.values()[i]);
  }
  return total;
}

SignedMoney coalition_utility(const Mechanism& mech, const Setting& outcome_setting,
                              const Setting& value_setting, const BidderSet& coalition) {
  if (coalition.empty()) return {};
  return coalition_utility(mech.evaluate(outcome_setting), outcome_setting, value_setting, coalition);
}

bool is_zero_utility(const Outcome& out, const BidVector& bids, std::size_t i) {
  return !out.confirmed[i] || out.pay[i] == bids[i];
}

}  // namespace tfm
