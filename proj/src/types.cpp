#include "tfm/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace tfm {

Outcome Outcome::nobody(std::size_t n) {
  return Outcome{std::vector<bool>(n, false), std::vector<Money>(n), std::vector<Money>(n)};
}

Setting::Setting(BidVector bids, std::vector<Money> values, std::vector<bool> omitted)
    : bids_(std::move(bids)), values_(std::move(values)), omitted_(std::move(omitted)) {
  if (bids_.empty()) throw std::invalid_argument("setting needs at least one bid");
  if (values_.size() > bids_.size()) {
    throw std::invalid_argument("setting has more true values than bids");
  }
  if (omitted_.empty()) omitted_.assign(values_.size(), false);
  if (omitted_.size() != values_.size()) {
    throw std::invalid_argument("omission flags must align with real bidders");
  }
  for (std::size_t i = 0; i < omitted_.size(); ++i) {
    if (omitted_[i] && !bids_[i].is_zero()) {
      throw std::invalid_argument("omitted bid " + std::to_string(i) + " must be stored as 0");
    }
  }
}

Setting Setting::honest(BidVector bids) {
  auto values = bids;
  return Setting(std::move(bids), std::move(values));
}

bool Setting::is_honest() const {
  if (fake_count() != 0) return false;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (omitted_[i] || bids_[i] != values_[i]) return false;
  }
  return true;
}

Setting Setting::with_bid(std::size_t i, Money bid) const {
  if (i >= bids_.size()) throw std::out_of_range("bidder index out of range");
  Setting s = *this;
  s.bids_[i] = std::move(bid);
  if (i < s.omitted_.size()) s.omitted_[i] = false;
  return s;
}

std::string to_string(const BidVector& bids) {
  std::string out = "(";
  for (std::size_t i = 0; i < bids.size(); ++i) {
    if (i != 0) out += ", ";
    out += bids[i].str();
  }
  return out + ")";
}

BidderSet normalized(BidderSet set) {
  std::sort(set.begin(), set.end());
  set.erase(std::unique(set.begin(), set.end()), set.end());
  return set;
}

}  // namespace tfm
