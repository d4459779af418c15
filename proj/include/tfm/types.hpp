#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tfm/rational.hpp"

namespace tfm {

using BidVector = std::vector<Money>;
using BidderSet = std::vector<std::size_t>;  // sorted, unique

/// What a mechanism decides for one bid vector.
struct Outcome {
  std::vector<bool> confirmed;
  std::vector<Money> pay;
  std::vector<Money> burn;

  static Outcome nobody(std::size_t n);
  std::size_t size() const { return confirmed.size(); }

  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// A bid vector judged against a true-value profile.
///
/// The first `values().size()` positions are real bidders; any positions
/// beyond that are miner-injected fake bids. An omitted real bid is stored
/// as bid 0 with its omitted flag set, so lengths stay fixed.
class Setting {
 public:
  Setting() = default;
  Setting(BidVector bids, std::vector<Money> values, std::vector<bool> omitted = {});

  /// Every real bidder bids its value; no fakes, nothing omitted.
  static Setting honest(BidVector bids);

  const BidVector& bids() const { return bids_; }
  const std::vector<Money>& values() const { return values_; }
  const std::vector<bool>& omitted() const { return omitted_; }

  std::size_t size() const { return bids_.size(); }
  std::size_t real_count() const { return values_.size(); }
  std::size_t fake_count() const { return bids_.size() - values_.size(); }
  bool is_fake(std::size_t i) const { return i >= values_.size(); }
  bool is_omitted(std::size_t i) const { return i < omitted_.size() && omitted_[i]; }
  bool is_honest() const;

  /// Same values and flags, bidder i bidding `bid` instead.
  Setting with_bid(std::size_t i, Money bid) const;

  friend bool operator==(const Setting&, const Setting&) = default;

 private:
  BidVector bids_;
  std::vector<Money> values_;
  std::vector<bool> omitted_;
};

std::string to_string(const BidVector& bids);
BidderSet normalized(BidderSet set);

}  // namespace tfm
