#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfm/mechanism.hpp"
#include "tfm/types.hpp"

namespace tfm {

enum class MinerModel { passive, active };

std::string to_string(MinerModel m);
MinerModel parse_model(const std::string& text);

/// The miner plus coalition C: new bids for members, and (active model only)
/// omitted real bids and appended fake bids.
struct SideContract {
  BidderSet coalition;
  std::map<std::size_t, Money> new_bids;
  BidderSet omitted;
  std::vector<Money> fakes;
  MinerModel model = MinerModel::passive;

  std::size_t order() const { return coalition.size(); }
  friend bool operator==(const SideContract&, const SideContract&) = default;
};

/// Honest setting A, the setting B the contract produces, and the gain.
struct Witness {
  SideContract contract;
  Setting A;
  Setting B;
  SignedMoney delta;
};

Setting apply_contract(const Setting& A, const SideContract& sc);

/// Joint miner + coalition utility change from A to apply_contract(A, sc),
/// judged at A's values.
SignedMoney joint_utility_delta(const Mechanism& mech, const Setting& A, const SideContract& sc);

/// The same quantity for an explicit pair of settings sharing real bidders.
SignedMoney joint_utility_delta(const Mechanism& mech, const Setting& A, const Setting& B,
                                const BidderSet& coalition);

/// Builds a witness for (A, sc) with its delta computed; delta may be <= 0.
Witness make_witness(const Mechanism& mech, const Setting& A, SideContract sc);

struct WitnessCheck {
  bool ok = false;
  std::string diagnostic;
  std::optional<SignedMoney> recomputed;
};

/// Structural checks plus a from-scratch delta recomputation.
WitnessCheck check_witness(const Mechanism& mech, const Witness& w);
inline bool verify_witness(const Mechanism& mech, const Witness& w) {
  return check_witness(mech, w).ok;
}

nlohmann::json setting_to_json(const Setting& s);
nlohmann::json bids_to_json(const BidVector& bids);
BidVector bids_from_json(const nlohmann::json& j);

nlohmann::json witness_to_json(const Witness& w);
/// Rebuilds B and delta from A and the contract; a stored delta that
/// disagrees is kept as-is so verify_witness can flag it.
Witness witness_from_json(const Mechanism& mech, const nlohmann::json& j);

}  // namespace tfm
