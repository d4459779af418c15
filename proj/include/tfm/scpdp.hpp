#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "tfm/circuit.hpp"
#include "tfm/contract.hpp"
#include "tfm/mechanism.hpp"

namespace tfm {

/// Auction over values v^1 < ... < v^k given by circuits. Each bidder's
/// value index takes width() bits, bidder i at [i*w, (i+1)*w), most
/// significant bit first. Pay and burn circuits output a value index.
struct CircuitAuction {
  std::vector<Money> values;
  std::size_t n = 0;
  std::vector<BoolCircuit> confirm;
  std::vector<BoolCircuit> pay;
  std::vector<BoolCircuit> burn;

  std::size_t width() const;
  void validate() const;
};

/// ceil(log2 k), at least 1.
std::size_t index_width(std::size_t k);

nlohmann::json circuit_auction_to_json(const CircuitAuction& ca);
CircuitAuction circuit_auction_from_json(const nlohmann::json& j);

/// Tabulated mechanism from evaluating the circuits on every profile.
Mechanism circuit_auction_to_mechanism(const CircuitAuction& ca);

/// Lookup-table circuits reproducing a mechanism on values^n. Every pay and
/// burn must be one of the values.
CircuitAuction mechanism_to_circuit_auction(const Mechanism& mech, const std::vector<Money>& values, std::size_t n);

/// The decider's precondition (IR and burn balance on the whole table) failed.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ScpdpDecision {
  bool yes = true;
  std::optional<Witness> witness;
  std::size_t pairs_checked = 0;

  nlohmann::json to_json() const;
};

/// Is the mechanism 2-SCP over values^n? Enumerates every pair of profiles
/// (A, B) and the best coalition of at most two bidders realizing A -> B.
ScpdpDecision decide_2scp_table(const Mechanism& mech, const std::vector<Money>& values, std::size_t n,
                                MinerModel model = MinerModel::active);
ScpdpDecision decide_2scpdp(const CircuitAuction& ca, MinerModel model = MinerModel::active);

/// The (m+2)-bidder auction over {0,1} that is 2-SCP iff c is a tautology.
/// Bidders 0 and 1 are the selectors, bidder j+2 carries input j of c.
CircuitAuction tautology_to_scpdp(const BoolCircuit& c);

}  // namespace tfm
