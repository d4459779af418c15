#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfm/contract.hpp"
#include "tfm/mechanism.hpp"
#include "tfm/types.hpp"

namespace tfm {

/// Result of an exhaustive (or sampled) property check. Violations are
/// content, not errors: `pass == false` comes with the first offending
/// profile in lexicographic grid order.
struct CheckReport {
  std::string check;
  bool pass = true;
  std::size_t cases = 0;
  bool sampled = false;
  std::optional<BidVector> profile;
  std::optional<BidVector> other_profile;
  std::optional<std::size_t> bidder;
  std::string message;
  std::optional<Witness> witness;  // a side contract exhibiting the violation, when one exists
  bool witness_verified = false;

  nlohmann::json to_json() const;
};

CheckReport check_individual_rationality(const Mechanism& mech, const std::vector<Money>& grid,
                                         std::size_t n);
CheckReport check_burn_balance(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n);

/// Outcome equivariance under permutations, compared as multisets of
/// (bid, confirmed, pay, burn) so tie-breaking among equal bids is free.
/// Exhaustive for n < 5; above that, `sample_limit` seeded pairs.
CheckReport check_anonymity(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n,
                            std::uint64_t seed = 1, std::size_t sample_limit = 10000);
/// For continuous mechanisms: every permutation of each supplied profile.
CheckReport check_anonymity_on(const Mechanism& mech, const std::vector<BidVector>& profiles);

enum class UtilityClass { zero_utility, non_zero_utility };
std::vector<UtilityClass> classify_zero_utility(const Mechanism& mech, const Setting& s);

CheckReport check_consistent_tie_breaking(const Mechanism& mech, const std::vector<Money>& grid,
                                          std::size_t n);
CheckReport check_prefix_confirmation(const Mechanism& mech, const std::vector<Money>& grid,
                                      std::size_t n);

/// The five axiom reports in a fixed order.
std::vector<CheckReport> check_all_axioms(const Mechanism& mech, const std::vector<Money>& grid,
                                          std::size_t n);

}  // namespace tfm
