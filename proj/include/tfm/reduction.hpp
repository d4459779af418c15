#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfm/contract.hpp"
#include "tfm/mechanism.hpp"

namespace tfm {

/// A step that the underlying argument proves cannot fail did fail.
class InternalConsistencyError : public std::logic_error {
 public:
  InternalConsistencyError(const std::string& what, nlohmann::json details)
      : std::logic_error(what), details_(std::move(details)) {}
  const nlohmann::json& details() const { return details_; }

 private:
  nlohmann::json details_;
};

/// A stage could not produce its certificate; carries the counter-profiles.
struct StageFailure {
  std::string stage;
  std::string assumption;
  std::string message;
  nlohmann::json details;
};

struct ActivizeResult {
  Witness witness;
  std::string branch;  // "passive-input", "fakes", "omit-only", "after-omission"
  nlohmann::json details;
};

/// Rewrites an active-model witness: fakes become value-0 colluders and
/// omissions are split at the setting X where only the omissions happened.
ActivizeResult activize_to_passive(const Mechanism& mech, const Witness& w);

struct CanonicalizeResult {
  std::optional<Witness> witness;
  bool changed = false;
  std::string note;
  std::optional<StageFailure> failure;
};

/// The k-th highest A-bid in the coalition receives the k-th highest B-bid.
CanonicalizeResult canonicalize(const Mechanism& mech, const Witness& w);

enum class MoverClass { U_I, U_O, D_I, D_O };
std::string to_string(MoverClass c);

struct DecompositionStep {
  std::size_t bidder;
  Money from;
  Money to;
  MoverClass cls;
  bool mover_confirmed_after = false;
  bool guarantee_ok = true;     // U_O unconfirmed after, D_I confirmed after
  bool order_maintained = true; // coalition order preserved across the step
  std::optional<bool> increase_side_condition;  // raised bid below lowest confirmed bid before
};

struct Decomposition {
  BidderSet coalition;
  std::vector<BidVector> steps;  // steps.front() = A, steps.back() = B
  std::vector<DecompositionStep> moves;
  BidderSet U_I, U_O, D_I, D_O;
  std::vector<std::string> violations;

  nlohmann::json to_json() const;
};

/// Confirmed raisers first (descending A-bid), then decreasers (ascending),
/// then unconfirmed raisers (descending). Guarantee violations are recorded,
/// not thrown.
Decomposition salsa_decompose(const Mechanism& mech, const Witness& w);

struct StepValue {
  BidVector before;
  BidVector after;
  std::size_t mover;
  SignedMoney value_before;  // miner + coalition at before's bids, before's values
  SignedMoney value_after;   // miner + coalition at after's bids, before's values
};

struct SingleMoverResult {
  std::optional<Witness> witness;
  std::string scan;  // "decomposition" or "lattice"
  std::vector<StepValue> candidates;
  SignedMoney claim_identity;  // telescoping sum, 0 when the algebra holds
  std::optional<StageFailure> failure;
};

SingleMoverResult isolate_single_mover(const Mechanism& mech, const Witness& input, const Decomposition& d);

enum class LocalizeMode { grid, bisect };
std::string to_string(LocalizeMode m);
LocalizeMode parse_localize_mode(const std::string& text);

struct ReductionOptions {
  LocalizeMode mode = LocalizeMode::grid;
  std::vector<Money> grid;  // grid mode path; defaults to the mechanism grid, else the witness bids
  std::size_t max_iters = 64;
  bool search_fallback = true;  // exhaustive pair search when the constructive steps miss
};

struct LocalizeResult {
  std::optional<Witness> witness;
  std::vector<Witness> alternates;
  Money epsilon;
  SignedMoney jump;
  bool multi_jump = false;
  std::size_t iterations = 0;
  nlohmann::json g_values;
  std::optional<StageFailure> failure;
};

/// Narrows a single-mover witness to one jump of g(x) = miner + coalition
/// value with the mover bidding x.
LocalizeResult localize_jump(const Mechanism& mech, const Witness& w, const ReductionOptions& opts);

struct BeneficiaryResult {
  std::optional<Witness> witness;
  std::vector<std::pair<std::size_t, SignedMoney>> gains;
  bool epsilon_ok = true;
  std::optional<StageFailure> failure;
};

BeneficiaryResult isolate_beneficiary(const Mechanism& mech, const Witness& w, const Money& epsilon,
                                      const SignedMoney& target_delta, bool check_epsilon);

struct StageRecord {
  std::string stage;
  std::string status;  // ok, skipped, failed
  nlohmann::json details;
};

struct ReductionTrace {
  Witness input;
  std::vector<StageRecord> stages;
  std::optional<Witness> output;
  std::optional<StageFailure> failure;
  bool passthrough = false;
  std::string route;  // which mechanism produced the output

  bool succeeded() const { return output.has_value() && !failure && !passthrough; }
  nlohmann::json to_json() const;
};

ReductionTrace reduce_to_2sc(const Mechanism& mech, const Witness& w, const ReductionOptions& opts = {});

}  // namespace tfm
