#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tfm/contract.hpp"
#include "tfm/reduction.hpp"
#include "tfm/search.hpp"
#include "tfm/tabulated.hpp"
#include "tfm/zoo.hpp"

using namespace tfm;
using tfm::test::programmatic;
using tfm::test::q;

namespace {

Witness passive(const Mechanism& m, BidVector a, BidderSet C, std::map<std::size_t, Money> nb) {
  SideContract sc;
  sc.coalition = std::move(C);
  sc.new_bids = std::move(nb);
  return make_witness(m, Setting::honest(std::move(a)), sc);
}

// Everyone bidding at least 4 is confirmed at price 4; nothing burned.
Mechanism posted_four_unburned() {
  return programmatic("posted-4", [](const BidVector& b) {
    Outcome o = Outcome::nobody(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] >= q(4)) {
        o.confirmed[i] = true;
        o.pay[i] = q(4);
      }
    }
    return o;
  });
}

// Highest bid wins (lowest index on ties) and pays the runner-up; miner keeps it.
Mechanism unburned_second_price() {
  return programmatic("second-price", [](const BidVector& b) {
    Outcome o = Outcome::nobody(b.size());
    if (b.empty()) return o;
    std::size_t w = 0;
    for (std::size_t i = 1; i < b.size(); ++i) {
      if (b[i] > b[w]) w = i;
    }
    Money second(0);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (i != w && b[i] > second) second = b[i];
    }
    o.confirmed[w] = true;
    o.pay[w] = second;
    return o;
  });
}

// Bidder 0 is confirmed at price 1 once bidder 1 bids at least 7/3.
Mechanism threshold_seven_thirds() {
  return programmatic("threshold", [](const BidVector& b) {
    Outcome o = Outcome::nobody(b.size());
    if (b.size() >= 2 && b[0] >= q(1) && b[1] >= q(7, 3)) {
      o.confirmed[0] = true;
      o.pay[0] = q(1);
    }
    return o;
  });
}

}  // namespace

TEST(Canonicalize, HighestBidderGetsHighestNewBid) {
  const Mechanism m = posted_four_unburned();
  Witness w = passive(m, {q(5), q(3)}, {0, 1}, {{0, q(4)}, {1, q(6)}});
  EXPECT_EQ(w.delta, Rational(3));
  CanonicalizeResult r = canonicalize(m, w);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(r.changed);
  EXPECT_EQ(r.witness->contract.new_bids, (std::map<std::size_t, Money>{{0, q(6)}, {1, q(4)}}));
  EXPECT_EQ(r.witness->delta, Rational(3));
  EXPECT_FALSE(r.failure);
}

TEST(Canonicalize, AlreadyCanonicalIsUnchanged) {
  const Mechanism m = posted_four_unburned();
  Witness w = passive(m, {q(5), q(3)}, {0, 1}, {{0, q(6)}, {1, q(4)}});
  CanonicalizeResult r = canonicalize(m, w);
  EXPECT_FALSE(r.changed);
  EXPECT_EQ(witness_to_json(*r.witness), witness_to_json(w));
}

TEST(Decompose, OrdersConfirmedRaisersThenDecreasersThenOthers) {
  const Mechanism m = first_price_burned_reserve(q(1));
  Witness w = passive(m, {q(5), q(6), q(3)}, {0, 1, 2}, {{0, q(7)}, {1, q(2)}, {2, q(4)}});
  Decomposition d = salsa_decompose(m, w);
  ASSERT_EQ(d.steps.size(), 4u);
  EXPECT_EQ(d.steps[0], (BidVector{q(5), q(6), q(3)}));
  EXPECT_EQ(d.steps[1], (BidVector{q(7), q(6), q(3)}));
  EXPECT_EQ(d.steps[2], (BidVector{q(7), q(2), q(3)}));
  EXPECT_EQ(d.steps[3], (BidVector{q(7), q(2), q(4)}));
  EXPECT_EQ(d.U_I, (BidderSet{0}));
  EXPECT_EQ(d.D_O, (BidderSet{1}));
  EXPECT_EQ(d.U_O, (BidderSet{2}));
  EXPECT_TRUE(d.D_I.empty());
  EXPECT_EQ(d.moves[0].cls, MoverClass::U_I);
  EXPECT_TRUE(d.moves[0].mover_confirmed_after);
  // Bidder 0 overtakes bidder 1 in the first step: recorded, not thrown.
  EXPECT_FALSE(d.moves[0].order_maintained);
  EXPECT_FALSE(d.violations.empty());
}

TEST(Decompose, IdentityContractHasNoSteps) {
  const Mechanism m = first_price_burned_reserve(q(1));
  Witness w = passive(m, {q(5), q(6)}, {0, 1}, {{0, q(5)}, {1, q(6)}});
  Decomposition d = salsa_decompose(m, w);
  ASSERT_EQ(d.steps.size(), 1u);
  EXPECT_TRUE(d.moves.empty());
}

TEST(IsolateMover, SalsaHasNoBeneficialSingleMove) {
  const Mechanism m = salsa_counterexample();
  Witness w = passive(m, {q(10), q(1)}, {0, 1}, {{0, q(9)}, {1, q(8)}});
  ASSERT_EQ(w.delta, Rational(1));
  Decomposition d = salsa_decompose(m, w);
  EXPECT_EQ(d.D_I, (BidderSet{0}));
  EXPECT_EQ(d.U_O, (BidderSet{1}));
  SingleMoverResult r = isolate_single_mover(m, w, d);
  EXPECT_FALSE(r.witness);
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->assumption, "consistent tie-breaking");
  EXPECT_EQ(r.candidates.size(), 4u);
  for (const auto& c : r.candidates) EXPECT_LE(c.value_after, c.value_before);
  const auto& ctb = r.failure->details.at("tie_breaking_counter_profile");
  EXPECT_EQ(ctb.at("before"), bids_to_json({q(9), q(1)}));
  EXPECT_EQ(ctb.at("after"), bids_to_json({q(9), q(8)}));
  EXPECT_EQ(ctb.at("flipped"), 0);
  EXPECT_TRUE(r.claim_identity.is_zero());
}

TEST(IsolateMover, SingleMoverInputPassesThrough) {
  const Mechanism m = threshold_seven_thirds();
  Witness w = passive(m, {q(2), q(0)}, {1}, {{1, q(4)}});
  SingleMoverResult r = isolate_single_mover(m, w, salsa_decompose(m, w));
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.scan, "input");
}

TEST(Reduce, SalsaFailureIsAPassthrough) {
  const Mechanism m = salsa_counterexample();
  Witness w = passive(m, {q(10), q(1)}, {0, 1}, {{0, q(9)}, {1, q(8)}});
  ReductionTrace t = reduce_to_2sc(m, w);
  EXPECT_TRUE(t.passthrough);
  EXPECT_FALSE(t.succeeded());
  ASSERT_TRUE(t.failure);
  EXPECT_EQ(t.failure->stage, "isolate-mover");
  EXPECT_EQ(t.to_json().at("status"), "failed");
}

TEST(Reduce, RejectsAnUnverifiedInput) {
  const Mechanism m = first_price_burned_reserve(q(1));
  Witness w = passive(m, {q(2), q(3, 2)}, {1}, {{1, q(3)}});
  ASSERT_LE(w.delta, Rational(0));
  ReductionTrace t = reduce_to_2sc(m, w);
  EXPECT_FALSE(t.output);
  ASSERT_TRUE(t.failure);
  EXPECT_EQ(t.failure->stage, "input");
}

TEST(Activize, OmissionOnlyContractStaysActive) {
  const Mechanism m = fully_burned_second_price();
  SideContract sc;
  sc.model = MinerModel::active;
  sc.coalition = {0};
  sc.new_bids = {{0, q(0)}};
  sc.omitted = {1};
  Witness w = make_witness(m, Setting::honest({q(1), q(1)}), sc);
  ASSERT_EQ(w.delta, Rational(1));
  ActivizeResult r = activize_to_passive(m, w);
  EXPECT_EQ(r.branch, "omit-only");
  EXPECT_EQ(r.witness.contract.model, MinerModel::active);
  EXPECT_EQ(r.witness.contract.omitted, (BidderSet{1}));
  EXPECT_TRUE(verify_witness(m, r.witness));
  ReductionTrace t = reduce_to_2sc(m, w);
  EXPECT_TRUE(t.succeeded());
  EXPECT_EQ(t.route, "omission-only contract");
}

TEST(Activize, FakeBecomesAZeroValueColluder) {
  const Mechanism m = unburned_second_price();
  SideContract sc;
  sc.model = MinerModel::active;
  sc.fakes = {q(2)};
  Witness w = make_witness(m, Setting::honest({q(3), q(1)}), sc);
  ASSERT_EQ(w.delta, Rational(1));
  ActivizeResult r = activize_to_passive(m, w);
  EXPECT_EQ(r.branch, "fakes");
  EXPECT_EQ(r.witness.contract.model, MinerModel::passive);
  EXPECT_EQ(r.witness.A.bids(), (BidVector{q(3), q(1), q(0)}));
  EXPECT_EQ(r.witness.contract.coalition, (BidderSet{2}));
  EXPECT_EQ(r.witness.contract.new_bids.at(2), q(2));
  EXPECT_EQ(r.witness.delta, Rational(1));
  EXPECT_TRUE(verify_witness(m, r.witness));
}

TEST(Activize, PassiveInputIsUntouched) {
  const Mechanism m = threshold_seven_thirds();
  Witness w = passive(m, {q(2), q(0)}, {1}, {{1, q(4)}});
  ActivizeResult r = activize_to_passive(m, w);
  EXPECT_EQ(r.branch, "passive-input");
  EXPECT_EQ(witness_to_json(r.witness), witness_to_json(w));
}

TEST(Localize, BisectionHalvesTowardTheJump) {
  const Mechanism m = threshold_seven_thirds();
  Witness w = passive(m, {q(2), q(0)}, {1}, {{1, q(4)}});
  ASSERT_EQ(w.delta, Rational(1));
  ReductionOptions opts;
  opts.mode = LocalizeMode::bisect;
  LocalizeResult r = localize_jump(m, w, opts);
  ASSERT_TRUE(r.witness) << r.failure->message;
  EXPECT_EQ(r.iterations, 4u);
  EXPECT_EQ(r.epsilon, q(1, 4));
  EXPECT_EQ(r.witness->A.bids(), (BidVector{q(2), q(9, 4)}));
  EXPECT_EQ(r.witness->B.bids(), (BidVector{q(2), q(5, 2)}));
  EXPECT_EQ(r.jump, Rational(1));
  EXPECT_FALSE(r.multi_jump);
}

TEST(Localize, BisectionRefusesGridDomains) {
  const Mechanism m = fully_burned_second_price();
  const Mechanism t = test::tabulate({q(0), q(1), q(2)}, 2, [&](const BidVector& b) { return m.evaluate(b); });
  Witness w = passive(t, {q(1), q(0)}, {1}, {{1, q(2)}});
  ReductionOptions opts;
  opts.mode = LocalizeMode::bisect;
  LocalizeResult r = localize_jump(t, w, opts);
  EXPECT_FALSE(r.witness);
  ASSERT_TRUE(r.failure);
  EXPECT_EQ(r.failure->assumption, "continuous domain");
}

TEST(Localize, GridModePicksTheAdjacentJump) {
  const Mechanism m = threshold_seven_thirds();
  Witness w = passive(m, {q(2), q(0)}, {1}, {{1, q(4)}});
  ReductionOptions opts;
  opts.grid = {q(0), q(1), q(2), q(3), q(4)};
  LocalizeResult r = localize_jump(m, w, opts);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->A.bids()[1], q(2));
  EXPECT_EQ(r.witness->B.bids()[1], q(3));
  EXPECT_EQ(r.epsilon, q(1));
  EXPECT_TRUE(r.alternates.empty());
}

TEST(Localize, RejectsMultiMoverInput) {
  const Mechanism m = salsa_counterexample();
  Witness w = passive(m, {q(10), q(1)}, {0, 1}, {{0, q(9)}, {1, q(8)}});
  EXPECT_THROW(localize_jump(m, w, {}), std::invalid_argument);
}

TEST(Beneficiary, TopGainerJoinsTheMover) {
  // Bidder 0 reaching 1 lets bidders 1..3 through for free.
  const Mechanism m = programmatic("free-ride", [](const BidVector& b) {
    Outcome o = Outcome::nobody(b.size());
    if (b[0] >= q(1)) {
      for (std::size_t i = 1; i < b.size(); ++i) o.confirmed[i] = true;
    }
    return o;
  });
  Witness w = passive(m, {q(0), q(4), q(4), q(4)}, {0, 1, 2, 3}, {{0, q(1)}, {1, q(4)}, {2, q(4)}, {3, q(4)}});
  ASSERT_EQ(w.delta, Rational(12));
  BeneficiaryResult r = isolate_beneficiary(m, w, q(0), w.delta, false);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->contract.coalition, (BidderSet{0, 1}));
  EXPECT_EQ(r.witness->delta, Rational(4));
  ASSERT_EQ(r.gains.size(), 3u);
  for (const auto& [j, g] : r.gains) EXPECT_EQ(g, Rational(4)) << j;
}

TEST(Beneficiary, MoverLossIsCoveredByTheBestGain) {
  // Bidder 0 reaching 1 is confirmed at a burned 1/10 and lets bidder 2 in free.
  const Mechanism m = programmatic("lossy", [](const BidVector& b) {
    Outcome o = Outcome::nobody(b.size());
    if (b[0] >= q(1)) {
      o.confirmed[0] = true;
      o.pay[0] = q(1, 10);
      o.burn[0] = q(1, 10);
      o.confirmed[2] = true;
    }
    return o;
  });
  Witness w = passive(m, {q(0), q(1), q(3)}, {0, 1, 2}, {{0, q(1)}, {1, q(1)}, {2, q(3)}});
  ASSERT_EQ(w.delta, Rational(29, 10));
  BeneficiaryResult r = isolate_beneficiary(m, w, q(1, 10), w.delta, true);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(r.epsilon_ok);
  EXPECT_EQ(r.witness->contract.coalition, (BidderSet{0, 2}));
  EXPECT_EQ(r.witness->delta, Rational(29, 10));
}

TEST(Reduce, ContinuousBisectPipeline) {
  const Mechanism m = threshold_seven_thirds();
  Witness w = passive(m, {q(2), q(0)}, {1}, {{1, q(4)}});
  ReductionOptions opts;
  opts.mode = LocalizeMode::bisect;
  ReductionTrace t = reduce_to_2sc(m, w, opts);
  ASSERT_TRUE(t.succeeded());
  EXPECT_EQ(t.route, "constructive");
  EXPECT_LE(t.output->contract.order(), 2u);
  EXPECT_TRUE(verify_witness(m, *t.output));
}

TEST(Reduce, RandomMechanismsReduceToVerifiedPairs) {
  const std::vector<Money> g{q(0), q(1), q(2), q(3)};
  std::size_t reduced = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Mechanism m = random_tabulated(g, 3, seed, all_axioms());
    SearchLimits lim;
    lim.min_coalition = 3;
    SearchResult s = find_c_sc(m, g, 3, 3, seed % 2 ? MinerModel::active : MinerModel::passive, lim);
    if (!s.witness) continue;
    const Witness& w = *s.witness;

    if (w.contract.model == MinerModel::passive) {
      Decomposition d = salsa_decompose(m, w);
      EXPECT_EQ(d.steps.front(), w.A.bids());
      EXPECT_EQ(d.steps.back(), w.B.bids());
      for (std::size_t k = 0; k + 1 < d.steps.size(); ++k) {
        std::size_t diff = 0;
        for (std::size_t i = 0; i < 3; ++i) diff += d.steps[k][i] != d.steps[k + 1][i];
        EXPECT_EQ(diff, 1u);
      }
      EXPECT_TRUE(isolate_single_mover(m, w, d).claim_identity.is_zero()) << seed;
    }

    ReductionTrace t = reduce_to_2sc(m, w);
    EXPECT_TRUE(t.succeeded()) << seed << " " << t.to_json().dump();
    if (t.output) {
      EXPECT_LE(t.output->contract.order(), 2u);
      EXPECT_TRUE(verify_witness(m, *t.output));
    }
    ++reduced;
  }
  EXPECT_GT(reduced, 0u);
}
