#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tfm/axioms.hpp"
#include "tfm/contract.hpp"
#include "tfm/search.hpp"
#include "tfm/tabulated.hpp"
#include "tfm/utility.hpp"
#include "tfm/zoo.hpp"

using namespace tfm;
using tfm::test::q;

namespace {

SideContract bid_change(BidderSet C, std::map<std::size_t, Money> nb) {
  SideContract sc;
  sc.coalition = std::move(C);
  sc.new_bids = std::move(nb);
  return sc;
}

}  // namespace

TEST(ApplyContract, IdentityLeavesTheSettingAlone) {
  const Setting A = Setting::honest({q(10), q(1)});
  EXPECT_EQ(apply_contract(A, bid_change({0, 1}, {{0, q(10)}, {1, q(1)}})), A);
}

TEST(ApplyContract, ReplacesCoalitionBids) {
  const Setting B = apply_contract(Setting::honest({q(10), q(1)}), bid_change({1}, {{1, q(8)}}));
  EXPECT_EQ(B.bids(), (BidVector{q(10), q(8)}));
  EXPECT_EQ(B.values(), (BidVector{q(10), q(1)}));
}

TEST(ApplyContract, OmissionZeroesAndFlags) {
  SideContract sc;
  sc.model = MinerModel::active;
  sc.omitted = {1};
  const Setting B = apply_contract(Setting::honest({q(3), q(2)}), sc);
  EXPECT_EQ(B.bids(), (BidVector{q(3), q(0)}));
  EXPECT_TRUE(B.is_omitted(1));
  EXPECT_FALSE(B.is_omitted(0));
}

TEST(ApplyContract, FakesAreAppended) {
  SideContract sc;
  sc.model = MinerModel::active;
  sc.fakes = {q(3)};
  const Setting B = apply_contract(Setting::honest({q(1)}), sc);
  EXPECT_EQ(B.bids(), (BidVector{q(1), q(3)}));
  EXPECT_TRUE(B.is_fake(1));
}

TEST(ApplyContract, PassiveContractMayNotOmit) {
  SideContract sc;
  sc.omitted = {0};
  EXPECT_THROW(apply_contract(Setting::honest({q(1), q(2)}), sc), std::invalid_argument);
  EXPECT_THROW(apply_contract(Setting::honest({q(1)}), bid_change({3}, {{3, q(1)}})), std::out_of_range);
}

TEST(JointDelta, Examples) {
  const Mechanism salsa = salsa_counterexample();
  const Setting A = Setting::honest({q(10), q(1)});
  EXPECT_EQ(joint_utility_delta(salsa, A, bid_change({0, 1}, {{0, q(9)}, {1, q(8)}})), Rational(1));
  EXPECT_EQ(joint_utility_delta(salsa, A, bid_change({0, 1}, {{0, q(10)}, {1, q(1)}})), Rational(0));
  const Mechanism fp = first_price_burned_reserve(q(1));
  EXPECT_LE(joint_utility_delta(fp, Setting::honest({q(2), q(3, 2)}), bid_change({1}, {{1, q(3)}})), Rational(0));
}

TEST(FindSc, FirstPriceWithBurnedReserveIsCollusionProof) {
  SearchResult r = find_c_sc(first_price_burned_reserve(q(1)), {q(0), q(1), q(3, 2), q(2)}, 3, 3, MinerModel::passive);
  EXPECT_EQ(r.verdict, Verdict::holds);
  EXPECT_FALSE(r.witness);
  EXPECT_EQ(r.profiles_searched, 64u);
}

TEST(FindSc, SalsaRefutedWithAVerifiedWitness) {
  const Mechanism m = salsa_counterexample();
  SearchResult r = find_c_sc(m, {q(1), q(8), q(9), q(10)}, 2, 2, MinerModel::passive);
  ASSERT_EQ(r.verdict, Verdict::refuted);
  EXPECT_TRUE(verify_witness(m, *r.witness));
  // The worked example pair is itself a witness of gain exactly 1.
  Witness w = make_witness(m, Setting::honest({q(10), q(1)}), bid_change({0, 1}, {{0, q(9)}, {1, q(8)}}));
  EXPECT_TRUE(verify_witness(m, w));
  EXPECT_EQ(w.delta, Rational(1));
}

TEST(FindSc, FixedProfileSearchesOneBaseline) {
  SearchLimits lim;
  lim.fixed_profile = BidVector{q(10), q(1)};
  SearchResult r = find_c_sc(salsa_counterexample(), {q(1), q(8), q(9), q(10)}, 2, 2, MinerModel::passive, lim);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->A.bids(), (BidVector{q(10), q(1)}));
  EXPECT_EQ(r.profiles_searched, 1u);
}

TEST(FindSc, SecondPriceActiveMinerDropsTheSecondBid) {
  const Mechanism m = fully_burned_second_price();
  SearchResult r = find_c_sc(m, {q(0), q(1), q(2), q(3)}, 2, 1, MinerModel::active);
  ASSERT_EQ(r.verdict, Verdict::refuted);
  const Witness& w = *r.witness;
  EXPECT_TRUE(verify_witness(m, w));
  EXPECT_EQ(w.contract.omitted, (BidderSet{1}));
  EXPECT_EQ(w.A.bids(), (BidVector{q(1), q(1)}));
  EXPECT_EQ(w.delta, Rational(1));
}

TEST(IsCScp, Examples) {
  EXPECT_EQ(is_c_scp_on_grid(fully_burned_posted_price(q(1)), {q(0), q(1), q(2)}, 3, 3, MinerModel::passive).verdict,
            Verdict::holds);
  for (std::size_t n = 1; n <= 3; ++n) {
    EXPECT_EQ(is_c_scp_on_grid(fully_burned_second_price(), {q(0), q(1), q(2), q(3)}, n, 1, MinerModel::passive).verdict,
              Verdict::holds);
  }
  EXPECT_EQ(is_c_scp_on_grid(fully_burned_second_price(), {q(0), q(1), q(2), q(3)}, 2, 1, MinerModel::active).verdict,
            Verdict::refuted);
}

TEST(FindSc, TruncationIsExplicit) {
  SearchLimits lim;
  lim.max_contracts = 5;
  SearchResult r = find_c_sc(first_price_burned_reserve(q(1)), {q(0), q(1), q(2)}, 3, 3, MinerModel::passive, lim);
  EXPECT_EQ(r.verdict, Verdict::truncated);
  EXPECT_EQ(r.to_json().at("status"), "truncated");
}

TEST(FindSc, ReportScopeNote) {
  SearchResult r = find_c_sc(fully_burned_posted_price(q(1)), {q(0), q(1)}, 2, 2, MinerModel::passive);
  EXPECT_EQ(r.to_json().at("scope"), "grid certificate only");
}

TEST(FindSc, WorkerCountDoesNotChangeTheResult) {
  const std::vector<Money> g{q(0), q(1, 2), q(1), q(2)};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Mechanism m = random_tabulated(g, 3, seed, all_axioms());
    for (MinerModel model : {MinerModel::passive, MinerModel::active}) {
      SearchLimits one, many;
      one.workers = 1;
      many.workers = 8;
      EXPECT_EQ(find_c_sc(m, g, 3, 3, model, one).to_json(), find_c_sc(m, g, 3, 3, model, many).to_json());
    }
  }
}

TEST(FindSc, IntegerFastPathAgreesWithExactPath) {
  const std::vector<Money> g{q(0), q(1, 3), q(1), q(5, 2)};
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Mechanism m = random_tabulated(g, 3, seed, all_axioms());
    SearchLimits fast, exact;
    exact.force_exact = true;
    SearchResult a = find_c_sc(m, g, 3, 2, MinerModel::active, fast);
    SearchResult b = find_c_sc(m, g, 3, 2, MinerModel::active, exact);
    EXPECT_TRUE(a.integer_path);
    EXPECT_FALSE(b.integer_path);
    ASSERT_EQ(a.witness.has_value(), b.witness.has_value());
    if (a.witness) EXPECT_EQ(witness_to_json(*a.witness), witness_to_json(*b.witness));
  }
  // Continuous mechanisms with fakes and omissions too.
  for (const auto& m : {fully_burned_second_price(), shaded_first_price(q(1), q(1, 2)), salsa_counterexample()}) {
    SearchLimits exact;
    exact.force_exact = true;
    SearchResult a = find_c_sc(m, {q(0), q(1), q(8), q(10)}, 2, 2, MinerModel::active);
    SearchResult b = find_c_sc(m, {q(0), q(1), q(8), q(10)}, 2, 2, MinerModel::active, exact);
    EXPECT_EQ(a.to_json().value("witness", nlohmann::json()), b.to_json().value("witness", nlohmann::json())) << m.label();
  }
}

TEST(FindSc, MonotoneInCoalitionSize) {
  const std::vector<Money> g{q(0), q(1), q(2)};
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Mechanism m = random_tabulated(g, 3, seed, {Axiom::ir, Axiom::bb});
    bool found = false;
    for (std::size_t c = 1; c <= 3; ++c) {
      bool now = find_c_sc(m, g, 3, c, MinerModel::passive).witness.has_value();
      if (found) EXPECT_TRUE(now) << "seed " << seed << " c " << c;
      found = found || now;
    }
  }
}

TEST(FindSc, PassiveWitnessImpliesActiveWitness) {
  const std::vector<Money> g{q(0), q(1), q(2)};
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Mechanism m = random_tabulated(g, 2, seed, {Axiom::ir, Axiom::bb});
    SearchResult p = find_c_sc(m, g, 2, 1, MinerModel::passive);
    if (!p.witness) continue;
    EXPECT_TRUE(find_c_sc(m, g, 2, 1, MinerModel::active).witness) << seed;
    Witness as_active = *p.witness;
    as_active.contract.model = MinerModel::active;
    EXPECT_TRUE(verify_witness(m, as_active));
  }
}

TEST(FindSc, PairProofWithTieBreakingForcesPrefixConfirmation) {
  const std::vector<Money> g{q(0), q(1), q(2)};
  std::size_t exercised = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Mechanism m = random_tabulated(g, 2, seed, {Axiom::ir, Axiom::bb, Axiom::consistent_tie_breaking});
    if (!check_consistent_tie_breaking(m, g, 2).pass) continue;
    if (find_c_sc(m, g, 2, 2, MinerModel::passive).verdict != Verdict::holds) continue;
    ++exercised;
    EXPECT_TRUE(check_prefix_confirmation(m, g, 2).pass) << seed;
  }
  RecordProperty("exercised", static_cast<int>(exercised));
}

TEST(VerifyWitness, TamperedDeltaFails) {
  const Mechanism m = fully_burned_second_price();
  Witness w = *find_c_sc(m, {q(0), q(1), q(2), q(3)}, 2, 1, MinerModel::active).witness;
  w.delta = Rational(-1);
  WitnessCheck c = check_witness(m, w);
  EXPECT_FALSE(c.ok);
  EXPECT_FALSE(c.diagnostic.empty());
}

TEST(VerifyWitness, OutOfRangeBidderFailsStructurally) {
  const Mechanism m = fully_burned_second_price();
  Witness w = *find_c_sc(m, {q(0), q(1), q(2), q(3)}, 2, 1, MinerModel::active).witness;
  w.contract.coalition = {0, 7};
  w.contract.new_bids[7] = q(1);
  WitnessCheck c = check_witness(m, w);
  EXPECT_FALSE(c.ok);
  EXPECT_NE(c.diagnostic.find("7"), std::string::npos);
}

TEST(VerifyWitness, JsonRoundTrip) {
  const Mechanism m = fully_burned_second_price();
  Witness w = *find_c_sc(m, {q(0), q(1), q(2), q(3)}, 3, 1, MinerModel::active).witness;
  Witness back = witness_from_json(m, witness_to_json(w));
  EXPECT_TRUE(verify_witness(m, back));
  EXPECT_EQ(witness_to_json(back), witness_to_json(w));
  auto j = witness_to_json(w);
  j["delta"] = "5/1";
  EXPECT_FALSE(verify_witness(m, witness_from_json(m, j)));
}

TEST(Uic, PostedPriceAndFirstPrice) {
  const std::vector<Money> g{q(0), q(1, 2), q(1), q(2)};
  EXPECT_TRUE(check_uic(fully_burned_posted_price(q(1)), g, 3).pass);
  // Pay-as-bid winners gain by shading.
  EXPECT_FALSE(check_uic(first_price_burned_reserve(q(0)), g, 2).pass);
}
