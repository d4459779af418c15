#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tfm/properties.hpp"
#include "tfm/tabulated.hpp"
#include "tfm/utility.hpp"
#include "tfm/zoo.hpp"

using namespace tfm;
using tfm::test::q;

namespace {

// Bidder 0 is confirmed for free exactly when bidder 1 bids 0.
Mechanism bossy() {
  return test::tabulate({q(0), q(1), q(2)}, 2, [](const BidVector& b) {
    Outcome o = Outcome::nobody(2);
    if (b[1] == q(0)) o.confirmed[0] = true;
    return o;
  });
}

}  // namespace

TEST(NonBossiness, ZooMechanismsPass) {
  const std::vector<Money> g{q(0), q(1), q(2)};
  EXPECT_TRUE(check_nonbossiness(fully_burned_posted_price(q(1)), g, 3).pass);
  EXPECT_TRUE(check_nonbossiness(first_price_burned_reserve(q(1)), g, 3).pass);
}

TEST(NonBossiness, ViolationCarriesAPairWitness) {
  CheckReport r = check_nonbossiness(bossy(), {q(0), q(1), q(2)}, 2);
  EXPECT_FALSE(r.pass);
  ASSERT_TRUE(r.profile);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->contract.order(), 2u);
  EXPECT_EQ(r.witness_verified, verify_witness(bossy(), *r.witness));
  EXPECT_EQ(*r.bidder, 1u);
}

TEST(NonBossiness, SalsaMoverChangesItsOwnStatus) {
  // The tempting (10,1) -> (10,8) move confirms the mover, so it is not a
  // candidate violation at all.
  const Mechanism m = salsa_counterexample();
  Outcome before = m.evaluate(BidVector{q(10), q(1)});
  Outcome after = m.evaluate(BidVector{q(10), q(8)});
  EXPECT_FALSE(before.confirmed[1]);
  EXPECT_TRUE(after.confirmed[1]);
  EXPECT_TRUE(check_nonbossiness(m, {q(1), q(8), q(9), q(10)}, 2).pass);
}

TEST(Monotonicity, PostedPricePassesBothDirections) {
  const std::vector<Money> g{q(0), q(1, 2), q(1), q(2)};
  for (auto d : {MonotonicityDirection::increase, MonotonicityDirection::decrease}) {
    EXPECT_TRUE(check_monotonicity(fully_burned_posted_price(q(1)), g, 3, d).pass) << to_string(d);
    EXPECT_TRUE(check_monotonicity(first_price_burned_reserve(q(1)), g, 3, d).pass) << to_string(d);
  }
}

TEST(Monotonicity, RaisingBidThatEvictsAWinnerFails) {
  CheckReport r = check_monotonicity(bossy(), {q(0), q(1), q(2)}, 2, MonotonicityDirection::increase);
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.check, "increase-monotonicity");
  ASSERT_TRUE(r.profile && r.other_profile);
  EXPECT_EQ((*r.profile)[1], q(0));
  EXPECT_EQ(*r.bidder, 1u);
}

TEST(Monotonicity, GeneratorWithoutPrefixProducesViolations) {
  const std::vector<Money> g{q(0), q(1), q(2)};
  std::size_t failures = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const Mechanism m = random_tabulated(g, 3, seed, {Axiom::ir, Axiom::bb});
    failures += !check_monotonicity(m, g, 3, MonotonicityDirection::increase).pass;
  }
  EXPECT_GT(failures, 0u);
}

TEST(Monotonicity, ParseDirection) {
  EXPECT_EQ(parse_direction("increase"), MonotonicityDirection::increase);
  EXPECT_EQ(parse_direction("decrease"), MonotonicityDirection::decrease);
  EXPECT_THROW(parse_direction("sideways"), std::invalid_argument);
}
