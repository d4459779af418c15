#include <gtest/gtest.h>

#include "helpers.hpp"
#include "tfm/axioms.hpp"
#include "tfm/circuit.hpp"
#include "tfm/grid.hpp"
#include "tfm/scpdp.hpp"
#include "tfm/search.hpp"
#include "tfm/tabulated.hpp"
#include "tfm/zoo.hpp"

using namespace tfm;
using tfm::test::q;

namespace {

BoolCircuit single(std::size_t inputs, GateOp op) {
  BoolCircuit c;
  c.inputs = inputs;
  c.outputs = {c.add(op)};
  return c;
}

BoolCircuit projection(std::size_t inputs, std::size_t i) {
  BoolCircuit c;
  c.inputs = inputs;
  c.outputs = {c.input(i)};
  return c;
}

BoolCircuit excluded_middle() {
  BoolCircuit c;
  c.inputs = 1;
  std::size_t x = c.input(0);
  std::size_t nx = c.add(GateOp::NOT, {x});
  c.outputs = {c.add(GateOp::OR, {x, nx})};
  return c;
}

CircuitAuction constant_auction(std::size_t n) {
  CircuitAuction ca;
  ca.values = {q(0), q(1)};
  ca.n = n;
  for (std::size_t i = 0; i < n; ++i) {
    ca.confirm.push_back(single(n, GateOp::CONST0));
    ca.pay.push_back(single(n, GateOp::CONST0));
    ca.burn.push_back(single(n, GateOp::CONST0));
  }
  return ca;
}

}  // namespace

TEST(Circuit, Evaluation) {
  BoolCircuit c;
  c.inputs = 3;
  std::size_t a = c.input(0), b = c.input(1), d = c.input(2);
  std::size_t ab = c.add(GateOp::AND, {a, b});
  std::size_t nd = c.add(GateOp::NOT, {d});
  c.outputs = {c.add(GateOp::OR, {ab, nd}), ab};
  EXPECT_EQ(eval_circuit(c, {true, true, true}), (std::vector<bool>{true, true}));
  EXPECT_EQ(eval_circuit(c, {true, false, true}), (std::vector<bool>{false, false}));
  EXPECT_EQ(eval_circuit(c, {false, false, false}), (std::vector<bool>{true, false}));
  EXPECT_THROW(eval_circuit(c, {true}), std::invalid_argument);
}

TEST(Circuit, TautologyBruteForce) {
  EXPECT_TRUE(is_tautology_bruteforce(excluded_middle()));
  EXPECT_TRUE(is_tautology_bruteforce(single(2, GateOp::CONST1)));
  EXPECT_FALSE(is_tautology_bruteforce(single(2, GateOp::CONST0)));
  EXPECT_FALSE(is_tautology_bruteforce(projection(2, 1)));
}

TEST(Circuit, ValidateRejectsMalformedGateLists) {
  BoolCircuit fwd;
  fwd.inputs = 1;
  fwd.gates = {{GateOp::NOT, {1}, 0}, {GateOp::INPUT, {}, 0}};
  fwd.outputs = {0};
  EXPECT_THROW(fwd.validate(), std::invalid_argument);

  BoolCircuit arity;
  arity.inputs = 1;
  arity.gates = {{GateOp::INPUT, {}, 0}, {GateOp::AND, {0}, 0}};
  arity.outputs = {1};
  EXPECT_THROW(arity.validate(), std::invalid_argument);

  EXPECT_THROW(projection(1, 3).validate(), std::invalid_argument);

  BoolCircuit out = single(1, GateOp::CONST1);
  out.outputs = {4};
  EXPECT_THROW(out.validate(), std::invalid_argument);
}

TEST(Circuit, JsonRoundTrip) {
  for (const auto& c : random_circuits(30, 3, 5)) {
    EXPECT_EQ(circuit_from_json(circuit_to_json(c)), c);
  }
  EXPECT_THROW(circuit_from_json(nlohmann::json{{"inputs", 1}, {"gates", {{{"op", "XOR"}}}}, {"outputs", {0}}}),
               std::invalid_argument);
  EXPECT_THROW(circuit_from_json(nlohmann::json{{"gates", nlohmann::json::array()}}), std::invalid_argument);
}

TEST(Circuit, DnfMatchesItsTruthTable) {
  const std::vector<bool> truth{false, true, true, false, true, false, false, true};  // odd parity
  BoolCircuit c = dnf_circuit(3, truth);
  for (std::size_t r = 0; r < 8; ++r) {
    std::vector<bool> bits{bool(r & 4), bool(r & 2), bool(r & 1)};
    EXPECT_EQ(eval_circuit(c, bits)[0], truth[r]) << r;
  }
}

TEST(Circuit, StructuredFamilyCoversEveryFunction) {
  EXPECT_EQ(structured_circuits(3).size(), 4u + 16u + 256u);
  std::size_t tautologies = 0;
  for (const auto& c : structured_circuits(2)) tautologies += is_tautology_bruteforce(c);
  EXPECT_EQ(tautologies, 2u);  // the constant-1 function on 1 and on 2 inputs
}

TEST(Circuit, RandomFamilyIsSeededAndPartlyTautological) {
  auto a = random_circuits(40, 4, 11);
  EXPECT_EQ(a, random_circuits(40, 4, 11));
  std::size_t t = 0;
  for (const auto& c : a) {
    c.validate();
    t += is_tautology_bruteforce(c);
  }
  EXPECT_GE(t, 10u);
}

TEST(CircuitAuction, ConstantAuctionIsTheEmptyMechanism) {
  const Mechanism m = circuit_auction_to_mechanism(constant_auction(2));
  ProfileSpace space({q(0), q(1)}, 2);
  for (std::size_t p = 0; p < space.size(); ++p) EXPECT_EQ(m.evaluate(space.profile(p)), Outcome::nobody(2));
}

TEST(CircuitAuction, JsonRoundTripAndValidation) {
  CircuitAuction ca = tautology_to_scpdp(excluded_middle());
  auto j = circuit_auction_to_json(ca);
  EXPECT_EQ(circuit_auction_to_json(circuit_auction_from_json(j)), j);
  auto bad = j;
  bad["values"] = {"1/1", "0/1"};
  EXPECT_THROW(circuit_auction_from_json(bad), std::invalid_argument);
  auto short_list = j;
  short_list["pay"].erase(0);
  EXPECT_THROW(circuit_auction_from_json(short_list), std::invalid_argument);
}

TEST(CircuitAuction, IndexWidth) {
  EXPECT_EQ(index_width(2), 1u);
  EXPECT_EQ(index_width(3), 2u);
  EXPECT_EQ(index_width(4), 2u);
  EXPECT_EQ(index_width(5), 3u);
}

TEST(CircuitAuction, ZooMechanismsRoundTripThroughCircuits) {
  const std::vector<Money> g{q(0), q(1), q(2), q(3)};
  for (const auto& m : {first_price_burned_reserve(q(1)), fully_burned_second_price()}) {
    CircuitAuction ca = mechanism_to_circuit_auction(m, g, 2);
    EXPECT_EQ(ca.width(), 2u);
    const Mechanism back = circuit_auction_to_mechanism(ca);
    ProfileSpace space(g, 2);
    for (std::size_t p = 0; p < space.size(); ++p) {
      EXPECT_EQ(back.evaluate(space.profile(p)), m.evaluate(space.profile(p))) << m.label() << " " << p;
    }
  }
  EXPECT_THROW(mechanism_to_circuit_auction(fully_burned_posted_price(q(1, 2)), g, 2), std::invalid_argument);
}

TEST(Tautology, TautologyGivesFirstPriceOverZeroOne) {
  // With C = 1 the selectors act like ordinary bidders: the first bidder
  // bidding 1 wins and pays 1, nothing burned.
  for (const auto& c : {single(2, GateOp::CONST1), excluded_middle()}) {
    CircuitAuction ca = tautology_to_scpdp(c);
    const std::size_t n = c.inputs + 2;
    ASSERT_EQ(ca.n, n);
    const Mechanism m = circuit_auction_to_mechanism(ca);
    ProfileSpace space({q(0), q(1)}, n);
    for (std::size_t p = 0; p < space.size(); ++p) {
      BidVector b = space.profile(p);
      Outcome expect = Outcome::nobody(n);
      for (std::size_t i = 0; i < n; ++i) {
        if (b[i] == q(1)) {
          expect.confirmed[i] = true;
          expect.pay[i] = q(1);
          break;
        }
      }
      EXPECT_EQ(m.evaluate(b), expect) << to_string(b);
    }
  }
}

TEST(Decider, EmptyMechanismIsCollusionProof) {
  ScpdpDecision d = decide_2scpdp(constant_auction(3));
  EXPECT_TRUE(d.yes);
  EXPECT_FALSE(d.witness);
  EXPECT_EQ(d.to_json().at("answer"), "yes");
}

TEST(Decider, TautologiesAnswerYes) {
  EXPECT_TRUE(decide_2scpdp(tautology_to_scpdp(single(1, GateOp::CONST1))).yes);
  EXPECT_TRUE(decide_2scpdp(tautology_to_scpdp(excluded_middle())).yes);
}

TEST(Decider, FalsifiableCircuitAnswersNoWithAWitness) {
  CircuitAuction ca = tautology_to_scpdp(projection(1, 0));
  ScpdpDecision d = decide_2scpdp(ca);
  EXPECT_FALSE(d.yes);
  ASSERT_TRUE(d.witness);
  EXPECT_LE(d.witness->contract.order(), 2u);
  EXPECT_TRUE(verify_witness(circuit_auction_to_mechanism(ca), *d.witness));
  EXPECT_EQ(d.to_json().at("answer"), "no");
}

TEST(Decider, PreconditionFailureIsReported) {
  // Bidder 0 is charged 1 even when bidding 0.
  CircuitAuction ca = constant_auction(1);
  ca.pay[0] = single(1, GateOp::CONST1);
  ca.confirm[0] = single(1, GateOp::CONST1);
  EXPECT_THROW(decide_2scpdp(ca), PreconditionError);
}

TEST(Decider, AgreesWithExhaustivePairSearch) {
  const std::vector<Money> g{q(0), q(1), q(2)};
  for (std::uint64_t seed = 1; seed <= 25; ++seed) {
    const Mechanism m = random_tabulated(g, 2, seed, {Axiom::ir, Axiom::bb});
    for (MinerModel model : {MinerModel::passive, MinerModel::active}) {
      ScpdpDecision d = decide_2scp_table(m, g, 2, model);
      SearchResult s = find_c_sc(m, g, 2, 2, model);
      EXPECT_EQ(d.yes, !s.witness.has_value()) << seed << " " << to_string(model);
      if (d.witness) EXPECT_TRUE(verify_witness(m, *d.witness));
    }
  }
}

TEST(Decider, TautologyReductionMatchesBruteForce) {
  for (const auto& c : structured_circuits(2)) {
    EXPECT_EQ(decide_2scpdp(tautology_to_scpdp(c)).yes, is_tautology_bruteforce(c));
  }
}
