#include "tfm/scpdp.hpp"

#include <algorithm>

#include "tfm/axioms.hpp"
#include "tfm/grid.hpp"
#include "tfm/tabulated.hpp"

namespace tfm {

std::size_t index_width(std::size_t k) {
  std::size_t w = 1;
  while ((std::size_t{1} << w) < k) ++w;
  return w;
}

std::size_t CircuitAuction::width() const { return index_width(values.size()); }

void CircuitAuction::validate() const {
  if (values.size() < 2) throw std::invalid_argument("circuit auction needs at least two values");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (!(values[i - 1] < values[i])) throw std::invalid_argument("values must be sorted ascending and distinct");
  }
  if (n == 0) throw std::invalid_argument("circuit auction needs at least one bidder");
  if (confirm.size() != n || pay.size() != n || burn.size() != n) {
    throw std::invalid_argument("need one confirm, pay and burn circuit per bidder");
  }
  const std::size_t bits = n * width();
  auto check = [&](const BoolCircuit& c, std::size_t outs, const char* what) {
    c.validate();
    if (c.inputs != bits) {
      throw std::invalid_argument(std::string(what) + " circuit takes " + std::to_string(c.inputs) +
                                  " inputs, expected " + std::to_string(bits));
    }
    if (c.outputs.size() != outs) {
      throw std::invalid_argument(std::string(what) + " circuit has " + std::to_string(c.outputs.size()) +
                                  " outputs, expected " + std::to_string(outs));
    }
  };
  for (std::size_t i = 0; i < n; ++i) {
    check(confirm[i], 1, "confirm");
    check(pay[i], width(), "pay");
    check(burn[i], width(), "burn");
  }
}

nlohmann::json circuit_auction_to_json(const CircuitAuction& ca) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& v : ca.values) values.push_back(v.str());
  auto list = [](const std::vector<BoolCircuit>& cs) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& c : cs) a.push_back(circuit_to_json(c));
    return a;
  };
  return {{"values", values}, {"n", ca.n}, {"confirm", list(ca.confirm)}, {"pay", list(ca.pay)},
          {"burn", list(ca.burn)}};
}

CircuitAuction circuit_auction_from_json(const nlohmann::json& j) {
  CircuitAuction ca;
  try {
    for (const auto& v : j.at("values")) ca.values.push_back(Money::parse(v.get<std::string>()));
    ca.n = j.at("n").get<std::size_t>();
    for (const auto& c : j.at("confirm")) ca.confirm.push_back(circuit_from_json(c));
    for (const auto& c : j.at("pay")) ca.pay.push_back(circuit_from_json(c));
    for (const auto& c : j.at("burn")) ca.burn.push_back(circuit_from_json(c));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed circuit auction: ") + e.what());
  }
  ca.validate();
  return ca;
}

namespace {

std::vector<bool> encode(const std::vector<std::size_t>& digits, std::size_t w) {
  std::vector<bool> bits;
  bits.reserve(digits.size() * w);
  for (std::size_t d : digits) {
    for (std::size_t b = 0; b < w; ++b) bits.push_back((d >> (w - 1 - b)) & 1u);
  }
  return bits;
}

std::size_t decode(const std::vector<bool>& bits) {
  std::size_t v = 0;
  for (bool b : bits) v = v << 1 | (b ? 1u : 0u);
  return v;
}

}  // namespace

Mechanism circuit_auction_to_mechanism(const CircuitAuction& ca) {
  ca.validate();
  ProfileSpace space(ca.values, ca.n);
  const std::size_t w = ca.width();
  std::vector<Outcome> table;
  table.reserve(space.size());
  for (std::size_t p = 0; p < space.size(); ++p) {
    const auto bits = encode(space.digits(p), w);
    Outcome o = Outcome::nobody(ca.n);
    for (std::size_t i = 0; i < ca.n; ++i) {
      o.confirmed[i] = eval_circuit(ca.confirm[i], bits).at(0);
      const std::size_t pi = decode(eval_circuit(ca.pay[i], bits));
      const std::size_t bi = decode(eval_circuit(ca.burn[i], bits));
      if (pi >= ca.values.size() || bi >= ca.values.size()) {
        throw std::invalid_argument("decoded value index out of range at profile " + to_string(space.profile(p)));
      }
      o.pay[i] = ca.values[pi];
      o.burn[i] = ca.values[bi];
    }
    table.push_back(std::move(o));
  }
  return make_tabulated("circuit-auction", ca.values, ca.n, std::move(table));
}

CircuitAuction mechanism_to_circuit_auction(const Mechanism& mech, const std::vector<Money>& values, std::size_t n) {
  ProfileSpace space(values, n);
  CircuitAuction ca;
  ca.values = space.grid();
  ca.n = n;
  const std::size_t w = ca.width();
  const std::size_t bits = n * w;
  const auto table = materialize(mech, space);

  // One circuit per output family with shared literals and minterms.
  auto build = [&](std::size_t i, std::size_t outs, auto bit_of) {
    BoolCircuit c;
    c.inputs = bits;
    std::vector<std::size_t> pos, neg;
    for (std::size_t b = 0; b < bits; ++b) {
      pos.push_back(c.input(b));
      neg.push_back(c.add(GateOp::NOT, {pos.back()}));
    }
    std::vector<std::vector<std::size_t>> terms(outs);
    for (std::size_t p = 0; p < space.size(); ++p) {
      std::optional<std::size_t> minterm;
      for (std::size_t o = 0; o < outs; ++o) {
        if (!bit_of(table[p], i, o)) continue;
        if (!minterm) {
          const auto enc = encode(space.digits(p), w);
          std::vector<std::size_t> lits;
          for (std::size_t b = 0; b < bits; ++b) lits.push_back(enc[b] ? pos[b] : neg[b]);
          minterm = lits.size() == 1 ? lits[0] : c.add(GateOp::AND, lits);
        }
        terms[o].push_back(*minterm);
      }
    }
    for (auto& t : terms) {
      if (t.empty()) {
        c.outputs.push_back(c.add(GateOp::CONST0));
      } else if (t.size() == 1) {
        c.outputs.push_back(t[0]);
      } else {
        c.outputs.push_back(c.add(GateOp::OR, t));
      }
    }
    return c;
  };
  auto index_of = [&](const Money& m) {
    std::size_t t = space.find(m);
    if (t == space.k()) throw std::invalid_argument("amount " + m.str() + " is not one of the values");
    return t;
  };
  for (std::size_t i = 0; i < n; ++i) {
    ca.confirm.push_back(build(i, 1, [](const Outcome& o, std::size_t j, std::size_t) { return bool(o.confirmed[j]); }));
    ca.pay.push_back(build(i, w, [&](const Outcome& o, std::size_t j, std::size_t b) {
      return bool((index_of(o.pay[j]) >> (w - 1 - b)) & 1u);
    }));
    ca.burn.push_back(build(i, w, [&](const Outcome& o, std::size_t j, std::size_t b) {
      return bool((index_of(o.burn[j]) >> (w - 1 - b)) & 1u);
    }));
  }
  return ca;
}

nlohmann::json ScpdpDecision::to_json() const {
  nlohmann::json j{{"answer", yes ? "yes" : "no"}, {"pairs_checked", pairs_checked}};
  if (witness) j["witness"] = witness_to_json(*witness);
  return j;
}

ScpdpDecision decide_2scp_table(const Mechanism& mech, const std::vector<Money>& values, std::size_t n,
                                MinerModel model) {
  for (const auto& r : {check_individual_rationality(mech, values, n), check_burn_balance(mech, values, n)}) {
    if (!r.pass) throw PreconditionError(r.check + " fails: " + r.message);
  }
  ProfileSpace space(values, n);
  const auto table = materialize(mech, space);
  std::vector<SignedMoney> miner(space.size());
  std::vector<BidVector> profiles(space.size());
  for (std::size_t p = 0; p < space.size(); ++p) {
    profiles[p] = space.profile(p);
    for (std::size_t i = 0; i < n; ++i) miner[p] += table[p].pay[i].value() - table[p].burn[i].value();
  }
  auto utility = [&](std::size_t p, std::size_t i, const Money& v) {
    const Outcome& o = table[p];
    return o.confirmed[i] ? v.value() - o.pay[i].value() : -o.pay[i].value();
  };
  ScpdpDecision d;
  std::vector<std::size_t> mandatory;
  std::vector<std::pair<SignedMoney, std::size_t>> gains;
  for (std::size_t a = 0; a < space.size(); ++a) {
    const BidVector& A = profiles[a];
    for (std::size_t b = 0; b < space.size(); ++b) {
      if (a == b) continue;
      ++d.pairs_checked;
      const BidVector& B = profiles[b];
      mandatory.clear();
      gains.clear();
      for (std::size_t i = 0; i < n; ++i) {
        const bool changed = A[i] != B[i];
        if (changed && (model == MinerModel::passive || !B[i].is_zero())) {
          mandatory.push_back(i);
        } else {
          gains.emplace_back(utility(b, i, A[i]) - utility(a, i, A[i]), i);
        }
      }
      if (mandatory.size() > 2) continue;
      SignedMoney delta = miner[b] - miner[a];
      for (std::size_t i : mandatory) delta += utility(b, i, A[i]) - utility(a, i, A[i]);
      std::stable_sort(gains.begin(), gains.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
      BidderSet C = mandatory;
      for (const auto& [g, i] : gains) {
        if (C.size() >= 2 || g.sign() <= 0) break;
        delta += g;
        C.push_back(i);
      }
      if (delta.sign() <= 0) continue;
      SideContract sc;
      sc.model = model;
      sc.coalition = normalized(C);
      for (std::size_t i : sc.coalition) sc.new_bids.emplace(i, B[i]);
      for (std::size_t i = 0; i < n; ++i) {
        if (A[i] != B[i] && !std::binary_search(sc.coalition.begin(), sc.coalition.end(), i)) sc.omitted.push_back(i);
      }
      Witness w = make_witness(mech, Setting::honest(A), std::move(sc));
      if (!verify_witness(mech, w)) {
        throw std::logic_error("pair decider produced an unverifiable witness at " + to_string(A) + " -> " +
                               to_string(B));
      }
      d.yes = false;
      d.witness = std::move(w);
      return d;
    }
  }
  return d;
}

ScpdpDecision decide_2scpdp(const CircuitAuction& ca, MinerModel model) {
  Mechanism mech = circuit_auction_to_mechanism(ca);
  return decide_2scp_table(mech, ca.values, ca.n, model);
}

CircuitAuction tautology_to_scpdp(const BoolCircuit& c) {
  c.validate();
  if (c.outputs.size() != 1) throw std::invalid_argument("tautology reduction needs a single-output circuit");
  const std::size_t m = c.inputs;
  CircuitAuction ca;
  ca.values = {Money(0), Money(1)};
  ca.n = m + 2;
  const std::size_t bits = ca.n;  // one bit per bidder

  // Gadget copy of c reading q_i from input i+2; returns the output gate of the copy.
  auto embed = [&](BoolCircuit& out) {
    const std::size_t base = out.gates.size();
    for (const auto& g : c.gates) {
      Gate copy = g;
      for (auto& a : copy.args) a += base;
      if (copy.op == GateOp::INPUT) copy.index += 2;
      out.gates.push_back(std::move(copy));
    }
    return base + c.outputs[0];
  };
  auto fresh = [&]() {
    BoolCircuit k;
    k.inputs = bits;
    return k;
  };

  for (std::size_t j = 0; j < ca.n; ++j) {
    BoolCircuit k = fresh();
    const std::size_t s1 = k.input(0), s2 = k.input(1);
    const std::size_t ns1 = k.add(GateOp::NOT, {s1}), ns2 = k.add(GateOp::NOT, {s2});
    std::size_t conf;
    if (j < 2) {
      const std::size_t cq = embed(k);
      const std::size_t ncq = k.add(GateOp::NOT, {cq});
      const std::size_t first = k.add(GateOp::AND, {s1, ns2, j == 0 ? cq : ncq});
      const std::size_t second = k.add(GateOp::AND, {ns1, s2, j == 0 ? ncq : cq});
      if (j == 0) {
        conf = k.add(GateOp::OR, {first, second, k.add(GateOp::AND, {s1, s2})});
      } else {
        conf = k.add(GateOp::OR, {first, second});
      }
    } else {
      std::vector<std::size_t> lits{k.input(j), ns1, ns2};
      for (std::size_t e = 2; e < j; ++e) lits.push_back(k.add(GateOp::NOT, {k.input(e)}));
      conf = k.add(GateOp::AND, lits);
    }
    k.outputs = {conf};
    BoolCircuit pay = k;
    pay.outputs = {pay.add(GateOp::AND, {conf, pay.input(j)})};
    BoolCircuit burn = fresh();
    burn.outputs = {burn.add(GateOp::CONST0)};
    ca.confirm.push_back(std::move(k));
    ca.pay.push_back(std::move(pay));
    ca.burn.push_back(std::move(burn));
  }
  ca.validate();
  return ca;
}

}  // namespace tfm
