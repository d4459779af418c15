#include "tfm/circuit.hpp"

#include <random>

namespace tfm {

std::string to_string(GateOp op) {
  switch (op) {
    case GateOp::AND: return "AND";
    case GateOp::OR: return "OR";
    case GateOp::NOT: return "NOT";
    case GateOp::CONST0: return "CONST0";
    case GateOp::CONST1: return "CONST1";
    case GateOp::INPUT: return "INPUT";
  }
  return "?";
}

GateOp parse_gate_op(const std::string& text) {
  for (GateOp op : {GateOp::AND, GateOp::OR, GateOp::NOT, GateOp::CONST0, GateOp::CONST1, GateOp::INPUT}) {
    if (to_string(op) == text) return op;
  }
  throw std::invalid_argument("unknown gate op '" + text + "'");
}

namespace {

std::size_t arity(GateOp op) {
  switch (op) {
    case GateOp::AND:
    case GateOp::OR: return 2;
    case GateOp::NOT: return 1;
    default: return 0;
  }
}

}  // namespace

void BoolCircuit::validate() const {
  for (std::size_t g = 0; g < gates.size(); ++g) {
    const Gate& gate = gates[g];
    const std::string where = "gate " + std::to_string(g) + " (" + to_string(gate.op) + ")";
    // AND/OR accept two or more operands
    const std::size_t need = arity(gate.op);
    if (need == 2 ? gate.args.size() < 2 : gate.args.size() != need) {
      throw std::invalid_argument(where + " has " + std::to_string(gate.args.size()) + " operands");
    }
    for (std::size_t a : gate.args) {
      if (a >= g) throw std::invalid_argument(where + " refers to gate " + std::to_string(a) + " not before it");
    }
    if (gate.op == GateOp::INPUT && gate.index >= inputs) {
      throw std::invalid_argument(where + " reads input " + std::to_string(gate.index) + " of " +
                                  std::to_string(inputs));
    }
  }
  for (std::size_t o : outputs) {
    if (o >= gates.size()) throw std::invalid_argument("output refers to missing gate " + std::to_string(o));
  }
}

std::size_t BoolCircuit::add(GateOp op, std::vector<std::size_t> args) {
  gates.push_back(Gate{op, std::move(args), 0});
  return gates.size() - 1;
}

std::size_t BoolCircuit::input(std::size_t i) {
  gates.push_back(Gate{GateOp::INPUT, {}, i});
  return gates.size() - 1;
}

std::vector<bool> eval_circuit(const BoolCircuit& c, const std::vector<bool>& bits) {
  if (bits.size() != c.inputs) {
    throw std::invalid_argument("circuit takes " + std::to_string(c.inputs) + " bits, got " +
                                std::to_string(bits.size()));
  }
  std::vector<bool> val(c.gates.size());
  for (std::size_t g = 0; g < c.gates.size(); ++g) {
    const Gate& gate = c.gates[g];
    switch (gate.op) {
      case GateOp::AND: {
        bool v = true;
        for (std::size_t a : gate.args) v = v && val[a];
        val[g] = v;
        break;
      }
      case GateOp::OR: {
        bool v = false;
        for (std::size_t a : gate.args) v = v || val[a];
        val[g] = v;
        break;
      }
      case GateOp::NOT: val[g] = !val[gate.args.at(0)]; break;
      case GateOp::CONST0: val[g] = false; break;
      case GateOp::CONST1: val[g] = true; break;
      case GateOp::INPUT: val[g] = bits.at(gate.index); break;
    }
  }
  std::vector<bool> out;
  out.reserve(c.outputs.size());
  for (std::size_t o : c.outputs) out.push_back(val.at(o));
  return out;
}

bool is_tautology_bruteforce(const BoolCircuit& c) {
  if (c.inputs > 20) throw std::invalid_argument("tautology check is limited to 20 inputs");
  std::vector<bool> bits(c.inputs);
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << c.inputs); ++m) {
    for (std::size_t i = 0; i < c.inputs; ++i) bits[i] = (m >> (c.inputs - 1 - i)) & 1u;
    for (bool b : eval_circuit(c, bits)) {
      if (!b) return false;
    }
  }
  return true;
}

nlohmann::json circuit_to_json(const BoolCircuit& c) {
  nlohmann::json gates = nlohmann::json::array();
  for (const auto& g : c.gates) {
    nlohmann::json j{{"op", to_string(g.op)}};
    if (g.op == GateOp::INPUT) {
      j["index"] = g.index;
    } else if (!g.args.empty()) {
      j["args"] = g.args;
    }
    gates.push_back(j);
  }
  return {{"inputs", c.inputs}, {"gates", gates}, {"outputs", c.outputs}};
}

BoolCircuit circuit_from_json(const nlohmann::json& j) {
  BoolCircuit c;
  try {
    c.inputs = j.at("inputs").get<std::size_t>();
    for (const auto& g : j.at("gates")) {
      Gate gate{parse_gate_op(g.at("op").get<std::string>()), {}, 0};
      if (g.contains("args")) gate.args = g.at("args").get<std::vector<std::size_t>>();
      if (gate.op == GateOp::INPUT) gate.index = g.at("index").get<std::size_t>();
      c.gates.push_back(std::move(gate));
    }
    c.outputs = j.at("outputs").get<std::vector<std::size_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed circuit: ") + e.what());
  }
  c.validate();
  return c;
}

BoolCircuit dnf_circuit(std::size_t inputs, const std::vector<bool>& truth) {
  if (truth.size() != (std::size_t{1} << inputs)) throw std::invalid_argument("truth table has the wrong size");
  BoolCircuit c;
  c.inputs = inputs;
  std::vector<std::size_t> pos, neg;
  for (std::size_t i = 0; i < inputs; ++i) {
    pos.push_back(c.input(i));
    neg.push_back(c.add(GateOp::NOT, {pos.back()}));
  }
  std::vector<std::size_t> terms;
  for (std::size_t r = 0; r < truth.size(); ++r) {
    if (!truth[r]) continue;
    std::vector<std::size_t> lits;
    for (std::size_t i = 0; i < inputs; ++i) lits.push_back((r >> (inputs - 1 - i)) & 1u ? pos[i] : neg[i]);
    if (lits.empty()) {
      terms.push_back(c.add(GateOp::CONST1));
    } else if (lits.size() == 1) {
      terms.push_back(lits[0]);
    } else {
      terms.push_back(c.add(GateOp::AND, lits));
    }
  }
  if (terms.empty()) {
    c.outputs = {c.add(GateOp::CONST0)};
  } else if (terms.size() == 1) {
    c.outputs = {terms[0]};
  } else {
    c.outputs = {c.add(GateOp::OR, terms)};
  }
  return c;
}

std::vector<BoolCircuit> structured_circuits(std::size_t max_inputs) {
  std::vector<BoolCircuit> out;
  for (std::size_t m = 1; m <= max_inputs; ++m) {
    const std::size_t rows = std::size_t{1} << m;
    for (std::uint64_t f = 0; f < (std::uint64_t{1} << rows); ++f) {
      std::vector<bool> truth(rows);
      for (std::size_t r = 0; r < rows; ++r) truth[r] = (f >> r) & 1u;
      out.push_back(dnf_circuit(m, truth));
    }
  }
  return out;
}

std::vector<BoolCircuit> random_circuits(std::size_t count, std::size_t max_inputs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
  std::vector<BoolCircuit> out;
  for (std::size_t t = 0; t < count; ++t) {
    BoolCircuit c;
    c.inputs = pick(1, max_inputs);
    for (std::size_t i = 0; i < c.inputs; ++i) c.input(i);
    const std::size_t extra = pick(2, 10);
    for (std::size_t g = 0; g < extra; ++g) {
      const std::size_t last = c.gates.size() - 1;
      switch (pick(0, 5)) {
        case 0:
        case 1: c.add(GateOp::AND, {pick(0, last), pick(0, last)}); break;
        case 2:
        case 3: c.add(GateOp::OR, {pick(0, last), pick(0, last)}); break;
        case 4: c.add(GateOp::NOT, {pick(0, last)}); break;
        default: c.add(pick(0, 1) ? GateOp::CONST1 : GateOp::CONST0); break;
      }
    }
    std::size_t top = c.gates.size() - 1;
    if (t % 4 == 3) {
      const std::size_t other = pick(0, top);
      top = c.add(GateOp::OR, {top, c.add(GateOp::NOT, {top}), other});
    }
    c.outputs = {top};
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tfm
