#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace tfm {

enum class GateOp { AND, OR, NOT, CONST0, CONST1, INPUT };
std::string to_string(GateOp op);
GateOp parse_gate_op(const std::string& text);

struct Gate {
  GateOp op;
  std::vector<std::size_t> args;  // earlier gate indices
  std::size_t index = 0;          // input position, INPUT only

  friend bool operator==(const Gate&, const Gate&) = default;
};

/// Gate list in topological order; outputs point into the list.
struct BoolCircuit {
  std::size_t inputs = 0;
  std::vector<Gate> gates;
  std::vector<std::size_t> outputs;

  /// Throws std::invalid_argument on forward references, bad arities or
  /// input indices out of range.
  void validate() const;

  std::size_t add(GateOp op, std::vector<std::size_t> args = {});
  std::size_t input(std::size_t i);

  friend bool operator==(const BoolCircuit&, const BoolCircuit&) = default;
};

std::vector<bool> eval_circuit(const BoolCircuit& c, const std::vector<bool>& bits);

/// All 2^inputs assignments output 1 on every output. At most 20 inputs.
bool is_tautology_bruteforce(const BoolCircuit& c);

nlohmann::json circuit_to_json(const BoolCircuit& c);
BoolCircuit circuit_from_json(const nlohmann::json& j);

/// Sum-of-minterms circuit for a truth table over `inputs` bits, where
/// row r holds the output for the assignment whose big-endian bits spell r.
BoolCircuit dnf_circuit(std::size_t inputs, const std::vector<bool>& truth);

/// Every boolean function of 1..max_inputs inputs as a minterm circuit.
std::vector<BoolCircuit> structured_circuits(std::size_t max_inputs);

/// Seeded random gate lists on 1..max_inputs inputs, a quarter of them
/// forced to be tautologies.
std::vector<BoolCircuit> random_circuits(std::size_t count, std::size_t max_inputs, std::uint64_t seed);

}  // namespace tfm
