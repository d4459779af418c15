#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfm/mechanism.hpp"

namespace tfm {

/// Bad tabulated-mechanism document: schema violation or a non-total table.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GenerationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fixed-arity mechanism backed by an explicit outcome for every profile in
/// values^n (index order of ProfileSpace). Outcomes are used verbatim.
Mechanism make_tabulated(std::string name, std::vector<Money> values, std::size_t n,
                         std::vector<Outcome> table);

Mechanism tabulated_from_json(const nlohmann::json& j);
nlohmann::json tabulated_to_json(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n);

Mechanism load_tabulated(const std::filesystem::path& path);
void save_tabulated(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n,
                    const std::filesystem::path& path);

enum class Axiom { ir, bb, anonymous, prefix, consistent_tie_breaking };
using AxiomSet = std::set<Axiom>;

AxiomSet all_axioms();
Axiom parse_axiom(const std::string& text);

/// Seeded random tabulated mechanism satisfying the requested axioms.
/// Confirmation sets are prefixes of the stable descending order,
/// payments are bid * m/4, burns payment * m'/4, and anonymity comes from
/// defining each cell on the sorted profile. Consistent tie-breaking is
/// obtained by repairing offending cells.
Mechanism random_tabulated(const std::vector<Money>& grid, std::size_t n, std::uint64_t seed,
                           const AxiomSet& axioms);

}  // namespace tfm
