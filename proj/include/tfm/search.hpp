#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfm/axioms.hpp"
#include "tfm/contract.hpp"
#include "tfm/mechanism.hpp"

namespace tfm {

struct SearchLimits {
  std::size_t max_fakes = 2;
  bool allow_omissions = true;
  std::uint64_t max_contracts = 0;  // 0: no limit
  std::size_t min_coalition = 0;
  std::optional<BidVector> fixed_profile;  // search only this honest A
  unsigned workers = 0;                    // 0: default_workers()
  bool force_exact = false;                // skip the scaled-integer fast path
};

enum class Verdict { holds, refuted, truncated };
std::string to_string(Verdict v);

struct SearchResult {
  Verdict verdict = Verdict::holds;
  std::optional<Witness> witness;
  std::uint64_t contracts_checked = 0;  // reported for holds and truncated only
  std::size_t profiles_searched = 0;
  std::size_t profiles_total = 0;
  std::size_t effective_max_fakes = 0;
  bool omissions = false;
  bool integer_path = false;
  std::vector<std::string> notes;

  nlohmann::json to_json() const;
};

/// Exhaustive search for a beneficial contract of the miner and at most c
/// bidders over honest profiles A in grid^n, new bids, omissions and fakes
/// drawn from the grid. Returns the lexicographically first witness by
/// (A, coalition, new bids, omissions, fakes). Deterministic for any
/// worker count.
SearchResult find_c_sc(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n, std::size_t c,
                       MinerModel model, const SearchLimits& limits = {});

/// Same search read as a verdict: holds (exhaustive, grid certificate only),
/// refuted with the witness, or truncated.
inline SearchResult is_c_scp_on_grid(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n,
                                     std::size_t c, MinerModel model, const SearchLimits& limits = {}) {
  return find_c_sc(mech, grid, n, c, model, limits);
}

/// Truthful bidding is a best response for every bidder at every grid
/// profile, against deviations within the grid.
CheckReport check_uic(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n);

/// TFM_WORKERS if set, else hardware concurrency (at least 1).
unsigned default_workers();

}  // namespace tfm
