#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tfm/axioms.hpp"
#include "tfm/mechanism.hpp"

namespace tfm {

/// A zero-utility bidder changing its bid without changing its own
/// confirmation status leaves the number of non-zero-utility bidders alone.
/// A violation carries the pair contract {mover, affected bidder}.
CheckReport check_nonbossiness(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n);

enum class MonotonicityDirection { increase, decrease };
std::string to_string(MonotonicityDirection d);
MonotonicityDirection parse_direction(const std::string& text);

/// increase: an unconfirmed bidder raising its bid, still below the lowest
/// confirmed bid, is confirmed afterwards or the confirmed set weakly grows.
/// decrease: a confirmed bidder lowering its bid, still above the highest
/// unconfirmed bid, is unconfirmed afterwards or the unconfirmed set weakly grows.
CheckReport check_monotonicity(const Mechanism& mech, const std::vector<Money>& grid, std::size_t n,
                               MonotonicityDirection direction);

}  // namespace tfm
