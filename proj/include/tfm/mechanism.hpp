#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "tfm/types.hpp"

namespace tfm {

/// Thrown when a mechanism is asked about a bid vector outside its domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Continuous (any non-negative rational) or a finite grid of values.
struct Domain {
  std::optional<std::vector<Money>> grid;  // sorted ascending when set

  static Domain continuous() { return {}; }
  static Domain on_grid(std::vector<Money> values);
  bool is_grid() const { return grid.has_value(); }
  bool contains(const Money& bid) const;
};

struct MechanismInfo {
  std::string name;
  std::map<std::string, std::string> params;
  Domain domain;
  std::optional<std::size_t> arity;  // fixed bid-vector length, if any
};

/// A deterministic transaction fee mechanism: bids in, Outcome out.
///
/// Cheap to copy; the rule is shared and immutable.
class Mechanism {
 public:
  using Rule = std::function<Outcome(std::span<const Money>)>;

  Mechanism(MechanismInfo info, Rule rule);

  /// Validates the domain and arity, then applies the rule.
  Outcome evaluate(std::span<const Money> bids) const;
  Outcome evaluate(const Setting& s) const { return evaluate(s.bids()); }

  const MechanismInfo& info() const { return *info_; }
  const std::string& name() const { return info_->name; }
  bool accepts_length(std::size_t n) const;
  /// A short label such as "first-price-burned-reserve(r=1/1)".
  std::string label() const;

 private:
  std::shared_ptr<const MechanismInfo> info_;
  std::shared_ptr<const Rule> rule_;
};

}  // namespace tfm
