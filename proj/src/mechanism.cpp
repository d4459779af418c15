#include "tfm/mechanism.hpp"

#include <algorithm>

namespace tfm {

Domain Domain::on_grid(std::vector<Money> values) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.empty()) throw std::invalid_argument("grid domain needs at least one value");
  return Domain{std::move(values)};
}

bool Domain::contains(const Money& bid) const {
  if (!grid) return true;
  return std::binary_search(grid->begin(), grid->end(), bid);
}

Mechanism::Mechanism(MechanismInfo info, Rule rule)
    : info_(std::make_shared<const MechanismInfo>(std::move(info))),
      rule_(std::make_shared<const Rule>(std::move(rule))) {}

bool Mechanism::accepts_length(std::size_t n) const {
  return n >= 1 && (!info_->arity || *info_->arity == n);
}

Outcome Mechanism::evaluate(std::span<const Money> bids) const {
  if (!accepts_length(bids.size())) {
    throw DomainError(label() + " expects " + std::to_string(info_->arity.value_or(1)) +
                      " bids, got " + std::to_string(bids.size()));
  }
  for (const auto& b : bids) {
    if (!info_->domain.contains(b)) {
      throw DomainError("bid " + b.str() + " is outside the grid of " + label());
    }
  }
  Outcome out = (*rule_)(bids);
  if (out.confirmed.size() != bids.size() || out.pay.size() != bids.size() ||
      out.burn.size() != bids.size()) {
    throw std::logic_error(label() + " returned an outcome of the wrong length");
  }
  return out;
}

std::string Mechanism::label() const {
  std::string out = info_->name;
  if (!info_->params.empty()) {
    out += "(";
    bool first = true;
    for (const auto& [k, v] : info_->params) {
      if (!first) out += ",";
      out += k + "=" + v;
      first = false;
    }
    out += ")";
  }
  return out;
}

}  // namespace tfm
