#include "tfm/grid.hpp"

#include <algorithm>
#include <limits>

namespace tfm {

std::vector<Money> normalized_grid(std::vector<Money> grid) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) throw std::invalid_argument("grid must contain at least one value");
  return grid;
}

ProfileSpace::ProfileSpace(std::vector<Money> grid, std::size_t n)
    : grid_(normalized_grid(std::move(grid))), n_(n), size_(1) {
  if (n == 0) throw std::invalid_argument("need at least one bidder");
  for (std::size_t i = 0; i < n; ++i) {
    if (size_ > std::numeric_limits<std::size_t>::max() / grid_.size()) {
      throw std::overflow_error("profile space too large");
    }
    size_ *= grid_.size();
  }
}

std::vector<std::size_t> ProfileSpace::digits(std::size_t index) const {
  std::vector<std::size_t> d(n_);
  for (std::size_t i = n_; i-- > 0;) {
    d[i] = index % k();
    index /= k();
  }
  return d;
}

std::size_t ProfileSpace::index(const std::vector<std::size_t>& digits) const {
  std::size_t p = 0;
  for (std::size_t d : digits) p = p * k() + d;
  return p;
}

BidVector ProfileSpace::profile(std::size_t index) const {
  BidVector b(n_);
  for (std::size_t i = n_; i-- > 0;) {
    b[i] = grid_[index % k()];
    index /= k();
  }
  return b;
}

std::size_t ProfileSpace::find(const Money& v) const {
  auto it = std::lower_bound(grid_.begin(), grid_.end(), v);
  if (it == grid_.end() || *it != v) return k();
  return static_cast<std::size_t>(it - grid_.begin());
}

std::vector<Outcome> materialize(const Mechanism& mech, const ProfileSpace& space) {
  std::vector<Outcome> out;
  out.reserve(space.size());
  for (std::size_t p = 0; p < space.size(); ++p) out.push_back(mech.evaluate(space.profile(p)));
  return out;
}

}  // namespace tfm
