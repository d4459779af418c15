#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "tfm/mechanism.hpp"
#include "tfm/types.hpp"

namespace tfm {

/// Lexicographic enumeration of grid^n: profile index p has digit
/// (p / k^(n-1-i)) % k at position i, so position 0 is most significant.
class ProfileSpace {
 public:
  ProfileSpace(std::vector<Money> grid, std::size_t n);

  const std::vector<Money>& grid() const { return grid_; }
  std::size_t n() const { return n_; }
  std::size_t k() const { return grid_.size(); }
  std::size_t size() const { return size_; }

  std::vector<std::size_t> digits(std::size_t index) const;
  std::size_t index(const std::vector<std::size_t>& digits) const;
  BidVector profile(std::size_t index) const;
  /// Position of a grid value, or k() when absent.
  std::size_t find(const Money& v) const;

 private:
  std::vector<Money> grid_;
  std::size_t n_;
  std::size_t size_;
};

/// Outcome of every profile of the space, in index order.
std::vector<Outcome> materialize(const Mechanism& mech, const ProfileSpace& space);

/// Sorted, de-duplicated copy; throws on an empty grid.
std::vector<Money> normalized_grid(std::vector<Money> grid);

}  // namespace tfm
