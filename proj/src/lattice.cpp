#include "dfrw/lattice.hpp"

#include <limits>
#include <string>

#include "dfrw/error.hpp"

namespace dfrw {

Torus::Torus(int dim, int side) : dim_(dim), side_(side), sites_(1) {
  if (dim < 2 || dim > kMaxDim) {
    throw ValidationError("dimension must lie in [2, 4], got " + std::to_string(dim));
  }
  if (side < 4 || side % 2 != 0) {
    throw ValidationError("side length must be even and >= 4, got " + std::to_string(side));
  }
  for (int a = dim - 1; a >= 0; --a) {
    stride_[a] = sites_;
    sites_ *= static_cast<std::size_t>(side);
  }
  if (sites_ >= std::numeric_limits<std::uint32_t>::max()) {
    throw ValidationError("torus too large");
  }

  const auto dirs = static_cast<std::size_t>(2 * dim);
  auto table = std::make_shared<std::vector<std::uint32_t>>(sites_ * dirs);
  for (std::size_t site = 0; site < sites_; ++site) {
    for (int a = 0; a < dim; ++a) {
      const auto x = static_cast<int>((site / stride_[a]) % side);
      const std::size_t up = x == side - 1 ? site - (side - 1) * stride_[a] : site + stride_[a];
      const std::size_t down = x == 0 ? site + (side - 1) * stride_[a] : site - stride_[a];
      (*table)[site * dirs + 2 * a] = static_cast<std::uint32_t>(up);
      (*table)[site * dirs + 2 * a + 1] = static_cast<std::uint32_t>(down);
    }
  }
  neighbors_ = std::move(table);
}

Coords Torus::coords(std::size_t site) const {
  Coords x{};
  for (int a = 0; a < dim_; ++a) {
    x[a] = static_cast<std::int64_t>((site / stride_[a]) % side_);
  }
  return x;
}

std::size_t Torus::index(const Coords& x) const {
  std::size_t site = 0;
  for (int a = 0; a < dim_; ++a) {
    auto r = x[a] % side_;
    if (r < 0) r += side_;
    site += static_cast<std::size_t>(r) * stride_[a];
  }
  return site;
}

std::size_t Torus::translate(std::size_t site, const Coords& offset) const {
  Coords x = coords(site);
  for (int a = 0; a < dim_; ++a) x[a] += offset[a];
  return index(x);
}

std::vector<std::pair<int, int>> axis_pairs(int dim) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < dim; ++a) {
    for (int b = a + 1; b < dim; ++b) pairs.emplace_back(a, b);
  }
  return pairs;
}

}  // namespace dfrw
