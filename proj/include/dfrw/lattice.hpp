#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

namespace dfrw {

inline constexpr int kMaxDim = 4;

/// Elementary lattice step ±e_axis. The 2d directions are indexed with
/// axis ascending and + before −, i.e. index = 2*axis + (sign < 0).
struct Direction {
  int axis = 0;
  int sign = 1;

  constexpr int index() const { return 2 * axis + (sign < 0 ? 1 : 0); }
  constexpr Direction negated() const { return {axis, -sign}; }
  static constexpr Direction from_index(int i) { return {i / 2, (i % 2 == 0) ? 1 : -1}; }
  friend constexpr bool operator==(Direction, Direction) = default;
};

/// Index of the opposite direction.
constexpr int opposite(int dir) { return dir ^ 1; }

using Coords = std::array<std::int64_t, kMaxDim>;

/// Discrete torus (Z/LZ)^d. Sites are numbered lexicographically with axis 0
/// the slowest-varying coordinate. Copies share one neighbour table.
class Torus {
 public:
  Torus(int dim, int side);

  int dim() const { return dim_; }
  int side() const { return side_; }
  int directions() const { return 2 * dim_; }
  std::size_t sites() const { return sites_; }
  std::size_t stride(int axis) const { return stride_[axis]; }

  std::size_t neighbor(std::size_t site, int dir) const {
    return (*neighbors_)[site * static_cast<std::size_t>(2 * dim_) + dir];
  }
  std::size_t neighbor(std::size_t site, Direction k) const { return neighbor(site, k.index()); }

  /// Site reached from `site` by adding the displacement `offset` (wrapped).
  std::size_t translate(std::size_t site, const Coords& offset) const;

  Coords coords(std::size_t site) const;
  /// Site index of arbitrary integer coordinates, reduced mod L.
  std::size_t index(const Coords& x) const;

  friend bool operator==(const Torus& a, const Torus& b) {
    return a.dim_ == b.dim_ && a.side_ == b.side_;
  }

 private:
  int dim_;
  int side_;
  std::size_t sites_;
  std::array<std::size_t, kMaxDim> stride_{};
  std::shared_ptr<const std::vector<std::uint32_t>> neighbors_;
};

/// Unordered axis pairs a < b in lexicographic order.
std::vector<std::pair<int, int>> axis_pairs(int dim);

}  // namespace dfrw
