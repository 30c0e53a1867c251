// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kseq/error.hpp"

namespace kseq {

/// Dense row-major 2-D grid.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(int rows, int cols, T fill = T{})
      : rows_(rows), cols_(cols) {
    if (rows < 0 || cols < 0) {
      throw Error("grid.bad_dims", "grid dimensions must be non-negative");
    }
    data_.assign(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), fill);
  }

  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }
  std::size_t size() const noexcept { return data_.size(); }

  bool contains(int r, int c) const noexcept {
    return r >= 0 && c >= 0 && r < rows_ && c < cols_;
  }

  T& operator()(int r, int c) { return data_[index(r, c)]; }
  const T& operator()(int r, int c) const { return data_[index(r, c)]; }

  /// Out-of-bounds reads return `outside`.
  T at_or(int r, int c, T outside) const {
    return contains(r, c) ? data_[index(r, c)] : outside;
  }

  std::span<T> data() noexcept { return data_; }
  std::span<const T> data() const noexcept { return data_; }

  bool same_shape(const Grid& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  std::size_t index(int r, int c) const noexcept {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(c);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

/// 8-bit grayscale raster.
using Raster = Grid<std::uint8_t>;
/// Binary mask stored as 0/1 bytes.
using Mask = Grid<std::uint8_t>;

struct PixelPos {
  int row = 0;
  int col = 0;
  friend auto operator<=>(const PixelPos&, const PixelPos&) = default;
};

/// Continuous image coordinate (pixel (r, c) has its center at (r, c)).
struct Point2 {
  double row = 0.0;
  double col = 0.0;
};

inline std::size_t count_foreground(const Mask& mask) {
  std::size_t n = 0;
  for (auto v : mask.data()) n += v != 0;
  return n;
}

}  // namespace kseq
