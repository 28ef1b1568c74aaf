#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qcpgm::core {

/// Dense row-major 2-D array. Row index runs along y, column index along x.
template <typename T>
class Grid2D {
 public:
  Grid2D() = default;

  Grid2D(int rows, int cols, T fill = T{}) : rows_(rows), cols_(cols) {
    if (rows <= 0 || cols <= 0) {
      throw std::invalid_argument("Grid2D: dimensions must be positive");
    }
    data_.assign(static_cast<std::size_t>(rows) * cols, fill);
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  const T& operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * cols_ + c];
  }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  template <typename U>
  bool same_shape(const Grid2D<U>& other) const {
    return rows_ == other.rows() && cols_ == other.cols();
  }

  bool in_bounds(int r, int c) const { return r >= 0 && r < rows_ && c >= 0 && c < cols_; }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<T> data_;
};

}  // namespace qcpgm::core
