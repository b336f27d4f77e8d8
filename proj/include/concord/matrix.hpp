#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "concord/errors.hpp"

namespace concord {

// Minimal row-major dense matrix of doubles.
class matrix {
 public:
  matrix() : rows_(0), cols_(0) {}
  matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

// Columns of `m` selected by (sorted) indices, in the given order.
inline matrix select_columns(const matrix& m,
                             const std::vector<std::size_t>& cols) {
  matrix out(m.rows(), cols.size());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(i, cols[j]);
  return out;
}

// Rows of `m` selected by indices, in the given order.
inline matrix select_rows(const matrix& m,
                          const std::vector<std::size_t>& rows) {
  matrix out(rows.size(), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = m(rows[i], j);
  return out;
}

// Per-column z-scores (population standard deviation); constant columns
// become zero.
inline matrix standardize_columns(const matrix& m) {
  const std::size_t n = m.rows(), d = m.cols();
  if (n == 0) return m;
  matrix out(n, d);
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += m(i, j);
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = m(i, j) - mean;
      var += c * c;
    }
    var /= static_cast<double>(n);
    const double sd = var > 0.0 ? std::sqrt(var) : 0.0;
    for (std::size_t i = 0; i < n; ++i)
      out(i, j) = sd > 0.0 ? (m(i, j) - mean) / sd : 0.0;
  }
  return out;
}

}  // namespace concord
