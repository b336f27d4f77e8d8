#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "concord/matrix.hpp"
#include "concord/partition.hpp"

namespace concord {

// Concatenated 1-of-K_i coding of a basic partition set. Stored sparsely as
// one global column index per (point, block); a missing label is an all-zero
// block. Row l of the implied n x d 0/1 matrix has at most one 1 per block.
class binary_coding {
 public:
  explicit binary_coding(const partition_set& bps)
      : n_(bps.n()), widths_(bps.count()), offsets_(bps.count() + 1, 0) {
    const std::size_t r = bps.count();
    for (std::size_t i = 0; i < r; ++i) {
      widths_[i] = bps[i].k();
      offsets_[i + 1] = offsets_[i] + widths_[i];
    }
    cols_.resize(n_ * r);
    for (std::size_t i = 0; i < r; ++i) {
      const partition& p = bps[i];
      for (std::size_t l = 0; l < n_; ++l) {
        cols_[l * r + i] = p.covers(l) ? offsets_[i] + p.label(l)
                                       : missing_label;
      }
    }
  }

  std::size_t rows() const { return n_; }
  std::size_t blocks() const { return widths_.size(); }
  std::size_t width() const {
    return static_cast<std::size_t>(offsets_.back());
  }
  std::int32_t block_width(std::size_t i) const { return widths_[i]; }
  std::int32_t block_offset(std::size_t i) const { return offsets_[i]; }

  // Global column of the 1 in (row l, block i), or missing_label.
  std::int32_t column(std::size_t l, std::size_t i) const {
    return cols_[l * blocks() + i];
  }

  // Block owning a global column index.
  std::size_t block_of_column(std::size_t col) const {
    std::size_t lo = 0, hi = blocks();
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (static_cast<std::size_t>(offsets_[mid]) <= col)
        lo = mid;
      else
        hi = mid;
    }
    return lo;
  }
  bool covered(std::size_t l, std::size_t i) const {
    return column(l, i) != missing_label;
  }

  std::size_t row_coverage(std::size_t l) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < blocks(); ++i)
      if (covered(l, i)) ++c;
    return c;
  }

  std::size_t nonzero_count() const {
    std::size_t c = 0;
    for (const std::int32_t v : cols_)
      if (v != missing_label) ++c;
    return c;
  }

  // Dense n x d realization.
  matrix to_dense() const {
    matrix b(n_, width());
    for (std::size_t l = 0; l < n_; ++l)
      for (std::size_t i = 0; i < blocks(); ++i)
        if (covered(l, i))
          b(l, static_cast<std::size_t>(column(l, i))) = 1.0;
    return b;
  }

  // Dense n x (d+1) realization with a trailing all-ones bias column.
  matrix to_dense_with_bias() const {
    matrix b(n_, width() + 1);
    for (std::size_t l = 0; l < n_; ++l) {
      for (std::size_t i = 0; i < blocks(); ++i)
        if (covered(l, i))
          b(l, static_cast<std::size_t>(column(l, i))) = 1.0;
      b(l, width()) = 1.0;
    }
    return b;
  }

 private:
  std::size_t n_;
  std::vector<std::int32_t> widths_;
  std::vector<std::int32_t> offsets_;
  std::vector<std::int32_t> cols_;
};

inline binary_coding encode_binary(const partition_set& bps) {
  return binary_coding(bps);
}

}  // namespace concord
