#pragma once

#include <stdexcept>
#include <string>

namespace concord {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File or stream problems (unreadable, malformed CSV).
struct io_error : error {
  using error::error;
};

// Invalid configuration or parameters.
struct config_error : error {
  using error::error;
};

// Matrix/vector dimension chains that do not line up.
struct shape_mismatch : error {
  using error::error;
};

// A point has zero accumulated degree (missing in every basic partition).
struct zero_weight : error {
  using error::error;
};

// A point carries no label in any basic partition.
struct all_missing_point : error {
  using error::error;
};

// Requested k exceeds the number of points.
struct k_too_large : error {
  using error::error;
};

// An n x n dense path was requested above the configured cap.
struct dense_cap_exceeded : error {
  using error::error;
};

// Linear system is singular and no ridge was supplied.
struct singular_system : error {
  using error::error;
};

// Degree matrix has a zero diagonal entry; D^{-1/2} undefined.
struct disconnected_degree : error {
  using error::error;
};

// Two partitions share no point that is labeled in both.
struct no_overlap : error {
  using error::error;
};

}  // namespace concord
