#pragma once

#include <string>
#include <vector>

#include "qrs/matrix.hpp"

namespace qrs {

struct Dataset {
  Matrix x;   // n x p, samples by features
  Vector y;   // n
  std::vector<std::string> feature_names;  // empty means default 1-based names

  // "x1".."xp" when no header was present
  std::string feature_name(std::size_t j) const;
};

// Rectangular numeric CSV with an optional header row. response_column is
// a header name or a 1-based column index; the remaining columns form X
// in file order. NaN/Inf cells and ragged rows are rejected with their
// location. Parsing is locale-independent.
Dataset load_csv(const std::string& path, const std::string& response_column);

// LIBSVM lines "label idx:value ...", 1-based strictly increasing indices,
// densified to p = max index seen.
Dataset load_libsvm(const std::string& path);

// Header "y,<names>", values at 17 significant digits (lossless round trip).
void save_csv(const Dataset& ds, const std::string& path);

// Whitespace-separated positive reals, one stream (weights files).
Vector load_weights(const std::string& path);

}  // namespace qrs
