#pragma once

#include <cmath>

#include "editseq/nn/graph.hpp"

namespace editseq::nn {

// Sinusoidal positional encoding, interleaved by frequency: even rows carry
// sin(n * w_i), odd rows cos(n * w_i) with w_i = 10000^(-2i/D).
template <typename S>
Vec<S> sinusoidal_encoding(int n, int width) {
  if (width % 2 != 0) throw std::invalid_argument("positional encoding width must be even");
  if (n < 0) throw std::invalid_argument("positional encoding index must be nonnegative");
  Vec<S> v(width);
  for (int i = 0; i < width / 2; ++i) {
    const double w = std::pow(10000.0, -2.0 * i / width);
    v(2 * i) = static_cast<S>(std::sin(n * w));
    v(2 * i + 1) = static_cast<S>(std::cos(n * w));
  }
  return v;
}

// Columns 0..count-1 encoded, as one D x count matrix.
template <typename S>
Mat<S> sinusoidal_columns(int count, int width) {
  Mat<S> m(width, count);
  for (int n = 0; n < count; ++n) m.col(n) = sinusoidal_encoding<S>(n, width);
  return m;
}

// Columns encoded per caller-chosen index (e.g. explicit edit positions).
template <typename S>
Mat<S> sinusoidal_for_indices(const std::vector<int>& indices, int width) {
  Mat<S> m(width, static_cast<int>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    m.col(static_cast<int>(j)) = sinusoidal_encoding<S>(indices[j], width);
  }
  return m;
}

}  // namespace editseq::nn
