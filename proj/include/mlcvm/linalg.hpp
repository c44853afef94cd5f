#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace mlcvm {

using Vec = std::vector<double>;
using ConstRow = std::span<const double>;
using Row = std::span<double>;

inline double dot(ConstRow a, ConstRow b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(ConstRow a) { return dot(a, a); }

inline double squared_distance(ConstRow a, ConstRow b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double diff = a[i] - b[i];
    s += diff * diff;
  }
  return s;
}

// y += alpha * x
inline void axpy(double alpha, ConstRow x, Row y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline bool all_finite(ConstRow a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace mlcvm
