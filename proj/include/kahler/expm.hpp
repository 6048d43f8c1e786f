#pragma once

#include <cmath>

#include "kahler/space.hpp"

namespace kahler {

// Scaling and squaring around a degree-18 Taylor core. After scaling,
// ||A||_1 <= 1/2, so the truncated tail is below 0.5^19 / 19! ~ 2e-23.
inline Matrix exp_matrix(const Matrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("exp_matrix needs a square matrix");
  const Eigen::Index n = a.rows();
  if (n == 0) return a;
  if (!a.allFinite()) throw Error("exp_matrix: non-finite entries");

  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
  const Matrix scaled = a / std::ldexp(1.0, squarings);

  constexpr int kDegree = 18;
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int d = 1; d <= kDegree; ++d) {
    term = (term * scaled) / static_cast<double>(d);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace kahler
