#pragma once

#include <Eigen/Dense>

#include "kahler/space.hpp"

namespace kahler {

/// Default relative rank threshold: pivots below 1e-8 of the largest pivot
/// count as zero.
inline constexpr double kRankThreshold = 1e-8;

/// Numerical rank from a column-pivoted Householder QR.
inline int numerical_rank(const Matrix& a, double rel_threshold = kRankThreshold) {
  if (a.size() == 0) return 0;
  Eigen::ColPivHouseholderQR<Matrix> qr(a);
  qr.setThreshold(rel_threshold);
  return static_cast<int>(qr.rank());
}

struct LeastSquaresResult {
  Vector x;
  double residual = 0.0;  // ||A x - b|| / max(1, ||b||)
  int rank = 0;
};

/// Minimum-norm least-squares solution via a complete orthogonal
/// decomposition.
inline LeastSquaresResult min_norm_solve(const Matrix& a, const Vector& b,
                                         double rel_threshold = kRankThreshold) {
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
  cod.setThreshold(rel_threshold);
  LeastSquaresResult r;
  r.x = cod.solve(b);
  r.rank = static_cast<int>(cod.rank());
  r.residual = (a * r.x - b).norm() / std::max(1.0, b.norm());
  return r;
}

}  // namespace kahler
