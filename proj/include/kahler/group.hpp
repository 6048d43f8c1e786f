#pragma once

#include <cstdint>
#include <random>

#include "kahler/expm.hpp"
#include "kahler/space.hpp"

namespace kahler {

/// An isometry T of the space that either commutes (chi = +1) or
/// anticommutes (chi = -1) with J0.
struct GroupElement {
  Matrix t;
  int chi = 1;
};

/// max |A^T G + G A|; zero iff A is skew-adjoint for the metric.
inline double skew_adjoint_residual(const Matrix& a, const HermitianSpace& s) {
  const Matrix& g = s.metric();
  return (a.transpose() * g + g * a).cwiseAbs().maxCoeff();
}

/// max |A J0 - J0 A|.
inline double commutator_residual(const Matrix& a, const HermitianSpace& s) {
  return (a * s.j0() - s.j0() * a).cwiseAbs().maxCoeff();
}

/// Orthogonal (Frobenius) projection onto the metric-skew-adjoint matrices.
inline Matrix skew_adjoint_part(const Matrix& a, const HermitianSpace& s) {
  const Matrix& g = s.metric();
  return 0.5 * (a - g * a.transpose() * g);
}

/// Average of A over conjugation by {Id, J0}; lands in the J0-commutant.
inline Matrix commuting_part(const Matrix& a, const HermitianSpace& s) {
  const Matrix& j = s.j0();
  const Matrix j_inv = s.j_sign() * j;
  return 0.5 * (a + j * a * j_inv);
}

/// diag(eps): +-Id on the spacelike / timelike parts. Commutes with J0 in the
/// Pseudo case and anticommutes in the Para case.
inline GroupElement signature_involution(const HermitianSpace& s) {
  return {Matrix(s.eps().asDiagonal()), s.kind() == Kind::Para ? -1 : 1};
}

/// Fixed isometric involution anticommuting with J0: e_i -> e_i, f_i -> -f_i
/// for Pseudo, diag(eps) for Para.
inline GroupElement anticommuting_element(const HermitianSpace& s) {
  if (s.kind() == Kind::Para) return signature_involution(s);
  Matrix t = Matrix::Identity(s.dim(), s.dim());
  for (int a = 0; a < s.half(); ++a) t(s.f(a), s.f(a)) = -1.0;
  return {t, -1};
}

/// Random element exp(A) of the identity component of the J0-commuting
/// isometries, optionally composed with anticommuting_element. A has
/// Frobenius norm `scale` (scale = 0 gives the identity).
inline GroupElement sample_group(const HermitianSpace& s, bool want_anticommuting,
                                 std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int m = s.dim();
  Matrix a(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) a(i, j) = dist(rng);
  a = commuting_part(skew_adjoint_part(a, s), s);
  const double n = a.norm();
  a = n > 0.0 ? Matrix(a * (scale / n)) : Matrix(Matrix::Zero(m, m));

  GroupElement g{exp_matrix(a), 1};
  if (want_anticommuting) {
    const GroupElement t0 = anticommuting_element(s);
    g.t = g.t * t0.t;
    g.chi = -1;
  }
  return g;
}

/// max |T^T G T - G|.
inline double isometry_residual(const Matrix& t, const HermitianSpace& s) {
  const Matrix& g = s.metric();
  return (t.transpose() * g * t - g).cwiseAbs().maxCoeff();
}

/// max |T J0 - chi J0 T|.
inline double chi_residual(const GroupElement& g, const HermitianSpace& s) {
  return (g.t * s.j0() - g.chi * (s.j0() * g.t)).cwiseAbs().maxCoeff();
}

}  // namespace kahler
