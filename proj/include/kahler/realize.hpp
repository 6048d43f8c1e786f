#pragma once

#include <string>
#include <vector>

#include "kahler/group.hpp"
#include "kahler/hspace.hpp"
#include "kahler/numerics.hpp"

namespace kahler {

/// Tolerance for the skew-adjoint / J0-commuting preconditions on theta.
inline constexpr double kAlgebraTol = 1e-10;

/// Basis {E_ab - eps_a eps_b E_ba : a < b} of the metric-skew-adjoint matrices.
inline std::vector<Matrix> skew_adjoint_basis(const HermitianSpace& s) {
  const int m = s.dim();
  std::vector<Matrix> basis;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      Matrix e = Matrix::Zero(m, m);
      e(a, b) = 1.0;
      e(b, a) = -s.eps(a) * s.eps(b);
      basis.push_back(std::move(e));
    }
  return basis;
}

/// Basis of the J0-commutant, taken from the averages of the matrix units
/// E_ab over {Id, J0} in lexicographic order, keeping each one that is new.
inline std::vector<Matrix> commuting_basis(const HermitianSpace& s) {
  const int m = s.dim();
  std::vector<Matrix> basis;
  std::vector<bool> seen(static_cast<std::size_t>(m) * m, false);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      if (seen[static_cast<std::size_t>(a) * m + b]) continue;
      Matrix e = Matrix::Zero(m, m);
      e(a, b) = 1.0;
      Matrix c = commuting_part(e, s);
      // J0 is a signed permutation, so the average touches exactly one more
      // matrix unit; mark it so its (equal up to sign) average is skipped.
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          if (c(i, j) != 0.0) seen[static_cast<std::size_t>(i) * m + j] = true;
      basis.push_back(std::move(c));
    }
  return basis;
}

namespace detail {

inline double max_part_residual(const EndoOneForm& theta, const HermitianSpace& s,
                                double (*residual)(const Matrix&, const HermitianSpace&)) {
  double r = 0.0;
  for (int k = 0; k < theta.dim(); ++k) r = std::max(r, residual(theta.part(k), s));
  return r;
}

inline void require_skew(const EndoOneForm& theta, const HermitianSpace& s) {
  detail::require_dim(theta.dim(), s.dim(), "skew-adjoint one-form");
  const double r = max_part_residual(theta, s, &skew_adjoint_residual) / std::max(1.0, theta.norm());
  if (r > kAlgebraTol)
    throw NotSkewAdjoint("theta(e_k) is not skew-adjoint (residual " + std::to_string(r) + ")", r);
}

inline void require_commuting(const EndoOneForm& theta, const HermitianSpace& s) {
  detail::require_dim(theta.dim(), s.dim(), "J-commuting one-form");
  const double r = max_part_residual(theta, s, &commutator_residual) / std::max(1.0, theta.norm());
  if (r > kAlgebraTol)
    throw NotCommuting("theta(e_k) does not commute with J0 (residual " + std::to_string(r) + ")", r);
}

inline Tensor3 xi_unchecked(const EndoOneForm& theta, const HermitianSpace& s) {
  const int m = s.dim();
  const Matrix& j = s.j0();
  Tensor3 h(m);
  for (int k = 0; k < m; ++k) {
    const Matrix d = j * theta.part(k) - theta.part(k) * j;
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) h(x, y, k) = s.eps(x) * d(x, y);
  }
  return h;
}

}  // namespace detail

/// First-order change of the Kähler-form derivative when J is conjugated by a
/// section of the isometry bundle with derivative theta:
/// Xi(theta)(x, y; z) = g(x, (-theta(z) J + J theta(z)) y).
inline Tensor3 xi(const EndoOneForm& theta, const HermitianSpace& s) {
  detail::require_skew(theta, s);
  Tensor3 h = detail::xi_unchecked(theta, s);
  const double r = detail::relative_membership(h, s);
  if (r > kAlgebraTol)
    throw ToleranceError("Xi image left the constrained space (residual " + std::to_string(r) + ")", r);
  return h;
}

enum class XiTildeVariant { AsPrinted, SignCorrected };

inline const char* to_string(XiTildeVariant v) {
  return v == XiTildeVariant::AsPrinted ? "as_printed" : "sign_corrected";
}

namespace detail {

inline Tensor3 xi_tilde_unchecked(const EndoOneForm& theta, const HermitianSpace& s,
                                  XiTildeVariant variant) {
  const int m = s.dim();
  const Matrix& j = s.j0();
  const Matrix& g = s.metric();
  // theta(J e_y), theta(e_y) J and J^T G theta(e_y) for every basis vector.
  std::vector<Matrix> tj, nj, jgn;
  for (int y = 0; y < m; ++y) {
    tj.push_back(theta.evaluate(j.col(y)));
    nj.push_back(theta.part(y) * j);
    jgn.push_back(j.transpose() * g * theta.part(y));
  }
  // a(x, y; z) = <th(Jy)x,z> + <x,th(Jy)z> + <th(y)Jx,z> + <Jx,th(y)z>
  auto a = [&](int x, int y, int z) {
    return s.eps(z) * tj[y](z, x) + s.eps(x) * tj[y](x, z) + s.eps(z) * nj[y](z, x) + jgn[y](x, z);
  };
  // The printed second half: -<th(Jx)y,z> + <y,th(Jx)z> + <th(x)Jy,z> + <Jy,th(x)z>.
  auto printed_tail = [&](int x, int y, int z) {
    return -s.eps(z) * tj[x](z, y) + s.eps(y) * tj[x](y, z) + s.eps(z) * nj[x](z, y) + jgn[x](y, z);
  };
  Tensor3 h(m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z)
        h(x, y, z) = variant == XiTildeVariant::SignCorrected
                         ? 0.5 * (a(x, y, z) - a(y, x, z))
                         : 0.5 * (a(x, y, z) + printed_tail(x, y, z));
  return h;
}

}  // namespace detail

/// First-order change of the Kähler-form derivative when the metric is
/// replaced by (Theta x, Theta y) with Theta J0-commuting and dTheta = theta.
/// SignCorrected is antisymmetric in (x, y) and lands in U3; AsPrinted keeps
/// the printed sign pattern of the second half and is not range-checked.
inline Tensor3 xi_tilde(const EndoOneForm& theta, const HermitianSpace& s,
                        XiTildeVariant variant = XiTildeVariant::SignCorrected) {
  detail::require_commuting(theta, s);
  Tensor3 h = detail::xi_tilde_unchecked(theta, s, variant);
  if (variant == XiTildeVariant::SignCorrected) {
    const double scale = std::max(1.0, h.max_abs());
    const double r = std::max(membership_residual(h, s), u3_residual(h, s)) / scale;
    if (r > kAlgebraTol)
      throw ToleranceError("Xi~ image left U3 (residual " + std::to_string(r) + ")", r);
  }
  return h;
}

/// Action of an isometry on endomorphism-valued one-forms:
/// (T^* theta)(z) = T^{-1} theta(T z) T.
inline EndoOneForm pullback(const Matrix& t, const EndoOneForm& theta) {
  const int m = theta.dim();
  const Matrix t_inv = t.inverse();
  EndoOneForm r(m);
  for (int k = 0; k < m; ++k) r.part(k) = t_inv * theta.evaluate(t.col(k)) * t;
  return r;
}

// ---------------------------------------------------------------------------
// Inversion

struct SurjectivityCertificate {
  int rank = 0;
  int target_dim = 0;
  double image_residual = 0.0;  // largest distance of an image column from the target space
  bool ok = false;
};

struct RealizationSolution {
  EndoOneForm theta;
  double residual = 0.0;
  int rank = 0;
  DecompositionReport target_component_check;
  XiTildeVariant variant = XiTildeVariant::SignCorrected;
};

enum class RealizationMap { Xi, XiTilde };

namespace detail {

struct MapMatrix {
  Matrix a;                         // m^3 x (basis size * m)
  std::vector<Matrix> basis;        // coefficient basis for theta(e_k)
};

inline MapMatrix assemble(const HermitianSpace& s, RealizationMap which, XiTildeVariant variant) {
  const int m = s.dim();
  MapMatrix mm;
  mm.basis = which == RealizationMap::Xi ? skew_adjoint_basis(s) : commuting_basis(s);
  const int nb = static_cast<int>(mm.basis.size());
  mm.a.resize(static_cast<Eigen::Index>(m) * m * m, static_cast<Eigen::Index>(nb) * m);
  for (int k = 0; k < m; ++k)
    for (int b = 0; b < nb; ++b) {
      const EndoOneForm t = EndoOneForm::simple(mm.basis[static_cast<std::size_t>(b)], k);
      const Tensor3 h = which == RealizationMap::Xi ? xi_unchecked(t, s)
                                                    : xi_tilde_unchecked(t, s, variant);
      mm.a.col(static_cast<Eigen::Index>(k) * nb + b) = h.as_vector();
    }
  return mm;
}

inline EndoOneForm theta_from_coefficients(const MapMatrix& mm, const Vector& c, int m) {
  const int nb = static_cast<int>(mm.basis.size());
  EndoOneForm theta(m);
  for (int k = 0; k < m; ++k)
    for (int b = 0; b < nb; ++b)
      theta.part(k) += c(static_cast<Eigen::Index>(k) * nb + b) * mm.basis[static_cast<std::size_t>(b)];
  return theta;
}

inline RealizationSolution solve(const Tensor3& target, const HermitianSpace& s, RealizationMap which,
                                 XiTildeVariant variant) {
  const MapMatrix mm = assemble(s, which, variant);
  const LeastSquaresResult ls = min_norm_solve(mm.a, target.as_vector());
  RealizationSolution sol;
  sol.theta = theta_from_coefficients(mm, ls.x, s.dim());
  sol.residual = ls.residual;
  sol.rank = ls.rank;
  sol.variant = variant;
  if (sol.residual > kRankThreshold)
    throw RankDeficient("target is not in the numerical range (residual " +
                            std::to_string(sol.residual) + ", rank " + std::to_string(ls.rank) + ")",
                        sol.residual);
  const Tensor3 achieved = which == RealizationMap::Xi ? xi_unchecked(sol.theta, s)
                                                      : xi_tilde_unchecked(sol.theta, s, variant);
  sol.target_component_check = decompose(achieved, s);
  return sol;
}

}  // namespace detail

/// Minimum-norm skew-adjoint theta with Xi(theta) = target.
inline RealizationSolution solve_xi(const Tensor3& target, const HermitianSpace& s) {
  detail::require_dim(target.dim(), s.dim(), "solve_xi");
  detail::require_membership(target, s, kDefaultTol);
  return detail::solve(target, s, RealizationMap::Xi, XiTildeVariant::SignCorrected);
}

/// Minimum-norm J0-commuting theta with Xi~(theta) = target; target must lie in U3.
inline RealizationSolution solve_xi_tilde(const Tensor3& target, const HermitianSpace& s,
                                          XiTildeVariant variant = XiTildeVariant::SignCorrected) {
  detail::require_dim(target.dim(), s.dim(), "solve_xi_tilde");
  const double scale = std::max(1.0, target.max_abs());
  const double r = std::max(membership_residual(target, s), u3_residual(target, s)) / scale;
  if (r > kDefaultTol)
    throw NotInU3("target is not in U3 (residual " + std::to_string(r) + ")", r);
  return detail::solve(target, s, RealizationMap::XiTilde, variant);
}

/// Rank of the full realization map against the dimension of its intended
/// range (the constrained space for Xi, U3 for Xi~).
inline SurjectivityCertificate surjectivity_certificate(
    const HermitianSpace& s, RealizationMap which,
    XiTildeVariant variant = XiTildeVariant::SignCorrected) {
  const int m = s.dim();
  const detail::MapMatrix mm = detail::assemble(s, which, variant);
  SurjectivityCertificate cert;
  cert.rank = numerical_rank(mm.a);
  const Matrix target = matrix_of_tensor_map(m, [&](const Tensor3& t) {
    const Tensor3 h = project_to_hspace(t, s);
    return which == RealizationMap::Xi ? h : detail::pi3_raw(h, s);
  });
  cert.target_dim = numerical_rank(target);
  for (Eigen::Index c = 0; c < mm.a.cols(); ++c) {
    const Tensor3 h = Tensor3::from_vector(m, mm.a.col(c));
    double r = membership_residual(h, s);
    if (which == RealizationMap::XiTilde) r = std::max(r, u3_residual(h, s));
    cert.image_residual = std::max(cert.image_residual, r / std::max(1.0, h.max_abs()));
  }
  cert.ok = cert.rank == cert.target_dim && cert.image_residual <= kAlgebraTol;
  return cert;
}

}  // namespace kahler
