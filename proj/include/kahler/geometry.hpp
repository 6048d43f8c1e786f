#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kahler/expm.hpp"
#include "kahler/group.hpp"
#include "kahler/hspace.hpp"
#include "kahler/realize.hpp"

namespace kahler {

/// Default central-difference step on unit-scaled charts.
inline constexpr double kDefaultStep = 1e-4;

/// A local almost (para/pseudo-)Hermitian structure on the box
/// [-domain_radius, domain_radius]^m around the origin. `space` is the
/// structure at the origin, where metric_field = G and j_field = J0.
struct Chart {
  HermitianSpace space;
  std::function<Matrix(const Vector&)> metric_field;
  std::function<Matrix(const Vector&)> j_field;
  double domain_radius = 1.0;
  std::string family;

  int dim() const { return space.dim(); }
  Kind kind() const { return space.kind(); }
};

/// Quintic smoothstep bump: 1 on |x| <= R/2, 0 on |x| >= R, C^2 in between.
inline double bump(const Vector& x, double radius) {
  const double r = x.norm() / radius;
  if (r <= 0.5) return 1.0;
  if (r >= 1.0) return 0.0;
  const double t = (r - 0.5) / 0.5;
  return 1.0 - t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
}

inline Chart flat_chart(const HermitianSpace& s, double domain_radius = 1.0) {
  Matrix g = s.metric();
  Matrix j = s.j0();
  return {s, [g](const Vector&) { return g; }, [j](const Vector&) { return j; }, domain_radius,
          "flat"};
}

/// Fixed metric G and J = Theta^{-1} J0 Theta with
/// Theta(x) = exp(beta(x) sum_k x^k theta(e_k)), an isometry at every point.
inline Chart perturbed_j_chart(const HermitianSpace& s, const EndoOneForm& theta,
                               double bump_radius = 1.0) {
  detail::require_skew(theta, s);
  Matrix g = s.metric();
  Matrix j0 = s.j0();
  auto j_field = [theta, j0, bump_radius](const Vector& x) -> Matrix {
    const Matrix a = bump(x, bump_radius) * theta.evaluate(x);
    return exp_matrix(-a) * j0 * exp_matrix(a);
  };
  return {s, [g](const Vector&) { return g; }, j_field, bump_radius, "perturbed_j"};
}

/// Constant J0 and metric Theta^T G Theta with
/// Theta(x) = exp(beta(x) sum_k x^k theta(e_k)) commuting with J0.
inline Chart perturbed_metric_chart(const HermitianSpace& s, const EndoOneForm& theta,
                                    double bump_radius = 1.0) {
  detail::require_commuting(theta, s);
  Matrix g = s.metric();
  Matrix j0 = s.j0();
  auto metric_field = [theta, g, bump_radius](const Vector& x) -> Matrix {
    const Matrix t = exp_matrix(bump(x, bump_radius) * theta.evaluate(x));
    return t.transpose() * g * t;
  };
  return {s, metric_field, [j0](const Vector&) { return j0; }, bump_radius, "perturbed_metric"};
}

/// Metric scaled by e^{2f}, f(x) = beta(x) sum_k a_k x^k; J unchanged.
inline Chart conformal_chart(const Chart& c, const Covector& coefficients, double bump_radius = 1.0) {
  detail::require_dim(static_cast<int>(coefficients.size()), c.dim(), "conformal_chart");
  auto base = c.metric_field;
  auto metric_field = [base, coefficients, bump_radius](const Vector& x) -> Matrix {
    const double f = bump(x, bump_radius) * coefficients.dot(x);
    return std::exp(2.0 * f) * base(x);
  };
  return {c.space, metric_field, c.j_field, std::min(c.domain_radius, bump_radius), "conformal"};
}

/// Same J, metric -g.
inline Chart negated_chart(const Chart& c) {
  auto base = c.metric_field;
  return {c.space.negated(), [base](const Vector& x) -> Matrix { return -base(x); }, c.j_field,
          c.domain_radius, c.family + "+negated"};
}

/// Riemannian-style product M1 x M2 with block metric and J. Coordinates are
/// reordered into the standard layout (e-block of both factors, then f-block).
inline Chart product_chart(const Chart& c1, const Chart& c2) {
  if (c1.kind() != c2.kind()) throw KindMismatch("product of charts of different kinds");
  const int n1 = c1.space.half();
  const int n2 = c2.space.half();
  const int n = n1 + n2;
  std::vector<int> signs(c1.space.e_signs());
  signs.insert(signs.end(), c2.space.e_signs().begin(), c2.space.e_signs().end());
  const HermitianSpace s = HermitianSpace::from_e_signs(c1.kind(), signs);

  std::vector<int> idx1(static_cast<std::size_t>(2 * n1)), idx2(static_cast<std::size_t>(2 * n2));
  for (int a = 0; a < n1; ++a) {
    idx1[static_cast<std::size_t>(a)] = a;
    idx1[static_cast<std::size_t>(n1 + a)] = n + a;
  }
  for (int b = 0; b < n2; ++b) {
    idx2[static_cast<std::size_t>(b)] = n1 + b;
    idx2[static_cast<std::size_t>(n2 + b)] = n + n1 + b;
  }
  auto split = [idx1, idx2](const Vector& u) {
    Vector x1(static_cast<Eigen::Index>(idx1.size())), x2(static_cast<Eigen::Index>(idx2.size()));
    for (std::size_t a = 0; a < idx1.size(); ++a) x1(static_cast<Eigen::Index>(a)) = u(idx1[a]);
    for (std::size_t b = 0; b < idx2.size(); ++b) x2(static_cast<Eigen::Index>(b)) = u(idx2[b]);
    return std::make_pair(x1, x2);
  };
  auto embed = [idx1, idx2, m = 2 * n](const Matrix& a1, const Matrix& a2) {
    Matrix r = Matrix::Zero(m, m);
    for (std::size_t a = 0; a < idx1.size(); ++a)
      for (std::size_t b = 0; b < idx1.size(); ++b)
        r(idx1[a], idx1[b]) = a1(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    for (std::size_t a = 0; a < idx2.size(); ++a)
      for (std::size_t b = 0; b < idx2.size(); ++b)
        r(idx2[a], idx2[b]) = a2(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
    return r;
  };
  auto g1 = c1.metric_field, g2 = c2.metric_field, j1 = c1.j_field, j2 = c2.j_field;
  auto metric_field = [=](const Vector& u) {
    const auto [x1, x2] = split(u);
    return embed(g1(x1), g2(x2));
  };
  auto j_field = [=](const Vector& u) {
    const auto [x1, x2] = split(u);
    return embed(j1(x1), j2(x2));
  };
  return {s, metric_field, j_field, std::min(c1.domain_radius, c2.domain_radius), "product"};
}

/// Index map of product_chart: position of factor-1 (or factor-2)
/// coordinate `a` inside the product layout.
inline int product_index(const HermitianSpace& s1, const HermitianSpace& s2, int factor, int a) {
  const int n1 = s1.half(), n2 = s2.half(), n = n1 + n2;
  if (factor == 1) return a < n1 ? a : n + (a - n1);
  return a < n2 ? n1 + a : n + n1 + (a - n2);
}

/// Embeds a factor tensor into the product coordinates (zero elsewhere).
inline Tensor3 embed_factor_tensor(const Tensor3& h, const HermitianSpace& s1, const HermitianSpace& s2,
                                   int factor) {
  const int m = s1.dim() + s2.dim();
  Tensor3 r(m);
  const int mf = h.dim();
  for (int i = 0; i < mf; ++i)
    for (int j = 0; j < mf; ++j)
      for (int k = 0; k < mf; ++k)
        r(product_index(s1, s2, factor, i), product_index(s1, s2, factor, j),
          product_index(s1, s2, factor, k)) = h(i, j, k);
  return r;
}

// ---------------------------------------------------------------------------
// Finite differences

struct ConnectionSample {
  Vector point;
  Tensor3 gamma;  // gamma(i, j, k) = Gamma^i_{jk}
  double h = 0.0;
};

namespace detail {

inline void require_in_domain(const Chart& c, const Vector& p, double h) {
  if (h <= 0.0) throw DomainError("finite-difference step must be positive");
  require_dim(static_cast<int>(p.size()), c.dim(), "chart point");
  if (p.cwiseAbs().maxCoeff() + h > c.domain_radius)
    throw DomainError("stencil leaves the chart domain");
}

template <class Field>
std::vector<Matrix> central_derivatives(const Field& field, const Vector& p, double h) {
  const int m = static_cast<int>(p.size());
  std::vector<Matrix> d;
  d.reserve(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    Vector plus = p, minus = p;
    plus(k) += h;
    minus(k) -= h;
    d.push_back((field(plus) - field(minus)) / (2.0 * h));
  }
  return d;
}

}  // namespace detail

/// Levi-Civita Christoffel symbols of the second kind at p, from central
/// differences of the metric and the coordinate Koszul formula.
inline ConnectionSample christoffel(const Chart& c, const Vector& p, double h = kDefaultStep) {
  detail::require_in_domain(c, p, h);
  const int m = c.dim();
  const Matrix g = c.metric_field(p);
  const double det = g.determinant();
  if (!(std::abs(det) > 1e-12)) throw SingularMetric("metric is singular at the sample point", det);
  const Matrix g_inv = g.inverse();
  const auto dg = detail::central_derivatives(c.metric_field, p, h);

  // first kind: Gamma_{l,ij} = 1/2 (d_i g_jl + d_j g_il - d_l g_ij)
  Tensor3 lower(m);
  for (int l = 0; l < m; ++l)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        lower(l, i, j) = 0.5 * (dg[static_cast<std::size_t>(i)](j, l) +
                                dg[static_cast<std::size_t>(j)](i, l) -
                                dg[static_cast<std::size_t>(l)](i, j));
  ConnectionSample out{p, Tensor3(m), h};
  for (int a = 0; a < m; ++a)
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        double v = 0.0;
        for (int l = 0; l < m; ++l) v += g_inv(a, l) * lower(l, i, j);
        out.gamma(a, i, j) = v;
      }
  return out;
}

/// nabla Omega(x, y; z) = g(x, (nabla_z J) y) in the coordinate frame at p.
inline Tensor3 nabla_omega(const Chart& c, const Vector& p, double h = kDefaultStep) {
  const ConnectionSample conn = christoffel(c, p, h);
  const int m = c.dim();
  const Matrix g = c.metric_field(p);
  const Matrix j = c.j_field(p);
  const auto dj = detail::central_derivatives(c.j_field, p, h);
  Tensor3 out(m);
  for (int k = 0; k < m; ++k) {
    // (nabla_k J)^i_j = d_k J^i_j + Gamma^i_{kl} J^l_j - Gamma^l_{kj} J^i_l
    Matrix nj = dj[static_cast<std::size_t>(k)];
    for (int i = 0; i < m; ++i)
      for (int jj = 0; jj < m; ++jj) {
        double v = 0.0;
        for (int l = 0; l < m; ++l) v += conn.gamma(i, k, l) * j(l, jj) - conn.gamma(l, k, jj) * j(i, l);
        nj(i, jj) += v;
      }
    const Matrix lowered = g * nj;
    for (int x = 0; x < m; ++x)
      for (int y = 0; y < m; ++y) out(x, y, k) = lowered(x, y);
  }
  return out;
}

inline Tensor3 nabla_omega_at_origin(const Chart& c, double h = kDefaultStep) {
  return nabla_omega(c, Vector::Zero(c.dim()), h);
}

struct ChartValidity {
  int points = 0;
  double symmetry = 0.0;       // max |g - g^T|
  double min_abs_det = 0.0;
  double j_square = 0.0;       // max |J^2 -+ Id|
  double compatibility = 0.0;  // max |J^T g J -+ g|
  bool ok = false;
};

/// Samples the chart invariants on the 3^m stencil {-r, 0, r}^m with
/// r = fraction * domain_radius plus `n_random` uniform points of the box.
inline ChartValidity validate_chart(const Chart& c, int n_random = 16, std::uint64_t seed = 0,
                                    double fraction = 0.5, double tol = 1e-10) {
  const int m = c.dim();
  const double r = fraction * c.domain_radius;
  std::vector<Vector> points;
  long total = 1;
  for (int i = 0; i < m; ++i) total *= 3;
  for (long code = 0; code < total; ++code) {
    Vector x(m);
    long t = code;
    for (int i = 0; i < m; ++i, t /= 3) x(i) = static_cast<double>(t % 3 - 1) * r;
    points.push_back(std::move(x));
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-c.domain_radius, c.domain_radius);
  for (int n = 0; n < n_random; ++n) {
    Vector x(m);
    for (int i = 0; i < m; ++i) x(i) = dist(rng);
    points.push_back(std::move(x));
  }

  ChartValidity v;
  v.min_abs_det = std::numeric_limits<double>::infinity();
  const Matrix id = Matrix::Identity(m, m);
  for (const Vector& x : points) {
    const Matrix g = c.metric_field(x);
    const Matrix j = c.j_field(x);
    v.symmetry = std::max(v.symmetry, (g - g.transpose()).cwiseAbs().maxCoeff());
    v.min_abs_det = std::min(v.min_abs_det, std::abs(g.determinant()));
    v.j_square = std::max(v.j_square, (j * j - c.space.j_sign() * id).cwiseAbs().maxCoeff());
    v.compatibility = std::max(
        v.compatibility, (j.transpose() * g * j - c.space.metric_sign() * g).cwiseAbs().maxCoeff());
  }
  v.points = static_cast<int>(points.size());
  v.ok = v.symmetry <= tol && v.min_abs_det > 1e-12 && v.j_square <= tol && v.compatibility <= tol;
  return v;
}

// ---------------------------------------------------------------------------
// Pointwise realization

/// Random J0-commuting one-form with entries of order one.
template <class Rng>
EndoOneForm random_commuting_form(const HermitianSpace& s, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int m = s.dim();
  EndoOneForm t(m);
  for (int k = 0; k < m; ++k) {
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = dist(rng);
    t.part(k) = commuting_part(a, s);
  }
  return t;
}

/// Random skew-adjoint one-form with entries of order one.
template <class Rng>
EndoOneForm random_skew_form(const HermitianSpace& s, Rng& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int m = s.dim();
  EndoOneForm t(m);
  for (int k = 0; k < m; ++k) {
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = dist(rng);
    t.part(k) = skew_adjoint_part(a, s);
  }
  return t;
}

struct VariantSelection {
  XiTildeVariant variant = XiTildeVariant::SignCorrected;
  double error_sign_corrected = 0.0;  // relative, against the FD oracle
  double error_as_printed = 0.0;
};

/// Picks the metric-perturbation formula that agrees with a finite-difference
/// evaluation of nabla Omega on a random perturbed-metric chart.
inline VariantSelection select_xi_tilde_variant(const HermitianSpace& s, std::uint64_t seed = 7,
                                                double h = kDefaultStep, double tol = 1e-5) {
  std::mt19937_64 rng(seed);
  const EndoOneForm theta = random_commuting_form(s, rng);
  const Tensor3 fd = nabla_omega_at_origin(perturbed_metric_chart(s, theta), h);
  const double scale = std::max(1.0, fd.norm());
  VariantSelection sel;
  sel.error_sign_corrected =
      (fd - detail::xi_tilde_unchecked(theta, s, XiTildeVariant::SignCorrected)).norm() / scale;
  sel.error_as_printed =
      (fd - detail::xi_tilde_unchecked(theta, s, XiTildeVariant::AsPrinted)).norm() / scale;
  sel.variant = sel.error_as_printed < sel.error_sign_corrected ? XiTildeVariant::AsPrinted
                                                                : XiTildeVariant::SignCorrected;
  if (std::min(sel.error_sign_corrected, sel.error_as_printed) > tol)
    throw ConvergenceError("neither metric-perturbation formula matches the finite-difference oracle",
                           std::min(sel.error_sign_corrected, sel.error_as_printed));
  return sel;
}

enum class RealizeMode { VaryJ, VaryMetric };

inline const char* to_string(RealizeMode m) {
  return m == RealizeMode::VaryJ ? "vary_j" : "vary_metric";
}

struct PointwiseRealization {
  Chart chart;
  RealizationSolution solution;
  Tensor3 achieved;
  double error = 0.0;      // |achieved - target| / max(1, |target|)
  double threshold = 0.0;  // max(1e-4, 10 h^2)
  RealizeMode mode = RealizeMode::VaryJ;
  std::optional<VariantSelection> selection;
};

/// Builds a chart through the origin whose nabla Omega there equals `target`:
/// VaryJ perturbs J at fixed flat metric, VaryMetric perturbs the metric at
/// fixed J0 (target must then lie in U3).
inline PointwiseRealization realize_pointwise(const Tensor3& target, const HermitianSpace& s,
                                              RealizeMode mode, double h = kDefaultStep,
                                              double bump_radius = 1.0) {
  PointwiseRealization out;
  out.mode = mode;
  if (mode == RealizeMode::VaryJ) {
    out.solution = solve_xi(target, s);
    out.chart = perturbed_j_chart(s, out.solution.theta, bump_radius);
  } else {
    out.selection = select_xi_tilde_variant(s, 7, h);
    out.solution = solve_xi_tilde(target, s, out.selection->variant);
    out.chart = perturbed_metric_chart(s, out.solution.theta, bump_radius);
  }
  out.achieved = nabla_omega_at_origin(out.chart, h);
  out.error = (out.achieved - target).norm() / std::max(1.0, target.norm());
  out.threshold = std::max(1e-4, 10.0 * h * h);
  if (out.error > out.threshold)
    throw ConvergenceError("realized tensor misses the target (error " + std::to_string(out.error) + ")",
                           out.error);
  return out;
}

}  // namespace kahler
