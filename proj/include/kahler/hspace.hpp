#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kahler/numerics.hpp"
#include "kahler/tensor.hpp"

// Test-build hook: a value 1..4 flips one sign inside the matching projector so
// the property suites can be shown to catch it. Never set in normal builds.
#ifndef KAHLER_PROJECTOR_MUTATION
#define KAHLER_PROJECTOR_MUTATION 0
#endif

namespace kahler {

namespace detail {

// H(x, J0 y; J0 z)
inline Tensor3 j_on_last_two(const Tensor3& h, const HermitianSpace& s) {
  return apply_in_slot(apply_in_slot(h, s.j0(), 1), s.j0(), 2);
}

// H(J0 x, J0 y; z)
inline Tensor3 j_on_first_two(const Tensor3& h, const HermitianSpace& s) {
  return apply_in_slot(apply_in_slot(h, s.j0(), 0), s.j0(), 1);
}

// (H o c)(x, y; z) = H(y, z; x) and (H o c^2)(x, y; z) = H(z, x; y).
inline Tensor3 cycle1(const Tensor3& h) { return permuted(h, {1, 2, 0}); }
inline Tensor3 cycle2(const Tensor3& h) { return permuted(h, {2, 0, 1}); }

constexpr double mutated(int which) {
  return KAHLER_PROJECTOR_MUTATION == which ? -1.0 : 1.0;
}

}  // namespace detail

/// Largest violation of H(x,y;z) = -H(y,x;z) and H(J0x,J0y;z) = ±H(x,y;z)
/// over basis triples. Zero exactly on the constrained tensor space.
inline double membership_residual(const Tensor3& h, const HermitianSpace& s) {
  detail::require_dim(h.dim(), s.dim(), "membership_residual");
  const Tensor3 swapped = permuted(h, {1, 0, 2});
  const Tensor3 jj = detail::j_on_first_two(h, s);
  return std::max((h + swapped).max_abs(), (jj - s.j_sign() * h).max_abs());
}

/// Orthogonal projection of an arbitrary 3-tensor onto the constrained space:
/// 1/4 {T(x,y;z) - T(y,x;z) ± T(Jx,Jy;z) ∓ T(Jy,Jx;z)}.
inline Tensor3 project_to_hspace(const Tensor3& t, const HermitianSpace& s) {
  detail::require_dim(t.dim(), s.dim(), "project_to_hspace");
  const Tensor3 anti = t - permuted(t, {1, 0, 2});
  return 0.25 * (anti + s.j_sign() * detail::j_on_first_two(anti, s));
}

/// Random element of the constrained space (projection of a uniform tensor).
template <class Rng>
Tensor3 random_hspace_element(const HermitianSpace& s, Rng& rng) {
  return project_to_hspace(Tensor3::random(s.dim(), rng), s);
}

/// (tau_1 H)(x) = eps^{ij} H(x, e_i; e_j).
inline Covector tau1(const Tensor3& h, const HermitianSpace& s) {
  detail::require_dim(h.dim(), s.dim(), "tau1");
  const int m = s.dim();
  Covector r = Covector::Zero(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i) += s.eps(j) * h(i, j, j);
  return r;
}

/// (J0^* phi)(x) = phi(J0 x).
inline Covector j_star(const Covector& phi, const HermitianSpace& s) {
  return s.j0().transpose() * phi;
}

/// sigma(phi)(x,y;z) = phi(Jx)<y,z> - phi(Jy)<x,z> + phi(x)<Jy,z> - phi(y)<Jx,z>.
inline Tensor3 sigma(const Covector& phi, const HermitianSpace& s) {
  detail::require_dim(static_cast<int>(phi.size()), s.dim(), "sigma");
  const int m = s.dim();
  const Matrix& j = s.j0();
  const Covector phi_j = j_star(phi, s);
  // <J e_a, e_b> = eps_b J(b, a)
  auto jg = [&](int a, int b) { return s.eps(b) * j(b, a); };
  Tensor3 r(m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      for (int z = 0; z < m; ++z) {
        double v = 0.0;
        if (y == z) v += phi_j(x) * s.eps(y);
        if (x == z) v -= phi_j(y) * s.eps(x);
        v += phi(x) * jg(y, z) - phi(y) * jg(x, z);
        r(x, y, z) = v;
      }
  return r;
}

namespace detail {

inline Tensor3 pi1_raw(const Tensor3& h, const HermitianSpace& s) {
  const Tensor3 k = j_on_last_two(h, s);
  const double sg = s.j_sign() * mutated(1);
  Tensor3 r = h + cycle1(h) + cycle2(h) + sg * (k + cycle1(k) + cycle2(k));
  return r *= 1.0 / 6.0;
}

inline Tensor3 pi2_raw(const Tensor3& h, const HermitianSpace& s) {
  const Tensor3 k = j_on_last_two(h, s);
  const double sg = s.j_sign() * mutated(2);
  Tensor3 r = 2.0 * h - cycle1(h) - cycle2(h) + sg * (2.0 * k - cycle1(k) - cycle2(k));
  return r *= 1.0 / 6.0;
}

inline Tensor3 pi3_raw(const Tensor3& h, const HermitianSpace& s) {
  return 0.5 * (h - (s.j_sign() * mutated(3)) * j_on_last_two(h, s));
}

inline Tensor3 pi4_raw(const Tensor3& h, const HermitianSpace& s) {
  const double c = mutated(4) * s.j_sign() / (s.dim() - 2);
  return c * sigma(j_star(tau1(h, s), s), s);
}

inline Tensor3 project_raw(const Tensor3& h, int which, const HermitianSpace& s) {
  switch (which) {
    case 1: return pi1_raw(h, s);
    case 2: return pi2_raw(h, s);
    case 3: return pi3_raw(h, s);
    case 4: return pi4_raw(h, s);
    default: throw Error("projector index must be 1..4");
  }
}

inline double relative_membership(const Tensor3& h, const HermitianSpace& s) {
  return membership_residual(h, s) / std::max(1.0, h.max_abs());
}

inline void require_membership(const Tensor3& h, const HermitianSpace& s, double tol) {
  const double r = relative_membership(h, s);
  if (r > tol)
    throw NotInHSpace("tensor violates the defining symmetries (residual " +
                          std::to_string(r) + ")",
                      r);
}

}  // namespace detail

/// Default relative tolerance for membership preconditions and class flags.
inline constexpr double kDefaultTol = 1e-8;

/// The four projectors: i = 1, 2 onto W1, W2; i = 3 onto U3 = W3 + W4;
/// i = 4 onto W4.
inline Tensor3 project_component(const Tensor3& h, int which, const HermitianSpace& s,
                                 double membership_tol = kDefaultTol) {
  detail::require_dim(h.dim(), s.dim(), "project_component");
  detail::require_membership(h, s, membership_tol);
  return detail::project_raw(h, which, s);
}

/// max violation of H(x,y;z) = ∓H(x,J0y;J0z), the extra relation cutting out U3.
inline double u3_residual(const Tensor3& h, const HermitianSpace& s) {
  return (h + s.j_sign() * detail::j_on_last_two(h, s)).max_abs();
}

// ---------------------------------------------------------------------------
// Classification

enum class Component { W1 = 0, W2 = 1, W3 = 2, W4 = 3 };

struct ClassLabel {
  std::array<bool, 4> present{};
  std::optional<std::string> name;

  bool has(Component c) const { return present[static_cast<std::size_t>(c)]; }

  /// "{W1,W3}", "{}" for the zero class.
  std::string subset_string() const {
    std::string r = "{";
    bool first = true;
    for (int i = 0; i < 4; ++i)
      if (present[static_cast<std::size_t>(i)]) {
        if (!first) r += ",";
        r += "W" + std::to_string(i + 1);
        first = false;
      }
    return r + "}";
  }

  /// The class name when there is one, otherwise "W1⊕W3" (or "0").
  std::string display() const {
    if (name) return *name;
    std::string r;
    for (int i = 0; i < 4; ++i)
      if (present[static_cast<std::size_t>(i)]) {
        if (!r.empty()) r += "⊕";
        r += "W" + std::to_string(i + 1);
      }
    return r.empty() ? "0" : r;
  }

  friend bool operator==(const ClassLabel& a, const ClassLabel& b) {
    return a.present == b.present && a.name == b.name;
  }
};

/// Names of the classical classes, keyed by the W1..W4 presence pattern.
/// Only defined for the pseudo-Hermitian kind.
inline std::optional<std::string> class_name(const std::array<bool, 4>& p, const HermitianSpace& s) {
  if (s.kind() != Kind::Pseudo) return std::nullopt;
  // W1 and W3 vanish identically in dimension 4; patterns that need them are
  // not certified there.
  if (s.dim() == 4 && (p[0] || p[2])) return std::nullopt;
  struct Entry {
    std::array<bool, 4> pattern;
    const char* name;
  };
  static const Entry kNames[] = {
      {{false, false, false, false}, "Kähler"},
      {{true, false, false, false}, "nearly Kähler"},
      {{false, true, false, false}, "almost Kähler"},
      {{false, false, true, false}, "Hermitian semi-Kähler"},
      {{true, true, false, false}, "quasi-Kähler"},
      {{false, false, true, true}, "pseudo-Hermitian"},
      {{true, true, true, false}, "semi-Kähler"},
      {{true, true, true, true}, "almost pseudo-Hermitian"},
  };
  for (const auto& e : kNames)
    if (e.pattern == p) return std::string(e.name);
  return std::nullopt;
}

struct DecompositionReport {
  std::array<Tensor3, 4> components;
  Covector tau1;
  std::array<double, 4> norms{};            // Euclidean coefficient norms
  std::array<double, 4> quadratic_norms{};  // signature-weighted <H_i, H_i>
  double residual_membership = 0.0;
  double residual_reconstruction = 0.0;
  double residual_w3_crosscheck = 0.0;  // |(pi3 - pi4)H - (H - H1 - H2 - H4)|
  double max_orthogonality = 0.0;       // max |<H_i,H_j>| / |H|^2, i != j
  double tol = kDefaultTol;
  ClassLabel label;
};

/// Splits H into its W1..W4 parts. W3 is extracted as pi3 H - pi4 H and
/// cross-checked against H - H1 - H2 - H4. A component counts as present when
/// its norm exceeds tol * max(1, |H|).
inline DecompositionReport decompose(const Tensor3& h, const HermitianSpace& s,
                                     double tol = kDefaultTol) {
  detail::require_dim(h.dim(), s.dim(), "decompose");
  DecompositionReport rep;
  rep.tol = tol;
  rep.residual_membership = detail::relative_membership(h, s);
  if (rep.residual_membership > tol)
    throw NotInHSpace("tensor violates the defining symmetries (residual " +
                          std::to_string(rep.residual_membership) + ")",
                      rep.residual_membership);

  const Tensor3 h1 = detail::pi1_raw(h, s);
  const Tensor3 h2 = detail::pi2_raw(h, s);
  const Tensor3 u3 = detail::pi3_raw(h, s);
  const Tensor3 h4 = detail::pi4_raw(h, s);
  const Tensor3 h3 = u3 - h4;
  rep.components = {h1, h2, h3, h4};
  rep.tau1 = tau1(h, s);

  const double scale = std::max(1.0, h.norm());
  rep.residual_reconstruction = (h - (h1 + h2 + h3 + h4)).norm() / scale;
  rep.residual_w3_crosscheck = (h3 - (h - h1 - h2 - h4)).norm() / scale;

  for (std::size_t i = 0; i < 4; ++i) {
    rep.norms[i] = rep.components[i].norm();
    rep.quadratic_norms[i] = tensor3_inner(rep.components[i], rep.components[i], s);
    rep.label.present[i] = rep.norms[i] > tol * scale;
  }
  const double hn2 = h.norm() * h.norm();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = i + 1; j < 4; ++j) {
      if (hn2 == 0.0) continue;
      rep.max_orthogonality = std::max(
          rep.max_orthogonality,
          std::abs(tensor3_inner(rep.components[i], rep.components[j], s)) / hn2);
    }
  rep.label.name = class_name(rep.label.present, s);

  if (rep.residual_reconstruction > 100.0 * tol)
    throw ToleranceError("decomposition does not reconstruct its input (residual " +
                             std::to_string(rep.residual_reconstruction) + ")",
                         rep.residual_reconstruction);
  return rep;
}

inline ClassLabel classify(const Tensor3& h, const HermitianSpace& s, double tol = kDefaultTol) {
  return decompose(h, s, tol).label;
}

// ---------------------------------------------------------------------------
// Dimension counts

struct ModuleDimensions {
  int hspace = 0;
  int w1 = 0;
  int w2 = 0;
  int w3 = 0;
  int w4 = 0;
  int u3 = 0;
  int sum() const { return w1 + w2 + w3 + w4; }
};

/// Matrix of a linear map on 3-tensors, one column per coordinate basis tensor.
template <class Map>
Matrix matrix_of_tensor_map(int m, Map&& map) {
  const int n = m * m * m;
  Matrix a(n, n);
  int col = 0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) a.col(col++) = map(Tensor3::unit(m, i, j, k)).as_vector();
  return a;
}

/// Numerical ranks of the projection onto the constrained space and of each
/// projector composed with it.
inline ModuleDimensions module_dimensions(const HermitianSpace& s,
                                          double rel_threshold = kRankThreshold) {
  const int m = s.dim();
  const Matrix p = matrix_of_tensor_map(m, [&](const Tensor3& t) { return project_to_hspace(t, s); });
  auto composed = [&](auto&& proj) {
    Matrix r(p.rows(), p.cols());
    for (Eigen::Index c = 0; c < p.cols(); ++c)
      r.col(c) = proj(Tensor3::from_vector(m, p.col(c))).as_vector();
    return r;
  };
  ModuleDimensions d;
  d.hspace = numerical_rank(p, rel_threshold);
  d.w1 = numerical_rank(composed([&](const Tensor3& h) { return detail::pi1_raw(h, s); }), rel_threshold);
  d.w2 = numerical_rank(composed([&](const Tensor3& h) { return detail::pi2_raw(h, s); }), rel_threshold);
  d.u3 = numerical_rank(composed([&](const Tensor3& h) { return detail::pi3_raw(h, s); }), rel_threshold);
  d.w4 = numerical_rank(composed([&](const Tensor3& h) { return detail::pi4_raw(h, s); }), rel_threshold);
  d.w3 = numerical_rank(composed([&](const Tensor3& h) {
                          return detail::pi3_raw(h, s) - detail::pi4_raw(h, s);
                        }),
                        rel_threshold);
  return d;
}

}  // namespace kahler
