#pragma once

// Property suites behind `kahler verify`. Every property is evaluated per
// space, reduced to one measured residual, and compared with a pinned
// threshold. Exceptions thrown while evaluating a property count as failures.

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "kahler/geometry.hpp"
#include "kahler/group.hpp"
#include "kahler/hspace.hpp"
#include "kahler/invariants.hpp"
#include "kahler/realize.hpp"

namespace kahler::verify {

struct PropertyResult {
  std::string suite;
  std::string property;
  std::string space;
  double measured = 0.0;
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

struct SuiteResult {
  std::vector<PropertyResult> results;

  int failures() const {
    int n = 0;
    for (const auto& r : results) n += r.pass ? 0 : 1;
    return n;
  }
  bool all_passed() const { return failures() == 0; }
};

struct Options {
  int n_samples = 10;
  std::uint64_t seed = 0;
  double h = kDefaultStep;
  bool geometry = true;
  bool end_to_end = true;
};

/// m = 4, 6, 8 with both kinds and several signatures each.
inline std::vector<HermitianSpace> default_grid() {
  return {
      make_space(4, 0, 4, Kind::Pseudo),
      make_space(4, 2, 2, Kind::Pseudo),
      make_space(4, 4, 0, Kind::Pseudo),
      HermitianSpace::from_e_signs(Kind::Para, {1, 1}),
      HermitianSpace::from_e_signs(Kind::Para, {-1, 1}),
      make_space(6, 0, 6, Kind::Pseudo),
      make_space(6, 2, 4, Kind::Pseudo),
      HermitianSpace::from_e_signs(Kind::Para, {1, 1, 1}),
      HermitianSpace::from_e_signs(Kind::Para, {-1, 1, 1}),
      make_space(8, 0, 8, Kind::Pseudo),
      make_space(8, 4, 4, Kind::Pseudo),
      HermitianSpace::from_e_signs(Kind::Para, {1, 1, 1, 1}),
      HermitianSpace::from_e_signs(Kind::Para, {-1, -1, 1, 1}),
  };
}

namespace detail {

class Recorder {
 public:
  Recorder(SuiteResult& out, std::string space) : out_(out), space_(std::move(space)) {}

  void check(const std::string& suite, const std::string& property, double threshold,
             const std::function<double()>& measure) {
    PropertyResult r{suite, property, space_, 0.0, threshold, false, {}};
    try {
      r.measured = measure();
      r.pass = std::isfinite(r.measured) && r.measured <= threshold;
    } catch (const std::exception& e) {
      r.measured = std::numeric_limits<double>::infinity();
      r.note = e.what();
    }
    out_.results.push_back(std::move(r));
  }

 private:
  SuiteResult& out_;
  std::string space_;
};

inline double rel(const Tensor3& a, const Tensor3& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

inline std::vector<GroupElement> group_samples(const HermitianSpace& s, int n, std::uint64_t seed) {
  std::vector<GroupElement> out;
  for (int i = 0; i < n; ++i) out.push_back(sample_group(s, i % 2 == 1, seed + 101 * static_cast<std::uint64_t>(i)));
  return out;
}

inline std::vector<Tensor3> hspace_samples(const HermitianSpace& s, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Tensor3> out;
  for (int i = 0; i < n; ++i) out.push_back(random_hspace_element(s, rng));
  return out;
}

// Gray-Hervella counts with n = m / 2, used as an independent check of the
// numerical ranks.
inline ModuleDimensions expected_dimensions(int m) {
  const int n = m / 2;
  ModuleDimensions d;
  d.hspace = 2 * n * n * (n - 1);
  d.w1 = n * (n - 1) * (n - 2) / 3;
  d.w2 = 2 * n * (n - 1) * (n + 1) / 3;
  d.w3 = n * (n + 1) * (n - 2);
  d.w4 = 2 * n;
  d.u3 = d.w3 + d.w4;
  return d;
}

inline void linalg_suite(Recorder& rec, const HermitianSpace& s, const Options& o) {
  const auto gs = group_samples(s, std::max(4, o.n_samples), o.seed + 11);
  rec.check("linalg", "group elements are isometries", 1e-10, [&] {
    double r = 0.0;
    for (const auto& g : gs) r = std::max(r, isometry_residual(g.t, s));
    return r;
  });
  rec.check("linalg", "group elements commute or anticommute with J0", 1e-10, [&] {
    double r = 0.0;
    for (const auto& g : gs) r = std::max(r, chi_residual(g, s));
    return r;
  });
  rec.check("linalg", "pullback is contravariant", 1e-10, [&] {
    const auto hs = hspace_samples(s, 2, o.seed + 12);
    double r = 0.0;
    for (std::size_t i = 0; i + 1 < gs.size(); ++i)
      for (const auto& h : hs)
        r = std::max(r, rel(pullback(gs[i].t * gs[i + 1].t, h), pullback(gs[i + 1].t, pullback(gs[i].t, h))));
    return r;
  });
  rec.check("linalg", "exp(A) exp(-A) = Id", 1e-12, [&] {
    std::mt19937_64 rng(o.seed + 13);
    std::normal_distribution<double> nd;
    const int m = s.dim();
    Matrix a(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) a(i, j) = nd(rng);
    return (exp_matrix(a) * exp_matrix(-a) - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
  });
}

inline void hspace_suite(Recorder& rec, const HermitianSpace& s, const Options& o) {
  using kahler::detail::project_raw;
  const auto hs = hspace_samples(s, o.n_samples, o.seed + 21);
  auto over_samples = [&](auto&& f) {
    double r = 0.0;
    for (const auto& h : hs) r = std::max(r, f(h));
    return r;
  };
  rec.check("hspace", "projection onto the constrained space is idempotent", 1e-12, [&] {
    std::mt19937_64 rng(o.seed + 22);
    const Tensor3 p = project_to_hspace(Tensor3::random(s.dim(), rng), s);
    return std::max(rel(project_to_hspace(p, s), p), membership_residual(p, s));
  });
  for (int i = 1; i <= 4; ++i)
    rec.check("hspace", "pi" + std::to_string(i) + " is idempotent", 1e-10, [&, i] {
      return over_samples([&](const Tensor3& h) {
        const Tensor3 p = project_raw(h, i, s);
        return (project_raw(p, i, s) - p).norm() / std::max(1.0, h.norm());
      });
    });
  rec.check("hspace", "pi3 pi1 = pi3 pi2 = 0", 1e-10, [&] {
    return over_samples([&](const Tensor3& h) {
      const double scale = std::max(1.0, h.norm());
      return std::max(project_raw(project_raw(h, 1, s), 3, s).norm(), project_raw(project_raw(h, 2, s), 3, s).norm()) /
             scale;
    });
  });
  rec.check("hspace", "pi3 pi4 = pi4", 1e-10, [&] {
    return over_samples([&](const Tensor3& h) {
      const Tensor3 p4 = project_raw(h, 4, s);
      return (project_raw(p4, 3, s) - p4).norm() / std::max(1.0, h.norm());
    });
  });
  rec.check("hspace", "pi1 + pi2 + pi3 = id", 1e-10, [&] {
    return over_samples([&](const Tensor3& h) {
      return rel(project_raw(h, 1, s) + project_raw(h, 2, s) + project_raw(h, 3, s), h);
    });
  });
  rec.check("hspace", "components are pairwise orthogonal", 1e-10, [&] {
    return over_samples([&](const Tensor3& h) { return decompose(h, s).max_orthogonality; });
  });
  rec.check("hspace", "components reconstruct the input", 1e-10, [&] {
    return over_samples([&](const Tensor3& h) {
      const auto rep = decompose(h, s);
      return std::max(rep.residual_reconstruction, rep.residual_w3_crosscheck);
    });
  });
  rec.check("hspace", "projectors are equivariant", 1e-9, [&] {
    const auto gs = group_samples(s, 4, o.seed + 23);
    double r = 0.0;
    for (const auto& g : gs)
      for (std::size_t n = 0; n < std::min<std::size_t>(hs.size(), 3); ++n)
        for (int i = 1; i <= 4; ++i) {
          const Tensor3 a = project_raw(pullback(g.t, hs[n]), i, s);
          const Tensor3 b = pullback(g.t, project_raw(hs[n], i, s));
          r = std::max(r, (a - b).norm() / std::max(1.0, pullback(g.t, hs[n]).norm()));
        }
    return r;
  });
  rec.check("hspace", "W3 and W4 parts lie in U3", 1e-10, [&] {
    return over_samples([&](const Tensor3& h) {
      const auto rep = decompose(h, s);
      const double scale = std::max(1.0, h.norm());
      return std::max(u3_residual(rep.components[2], s), u3_residual(rep.components[3], s)) / scale;
    });
  });
  rec.check("hspace", "tau1 vanishes on W1, W2 and W3", 1e-10, [&] {
    return over_samples([&](const Tensor3& h) {
      const auto rep = decompose(h, s);
      double r = 0.0;
      for (int i = 0; i < 3; ++i) r = std::max(r, tau1(rep.components[static_cast<std::size_t>(i)], s).norm());
      return r / std::max(1.0, h.norm());
    });
  });
  rec.check("hspace", "tau1 sigma = (m-2) J0*", 1e-12, [&] {
    const int m = s.dim();
    Matrix a(m, m), want(m, m);
    for (int k = 0; k < m; ++k) {
      const Covector phi = Covector::Unit(m, k);
      a.col(k) = tau1(sigma(phi, s), s);
      want.col(k) = (m - 2) * j_star(phi, s);
    }
    return (a - want).cwiseAbs().maxCoeff() / (m - 2);
  });
  rec.check("hspace", "labels are scale invariant", 0.0, [&] {
    double bad = 0.0;
    for (const auto& h : hs)
      for (double c : {1e-3, 7.5, -2.0})
        if (!(classify(c * h, s) == classify(h, s))) bad += 1.0;
    return bad;
  });

  const ModuleDimensions d = module_dimensions(s);
  const ModuleDimensions want = expected_dimensions(s.dim());
  rec.check("dims", "dim H = sum of dim W_i", 0.0, [&] { return std::abs(d.hspace - d.sum()); });
  rec.check("dims", "dim W4 = m", 0.0, [&] { return std::abs(d.w4 - s.dim()); });
  rec.check("dims", "dim U3 = dim W3 + dim W4", 0.0, [&] { return std::abs(d.u3 - d.w3 - d.w4); });
  rec.check("dims", "ranks match the closed-form counts", 0.0, [&] {
    return std::abs(d.hspace - want.hspace) + std::abs(d.w1 - want.w1) + std::abs(d.w2 - want.w2) +
           std::abs(d.w3 - want.w3) + std::abs(d.w4 - want.w4);
  });
  if (s.dim() == 4)
    rec.check("dims", "W1 and W3 vanish in dimension 4", 0.0, [&] { return d.w1 + d.w3; });
}

inline void invariants_suite(Recorder& rec, const HermitianSpace& s, const Options& o) {
  const auto hs = hspace_samples(s, std::max(3, o.n_samples / 2), o.seed + 31);
  rec.check("invariants", "psi_i are invariant under the structure group", 1e-9, [&] {
    const auto gs = group_samples(s, std::max(4, o.n_samples), o.seed + 32);
    double r = 0.0;
    for (const auto& h : hs) {
      const auto base = invariants(h, s);
      const double scale = std::max(1.0, h.norm() * h.norm());
      for (const auto& g : gs) {
        const auto moved = invariants(pullback(g.t, h), s);
        for (int i = 0; i < 4; ++i)
          r = std::max(r, std::abs(moved.psi[static_cast<std::size_t>(i)] - base.psi[static_cast<std::size_t>(i)]) /
                              scale);
      }
    }
    return r;
  });
  rec.check("invariants", "polarization is bilinear", 1e-10, [&] {
    std::mt19937_64 rng(o.seed + 33);
    double r = 0.0;
    for (int t = 0; t < 3; ++t) {
      const Tensor3 a = random_hspace_element(s, rng);
      const Tensor3 b = random_hspace_element(s, rng);
      const Tensor3 c = random_hspace_element(s, rng);
      for (const auto& spec : kPsiStrings) {
        auto bil = [&](const Tensor3& x, const Tensor3& y) {
          return 0.25 * (string_invariant(spec, x + y, s) - string_invariant(spec, x - y, s));
        };
        const double lhs = bil(a + 2.0 * b, c);
        const double rhs = bil(a, c) + 2.0 * bil(b, c);
        const double sym = bil(a, b) - bil(b, a);
        r = std::max({r, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)), std::abs(sym)});
      }
    }
    return r;
  });
  rec.check("invariants", "double J decoration flips the sign by -s", 1e-10, [&] {
    double r = 0.0;
    for (const auto& h : hs) {
      const double base = string_invariant("(1,2;3)(1,2;3)", h, s);
      r = std::max(r, std::abs(string_invariant("(J1,2;3)(J1,2;3)", h, s) + s.j_sign() * base) /
                          std::max(1.0, std::abs(base)));
    }
    return r;
  });
  rec.check("invariants", "(J1,2;1)(J3,2;3) = -s psi3", 1e-10, [&] {
    double r = 0.0;
    for (const auto& h : hs) {
      const double p3 = psi(h, 3, s);
      r = std::max(r, std::abs(string_invariant("(J1,2;1)(J3,2;3)", h, s) + s.j_sign() * p3) /
                          std::max(1.0, h.norm() * h.norm()));
    }
    return r;
  });
  rec.check("invariants", "(1,J2;3)(1,J3;2) = -s psi2", 1e-10, [&] {
    double r = 0.0;
    for (const auto& h : hs) {
      const double p2 = psi(h, 2, s);
      r = std::max(r, std::abs(string_invariant("(1,J2;3)(1,J3;2)", h, s) + s.j_sign() * p2) /
                          std::max(1.0, h.norm() * h.norm()));
    }
    return r;
  });
  if (s.dim() >= 6)
    rec.check("invariants", "independence rank is 4", 0.0,
              [&] { return std::abs(invariant_independence_rank(s, 32, o.seed + 34) - 4); });
}

inline void realize_suite(Recorder& rec, const HermitianSpace& s, const Options& o) {
  std::mt19937_64 rng(o.seed + 41);
  std::vector<EndoOneForm> skew, comm;
  for (int i = 0; i < 3; ++i) {
    skew.push_back(random_skew_form(s, rng));
    comm.push_back(random_commuting_form(s, rng));
  }
  rec.check("realize", "Xi lands in the constrained space", 1e-10, [&] {
    double r = 0.0;
    for (const auto& t : skew) {
      const Tensor3 h = kahler::detail::xi_unchecked(t, s);
      r = std::max(r, membership_residual(h, s) / std::max(1.0, h.max_abs()));
    }
    return r;
  });
  rec.check("realize", "Xi is linear", 1e-12, [&] {
    const Tensor3 lhs = xi(skew[0] + (-3.0) * skew[1], s);
    return rel(lhs, xi(skew[0], s) + (-3.0) * xi(skew[1], s));
  });
  rec.check("realize", "Xi is equivariant with character chi", 1e-9, [&] {
    double r = 0.0;
    for (const auto& g : group_samples(s, 4, o.seed + 42))
      for (const auto& t : skew)
        r = std::max(r, rel(xi(pullback(g.t, t), s), g.chi * pullback(g.t, xi(t, s))));
    return r;
  });
  rec.check("realize", "Xi~ lands in U3", 1e-10, [&] {
    double r = 0.0;
    for (const auto& t : comm) {
      const Tensor3 h = kahler::detail::xi_tilde_unchecked(t, s, XiTildeVariant::SignCorrected);
      r = std::max(r, std::max(membership_residual(h, s), u3_residual(h, s)) / std::max(1.0, h.max_abs()));
    }
    return r;
  });
  rec.check("realize", "Xi is onto the constrained space", 0.0, [&] {
    const auto c = surjectivity_certificate(s, RealizationMap::Xi);
    return c.ok ? 0.0 : 1.0 + std::abs(c.rank - c.target_dim);
  });
  rec.check("realize", "Xi~ is onto U3", 0.0, [&] {
    const auto c = surjectivity_certificate(s, RealizationMap::XiTilde);
    return c.ok ? 0.0 : 1.0 + std::abs(c.rank - c.target_dim);
  });
  rec.check("realize", "solve_xi reproduces random targets", 1e-9, [&] {
    const auto hs = hspace_samples(s, 2, o.seed + 43);
    double r = 0.0;
    for (const auto& h : hs) r = std::max(r, rel(xi(solve_xi(h, s).theta, s), h));
    return r;
  });
}

// Error of a finite-difference evaluation against its algebraic prediction,
// plus the observed convergence ratio err(h) / err(h / 2).
struct FdCheck {
  double error = 0.0;
  double ratio = 0.0;
};

inline FdCheck fd_check(const Chart& c, const Tensor3& predicted, double h) {
  const double scale = std::max(1.0, predicted.norm());
  FdCheck out;
  out.error = (nabla_omega_at_origin(c, h) - predicted).norm() / scale;
  const double coarse = (nabla_omega_at_origin(c, 1e-2) - predicted).norm();
  const double fine = (nabla_omega_at_origin(c, 5e-3) - predicted).norm();
  out.ratio = fine > 0.0 ? coarse / fine : std::numeric_limits<double>::infinity();
  return out;
}

inline void geometry_suite(Recorder& rec, const HermitianSpace& s, const Options& o) {
  const double fd_tol = std::max(1e-5, 10.0 * o.h * o.h);
  std::mt19937_64 rng(o.seed + 51);
  rec.check("geometry", "flat chart has vanishing nabla Omega", 1e-12,
            [&] { return nabla_omega_at_origin(flat_chart(s), o.h).max_abs(); });

  Covector a(s.dim());
  {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int i = 0; i < s.dim(); ++i) a(i) = dist(rng);
  }
  const FdCheck conf = fd_check(conformal_chart(flat_chart(s), a), -1.0 * sigma(a, s), o.h);
  rec.check("geometry", "conformal chart matches -sigma(df)", fd_tol, [&] { return conf.error; });
  rec.check("geometry", "conformal chart converges at second order", 0.5,
            [&] { return std::abs(conf.ratio - 4.0); });

  const EndoOneForm skew = random_skew_form(s, rng);
  const FdCheck pj = fd_check(perturbed_j_chart(s, skew), xi(skew, s), o.h);
  rec.check("geometry", "perturbed-J chart matches Xi", fd_tol, [&] { return pj.error; });
  rec.check("geometry", "perturbed-J chart converges at second order", 0.5, [&] { return std::abs(pj.ratio - 4.0); });

  const EndoOneForm comm = random_commuting_form(s, rng);
  const Chart pm = perturbed_metric_chart(s, comm);
  const FdCheck pmc = fd_check(pm, xi_tilde(comm, s), o.h);
  rec.check("geometry", "perturbed-metric chart matches Xi~", fd_tol, [&] { return pmc.error; });
  rec.check("geometry", "perturbed-metric chart converges at second order", 0.5,
            [&] { return std::abs(pmc.ratio - 4.0); });
  rec.check("geometry", "constant-J charts land in U3", fd_tol, [&] {
    const Tensor3 h1 = nabla_omega_at_origin(pm, o.h);
    const Tensor3 h2 = nabla_omega_at_origin(conformal_chart(pm, a, 0.9), o.h);
    return std::max(u3_residual(h1, s) / std::max(1.0, h1.max_abs()), u3_residual(h2, s) / std::max(1.0, h2.max_abs()));
  });
  rec.check("geometry", "finite-difference tensors satisfy the symmetries", fd_tol, [&] {
    const Tensor3 h = nabla_omega_at_origin(conformal_chart(perturbed_j_chart(s, skew), a, 0.9), o.h);
    return kahler::detail::relative_membership(h, s);
  });
  rec.check("geometry", "perturbed charts are valid", 1e-10, [&] {
    const auto v1 = validate_chart(perturbed_j_chart(s, skew), 8, o.seed);
    const auto v2 = validate_chart(pm, 8, o.seed);
    if (!v1.ok || !v2.ok) return 1.0;
    return std::max({v1.j_square, v1.compatibility, v1.symmetry, v2.j_square, v2.compatibility, v2.symmetry});
  });
  if (s.kind() == Kind::Pseudo)
    rec.check("geometry", "labels survive metric negation", 0.0, [&] {
      double bad = 0.0;
      for (const Chart& c : {pm, perturbed_j_chart(s, skew), conformal_chart(pm, a, 0.9)}) {
        const ClassLabel l1 = classify(nabla_omega_at_origin(c, o.h), s, 1e-6);
        const Chart n = negated_chart(c);
        const ClassLabel l2 = classify(nabla_omega_at_origin(n, o.h), n.space, 1e-6);
        if (!(l1 == l2)) bad += 1.0;
      }
      return bad;
    });
}

inline void end_to_end_suite(Recorder& rec, const HermitianSpace& s, const Options& o) {
  const auto hs = hspace_samples(s, 2, o.seed + 61);
  rec.check("end_to_end", "pointwise realization by varying J", 1e-4, [&] {
    double r = 0.0;
    for (const auto& h : hs) r = std::max(r, realize_pointwise(h, s, RealizeMode::VaryJ, o.h).error);
    return r;
  });
  rec.check("end_to_end", "pointwise realization of U3 by varying the metric", 1e-4, [&] {
    double r = 0.0;
    for (const auto& h : hs)
      r = std::max(r, realize_pointwise(kahler::detail::pi3_raw(h, s), s, RealizeMode::VaryMetric, o.h).error);
    return r;
  });
}

}  // namespace detail

inline SuiteResult run(const std::vector<HermitianSpace>& grid, const Options& o = {}) {
  SuiteResult out;
  for (const auto& s : grid) {
    detail::Recorder rec(out, s.describe());
    detail::linalg_suite(rec, s, o);
    detail::hspace_suite(rec, s, o);
    detail::invariants_suite(rec, s, o);
    detail::realize_suite(rec, s, o);
    if (o.geometry) detail::geometry_suite(rec, s, o);
    if (o.end_to_end) detail::end_to_end_suite(rec, s, o);
  }
  return out;
}

}  // namespace kahler::verify
