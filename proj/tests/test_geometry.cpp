#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "kahler/expm.hpp"
#include "kahler/geometry.hpp"

using namespace kahler;
using kahler::testing::dual;
using kahler::testing::span12_projection;
using kahler::testing::theta0;
using kahler::testing::worked_example_spaces;

namespace {

std::vector<HermitianSpace> grid() {
  return {make_space(4, 0, 4, Kind::Pseudo), make_space(4, 2, 2, Kind::Pseudo),
          HermitianSpace::from_e_signs(Kind::Para, {-1, 1}), make_space(6, 2, 4, Kind::Pseudo),
          make_space(6, 3, 3, Kind::Para)};
}

double rel(const Tensor3& a, const Tensor3& b) { return (a - b).norm() / std::max(1.0, b.norm()); }

// Levi-Civita symbols of e^{2f} G for linear f = a.x:
// Gamma^i_jk = d^i_j a_k + d^i_k a_j - G_jk G^il a_l.
Tensor3 conformal_gamma(const HermitianSpace& s, const Covector& a) {
  const int m = s.dim();
  const Matrix g_inv = s.metric().inverse();
  const Vector up = g_inv * a;
  Tensor3 r(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        r(i, j, k) = (i == j ? a(k) : 0.0) + (i == k ? a(j) : 0.0) - s.metric()(j, k) * up(i);
  return r;
}

}  // namespace

TEST(Christoffel, FlatChartVanishes) {
  for (const auto& s : grid()) {
    const Chart c = flat_chart(s);
    EXPECT_LE(christoffel(c, Vector::Zero(s.dim())).gamma.max_abs(), 1e-12);
    EXPECT_LE(nabla_omega_at_origin(c).max_abs(), 1e-12);
  }
}

TEST(Christoffel, ConformalClosedForm) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-0.1, 0.1);
  for (const auto& s : grid()) {
    Covector a(s.dim());
    for (int i = 0; i < s.dim(); ++i) a(i) = 4.0 * dist(rng);
    const Chart c = conformal_chart(flat_chart(s), a, 1.0);
    Vector p(s.dim());
    for (int i = 0; i < s.dim(); ++i) p(i) = dist(rng);
    ASSERT_LT(p.norm(), 0.5);
    EXPECT_LE((christoffel(c, p).gamma - conformal_gamma(s, a)).max_abs(), 1e-7) << s.describe();
  }
}

TEST(Christoffel, SecondOrderConvergence) {
  const HermitianSpace s = make_space(4, 2, 2, Kind::Pseudo);
  Covector a(4);
  a << 0.3, -0.2, 0.1, 0.4;
  const Chart c = conformal_chart(flat_chart(s), a, 1.0);
  const Vector p = Vector::Constant(4, 0.1);
  const Tensor3 exact = conformal_gamma(s, a);
  const double e1 = (christoffel(c, p, 1e-2).gamma - exact).max_abs();
  const double e2 = (christoffel(c, p, 5e-3).gamma - exact).max_abs();
  EXPECT_NEAR(e1 / e2, 4.0, 0.05);
}

TEST(Christoffel, TorsionFree) {
  std::mt19937_64 rng(2);
  for (const auto& s : grid()) {
    const Chart c = perturbed_metric_chart(s, random_commuting_form(s, rng), 1.0);
    const Tensor3 gam = christoffel(c, Vector::Constant(s.dim(), 0.05)).gamma;
    EXPECT_LE((gam - permuted(gam, {0, 2, 1})).max_abs(), 1e-12);
  }
}

TEST(NablaOmega, ConformalIsMinusSigma) {
  for (const auto& s : grid()) {
    SCOPED_TRACE(s.describe());
    const Covector e1 = dual(s, s.e(0));
    const Tensor3 h = nabla_omega_at_origin(conformal_chart(flat_chart(s), e1));
    EXPECT_LE(rel(h, -sigma(e1, s)), 1e-7);
    EXPECT_EQ(classify(h, s).subset_string(), "{W4}");
  }
}

TEST(NablaOmega, ConformalShiftOnCurvedBase) {
  std::mt19937_64 rng(3);
  for (const auto& s : grid()) {
    const Chart base = perturbed_j_chart(s, random_skew_form(s, rng), 1.0);
    Covector a = Covector::Zero(s.dim());
    a(s.f(0)) = 0.7;
    a(s.e(0)) = -0.4;
    const Tensor3 want = nabla_omega_at_origin(base) - sigma(a, s);
    EXPECT_LE(rel(nabla_omega_at_origin(conformal_chart(base, a)), want), 1e-7) << s.describe();
  }
}

TEST(NablaOmega, PerturbedJMatchesXi) {
  std::mt19937_64 rng(4);
  for (const auto& s : grid()) {
    const EndoOneForm t = random_skew_form(s, rng);
    EXPECT_LE(rel(nabla_omega_at_origin(perturbed_j_chart(s, t)), xi(t, s)), 1e-6) << s.describe();
  }
  for (const auto& s : worked_example_spaces()) {
    const EndoOneForm t = EndoOneForm::simple(theta0(s), s.e(2));
    EXPECT_LE(rel(nabla_omega_at_origin(perturbed_j_chart(s, t)), xi(t, s)), 1e-6) << s.describe();
  }
}

TEST(NablaOmega, PerturbedMetricMatchesXiTilde) {
  std::mt19937_64 rng(5);
  for (const auto& s : grid()) {
    const EndoOneForm t = random_commuting_form(s, rng);
    EXPECT_LE(rel(nabla_omega_at_origin(perturbed_metric_chart(s, t)), xi_tilde(t, s)), 1e-6) << s.describe();
  }
}

TEST(NablaOmega, VariantSelectionPicksSignCorrected) {
  for (const auto& s : grid()) {
    const VariantSelection v = select_xi_tilde_variant(s);
    EXPECT_EQ(v.variant, XiTildeVariant::SignCorrected);
    EXPECT_LE(v.error_sign_corrected, 1e-6);
    EXPECT_GT(v.error_as_printed, 1e-2);
  }
}

TEST(PerturbedCharts, RotationAndBoostBlocks) {
  for (const auto& s : worked_example_spaces()) {
    const double t = 0.37;
    const Matrix th = exp_matrix(t * theta0(s));
    const int a = s.e(0), b = s.e(1);
    if (s.eps(a) == s.eps(b)) {
      EXPECT_NEAR(th(a, a), std::cos(t), 1e-14);
      EXPECT_NEAR(th(b, a), s.eps(b) * std::sin(t), 1e-14);
    } else {
      EXPECT_NEAR(th(a, a), std::cosh(t), 1e-14);
      EXPECT_NEAR(th(b, a), s.eps(b) * std::sinh(t), 1e-14);
    }
    EXPECT_LE(isometry_residual(th, s), 1e-13);
  }
}

TEST(PerturbedCharts, ProjectionGivesExponentialScaling) {
  for (const auto& s : worked_example_spaces()) {
    SCOPED_TRACE(s.describe());
    const Chart c = perturbed_metric_chart(s, EndoOneForm::simple(span12_projection(s), s.e(0)), 1.0);
    Vector p = Vector::Zero(s.dim());
    const double alpha = 0.2;
    p(s.e(0)) = alpha;
    const Matrix g = c.metric_field(p);
    for (int i : {s.e(0), s.e(1), s.f(0), s.f(1)}) EXPECT_NEAR(g(i, i), s.eps(i) * std::exp(2 * alpha), 1e-13);
    for (int i : {s.e(2), s.f(2)}) EXPECT_NEAR(g(i, i), s.eps(i), 1e-15);

    const Tensor3 h = nabla_omega_at_origin(c);
    EXPECT_LE((tau1(h, s) - (-2.0 * s.j_sign()) * dual(s, s.f(0))).norm(), 1e-6);
    EXPECT_NEAR(h(s.e(0), s.e(2), s.f(2)), 0.0, 1e-8);
  }
}

TEST(ProductCharts, FlatTimesFlat) {
  const Chart c = product_chart(flat_chart(make_space(4, 0, 4, Kind::Pseudo)), flat_chart(make_space(4, 2, 2, Kind::Pseudo)));
  EXPECT_EQ(c.dim(), 8);
  EXPECT_LE(nabla_omega_at_origin(c).max_abs(), 1e-12);
  EXPECT_TRUE(validate_chart(c, 4).ok);
}

TEST(ProductCharts, FactorsEmbed) {
  std::mt19937_64 rng(6);
  for (const auto& [s1, s2] :
       {std::pair{make_space(6, 0, 6, Kind::Pseudo), make_space(4, 2, 2, Kind::Pseudo)},
        std::pair{make_space(6, 3, 3, Kind::Para), HermitianSpace::from_e_signs(Kind::Para, {-1, 1})}}) {
    const Chart c1 = perturbed_j_chart(s1, EndoOneForm::simple(theta0(s1), s1.e(2)));
    const Chart p = product_chart(c1, flat_chart(s2));
    const Tensor3 h1 = nabla_omega_at_origin(c1);
    const Tensor3 hp = nabla_omega_at_origin(p);
    EXPECT_LE(rel(hp, embed_factor_tensor(h1, s1, s2, 1)), 1e-8);
    EXPECT_EQ(classify(hp, p.space).present, classify(h1, s1).present);

    Covector a(s2.dim());
    for (int i = 0; i < s2.dim(); ++i) a(i) = 0.1 * (i + 1);
    const Chart c2 = conformal_chart(flat_chart(s2), a);
    const Tensor3 h2 = nabla_omega_at_origin(product_chart(flat_chart(s1), c2));
    EXPECT_LE(rel(h2, embed_factor_tensor(-sigma(a, s2), s1, s2, 2)), 1e-7);
  }
}

TEST(ProductCharts, KindMismatch) {
  EXPECT_THROW(product_chart(flat_chart(make_space(4, 0, 4, Kind::Pseudo)), flat_chart(make_space(4, 2, 2, Kind::Para))),
               KindMismatch);
}

TEST(NegatedCharts, LabelsSurviveForPseudo) {
  std::mt19937_64 rng(7);
  for (const auto& s : {make_space(6, 0, 6, Kind::Pseudo), make_space(6, 2, 4, Kind::Pseudo)}) {
    const Chart c = perturbed_j_chart(s, EndoOneForm::simple(theta0(s), s.e(1)));
    const Chart n = negated_chart(c);
    const Tensor3 h = nabla_omega_at_origin(c);
    const Tensor3 hn = nabla_omega_at_origin(n);
    EXPECT_LE(rel(hn, -h), 1e-10);
    EXPECT_EQ(classify(hn, n.space).present, classify(h, s).present);
    EXPECT_TRUE(validate_chart(n, 4).ok);
  }
}

TEST(Charts, AllFamiliesValidate) {
  std::mt19937_64 rng(8);
  for (const auto& s : grid()) {
    SCOPED_TRACE(s.describe());
    EXPECT_TRUE(validate_chart(flat_chart(s), 4).ok);
    EXPECT_TRUE(validate_chart(perturbed_j_chart(s, random_skew_form(s, rng), 0.8), 4).ok);
    EXPECT_TRUE(validate_chart(perturbed_metric_chart(s, 0.3 * random_commuting_form(s, rng), 0.8), 4).ok);
    EXPECT_TRUE(validate_chart(conformal_chart(flat_chart(s), Covector::Constant(s.dim(), 0.2)), 4).ok);
  }
}

TEST(Charts, Errors) {
  const HermitianSpace s = make_space(4, 0, 4, Kind::Pseudo);
  const Chart c = flat_chart(s, 0.5);
  EXPECT_THROW(nabla_omega(c, Vector::Constant(4, 0.6)), DomainError);
  EXPECT_THROW(nabla_omega(c, Vector::Zero(4), 0.0), DomainError);
  EXPECT_THROW(nabla_omega(c, Vector::Zero(3)), DimensionError);
  EXPECT_THROW(perturbed_j_chart(s, EndoOneForm::simple(Matrix::Identity(4, 4), 0)), NotSkewAdjoint);
  Matrix a = Matrix::Zero(4, 4);
  a(0, 1) = 1.0;
  EXPECT_THROW(perturbed_metric_chart(s, EndoOneForm::simple(a, 0)), NotCommuting);
  Chart bad = c;
  bad.metric_field = [](const Vector&) { return Matrix::Zero(4, 4); };
  EXPECT_THROW(nabla_omega_at_origin(bad), SingularMetric);
}

TEST(RealizePointwise, ZeroTarget) {
  const HermitianSpace s = make_space(6, 2, 4, Kind::Pseudo);
  for (RealizeMode mode : {RealizeMode::VaryJ, RealizeMode::VaryMetric}) {
    const PointwiseRealization r = realize_pointwise(Tensor3(6), s, mode);
    EXPECT_LE(r.achieved.max_abs(), 1e-12);
    EXPECT_EQ(r.solution.theta.norm(), 0.0);
  }
}

TEST(RealizePointwise, RandomTargets) {
  std::mt19937_64 rng(9);
  for (const auto& s : grid()) {
    SCOPED_TRACE(s.describe());
    const Tensor3 target = random_hspace_element(s, rng);
    const PointwiseRealization rj = realize_pointwise(target, s, RealizeMode::VaryJ);
    EXPECT_LE(rj.error, rj.threshold);
    EXPECT_EQ(rj.chart.family, "perturbed_j");
    EXPECT_FALSE(rj.selection.has_value());

    const Tensor3 u3 = project_component(target, 3, s) + sigma(Covector::Constant(s.dim(), 0.3), s);
    const PointwiseRealization rm = realize_pointwise(u3, s, RealizeMode::VaryMetric);
    EXPECT_LE(rm.error, rm.threshold);
    ASSERT_TRUE(rm.selection.has_value());
    EXPECT_EQ(rm.selection->variant, XiTildeVariant::SignCorrected);
  }
}

TEST(RealizePointwise, VaryMetricNeedsU3) {
  std::mt19937_64 rng(10);
  const HermitianSpace s = make_space(6, 0, 6, Kind::Pseudo);
  EXPECT_THROW(realize_pointwise(random_hspace_element(s, rng), s, RealizeMode::VaryMetric), NotInU3);
}
