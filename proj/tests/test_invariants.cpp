#include <gtest/gtest.h>

#include <random>

#include "kahler/group.hpp"
#include "kahler/invariants.hpp"

using namespace kahler;

namespace {

std::vector<HermitianSpace> grid() {
  return {make_space(4, 2, 2, Kind::Pseudo), make_space(6, 0, 6, Kind::Pseudo), make_space(6, 2, 4, Kind::Pseudo),
          make_space(6, 3, 3, Kind::Para), HermitianSpace::from_e_signs(Kind::Para, {-1, 1, 1}),
          make_space(8, 4, 4, Kind::Para)};
}

Tensor3 sample(const HermitianSpace& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_hspace_element(s, rng);
}

// psi_4 written out as an explicit sum over the basis.
double psi4_reference(const Tensor3& h, const HermitianSpace& s) {
  const int m = s.dim();
  const Matrix& j = s.j0();
  double r = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      for (int c = 0; c < m; ++c) {
        // H(e_a, J e_b; J e_c)
        double v = 0.0;
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q) v += j(p, b) * j(q, c) * h(a, p, q);
        r += s.eps(a) * s.eps(b) * s.eps(c) * v * h(a, b, c);
      }
  return r;
}

}  // namespace

TEST(Psi, ZeroTensor) {
  const HermitianSpace s = make_space(6, 2, 4, Kind::Pseudo);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(psi(Tensor3(6), i, s), 0.0);
}

TEST(Psi, FirstInvariantIsTheSquaredNorm) {
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 1);
    EXPECT_NEAR(psi(h, 1, s), tensor3_inner(h, h, s), 1e-12) << s.describe();
  }
}

TEST(Psi, FourthInvariantMatchesExplicitSum) {
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 2);
    EXPECT_NEAR(psi(h, 4, s), psi4_reference(h, s), 1e-12) << s.describe();
  }
}

TEST(Psi, Errors) {
  const HermitianSpace s = make_space(6, 2, 4, Kind::Pseudo);
  EXPECT_THROW(psi(Tensor3::unit(6, 0, 0, 1), 1, s), NotInHSpace);
  EXPECT_THROW(psi(Tensor3(4), 1, s), DimensionError);
  EXPECT_THROW(psi(Tensor3(6), 5, s), DimensionError);
}

TEST(Psi, InvariantUnderStructureGroup) {
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 3);
    const InvariantVector base = invariants(h, s);
    const double scale = std::max(1.0, h.norm() * h.norm());
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const GroupElement g = sample_group(s, seed % 2 == 1, seed);
      const InvariantVector moved = invariants(pullback(g.t, h), s);
      for (int i = 0; i < 4; ++i)
        EXPECT_LE(std::abs(moved.psi[static_cast<std::size_t>(i)] - base.psi[static_cast<std::size_t>(i)]) / scale,
                  1e-9)
            << s.describe() << " psi" << i + 1;
    }
  }
}

TEST(StringInvariant, CanonicalStringsAgreeWithPsi) {
  const HermitianSpace s = make_space(6, 2, 4, Kind::Pseudo);
  const Tensor3 h = sample(s, 4);
  for (int i = 1; i <= 4; ++i)
    EXPECT_EQ(string_invariant(kPsiStrings[static_cast<std::size_t>(i - 1)], h, s), psi(h, i, s));
}

TEST(StringInvariant, RelabellingIndicesChangesNothing) {
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 5);
    EXPECT_NEAR(string_invariant("(1,2;3)(1,2;3)", h, s), string_invariant("(2,3;1)(2,3;1)", h, s), 1e-12);
    EXPECT_NEAR(string_invariant("(1,2;3)(2,3;1)", h, s), string_invariant("(2,3;1)(3,1;2)", h, s), 1e-12);
  }
}

TEST(StringInvariant, DoubleDecorationFlipsByMinusS) {
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 6);
    for (const char* plain : {"(1,2;3)(1,2;3)", "(1,2;3)(1,3;2)", "(1,2;1)(3,2;3)"}) {
      std::string dec(plain);
      // Decorate both occurrences of index 1.
      std::string out;
      for (char c : dec) {
        if (c == '1') out += 'J';
        out += c;
      }
      EXPECT_NEAR(string_invariant(out, h, s), -s.j_sign() * string_invariant(plain, h, s), 1e-12)
          << s.describe() << " " << out;
    }
  }
}

TEST(StringInvariant, MovingJAcrossTheFirstTwoSlots) {
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 7);
    EXPECT_NEAR(string_invariant("(1,J2;3)(1,2;3)", h, s), string_invariant("(J1,2;3)(1,2;3)", h, s), 1e-12);
  }
}

TEST(StringInvariant, ReductionToPsi3) {
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 8);
    EXPECT_NEAR(string_invariant("(J1,2;1)(J3,2;3)", h, s), -s.j_sign() * psi(h, 3, s), 1e-10) << s.describe();
  }
}

TEST(StringInvariant, OneJOnEachFreeIndexReducesToPsi2) {
  // Moving each J into the first slot gives (J1,2;3)(J1,3;2), the double
  // decoration of psi_2.
  for (const auto& s : grid()) {
    const Tensor3 h = sample(s, 9);
    EXPECT_NEAR(string_invariant("(1,J2;3)(1,J3;2)", h, s), -s.j_sign() * psi(h, 2, s), 1e-10) << s.describe();
    EXPECT_NEAR(string_invariant("(1,J2;3)(1,J3;2)", h, s), string_invariant("(J1,2;3)(J1,3;2)", h, s), 1e-10);
  }
}

TEST(StringInvariant, OneJOnEachFreeIndexIsNotMinusSPsi1) {
  // Recorded discrepancy: the value is not -s psi_1 for generic H.
  const HermitianSpace s = make_space(6, 0, 6, Kind::Pseudo);
  const Tensor3 h = sample(s, 10);
  EXPECT_GT(std::abs(string_invariant("(1,J2;3)(1,J3;2)", h, s) + s.j_sign() * psi(h, 1, s)), 1e-3);
}

TEST(StringInvariant, Malformed) {
  const HermitianSpace s = make_space(4, 0, 4, Kind::Pseudo);
  const Tensor3 h(4);
  for (const char* bad : {"", "(1,2;3)", "(1,2,3)(1,2;3)", "(1,2;3)(1,2;4)", "(1,1;3)(2,2;3)x", "(1,1;1)(2,2;3)",
                          "(K1,2;3)(1,2;3)", "(1,2;3)(1,2;3", "(1 2;3)(1,2;3)", "(JJ1,2;3)(1,2;3)"})
    EXPECT_THROW(string_invariant(bad, h, s), MalformedString) << bad;
  EXPECT_NO_THROW(string_invariant(" ( 1 , J2 ; 3 ) ( 1 , 2 ; J3 ) ", h, s));
}

TEST(Polarization, Bilinear) {
  std::mt19937_64 rng(11);
  for (const auto& s : grid()) {
    const Tensor3 a = random_hspace_element(s, rng);
    const Tensor3 b = random_hspace_element(s, rng);
    const Tensor3 c = random_hspace_element(s, rng);
    for (int i = 1; i <= 4; ++i) {
      auto bil = [&](const Tensor3& x, const Tensor3& y) { return 0.25 * (psi(x + y, i, s) - psi(x - y, i, s)); };
      EXPECT_NEAR(bil(a + b, c), bil(a, c) + bil(b, c), 1e-10);
      EXPECT_NEAR(bil(2.5 * a, c), 2.5 * bil(a, c), 1e-10);
      EXPECT_NEAR(bil(a, b), bil(b, a), 1e-10);
      EXPECT_NEAR(bil(a, a), psi(a, i, s), 1e-10);
    }
  }
}

TEST(IndependenceRank, SixDimensions) {
  EXPECT_EQ(invariant_independence_rank(make_space(6, 0, 6, Kind::Pseudo), 32, 0), 4);
  EXPECT_EQ(invariant_independence_rank(make_space(6, 3, 3, Kind::Para), 32, 0), 4);
  EXPECT_EQ(invariant_independence_rank(make_space(8, 4, 4, Kind::Pseudo), 16, 1), 4);
}

TEST(IndependenceRank, DimensionFourIsReported) {
  const int r = invariant_independence_rank(make_space(4, 2, 2, Kind::Pseudo), 32, 0);
  EXPECT_GE(r, 1);
  EXPECT_LE(r, 3);
  RecordProperty("rank_m4", r);
}

TEST(IndependenceRank, NeedsEnoughSamples) {
  EXPECT_THROW(invariant_independence_rank(make_space(6, 0, 6, Kind::Pseudo), 7, 0), DomainError);
}
