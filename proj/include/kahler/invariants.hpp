#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

#include "kahler/hspace.hpp"
#include "kahler/numerics.hpp"

namespace kahler {

/// One slot of an invariant string: which summation index feeds it and
/// whether J0 is applied first.
struct InvariantSlot {
  int index = 0;  // 0, 1 or 2
  bool j = false;
};

/// Parsed form of strings such as "(1,J2;3)(1,J3;2)": two monomials of three
/// slots each, every index 1..3 used exactly twice.
struct InvariantString {
  std::array<std::array<InvariantSlot, 3>, 2> monomials{};
};

inline InvariantString parse_invariant_string(std::string_view text) {
  InvariantString out;
  std::size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  auto expect = [&](char c) {
    skip_ws();
    if (pos >= text.size() || text[pos] != c)
      throw MalformedString("invariant string '" + std::string(text) + "': expected '" + c + "' at offset " +
                            std::to_string(pos));
    ++pos;
  };
  std::array<int, 3> uses{};
  for (auto& mono : out.monomials) {
    expect('(');
    for (int slot = 0; slot < 3; ++slot) {
      skip_ws();
      InvariantSlot sl;
      if (pos < text.size() && text[pos] == 'J') {
        sl.j = true;
        ++pos;
      }
      if (pos >= text.size() || text[pos] < '1' || text[pos] > '3')
        throw MalformedString("invariant string '" + std::string(text) + "': expected index 1..3 at offset " +
                              std::to_string(pos));
      sl.index = text[pos++] - '1';
      ++uses[sl.index];
      mono[slot] = sl;
      if (slot < 2) expect(slot == 0 ? ',' : ';');
    }
    expect(')');
  }
  skip_ws();
  if (pos != text.size())
    throw MalformedString("invariant string '" + std::string(text) + "': trailing characters");
  for (int u : uses)
    if (u != 2) throw MalformedString("invariant string '" + std::string(text) + "': each index must appear twice");
  return out;
}

/// Evaluates the contraction sum_I eps_I M1(I) M2(I) for a parsed string.
inline double string_invariant(const InvariantString& spec, const Tensor3& h, const HermitianSpace& s) {
  detail::require_dim(h.dim(), s.dim(), "string_invariant");
  const int m = s.dim();
  std::array<Tensor3, 2> decorated{h, h};
  for (int k = 0; k < 2; ++k)
    for (int slot = 0; slot < 3; ++slot)
      if (spec.monomials[k][slot].j) decorated[k] = apply_in_slot(decorated[k], s.j0(), slot);
  const auto& a = spec.monomials[0];
  const auto& b = spec.monomials[1];
  std::array<int, 3> i{};
  double r = 0.0;
  for (i[0] = 0; i[0] < m; ++i[0])
    for (i[1] = 0; i[1] < m; ++i[1])
      for (i[2] = 0; i[2] < m; ++i[2]) {
        const double w = s.eps(i[0]) * s.eps(i[1]) * s.eps(i[2]);
        r += w * decorated[0](i[a[0].index], i[a[1].index], i[a[2].index]) *
             decorated[1](i[b[0].index], i[b[1].index], i[b[2].index]);
      }
  return r;
}

inline double string_invariant(std::string_view spec, const Tensor3& h, const HermitianSpace& s) {
  return string_invariant(parse_invariant_string(spec), h, s);
}

inline constexpr std::array<std::string_view, 4> kPsiStrings{
    "(1,2;3)(1,2;3)", "(1,2;3)(1,3;2)", "(1,2;1)(3,2;3)", "(1,J2;J3)(1,2;3)"};

/// psi_i for i = 1..4.
inline double psi(const Tensor3& h, int i, const HermitianSpace& s, double tol = kDefaultTol) {
  if (i < 1 || i > 4) throw DimensionError("psi index must be 1..4, got " + std::to_string(i));
  detail::require_dim(h.dim(), s.dim(), "psi");
  detail::require_membership(h, s, tol);
  return string_invariant(kPsiStrings[i - 1], h, s);
}

struct InvariantVector {
  std::array<double, 4> psi{};
};

inline InvariantVector invariants(const Tensor3& h, const HermitianSpace& s, double tol = kDefaultTol) {
  detail::require_membership(h, s, tol);
  InvariantVector v;
  for (int i = 0; i < 4; ++i) v.psi[i] = string_invariant(kPsiStrings[i], h, s);
  return v;
}

/// Rank of the 4 x n matrix psi_i(H_s) over seeded random elements of the
/// constrained space.
inline int invariant_independence_rank(const HermitianSpace& s, int n_samples = 32, std::uint64_t seed = 0) {
  if (n_samples < 8) throw DomainError("invariant_independence_rank needs at least 8 samples");
  std::mt19937_64 rng(seed);
  Matrix mat(4, n_samples);
  for (int c = 0; c < n_samples; ++c) {
    const Tensor3 h = random_hspace_element(s, rng);
    const InvariantVector v = invariants(h, s);
    for (int i = 0; i < 4; ++i) mat(i, c) = v.psi[i];
  }
  return numerical_rank(mat);
}

}  // namespace kahler
