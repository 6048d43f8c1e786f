#pragma once

// Shared constructions for the test binaries.

#include <vector>

#include "kahler/space.hpp"
#include "kahler/tensor.hpp"

namespace kahler::testing {

/// m = 6 layouts used for the worked examples: Riemannian, (2,4), split para
/// with all e spacelike, and split para with e_1 timelike (so that
/// eps_1 = -eps_2 and the rotation becomes a boost).
inline std::vector<HermitianSpace> worked_example_spaces() {
  return {make_space(6, 0, 6, Kind::Pseudo), make_space(6, 2, 4, Kind::Pseudo), make_space(6, 3, 3, Kind::Para),
          HermitianSpace::from_e_signs(Kind::Para, {-1, 1, 1})};
}

/// theta_0 e_1 = eps_2 e_2, theta_0 e_2 = -eps_1 e_1, zero elsewhere.
inline Matrix theta0(const HermitianSpace& s) {
  Matrix a = Matrix::Zero(s.dim(), s.dim());
  a(s.e(1), s.e(0)) = s.eps(s.e(1));
  a(s.e(0), s.e(1)) = -s.eps(s.e(0));
  return a;
}

/// Orthogonal projection onto span{e_1, e_2, f_1, f_2}.
inline Matrix span12_projection(const HermitianSpace& s) {
  Matrix a = Matrix::Zero(s.dim(), s.dim());
  for (int i = 0; i < 2; ++i) {
    a(s.e(i), s.e(i)) = 1.0;
    a(s.f(i), s.f(i)) = 1.0;
  }
  return a;
}

/// Coordinate covector dual to basis index `i`.
inline Covector dual(const HermitianSpace& s, int i) { return Covector::Unit(s.dim(), i); }

}  // namespace kahler::testing
