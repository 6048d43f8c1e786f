#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "kahler/errors.hpp"

namespace kahler {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Covector = Eigen::VectorXd;

enum class Kind { Para, Pseudo };

inline const char* to_string(Kind kind) {
  return kind == Kind::Para ? "para" : "pseudo";
}

inline Kind kind_from_string(const std::string& s) {
  if (s == "para" || s == "Para" || s == "+") return Kind::Para;
  if (s == "pseudo" || s == "Pseudo" || s == "-") return Kind::Pseudo;
  throw Error("unknown structure kind '" + s + "' (expected para|pseudo)");
}

/// An inner-product space V = span{e_1..e_n, f_1..f_n} (n = m/2) carrying the
/// standard (para-)complex structure J0 e_i = f_i, J0 f_i = ±e_i.
///
/// Index layout: coordinate a in [0, n) is e_{a+1}, coordinate n + a is
/// f_{a+1}. The signature is encoded by the signs of the e_i; the f_i signs
/// follow from compatibility (equal for Pseudo, opposite for Para).
class HermitianSpace {
 public:
  HermitianSpace() = default;

  /// Builds a space from the signs <e_i, e_i>. Throws DimensionError for
  /// fewer than two e-vectors and Error for signs other than +-1.
  static HermitianSpace from_e_signs(Kind kind, const std::vector<int>& e_signs) {
    if (e_signs.size() < 2)
      throw DimensionError("a Hermitian space needs m = 2n >= 4");
    HermitianSpace s;
    s.kind_ = kind;
    s.half_ = static_cast<int>(e_signs.size());
    s.m_ = 2 * s.half_;
    s.e_signs_ = e_signs;
    s.eps_ = Vector::Zero(s.m_);
    for (int a = 0; a < s.half_; ++a) {
      int sg = e_signs[static_cast<std::size_t>(a)];
      if (sg != 1 && sg != -1) throw Error("e-signs must be +1 or -1");
      s.eps_(a) = sg;
      s.eps_(s.half_ + a) = kind == Kind::Pseudo ? sg : -sg;
    }
    s.p_ = static_cast<int>((s.eps_.array() < 0).count());
    s.q_ = s.m_ - s.p_;
    s.metric_ = s.eps_.asDiagonal();
    s.j0_ = Matrix::Zero(s.m_, s.m_);
    for (int a = 0; a < s.half_; ++a) {
      s.j0_(s.half_ + a, a) = 1.0;            // J0 e_a = f_a
      s.j0_(a, s.half_ + a) = s.j_sign();     // J0 f_a = +-e_a
    }
    return s;
  }

  int dim() const { return m_; }
  int half() const { return half_; }
  int p() const { return p_; }
  int q() const { return q_; }
  Kind kind() const { return kind_; }

  /// J0^2 = j_sign() * Id: +1 for Para, -1 for Pseudo. This is the "±" of the
  /// defining relations of the tensor space.
  double j_sign() const { return kind_ == Kind::Para ? 1.0 : -1.0; }
  /// J0^* g = metric_sign() * g: -1 for Para, +1 for Pseudo.
  double metric_sign() const { return -j_sign(); }

  const Vector& eps() const { return eps_; }
  double eps(int i) const { return eps_(i); }
  const std::vector<int>& e_signs() const { return e_signs_; }
  const Matrix& metric() const { return metric_; }
  const Matrix& j0() const { return j0_; }

  int e(int i) const { return i; }
  int f(int i) const { return half_ + i; }

  /// The same structure with the metric negated.
  HermitianSpace negated() const {
    std::vector<int> neg(e_signs_);
    for (int& v : neg) v = -v;
    return from_e_signs(kind_, neg);
  }

  std::string describe() const {
    std::string s = std::string(to_string(kind_)) + " m=" + std::to_string(m_) +
                    " (p,q)=(" + std::to_string(p_) + "," + std::to_string(q_) +
                    ") e-signs=";
    for (int v : e_signs_) s += v > 0 ? '+' : '-';
    return s;
  }

  friend bool operator==(const HermitianSpace& a, const HermitianSpace& b) {
    return a.kind_ == b.kind_ && a.e_signs_ == b.e_signs_;
  }

 private:
  int m_ = 0;
  int half_ = 0;
  int p_ = 0;
  int q_ = 0;
  Kind kind_ = Kind::Pseudo;
  std::vector<int> e_signs_;
  Vector eps_;
  Matrix metric_;
  Matrix j0_;
};

/// Canonical space of signature (p, q). Timelike directions come first among
/// the e_i. Pseudo needs p, q even (e_i and f_i share a sign); Para needs
/// p = q and puts every e_i spacelike (use from_e_signs for other layouts).
inline HermitianSpace make_space(int m, int p, int q, Kind kind) {
  if (m < 4 || m % 2 != 0)
    throw DimensionError("dimension must be even and >= 4, got " + std::to_string(m));
  if (p < 0 || q < 0 || p + q != m)
    throw ParityError("signature (" + std::to_string(p) + "," + std::to_string(q) +
                      ") does not add up to m=" + std::to_string(m));
  const int half = m / 2;
  std::vector<int> signs(static_cast<std::size_t>(half), 1);
  if (kind == Kind::Para) {
    if (p != q) throw ParityError("an almost para-Hermitian structure forces p = q");
  } else {
    if (p % 2 != 0 || q % 2 != 0)
      throw ParityError("an almost pseudo-Hermitian structure needs p and q even");
    for (int a = 0; a < p / 2; ++a) signs[static_cast<std::size_t>(a)] = -1;
  }
  return HermitianSpace::from_e_signs(kind, signs);
}

}  // namespace kahler
