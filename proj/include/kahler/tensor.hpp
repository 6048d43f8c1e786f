#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kahler/space.hpp"

namespace kahler {

/// A real 3-tensor H(x, y; z) stored densely: H(i, j, k) = H(e_i, e_j; e_k).
class Tensor3 {
 public:
  Tensor3() = default;
  explicit Tensor3(int m) : m_(m), data_(static_cast<std::size_t>(m) * m * m, 0.0) {}

  static Tensor3 unit(int m, int i, int j, int k) {
    Tensor3 t(m);
    t(i, j, k) = 1.0;
    return t;
  }

  /// Entries drawn uniformly from [-1, 1].
  template <class Rng>
  static Tensor3 random(int m, Rng& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Tensor3 t(m);
    for (double& v : t.data_) v = dist(rng);
    return t;
  }

  int dim() const { return m_; }
  std::size_t size() const { return data_.size(); }

  double& operator()(int i, int j, int k) { return data_[index(i, j, k)]; }
  double operator()(int i, int j, int k) const { return data_[index(i, j, k)]; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  /// Euclidean norm of the coefficient vector (not the signature form).
  double norm() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
  }

  double max_abs() const {
    double r = 0.0;
    for (double v : data_) r = std::max(r, std::abs(v));
    return r;
  }

  Tensor3& operator+=(const Tensor3& o) {
    check_same(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] += o.data_[n];
    return *this;
  }
  Tensor3& operator-=(const Tensor3& o) {
    check_same(o);
    for (std::size_t n = 0; n < data_.size(); ++n) data_[n] -= o.data_[n];
    return *this;
  }
  Tensor3& operator*=(double c) {
    for (double& v : data_) v *= c;
    return *this;
  }

  friend Tensor3 operator+(Tensor3 a, const Tensor3& b) { return a += b; }
  friend Tensor3 operator-(Tensor3 a, const Tensor3& b) { return a -= b; }
  friend Tensor3 operator*(Tensor3 a, double c) { return a *= c; }
  friend Tensor3 operator*(double c, Tensor3 a) { return a *= c; }
  friend Tensor3 operator-(Tensor3 a) { return a *= -1.0; }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.m_ == b.m_ && a.data_ == b.data_;
  }

  Vector as_vector() const {
    return Eigen::Map<const Vector>(data_.data(), static_cast<Eigen::Index>(data_.size()));
  }
  static Tensor3 from_vector(int m, const Vector& v) {
    Tensor3 t(m);
    if (static_cast<std::size_t>(v.size()) != t.size())
      throw DimensionError("vector length does not match m^3");
    std::copy(v.data(), v.data() + v.size(), t.data_.begin());
    return t;
  }

 private:
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * m_ + j) * m_ + k;
  }
  void check_same(const Tensor3& o) const {
    if (o.m_ != m_) throw DimensionError("tensor dimensions differ");
  }

  int m_ = 0;
  std::vector<double> data_;
};

/// An endomorphism-valued one-form: part(k) is the matrix of theta(e_k), so
/// theta(e_k) e_b = sum_a part(k)(a, b) e_a.
class EndoOneForm {
 public:
  EndoOneForm() = default;
  explicit EndoOneForm(int m) : m_(m), parts_(static_cast<std::size_t>(m), Matrix::Zero(m, m)) {}

  /// theta = A (x) e^k.
  static EndoOneForm simple(const Matrix& a, int k) {
    EndoOneForm t(static_cast<int>(a.rows()));
    t.part(k) = a;
    return t;
  }

  int dim() const { return m_; }
  Matrix& part(int k) { return parts_[static_cast<std::size_t>(k)]; }
  const Matrix& part(int k) const { return parts_[static_cast<std::size_t>(k)]; }

  double& operator()(int a, int b, int k) { return part(k)(a, b); }
  double operator()(int a, int b, int k) const { return part(k)(a, b); }

  /// theta(v) = sum_k v^k theta(e_k).
  Matrix evaluate(const Vector& v) const {
    Matrix r = Matrix::Zero(m_, m_);
    for (int k = 0; k < m_; ++k)
      if (v(k) != 0.0) r += v(k) * part(k);
    return r;
  }

  double norm() const {
    double s = 0.0;
    for (const auto& p : parts_) s += p.squaredNorm();
    return std::sqrt(s);
  }

  EndoOneForm& operator+=(const EndoOneForm& o) {
    for (int k = 0; k < m_; ++k) part(k) += o.part(k);
    return *this;
  }
  EndoOneForm& operator*=(double c) {
    for (auto& p : parts_) p *= c;
    return *this;
  }
  friend EndoOneForm operator+(EndoOneForm a, const EndoOneForm& b) { return a += b; }
  friend EndoOneForm operator*(double c, EndoOneForm a) { return a *= c; }

 private:
  int m_ = 0;
  std::vector<Matrix> parts_;
};

namespace detail {
inline void require_dim(int got, int want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": dimension " + std::to_string(got) +
                         " does not match space dimension " + std::to_string(want));
}
}  // namespace detail

/// R(x_0, x_1, x_2) = H(x_{perm[0]}, x_{perm[1]}, x_{perm[2]}).
inline Tensor3 permuted(const Tensor3& h, std::array<int, 3> perm) {
  const int m = h.dim();
  Tensor3 r(m);
  std::array<int, 3> idx{};
  for (idx[0] = 0; idx[0] < m; ++idx[0])
    for (idx[1] = 0; idx[1] < m; ++idx[1])
      for (idx[2] = 0; idx[2] < m; ++idx[2])
        r(idx[0], idx[1], idx[2]) = h(idx[perm[0]], idx[perm[1]], idx[perm[2]]);
  return r;
}

/// Feeds the linear map `a` into one slot: R(..x..) = H(..a x..).
inline Tensor3 apply_in_slot(const Tensor3& h, const Matrix& a, int slot) {
  const int m = h.dim();
  Tensor3 r(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const int free = slot == 0 ? i : slot == 1 ? j : k;
        double s = 0.0;
        for (int c = 0; c < m; ++c) {
          const double w = a(c, free);
          if (w == 0.0) continue;
          s += w * (slot == 0 ? h(c, j, k) : slot == 1 ? h(i, c, k) : h(i, j, c));
        }
        r(i, j, k) = s;
      }
  return r;
}

/// Signature-weighted inner product sum eps_i eps_j eps_k A_ijk B_ijk.
inline double tensor3_inner(const Tensor3& a, const Tensor3& b, const HermitianSpace& s) {
  detail::require_dim(a.dim(), s.dim(), "tensor3_inner");
  detail::require_dim(b.dim(), s.dim(), "tensor3_inner");
  const int m = s.dim();
  double r = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) r += s.eps(i) * s.eps(j) * s.eps(k) * a(i, j, k) * b(i, j, k);
  return r;
}

/// (T^* H)(x, y; z) = H(Tx, Ty; Tz).
inline Tensor3 pullback(const Matrix& t, const Tensor3& h) {
  if (t.rows() != h.dim() || t.cols() != h.dim())
    throw DimensionError("pullback: matrix and tensor dimensions differ");
  return apply_in_slot(apply_in_slot(apply_in_slot(h, t, 0), t, 1), t, 2);
}

/// Covector pullback (T^* phi)(x) = phi(T x).
inline Covector pullback(const Matrix& t, const Covector& phi) { return t.transpose() * phi; }

}  // namespace kahler
