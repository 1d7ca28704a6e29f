#pragma once

// Dense fixed-size matrix primitives for two-qubit problems: 2x2 and 4x4
// complex matrices and 3x3 real symmetric ones. Nothing here allocates.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <type_traits>

#include "qcorr/errors.hpp"

namespace qcorr::linalg {

using Complex = std::complex<double>;

namespace detail {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

// std::conj(double) promotes to complex; keep the scalar type instead.
template <class T>
constexpr T conj(const T& x) {
  if constexpr (is_complex<T>::value) {
    return std::conj(x);
  } else {
    return x;
  }
}

template <class T>
constexpr double real(const T& x) {
  if constexpr (is_complex<T>::value) {
    return x.real();
  } else {
    return static_cast<double>(x);
  }
}

}  // namespace detail

/// Row-major N x N matrix with value semantics.
template <class T, std::size_t N>
class SquareMatrix {
 public:
  using value_type = T;
  static constexpr std::size_t dim = N;

  constexpr SquareMatrix() = default;

  SquareMatrix(std::initializer_list<std::initializer_list<T>> rows) {
    if (rows.size() != N) throw ValidationError("row count does not match matrix dimension");
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != N) throw ValidationError("column count does not match matrix dimension");
      std::size_t j = 0;
      for (const auto& x : row) (*this)(i, j++) = x;
      ++i;
    }
  }

  static SquareMatrix identity() {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = T(1);
    return m;
  }

  static SquareMatrix diagonal(const std::array<T, N>& d) {
    SquareMatrix m;
    for (std::size_t i = 0; i < N; ++i) m(i, i) = d[i];
    return m;
  }

  constexpr T& operator()(std::size_t i, std::size_t j) { return data_[i * N + j]; }
  constexpr const T& operator()(std::size_t i, std::size_t j) const { return data_[i * N + j]; }

  const std::array<T, N * N>& data() const noexcept { return data_; }

  SquareMatrix adjoint() const {
    SquareMatrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) out(j, i) = detail::conj((*this)(i, j));
    return out;
  }

  SquareMatrix transpose() const {
    SquareMatrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) out(j, i) = (*this)(i, j);
    return out;
  }

  T trace() const {
    T t{};
    for (std::size_t i = 0; i < N; ++i) t += (*this)(i, i);
    return t;
  }

  SquareMatrix& operator+=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] += o.data_[k];
    return *this;
  }
  SquareMatrix& operator-=(const SquareMatrix& o) {
    for (std::size_t k = 0; k < N * N; ++k) data_[k] -= o.data_[k];
    return *this;
  }
  SquareMatrix& operator*=(const T& a) {
    for (auto& x : data_) x *= a;
    return *this;
  }
  SquareMatrix& operator/=(const T& a) {
    for (auto& x : data_) x /= a;
    return *this;
  }

  friend SquareMatrix operator+(SquareMatrix a, const SquareMatrix& b) { return a += b; }
  friend SquareMatrix operator-(SquareMatrix a, const SquareMatrix& b) { return a -= b; }
  friend SquareMatrix operator*(SquareMatrix a, const T& s) { return a *= s; }
  friend SquareMatrix operator*(const T& s, SquareMatrix a) { return a *= s; }
  friend SquareMatrix operator/(SquareMatrix a, const T& s) { return a /= s; }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix out;
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t k = 0; k < N; ++k) {
        const T aik = a(i, k);
        for (std::size_t j = 0; j < N; ++j) out(i, j) += aik * b(k, j);
      }
    return out;
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::array<T, N * N> data_{};
};

using CMatrix2 = SquareMatrix<Complex, 2>;
using CMatrix4 = SquareMatrix<Complex, 4>;
using RMatrix3 = SquareMatrix<double, 3>;

template <class T, std::size_t N>
double max_abs(const SquareMatrix<T, N>& a) {
  double m = 0.0;
  for (const auto& x : a.data()) m = std::max(m, static_cast<double>(std::abs(x)));
  return m;
}

template <class T, std::size_t N>
double max_abs_diff(const SquareMatrix<T, N>& a, const SquareMatrix<T, N>& b) {
  return max_abs(a - b);
}

template <class T, std::size_t N>
double frobenius_norm(const SquareMatrix<T, N>& a) {
  double s = 0.0;
  for (const auto& x : a.data()) s += std::norm(x);
  return std::sqrt(s);
}

/// Largest elementwise |A_ij - conj(A_ji)|.
template <class T, std::size_t N>
double hermiticity_residual(const SquareMatrix<T, N>& a) {
  double m = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i; j < N; ++j)
      m = std::max(m, static_cast<double>(std::abs(a(i, j) - detail::conj(a(j, i)))));
  return m;
}

template <class T, std::size_t N>
bool is_hermitian(const SquareMatrix<T, N>& a, double tol) {
  return hermiticity_residual(a) <= tol;
}

template <class T, std::size_t N>
SquareMatrix<T, N> hermitian_part(const SquareMatrix<T, N>& a) {
  return (a + a.adjoint()) * T(0.5);
}

template <class T, std::size_t M, std::size_t N>
SquareMatrix<T, M * N> kron(const SquareMatrix<T, M>& a, const SquareMatrix<T, N>& b) {
  SquareMatrix<T, M * N> out;
  for (std::size_t i = 0; i < M; ++i)
    for (std::size_t j = 0; j < M; ++j)
      for (std::size_t k = 0; k < N; ++k)
        for (std::size_t l = 0; l < N; ++l) out(i * N + k, j * N + l) = a(i, j) * b(k, l);
  return out;
}

inline CMatrix2 identity2() { return CMatrix2::identity(); }
inline CMatrix2 pauli_x() { return {{0.0, 1.0}, {1.0, 0.0}}; }
inline CMatrix2 pauli_y() { return {{0.0, Complex(0.0, -1.0)}, {Complex(0.0, 1.0), 0.0}}; }
inline CMatrix2 pauli_z() { return {{1.0, 0.0}, {0.0, -1.0}}; }

/// Exchanges the two qubits: |ab> -> |ba>.
inline CMatrix4 swap_matrix() {
  CMatrix4 m;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) m(b * 2 + a, a * 2 + b) = 1.0;
  return m;
}

enum class Subsystem { A, B };

/// Transposes the 2x2 indices of one tensor factor. For subsystem A,
/// (rho^T_A)_{ab,cd} = rho_{cb,ad}. Involutive, trace- and Hermiticity-preserving.
inline CMatrix4 partial_transpose(const CMatrix4& rho, Subsystem which) {
  CMatrix4 out;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t c = 0; c < 2; ++c)
        for (std::size_t d = 0; d < 2; ++d) {
          const std::size_t row = a * 2 + b;
          const std::size_t col = c * 2 + d;
          out(row, col) = which == Subsystem::A ? rho(c * 2 + b, a * 2 + d)
                                                : rho(a * 2 + d, c * 2 + b);
        }
  return out;
}

/// Spectrum in ascending order with eigenvectors stored as columns.
template <class T, std::size_t N>
struct EigenDecomposition {
  std::array<double, N> eigenvalues{};
  SquareMatrix<T, N> eigenvectors;

  SquareMatrix<T, N> reconstruct() const {
    std::array<T, N> d{};
    for (std::size_t i = 0; i < N; ++i) d[i] = T(eigenvalues[i]);
    return eigenvectors * SquareMatrix<T, N>::diagonal(d) * eigenvectors.adjoint();
  }

  /// Column k as an array.
  std::array<T, N> vector(std::size_t k) const {
    std::array<T, N> v{};
    for (std::size_t i = 0; i < N; ++i) v[i] = eigenvectors(i, k);
    return v;
  }
};

struct EigOptions {
  double hermitian_tol = 1e-10;
  double offdiag_tol = 1e-14;
  int max_sweeps = 64;
};

namespace detail {

template <class T, std::size_t N>
double offdiag_norm(const SquareMatrix<T, N>& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// Zeroes a(p,q) by the unitary U = D J, where D removes the phase of a(p,q)
// and J is the classical real Jacobi rotation. A <- U^H A U, V <- V U.
template <class T, std::size_t N>
void jacobi_rotate(SquareMatrix<T, N>& a, SquareMatrix<T, N>& v, std::size_t p, std::size_t q) {
  const T apq = a(p, q);
  const double mag = std::abs(apq);
  if (mag == 0.0) return;
  const T phase = apq / T(mag);  // e^{i phi}, or +-1 for real T

  const double app = detail::real(a(p, p));
  const double aqq = detail::real(a(q, q));
  const double theta = (aqq - app) / (2.0 * mag);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;

  const T upp = T(c);
  const T upq = T(s);
  const T uqp = T(-s) * detail::conj(phase);
  const T uqq = T(c) * detail::conj(phase);

  for (std::size_t k = 0; k < N; ++k) {
    const T akp = a(k, p);
    const T akq = a(k, q);
    a(k, p) = akp * upp + akq * uqp;
    a(k, q) = akp * upq + akq * uqq;
    const T vkp = v(k, p);
    const T vkq = v(k, q);
    v(k, p) = vkp * upp + vkq * uqp;
    v(k, q) = vkp * upq + vkq * uqq;
  }
  for (std::size_t k = 0; k < N; ++k) {
    const T apk = a(p, k);
    const T aqk = a(q, k);
    a(p, k) = detail::conj(upp) * apk + detail::conj(uqp) * aqk;
    a(q, k) = detail::conj(upq) * apk + detail::conj(uqq) * aqk;
  }
  a(p, q) = T{};
  a(q, p) = T{};
  a(p, p) = T(detail::real(a(p, p)));
  a(q, q) = T(detail::real(a(q, q)));
}

}  // namespace detail

/// Cyclic Jacobi eigensolver for Hermitian (or real symmetric) matrices.
///
/// Eigenvalues come back ascending. Each eigenvector column is rescaled so
/// that its first component with magnitude above 1e-10 is real and positive,
/// which makes the output deterministic for a given input.
template <class T, std::size_t N>
EigenDecomposition<T, N> hermitian_eig(const SquareMatrix<T, N>& input, const EigOptions& opt = {}) {
  const double herm = hermiticity_residual(input);
  if (herm > opt.hermitian_tol)
    throw ValidationError("matrix is not Hermitian (residual " + std::to_string(herm) + ")");

  SquareMatrix<T, N> a = hermitian_part(input);
  SquareMatrix<T, N> v = SquareMatrix<T, N>::identity();
  const double stop = opt.offdiag_tol * std::max(1.0, frobenius_norm(a));

  for (int sweep = 0; sweep < opt.max_sweeps && detail::offdiag_norm(a) >= stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < N; ++p)
      for (std::size_t q = p + 1; q < N; ++q) detail::jacobi_rotate(a, v, p, q);
  }

  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return detail::real(a(i, i)) < detail::real(a(j, j));
  });

  EigenDecomposition<T, N> out;
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t src = order[k];
    out.eigenvalues[k] = detail::real(a(src, src));
    for (std::size_t i = 0; i < N; ++i) out.eigenvectors(i, k) = v(i, src);

    for (std::size_t i = 0; i < N; ++i) {
      const double mag = std::abs(out.eigenvectors(i, k));
      if (mag > 1e-10) {
        const T fix = detail::conj(out.eigenvectors(i, k) / T(mag));
        for (std::size_t r = 0; r < N; ++r) out.eigenvectors(r, k) *= fix;
        out.eigenvectors(i, k) = T(mag);
        break;
      }
    }
  }
  return out;
}

/// Eigenvalues in [-psd_clamp, 0) are treated as zero before square roots.
inline constexpr double psd_clamp = 1e-10;

/// Positive eigenvalues up to this fraction of the largest one are rounding
/// noise on a zero eigenvalue; sqrt would inflate 1e-16 to 1e-8.
inline constexpr double sqrt_zero_floor = 1e-14;

/// Principal square root of a Hermitian positive semidefinite matrix.
template <class T, std::size_t N>
SquareMatrix<T, N> matrix_sqrt_psd(const SquareMatrix<T, N>& a) {
  const auto eig = hermitian_eig(a);
  if (eig.eigenvalues[0] < -psd_clamp) throw NotPsdError(eig.eigenvalues[0]);
  const double floor = sqrt_zero_floor * std::max(1.0, eig.eigenvalues[N - 1]);
  std::array<T, N> root{};
  for (std::size_t i = 0; i < N; ++i)
    root[i] = eig.eigenvalues[i] <= floor ? T(0) : T(std::sqrt(eig.eigenvalues[i]));
  const auto& v = eig.eigenvectors;
  return v * SquareMatrix<T, N>::diagonal(root) * v.adjoint();
}

template <class T, std::size_t N>
double trace_real(const SquareMatrix<T, N>& a) {
  return detail::real(a.trace());
}

}  // namespace qcorr::linalg
