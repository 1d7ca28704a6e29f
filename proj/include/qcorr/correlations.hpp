#pragma once

// Negativity, Wigner-Yanase skew information and local quantum uncertainty
// (LQU) for two-qubit states, plus the closed forms on the X-state family.

#include <algorithm>
#include <array>
#include <cmath>

#include "qcorr/errors.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

using linalg::RMatrix3;

/// K = n . sigma on subsystem A, spectrum {+1, -1}.
class LocalObservable {
 public:
  static LocalObservable from_bloch(const std::array<double, 3>& n) {
    const double norm = std::sqrt(n[0] * n[0] + n[1] * n[1] + n[2] * n[2]);
    if (!(norm > 0.0)) throw DomainError("Bloch vector must be nonzero");
    if (std::abs(norm - 1.0) > 1e-12) throw DomainError("Bloch vector must have unit norm");
    return LocalObservable(n);
  }

  /// Normalizes any nonzero vector.
  static LocalObservable along(const std::array<double, 3>& v) {
    const double norm = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(norm > 0.0)) throw DomainError("Bloch vector must be nonzero");
    return LocalObservable({v[0] / norm, v[1] / norm, v[2] / norm});
  }

  const std::array<double, 3>& bloch() const noexcept { return n_; }

  linalg::CMatrix2 single_qubit() const {
    return linalg::pauli_x() * Complex(n_[0]) + linalg::pauli_y() * Complex(n_[1]) +
           linalg::pauli_z() * Complex(n_[2]);
  }

  /// (n . sigma) (x) 1.
  CMatrix4 on_a() const { return linalg::kron(single_qubit(), linalg::identity2()); }

 private:
  explicit LocalObservable(const std::array<double, 3>& n) : n_(n) {}
  std::array<double, 3> n_;
};

/// sum_i (|eta_i| - eta_i) over the spectrum of rho^{T_A}.
inline double negativity(const DensityMatrix& rho) {
  const auto eig = linalg::hermitian_eig(linalg::partial_transpose(rho.matrix(), linalg::Subsystem::A));
  double n = 0.0;
  for (double eta : eig.eigenvalues) n += std::abs(eta) - eta;
  return n;
}

/// Partial-transpose spectrum of the family state, (eta1, eta2, eta3, eta4).
inline std::array<double, 4> pt_spectrum_family(const XStateParams& p) {
  if (auto v = p.violation(); !v.empty()) throw InvalidParamsError("invalid (r, s): " + v);
  return {0.5, 2.0 * p.r - 0.5, 0.5 - p.r - p.s, 0.5 - p.r + p.s};
}

inline double negativity_from_spectrum(const std::array<double, 4>& eta) {
  double n = 0.0;
  for (double e : eta) n += std::abs(e) - e;
  return n;
}

inline double negativity_family(const XStateParams& p) { return negativity_from_spectrum(pt_spectrum_family(p)); }

/// I(rho, K) = -1/2 Tr([sqrt(rho), K]^2).
inline double skew_information(const DensityMatrix& rho, const CMatrix4& k) {
  if (!linalg::is_hermitian(k, 1e-10)) throw ValidationError("observable is not Hermitian");
  const CMatrix4 root = linalg::matrix_sqrt_psd(rho.matrix());
  const CMatrix4 comm = root * k - k * root;
  // [S, K] is anti-Hermitian, so -Tr(C^2) = ||C||_F^2 >= 0.
  return std::max(0.0, -0.5 * (comm * comm).trace().real());
}

inline double skew_information(const DensityMatrix& rho, const LocalObservable& k) {
  return skew_information(rho, k.on_a());
}

/// Tr(rho K^2) - (Tr rho K)^2.
inline double variance(const DensityMatrix& rho, const CMatrix4& k) {
  const double mean = (rho.matrix() * k).trace().real();
  return (rho.matrix() * k * k).trace().real() - mean * mean;
}

/// W_ij = Tr{ sqrt(rho) (sigma_i (x) 1) sqrt(rho) (sigma_j (x) 1) }, i, j in {x, y, z}.
/// For a unit Bloch vector n, skew_information(rho, (n.sigma)(x)1) = 1 - n^T W n.
inline RMatrix3 w_matrix(const DensityMatrix& rho) {
  const CMatrix4 root = linalg::matrix_sqrt_psd(rho.matrix());
  const std::array<CMatrix4, 3> k{linalg::kron(linalg::pauli_x(), linalg::identity2()),
                                  linalg::kron(linalg::pauli_y(), linalg::identity2()),
                                  linalg::kron(linalg::pauli_z(), linalg::identity2())};
  std::array<CMatrix4, 3> sk;
  for (std::size_t i = 0; i < 3; ++i) sk[i] = root * k[i];

  RMatrix3 w;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = i; j < 3; ++j) {
      const double v = (sk[i] * sk[j]).trace().real();
      w(i, j) = v;
      w(j, i) = v;
    }
  return w;
}

struct LquResult {
  double lqu = 0.0;
  /// Eigenvalues of W, ascending.
  std::array<double, 3> w_eigs{};
  /// Unit top eigenvector of W: the optimal local observable's Bloch vector.
  std::array<double, 3> optimal_direction{};
};

inline LquResult lqu_generic_detail(const DensityMatrix& rho) {
  const auto eig = linalg::hermitian_eig(w_matrix(rho));
  LquResult out;
  out.w_eigs = eig.eigenvalues;
  out.lqu = 1.0 - eig.eigenvalues[2];
  out.optimal_direction = eig.vector(2);
  return out;
}

/// 1 - lambda_max(W).
inline double lqu_generic(const DensityMatrix& rho) { return lqu_generic_detail(rho).lqu; }

struct BetaBranches {
  double beta1 = 0.0;
  double beta2 = 0.0;
  double beta3 = 0.0;

  double max() const { return std::max({beta1, beta2, beta3}); }
};

inline BetaBranches beta_branches(const XStateParams& p) {
  if (auto v = p.violation(); !v.empty()) throw InvalidParamsError("invalid (r, s): " + v);
  // One sqrt of a product per branch (sqrt(r - s) sqrt(r + s) = sqrt(r^2 - s^2)
  // etc.): with correctly rounded operations each branch is then monotone in
  // s, so LQU stays monotone along the flow down to the last ulp.
  const double a = std::max(0.0, 1.0 - 2.0 * p.r);
  const double b = std::max(0.0, p.r - p.s);
  const double c = std::max(0.0, p.r + p.s);
  return {std::sqrt(a * b), std::sqrt(a * c), std::sqrt(std::max(0.0, p.r * p.r - p.s * p.s))};
}

struct FamilyLqu {
  double lqu = 0.0;
  BetaBranches betas;
};

/// LQU = 1 - 2 max(beta1, beta2, beta3).
inline FamilyLqu lqu_family(const XStateParams& p) {
  const auto b = beta_branches(p);
  return {1.0 - 2.0 * b.max(), b};
}

/// On the family W is diagonal with entries 2*beta_i; returned ascending.
inline std::array<double, 3> w_eigs_family(const BetaBranches& b) {
  std::array<double, 3> e{2.0 * b.beta1, 2.0 * b.beta2, 2.0 * b.beta3};
  std::sort(e.begin(), e.end());
  return e;
}

struct CorrelationReport {
  double t = 0.0;
  XStateParams params_t;
  double negativity = 0.0;
  double lqu = 0.0;
  BetaBranches betas;
  std::array<double, 3> w_eigs{};
};

/// Closed-form report for a family state at time t (params already evolved).
inline CorrelationReport report_family(double t, const XStateParams& params_t) {
  const auto fl = lqu_family(params_t);
  return {t, params_t, negativity_family(params_t), fl.lqu, fl.betas, w_eigs_family(fl.betas)};
}

}  // namespace qcorr
