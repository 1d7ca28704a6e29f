#pragma once

// Two-qubit density matrices and the two-parameter X-state family
//
//            | 2r    0     0    2s |
//   rho = 1/2|  0  1-2r  1-2r   0  |
//            |  0  1-2r  1-2r   0  |
//            | 2s    0     0    2r |
//
// whose spectrum is {0, 1-2r, r-s, r+s}. The physical parameters form the
// triangle |s| <= r <= 1/2.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "qcorr/errors.hpp"
#include "qcorr/linalg.hpp"

namespace qcorr {

using linalg::CMatrix4;
using linalg::Complex;

namespace tol {
inline constexpr double trace = 1e-12;
inline constexpr double hermitian = 1e-12;
inline constexpr double psd = 1e-10;
/// Slack on the closed intervals of the parameter triangle.
inline constexpr double params = 1e-12;
/// Max-abs residual against the X-state template.
inline constexpr double family = 1e-9;
}  // namespace tol

/// A validated 4x4 two-qubit state: unit trace, Hermitian, PSD.
class DensityMatrix {
 public:
  /// Validates and wraps. Throws ValidationError listing every violated invariant.
  static DensityMatrix validate(const CMatrix4& m) {
    std::vector<std::string> violations;

    const double herm = linalg::hermiticity_residual(m);
    if (herm > tol::hermitian)
      violations.push_back("not Hermitian (max |A_ij - conj(A_ji)| = " + std::to_string(herm) + ")");

    const Complex tr = m.trace();
    if (std::abs(tr - Complex(1.0)) > tol::trace)
      violations.push_back("trace is not 1 (trace = " + std::to_string(tr.real()) +
                           (tr.imag() != 0.0 ? " + " + std::to_string(tr.imag()) + "i" : "") + ")");

    const auto eig = linalg::hermitian_eig(linalg::hermitian_part(m), {.hermitian_tol = 1e300});
    if (eig.eigenvalues[0] < -tol::psd)
      violations.push_back("negative eigenvalue " + std::to_string(eig.eigenvalues[0]));

    if (!violations.empty()) throw ValidationError(std::move(violations));
    return DensityMatrix(m);
  }

  const CMatrix4& matrix() const noexcept { return m_; }
  const Complex& operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  friend bool operator==(const DensityMatrix&, const DensityMatrix&) = default;

 private:
  explicit DensityMatrix(const CMatrix4& m) : m_(m) {}
  // Lets trusted constructors (family builder, channel) skip re-validation.
  friend DensityMatrix trusted_density(const CMatrix4& m);

  CMatrix4 m_;
};

/// Wraps a matrix that is a density matrix by construction.
inline DensityMatrix trusted_density(const CMatrix4& m) { return DensityMatrix(m); }

inline DensityMatrix validate_density(const CMatrix4& m) { return DensityMatrix::validate(m); }

/// Eigenvalues of the family member, in the order lambda1..lambda4.
struct FamilySpectrum {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double lambda3 = 0.0;
  double lambda4 = 0.0;

  std::array<double, 4> as_array() const { return {lambda1, lambda2, lambda3, lambda4}; }
};

/// The pair (r, s). Construct through `make` to get the physicality check.
struct XStateParams {
  double r = 0.0;
  double s = 0.0;

  FamilySpectrum spectrum() const { return {0.0, 1.0 - 2.0 * r, r - s, r + s}; }

  /// Empty string when physical, otherwise a description of the violated eigenvalue.
  std::string violation() const {
    if (!std::isfinite(r) || !std::isfinite(s)) return "r and s must be finite";
    const auto sp = spectrum();
    if (sp.lambda2 < -tol::params)
      return "lambda2 = 1 - 2r < 0 (r = " + std::to_string(r) + " > 1/2)";
    if (sp.lambda3 < -tol::params)
      return "lambda3 = r - s < 0 (r - s = " + std::to_string(sp.lambda3) + ")";
    if (sp.lambda4 < -tol::params)
      return "lambda4 = r + s < 0 (r + s = " + std::to_string(sp.lambda4) + ")";
    return {};
  }

  bool is_physical() const { return violation().empty(); }

  static XStateParams make(double r, double s) {
    XStateParams p{r, s};
    if (auto v = p.violation(); !v.empty()) throw InvalidParamsError("invalid (r, s): " + v);
    return p;
  }

  friend bool operator==(const XStateParams&, const XStateParams&) = default;
};

/// Raw family matrix with no physicality check; shared by the builder and
/// the membership residual.
inline CMatrix4 xstate_template(double r, double s) {
  const double a = 0.5 * (1.0 - 2.0 * r);
  CMatrix4 m;
  m(0, 0) = r;
  m(3, 3) = r;
  m(0, 3) = s;
  m(3, 0) = s;
  m(1, 1) = a;
  m(1, 2) = a;
  m(2, 1) = a;
  m(2, 2) = a;
  return m;
}

inline DensityMatrix build_xstate(const XStateParams& p) {
  if (auto v = p.violation(); !v.empty()) throw InvalidParamsError("invalid (r, s): " + v);
  return trusted_density(xstate_template(p.r, p.s));
}

inline DensityMatrix build_xstate(double r, double s) { return build_xstate(XStateParams{r, s}); }

/// Largest elementwise deviation of rho from the family template at its own (r, s).
inline double family_residual(const CMatrix4& rho) {
  return linalg::max_abs_diff(rho, xstate_template(rho(0, 0).real(), rho(0, 3).real()));
}

/// Inverse of build_xstate: r = rho_11, s = Re rho_14.
inline XStateParams extract_params(const DensityMatrix& rho) {
  const double r = rho(0, 0).real();
  const double s = rho(0, 3).real();
  const CMatrix4 expected = xstate_template(r, s);

  double worst = 0.0;
  std::size_t wi = 0;
  std::size_t wj = 0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      const double d = std::abs(rho(i, j) - expected(i, j));
      if (d > worst) {
        worst = d;
        wi = i;
        wj = j;
      }
    }
  if (worst > tol::family) {
    const bool middle = wi >= 1 && wi <= 2 && wj >= 1 && wj <= 2;
    throw NotInFamilyError(std::string("state is not in the X-state family (") +
                               (middle ? "middle block mismatch" : "outer entry mismatch") +
                               " at (" + std::to_string(wi + 1) + "," + std::to_string(wj + 1) +
                               "), max residual " + std::to_string(worst) + ")",
                           worst);
  }
  return XStateParams{r, s};
}

/// SWAP rho SWAP: the state with the qubits exchanged.
inline DensityMatrix swap_qubits(const DensityMatrix& rho) {
  const CMatrix4 sw = linalg::swap_matrix();
  return trusted_density(sw * rho.matrix() * sw);
}

}  // namespace qcorr
