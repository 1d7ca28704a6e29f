#pragma once

// Markovian collective dephasing of two qubits.
//
// Both qubits see the same white-noise field xi(t) with <xi(t)xi(t')> =
// Gamma delta(t - t'). The averaged map multiplies rho_ij by
// gamma^{(m_i - m_j)^2}, where m = (1, 0, 0, -1) is half the eigenvalue of
// sz(x)1 + 1(x)sz on |00>, |01>, |10>, |11> and gamma(t) = exp(-Gamma t / 2).
// Single-flip coherences decay with gamma, rho_14 with gamma^4, and the
// {|01>, |10>} block is decoherence free.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

#include "qcorr/errors.hpp"
#include "qcorr/linalg.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

struct ChannelParams {
  /// Gamma, in inverse time units. Time is measured in 1/Gamma when Gamma = 1.
  double damping_rate = 1.0;

  static ChannelParams make(double damping_rate) {
    if (!(damping_rate > 0.0) || !std::isfinite(damping_rate))
      throw DomainError("damping rate must be positive and finite");
    return ChannelParams{damping_rate};
  }
};

namespace detail {

inline void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("time must be finite and non-negative");
}

inline void check_channel(const ChannelParams& ch) { (void)ChannelParams::make(ch.damping_rate); }

// Half-eigenvalues of the collective generator in the computational basis.
inline constexpr std::array<int, 4> collective_charge{1, 0, 0, -1};

}  // namespace detail

/// gamma(t) = exp(-t Gamma / 2).
inline double decay_factor(double t, const ChannelParams& ch = {}) {
  detail::check_time(t);
  detail::check_channel(ch);
  return std::exp(-0.5 * t * ch.damping_rate);
}

/// Factor multiplying rho_ij after time t.
inline double coherence_factor(std::size_t i, std::size_t j, double gamma) {
  const int d = detail::collective_charge[i] - detail::collective_charge[j];
  switch (d * d) {
    case 0:
      return 1.0;
    case 1:
      return gamma;
    default:
      return (gamma * gamma) * (gamma * gamma);
  }
}

inline DensityMatrix apply_dephasing(const DensityMatrix& rho0, double t, const ChannelParams& ch = {}) {
  const double g = decay_factor(t, ch);
  CMatrix4 out = rho0.matrix();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) out(i, j) *= coherence_factor(i, j, g);
  return trusted_density(out);
}

/// Family parameter flow: r(t) = r, s(t) = s gamma^4(t).
inline XStateParams evolve_params(const XStateParams& p, double t, const ChannelParams& ch = {}) {
  if (auto v = p.violation(); !v.empty()) throw InvalidParamsError("invalid (r, s): " + v);
  const double g = decay_factor(t, ch);
  return XStateParams{p.r, p.s * coherence_factor(0, 3, g)};
}

// ---------------------------------------------------------------------------
// Monte Carlo oracle
// ---------------------------------------------------------------------------

enum class PhaseSampling {
  /// Phi = integral of xi over [0, t] drawn directly from N(0, Gamma t).
  Exact,
  /// Phi accumulated from path_steps i.i.d. increments of variance Gamma dt.
  PathDiscretized,
};

struct NoiseSampleConfig {
  std::size_t n_samples = 100000;
  std::uint64_t seed = 42;
  PhaseSampling sampling = PhaseSampling::Exact;
  std::size_t path_steps = 64;
  /// 0 picks std::thread::hardware_concurrency(). Output does not depend on it.
  unsigned workers = 0;
};

struct MonteCarloResult {
  DensityMatrix mean;
  /// Three standard errors of each element's sample mean.
  linalg::SquareMatrix<double, 4> error_bound;
  double max_abs_error_estimate = 0.0;
  std::uint64_t seed = 0;
  std::size_t n_samples = 0;
};

namespace detail {

inline constexpr std::size_t mc_chunk = 4096;

// Elementwise Welford accumulator over complex samples.
struct MomentAccumulator {
  std::size_t count = 0;
  CMatrix4 mean;
  std::array<double, 16> m2{};

  void push(const CMatrix4& x) {
    ++count;
    const double inv = 1.0 / static_cast<double>(count);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const Complex delta = x(i, j) - mean(i, j);
        mean(i, j) += delta * inv;
        const Complex delta2 = x(i, j) - mean(i, j);
        m2[i * 4 + j] += (std::conj(delta) * delta2).real();
      }
  }

  void merge(const MomentAccumulator& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double n = na + nb;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const Complex delta = o.mean(i, j) - mean(i, j);
        mean(i, j) += delta * (nb / n);
        m2[i * 4 + j] += o.m2[i * 4 + j] + std::norm(delta) * na * nb / n;
      }
    count += o.count;
  }
};

// Chunk c draws from mt19937_64 seeded with seed_seq(seed, c), so results are
// a function of (seed, n_samples) only.
inline MomentAccumulator run_chunk(const CMatrix4& rho0, const std::array<double, 4>& generator_diag,
                                   double variance, const NoiseSampleConfig& cfg, std::size_t chunk,
                                   std::size_t count) {
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  std::mt19937_64 engine(seq);
  std::normal_distribution<double> normal(0.0, 1.0);

  const std::size_t steps = cfg.sampling == PhaseSampling::Exact ? 1 : std::max<std::size_t>(1, cfg.path_steps);
  const double step_sd = std::sqrt(variance / static_cast<double>(steps));

  MomentAccumulator acc;
  for (std::size_t k = 0; k < count; ++k) {
    double phi = 0.0;
    for (std::size_t st = 0; st < steps; ++st) phi += step_sd * normal(engine);

    // U = exp(i (phi/2) (sz(x)1 + 1(x)sz)) is diagonal, so (U rho0 U^H)_ij =
    // rho0_ij exp(i (phi/2) (g_i - g_j)); entries with g_i = g_j stay bit-exact.
    CMatrix4 x;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j)
        x(i, j) = rho0(i, j) * std::polar(1.0, 0.5 * phi * (generator_diag[i] - generator_diag[j]));
    acc.push(x);
  }
  return acc;
}

}  // namespace detail

/// Averages U rho0 U^H over sampled noise realizations.
///
/// The error bound is 3 sigma / sqrt(n) per element, with sigma the sample
/// standard deviation of that element. The mean is rescaled to the trace of
/// rho0; populations are unchanged in every realization so the rescale only
/// guards against accumulated rounding.
inline MonteCarloResult monte_carlo_evolve(const DensityMatrix& rho0, double t, const ChannelParams& ch,
                                           const NoiseSampleConfig& cfg) {
  detail::check_time(t);
  detail::check_channel(ch);
  if (cfg.n_samples < 1) throw DomainError("n_samples must be at least 1");

  const auto zi = linalg::kron(linalg::pauli_z(), linalg::identity2());
  const auto iz = linalg::kron(linalg::identity2(), linalg::pauli_z());
  const CMatrix4 generator = zi + iz;
  std::array<double, 4> gdiag{};
  for (std::size_t d = 0; d < 4; ++d) gdiag[d] = generator(d, d).real();

  const double variance = ch.damping_rate * t;
  const std::size_t n_chunks = (cfg.n_samples + detail::mc_chunk - 1) / detail::mc_chunk;
  std::vector<detail::MomentAccumulator> parts(n_chunks);

  auto chunk_size = [&](std::size_t c) {
    return std::min(detail::mc_chunk, cfg.n_samples - c * detail::mc_chunk);
  };

  unsigned workers = cfg.workers != 0 ? cfg.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_chunks));

  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c)
      parts[c] = detail::run_chunk(rho0.matrix(), gdiag, variance, cfg, c, chunk_size(c));
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < n_chunks; c += workers)
          parts[c] = detail::run_chunk(rho0.matrix(), gdiag, variance, cfg, c, chunk_size(c));
      });
    }
    for (auto& th : pool) th.join();
  }

  detail::MomentAccumulator total;
  for (const auto& p : parts) total.merge(p);

  CMatrix4 mean = total.mean;
  const double scale = rho0.matrix().trace().real() / mean.trace().real();
  if (scale != 1.0) mean *= Complex(scale);

  MonteCarloResult out{trusted_density(mean), {}, 0.0, cfg.seed, cfg.n_samples};
  if (total.count > 1) {
    const double n = static_cast<double>(total.count);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) {
        const double sd = std::sqrt(total.m2[i * 4 + j] / (n - 1.0));
        out.error_bound(i, j) = 3.0 * sd / std::sqrt(n);
        out.max_abs_error_estimate = std::max(out.max_abs_error_estimate, out.error_bound(i, j));
      }
  }
  return out;
}

}  // namespace qcorr
