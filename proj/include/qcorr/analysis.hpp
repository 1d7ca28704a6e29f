#pragma once

// Geometry and dynamics of the X-state family under collective dephasing:
// entanglement regions of the (r, s) triangle, sudden-death and
// sudden-transition times, LQU regimes, trajectories and phase diagrams.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "qcorr/channel.hpp"
#include "qcorr/correlations.hpp"
#include "qcorr/errors.hpp"
#include "qcorr/states.hpp"

namespace qcorr {

enum class Region { RedInvariant, GreenSd, BlueSd, GraySeparable, Boundary };

/// How LQU evolves from a given initial state.
enum class LquRegime { MonotoneGrowth, SuddenChange, MonotoneDecay };

inline std::string_view to_string(Region r) {
  switch (r) {
    case Region::RedInvariant:
      return "RED_INVARIANT";
    case Region::GreenSd:
      return "GREEN_SD";
    case Region::BlueSd:
      return "BLUE_SD";
    case Region::GraySeparable:
      return "GRAY_SEPARABLE";
    case Region::Boundary:
      return "BOUNDARY";
  }
  return "?";
}

inline std::string_view to_string(LquRegime r) {
  switch (r) {
    case LquRegime::MonotoneGrowth:
      return "MONOTONE_LQU_GROWTH";
    case LquRegime::SuddenChange:
      return "SUDDEN_CHANGE";
    case LquRegime::MonotoneDecay:
      return "MONOTONE_LQU_DECAY";
  }
  return "?";
}

struct RegionTag {
  Region region = Region::GraySeparable;
  /// Empty on the s = 0 line, where the state is a fixed point of the flow.
  std::optional<LquRegime> subregion;

  friend bool operator==(const RegionTag&, const RegionTag&) = default;
};

struct ClassifyOptions {
  /// When false, points within `tol` of a boundary get the closed-set
  /// assignment instead of BOUNDARY (ties go to the separable side).
  bool tag_boundary = true;
  double tol = 1e-12;
};

/// LQU regime from the beta-branch ordering, using sigma = |s|.
///
/// beta2 > beta3 holds iff s(t) > 3r - 1, so states with r <= 1/3 keep beta2
/// on top forever (growth), states with 3r - sigma >= 1 have beta3 on top
/// from t = 0 (decay), and the rest switch at t_st.
inline std::optional<LquRegime> lqu_regime(const XStateParams& p, double tol = 1e-12) {
  const double sigma = std::abs(p.s);
  if (sigma <= tol) return std::nullopt;
  if (3.0 * p.r - sigma >= 1.0 - tol) return LquRegime::MonotoneDecay;
  if (p.r <= 1.0 / 3.0 + tol) return LquRegime::MonotoneGrowth;
  return LquRegime::SuddenChange;
}

inline RegionTag classify(const XStateParams& p, const ClassifyOptions& opt = {}) {
  const auto eta = pt_spectrum_family(p);
  RegionTag tag;
  tag.subregion = lqu_regime(p, opt.tol);

  if (opt.tag_boundary) {
    for (std::size_t i = 1; i < 4; ++i)
      if (std::abs(eta[i]) <= opt.tol) {
        tag.region = Region::Boundary;
        return tag;
      }
  }
  const double cut = opt.tag_boundary ? 0.0 : -opt.tol;
  if (eta[1] < cut)
    tag.region = Region::RedInvariant;
  else if (eta[2] < cut)
    tag.region = Region::GreenSd;
  else if (eta[3] < cut)
    tag.region = Region::BlueSd;
  else
    tag.region = Region::GraySeparable;
  return tag;
}

/// Finite time at which entanglement vanishes, for green and blue states with
/// r < 1/2: t_sd = -(1 / 2 Gamma) ln[(1 - 2r) / (2|s|)].
inline std::optional<double> sudden_death_time(const XStateParams& p, const ChannelParams& ch = {}) {
  const auto tag = classify(p);
  if (tag.region != Region::GreenSd && tag.region != Region::BlueSd) return std::nullopt;
  if (p.r >= 0.5 - tol::params) return std::nullopt;  // only reached asymptotically
  const double sigma = std::abs(p.s);
  return -std::log((1.0 - 2.0 * p.r) / (2.0 * sigma)) / (2.0 * ChannelParams::make(ch.damping_rate).damping_rate);
}

/// Time at which the dominant beta branch switches from beta2 to beta3:
/// t_st = -(1 / 2 Gamma) ln[(3r - 1) / |s|].
inline std::optional<double> sudden_transition_time(const XStateParams& p, const ChannelParams& ch = {}) {
  if (auto v = p.violation(); !v.empty()) throw InvalidParamsError("invalid (r, s): " + v);
  if (lqu_regime(p) != LquRegime::SuddenChange) return std::nullopt;
  return -std::log((3.0 * p.r - 1.0) / std::abs(p.s)) / (2.0 * ChannelParams::make(ch.damping_rate).damping_rate);
}

/// LQU as t -> infinity, i.e. on the s = 0 line.
inline double asymptotic_lqu(double r) { return 1.0 - 2.0 * std::max(std::sqrt(std::max(0.0, r * (1.0 - 2.0 * r))), r); }

struct EventTimes {
  std::optional<double> t_sd;
  std::optional<double> t_st;
};

inline EventTimes event_times(const XStateParams& p, const ChannelParams& ch = {}) {
  return {sudden_death_time(p, ch), sudden_transition_time(p, ch)};
}

/// Bisection for a predicate that is true on [lo, t*) and false on [t*, hi].
inline double bisect_switch(const std::function<bool(double)>& before, double lo, double hi, double tol = 1e-12) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (before(mid) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Event times located numerically, independent of the closed-form formulas:
/// t_sd from the generic negativity of the dephased density matrix, t_st from
/// the beta2 = beta3 crossing. Bracket [0, 50/Gamma].
inline EventTimes crosscheck_events(const XStateParams& p, const ChannelParams& ch = {}) {
  const double hi = 50.0 / ChannelParams::make(ch.damping_rate).damping_rate;
  const auto rho0 = build_xstate(p);
  EventTimes out;

  auto entangled = [&](double t) { return negativity(apply_dephasing(rho0, t, ch)) > 1e-13; };
  // On r = 1/2 the negativity only decays exponentially; there is no root.
  if (p.r < 0.5 - tol::params && entangled(0.0) && !entangled(hi)) out.t_sd = bisect_switch(entangled, 0.0, hi);

  const XStateParams upper{p.r, std::abs(p.s)};
  auto beta2_on_top = [&](double t) {
    const auto b = beta_branches(evolve_params(upper, t, ch));
    return b.beta2 > b.beta3;
  };
  if (beta2_on_top(0.0) && !beta2_on_top(hi)) out.t_st = bisect_switch(beta2_on_top, 0.0, hi);
  return out;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<CorrelationReport> reports;
  EventTimes events;
  RegionTag region;
  /// Worst disagreement between closed-form and generic routes (negativity
  /// and LQU) at the two endpoints.
  double endpoint_residual = 0.0;
};

namespace detail {

// Runs body(i) for i in [0, n) on up to `workers` threads; output slots are
// keyed by index so ordering never depends on scheduling.
inline void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) body(i);
    });
  for (auto& th : pool) th.join();
}

inline double generic_residual(const XStateParams& p0, const CorrelationReport& rep, const ChannelParams& ch) {
  const auto rho = apply_dephasing(build_xstate(p0), rep.t, ch);
  return std::max(std::abs(negativity(rho) - rep.negativity), std::abs(lqu_generic(rho) - rep.lqu));
}

}  // namespace detail

inline Trajectory trajectory(const XStateParams& p, const ChannelParams& ch, double t_max, std::size_t n_steps,
                             unsigned workers = 1) {
  if (auto v = p.violation(); !v.empty()) throw InvalidParamsError("invalid (r, s): " + v);
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw DomainError("t_max must be positive");
  if (n_steps < 2) throw DomainError("n_steps must be at least 2");
  (void)ChannelParams::make(ch.damping_rate);

  Trajectory tr;
  tr.times.resize(n_steps);
  tr.reports.resize(n_steps);
  for (std::size_t k = 0; k < n_steps; ++k)
    tr.times[k] = k + 1 == n_steps ? t_max : t_max * static_cast<double>(k) / static_cast<double>(n_steps - 1);

  detail::parallel_for(n_steps, workers, [&](std::size_t k) {
    tr.reports[k] = report_family(tr.times[k], evolve_params(p, tr.times[k], ch));
  });

  tr.events = event_times(p, ch);
  tr.region = classify(p);
  tr.endpoint_residual = std::max(detail::generic_residual(p, tr.reports.front(), ch),
                                  detail::generic_residual(p, tr.reports.back(), ch));
  return tr;
}

struct PhasePoint {
  double r = 0.0;
  double s = 0.0;
  bool physical = false;
  /// Remaining fields are only meaningful when physical.
  RegionTag tag;
  double negativity0 = 0.0;
  double lqu0 = 0.0;
  double lqu_inf = 0.0;
  EventTimes events;
};

/// Uniform grid: grid_n values of r on [0, 1/2] and 2 grid_n - 1 values of s
/// on [-1/2, 1/2] (same spacing). Row-major in r, then s.
inline std::vector<PhasePoint> phase_diagram(std::size_t grid_n, const ChannelParams& ch = {}, unsigned workers = 1) {
  if (grid_n < 2) throw DomainError("grid_n must be at least 2");
  (void)ChannelParams::make(ch.damping_rate);
  const std::size_t ns = 2 * grid_n - 1;
  const double denom = 2.0 * static_cast<double>(grid_n - 1);

  std::vector<PhasePoint> out(grid_n * ns);
  detail::parallel_for(out.size(), workers, [&](std::size_t idx) {
    const std::size_t i = idx / ns;
    const std::size_t j = idx % ns;
    PhasePoint pt;
    pt.r = static_cast<double>(i) / denom;
    pt.s = (static_cast<double>(j) - static_cast<double>(grid_n - 1)) / denom;

    const XStateParams p{pt.r, pt.s};
    pt.physical = p.is_physical();
    if (pt.physical) {
      pt.tag = classify(p);
      pt.negativity0 = negativity_family(p);
      pt.lqu0 = lqu_family(p).lqu;
      pt.lqu_inf = asymptotic_lqu(p.r);
      pt.events = event_times(p, ch);
    }
    out[idx] = pt;
  });
  return out;
}

}  // namespace qcorr
