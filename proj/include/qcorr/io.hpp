#pragma once

// Serialization: JSON for parameters, states, reports and event times; CSV
// for trajectories and phase diagrams. Doubles are written in the shortest
// form that parses back to the same value.

#include <array>
#include <charconv>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>

#include <json.hpp>

#include "qcorr/analysis.hpp"
#include "qcorr/correlations.hpp"
#include "qcorr/states.hpp"

namespace qcorr::io {

using json = nlohmann::ordered_json;

inline std::string format_number(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (res.ec != std::errc{}) throw Error("failed to format number");
  return std::string(buf.data(), res.ptr);
}

inline double parse_number(std::string_view text) {
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
    throw ValidationError("not a number: '" + std::string(text) + "'");
  return x;
}

inline std::string format_optional(const std::optional<double>& x) { return x ? format_number(*x) : std::string(); }

inline json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

// ---- parameters and states ------------------------------------------------

inline json to_json(const XStateParams& p) { return json{{"r", p.r}, {"s", p.s}}; }

inline XStateParams params_from_json(const json& j) {
  return XStateParams::make(j.at("r").get<double>(), j.at("s").get<double>());
}

/// Row-major array of 16 [re, im] pairs.
inline json to_json(const DensityMatrix& rho) {
  json arr = json::array();
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) arr.push_back(json::array({rho(i, j).real(), rho(i, j).imag()}));
  return arr;
}

inline DensityMatrix density_from_json(const json& j) {
  if (!j.is_array() || j.size() != 16) throw ValidationError("density matrix must be an array of 16 [re, im] pairs");
  CMatrix4 m;
  for (std::size_t k = 0; k < 16; ++k) {
    const auto& e = j[k];
    if (!e.is_array() || e.size() != 2) throw ValidationError("density matrix entries must be [re, im] pairs");
    m(k / 4, k % 4) = Complex(e[0].get<double>(), e[1].get<double>());
  }
  return validate_density(m);
}

// ---- correlations ---------------------------------------------------------

inline json to_json(const CorrelationReport& rep) {
  return json{{"t", rep.t},
              {"r", rep.params_t.r},
              {"s", rep.params_t.s},
              {"negativity", rep.negativity},
              {"lqu", rep.lqu},
              {"beta1", rep.betas.beta1},
              {"beta2", rep.betas.beta2},
              {"beta3", rep.betas.beta3},
              {"w_eigs", json::array({rep.w_eigs[0], rep.w_eigs[1], rep.w_eigs[2]})}};
}

// ---- analysis -------------------------------------------------------------

inline json to_json(const RegionTag& tag) {
  return json{{"region", std::string(to_string(tag.region))},
              {"subregion", tag.subregion ? json(std::string(to_string(*tag.subregion))) : json(nullptr)}};
}

inline json to_json(const EventTimes& ev) {
  return json{{"t_sd", optional_json(ev.t_sd)}, {"t_st", optional_json(ev.t_st)}};
}

inline constexpr std::string_view trajectory_csv_header = "t,r,s_t,negativity,lqu,beta1,beta2,beta3";

inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
  os << trajectory_csv_header << '\n';
  for (const auto& rep : tr.reports) {
    os << format_number(rep.t) << ',' << format_number(rep.params_t.r) << ',' << format_number(rep.params_t.s)
       << ',' << format_number(rep.negativity) << ',' << format_number(rep.lqu) << ','
       << format_number(rep.betas.beta1) << ',' << format_number(rep.betas.beta2) << ','
       << format_number(rep.betas.beta3) << '\n';
  }
}

/// Sidecar for the trajectory CSV: initial point, region and event times.
inline json trajectory_sidecar(const XStateParams& p0, const ChannelParams& ch, const Trajectory& tr) {
  json j{{"r", p0.r}, {"s", p0.s}, {"gamma", ch.damping_rate}};
  j["t_max"] = tr.times.back();
  j["steps"] = tr.times.size();
  j.update(to_json(tr.region));
  j.update(to_json(tr.events));
  return j;
}

inline json to_json(const Trajectory& tr) {
  json reports = json::array();
  for (const auto& rep : tr.reports) reports.push_back(to_json(rep));
  json j = to_json(tr.region);
  j.update(to_json(tr.events));
  j["reports"] = std::move(reports);
  return j;
}

inline constexpr std::string_view phase_csv_header = "r,s,physical,region,subregion,negativity0,lqu0,lqu_inf,t_sd,t_st";

inline void write_phase_csv(std::ostream& os, const std::vector<PhasePoint>& pts) {
  os << phase_csv_header << '\n';
  for (const auto& pt : pts) {
    os << format_number(pt.r) << ',' << format_number(pt.s) << ',' << (pt.physical ? "true" : "false") << ',';
    if (pt.physical) {
      os << to_string(pt.tag.region) << ',' << (pt.tag.subregion ? to_string(*pt.tag.subregion) : "") << ','
         << format_number(pt.negativity0) << ',' << format_number(pt.lqu0) << ',' << format_number(pt.lqu_inf)
         << ',' << format_optional(pt.events.t_sd) << ',' << format_optional(pt.events.t_st);
    } else {
      os << ",,,,,,";
    }
    os << '\n';
  }
}

inline json to_json(const PhasePoint& pt) {
  json j{{"r", pt.r}, {"s", pt.s}, {"physical", pt.physical}};
  if (pt.physical) {
    j.update(to_json(pt.tag));
    j["negativity0"] = pt.negativity0;
    j["lqu0"] = pt.lqu0;
    j["lqu_inf"] = pt.lqu_inf;
    j.update(to_json(pt.events));
  }
  return j;
}

}  // namespace qcorr::io
