#pragma once

// Command-line front end. `run` is separated from argument parsing so the
// test suite can drive every command in-process.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qcorr/io.hpp"
#include "qcorr/qcorr.hpp"

namespace qcorr::cli {

enum ExitCode : int {
  kOk = 0,
  kIoError = 1,
  kInvalidParams = 2,
  kVerifyFailed = 3,
  kUsage = 64,
};

enum class Format { Csv, Json };

struct RunConfig {
  std::string command;
  std::optional<double> r;
  std::optional<double> s;
  double gamma = 1.0;
  std::optional<double> t_max;  // defaults to 8 / gamma
  std::size_t steps = 400;
  std::size_t grid_n = 201;
  std::size_t samples = 100000;
  std::uint64_t seed = 42;
  std::string out = "-";
  std::optional<Format> format;
  std::string sidecar;  // trajectory CSV only; defaults to <out>.json
  bool path_sampling = false;
  std::size_t path_steps = 64;
  unsigned workers = 1;
};

struct ParseResult {
  std::optional<RunConfig> config;
  int exit_code = kOk;  // meaningful only when config is empty
};

namespace detail {

inline void add_common(CLI::App& sub, RunConfig& cfg, std::string& format, bool needs_point) {
  auto* r = sub.add_option("--r", cfg.r, "population parameter r in [0, 1/2]");
  auto* s = sub.add_option("--s", cfg.s, "coherence parameter s in [-1/2, 1/2]");
  if (needs_point) {
    r->required();
    s->required();
  }
  sub.add_option("--gamma", cfg.gamma, "damping rate (default 1)");
  sub.add_option("--out", cfg.out, "output file, '-' for standard output");
  sub.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub.add_option("--workers", cfg.workers, "worker threads (0 = hardware concurrency)");
}

inline std::string usage(const CLI::App& app) { return app.help(); }

}  // namespace detail

inline ParseResult parse(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string format;

  CLI::App app{"Two-qubit collective dephasing: negativity and local quantum uncertainty", "qcorr"};
  app.require_subcommand(0, 1);

  auto* classify = app.add_subcommand("classify", "region and LQU regime of an initial (r, s)");
  detail::add_common(*classify, cfg, format, true);

  auto* events = app.add_subcommand("events", "sudden-death and sudden-transition times");
  detail::add_common(*events, cfg, format, true);

  auto* trajectory = app.add_subcommand("trajectory", "negativity and LQU along the dephasing flow");
  detail::add_common(*trajectory, cfg, format, true);
  trajectory->add_option("--t-max", cfg.t_max, "final time (default 8/gamma)");
  trajectory->add_option("--steps", cfg.steps, "grid points including both ends (default 400)");
  trajectory->add_option("--sidecar", cfg.sidecar, "path for the JSON sidecar of a CSV trajectory");

  auto* phase = app.add_subcommand("phase-diagram", "sweep the (r, s) triangle");
  detail::add_common(*phase, cfg, format, false);
  phase->add_option("--grid-n", cfg.grid_n, "points along r (default 201)");

  auto* mc = app.add_subcommand("mc-verify", "compare the analytic channel against Monte Carlo averaging");
  detail::add_common(*mc, cfg, format, true);
  mc->add_option("--t-max", cfg.t_max, "last of the 10 time points (default 8/gamma)");
  mc->add_option("--samples", cfg.samples, "noise realizations per time point (default 100000)");
  mc->add_option("--seed", cfg.seed, "RNG seed (default 42)")->envname("QCORR_SEED");
  mc->add_flag("--path-sampling", cfg.path_sampling, "accumulate the phase from discretized noise increments");
  mc->add_option("--path-steps", cfg.path_steps, "increments per realization with --path-sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << detail::usage(app);
    return {std::nullopt, kOk};
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return {std::nullopt, kOk};
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << detail::usage(app);
    return {std::nullopt, kUsage};
  }

  for (auto* sub : app.get_subcommands()) cfg.command = sub->get_name();
  if (cfg.command.empty()) {
    err << detail::usage(app);
    return {std::nullopt, kUsage};
  }
  if (!format.empty()) cfg.format = format == "csv" ? Format::Csv : Format::Json;
  return {cfg, kOk};
}

namespace detail {

inline void validate(const RunConfig& cfg) {
  if (!(cfg.gamma > 0.0) || !std::isfinite(cfg.gamma)) throw DomainError("--gamma must be positive");
  if (cfg.r && cfg.s) (void)XStateParams::make(*cfg.r, *cfg.s);
  if (cfg.t_max && !(*cfg.t_max > 0.0)) throw DomainError("--t-max must be positive");
  if (cfg.command == "trajectory" && cfg.steps < 2) throw DomainError("--steps must be at least 2");
  if (cfg.command == "phase-diagram" && cfg.grid_n < 2) throw DomainError("--grid-n must be at least 2");
  if (cfg.command == "mc-verify" && cfg.samples < 1) throw DomainError("--samples must be at least 1");
}

inline Format format_or(const RunConfig& cfg, Format fallback) { return cfg.format.value_or(fallback); }

inline double t_max(const RunConfig& cfg) { return cfg.t_max.value_or(8.0 / cfg.gamma); }

inline void emit_json_row(std::ostream& os, const io::json& j) {
  // Flat object to a two-line CSV; nested arrays are joined with ';'.
  std::string header;
  std::string row;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!header.empty()) {
      header += ',';
      row += ',';
    }
    header += it.key();
    const auto& v = it.value();
    if (v.is_null()) {
    } else if (v.is_number_float()) {
      row += io::format_number(v.get<double>());
    } else if (v.is_string()) {
      row += v.get<std::string>();
    } else if (v.is_array()) {
      for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) row += ';';
        row += v[k].is_number_float() ? io::format_number(v[k].get<double>()) : v[k].dump();
      }
    } else {
      row += v.dump();
    }
  }
  os << header << '\n' << row << '\n';
}

inline void emit(std::ostream& os, const io::json& j, Format f) {
  if (f == Format::Json)
    os << j.dump(2) << '\n';
  else
    emit_json_row(os, j);
}

inline io::json classify_json(const XStateParams& p, const ChannelParams& ch) {
  const auto eta = pt_spectrum_family(p);
  const auto lam = p.spectrum();
  io::json j{{"r", p.r}, {"s", p.s}};
  j.update(io::to_json(classify(p)));
  j["negativity"] = negativity_from_spectrum(eta);
  j["lqu"] = lqu_family(p).lqu;
  j["lqu_inf"] = asymptotic_lqu(p.r);
  j["eta"] = io::json::array({eta[0], eta[1], eta[2], eta[3]});
  j["lambda"] = io::json::array({lam.lambda1, lam.lambda2, lam.lambda3, lam.lambda4});
  j.update(io::to_json(event_times(p, ch)));
  return j;
}

struct McRow {
  double t;
  double discrepancy;
  double bound;
  double rho23_discrepancy;
  bool pass;
};

inline int mc_verify(const RunConfig& cfg, std::ostream& os) {
  const XStateParams p = XStateParams::make(*cfg.r, *cfg.s);
  const ChannelParams ch = ChannelParams::make(cfg.gamma);
  const auto rho0 = build_xstate(p);
  NoiseSampleConfig nc;
  nc.n_samples = cfg.samples;
  nc.seed = cfg.seed;
  nc.workers = cfg.workers;
  nc.sampling = cfg.path_sampling ? PhaseSampling::PathDiscretized : PhaseSampling::Exact;
  nc.path_steps = cfg.path_steps;

  constexpr int kPoints = 10;
  std::vector<McRow> rows;
  int passed = 0;
  for (int k = 0; k < kPoints; ++k) {
    const double t = k + 1 == kPoints ? t_max(cfg) : t_max(cfg) * k / (kPoints - 1);
    const auto exact = apply_dephasing(rho0, t, ch);
    const auto mc = monte_carlo_evolve(rho0, t, ch, nc);
    const double d = linalg::max_abs_diff(mc.mean.matrix(), exact.matrix());
    const double d23 = std::abs(mc.mean(1, 2) - exact(1, 2));
    const bool ok = d <= mc.max_abs_error_estimate;
    passed += ok ? 1 : 0;
    rows.push_back({t, d, mc.max_abs_error_estimate, d23, ok});
  }
  const bool verdict = passed >= 9;
  const Format f = format_or(cfg, Format::Json);
  if (f == Format::Json) {
    io::json table = io::json::array();
    for (const auto& r : rows)
      table.push_back({{"t", r.t},
                       {"max_abs_discrepancy", r.discrepancy},
                       {"bound_3sigma", r.bound},
                       {"rho23_discrepancy", r.rho23_discrepancy},
                       {"pass", r.pass}});
    io::json j{{"r", p.r},
               {"s", p.s},
               {"gamma", ch.damping_rate},
               {"samples", cfg.samples},
               {"seed", cfg.seed},
               {"sampling", cfg.path_sampling ? "path" : "exact"},
               {"points", table},
               {"passed", passed},
               {"verdict", verdict ? "PASS" : "FAIL"}};
    os << j.dump(2) << '\n';
  } else {
    os << "# r=" << io::format_number(p.r) << " s=" << io::format_number(p.s)
       << " gamma=" << io::format_number(ch.damping_rate) << " samples=" << cfg.samples << " seed=" << cfg.seed
       << '\n';
    os << "t,max_abs_discrepancy,bound_3sigma,rho23_discrepancy,pass\n";
    for (const auto& r : rows)
      os << io::format_number(r.t) << ',' << io::format_number(r.discrepancy) << ',' << io::format_number(r.bound)
         << ',' << io::format_number(r.rho23_discrepancy) << ',' << (r.pass ? "true" : "false") << '\n';
    os << "# " << passed << "/" << kPoints << " within bound: " << (verdict ? "PASS" : "FAIL") << '\n';
  }
  return verdict ? kOk : kVerifyFailed;
}

inline int dispatch(const RunConfig& cfg, std::ostream& os) {
  const ChannelParams ch = ChannelParams::make(cfg.gamma);

  if (cfg.command == "classify") {
    emit(os, classify_json(XStateParams::make(*cfg.r, *cfg.s), ch), format_or(cfg, Format::Json));
    return kOk;
  }
  if (cfg.command == "events") {
    const auto p = XStateParams::make(*cfg.r, *cfg.s);
    io::json j{{"r", p.r}, {"s", p.s}, {"gamma", ch.damping_rate}};
    j.update(io::to_json(event_times(p, ch)));
    emit(os, j, format_or(cfg, Format::Json));
    return kOk;
  }
  if (cfg.command == "trajectory") {
    const auto p = XStateParams::make(*cfg.r, *cfg.s);
    const auto tr = trajectory(p, ch, t_max(cfg), cfg.steps, cfg.workers);
    if (format_or(cfg, Format::Csv) == Format::Json) {
      io::json j = io::trajectory_sidecar(p, ch, tr);
      j["reports"] = io::to_json(tr)["reports"];
      os << j.dump(2) << '\n';
      return kOk;
    }
    io::write_trajectory_csv(os, tr);
    std::string sidecar = cfg.sidecar;
    if (sidecar.empty() && cfg.out != "-") sidecar = cfg.out + ".json";
    if (!sidecar.empty()) {
      std::ofstream side(sidecar, std::ios::binary);
      if (!side) throw std::ios_base::failure("cannot open " + sidecar);
      side << io::trajectory_sidecar(p, ch, tr).dump(2) << '\n';
      if (!side) throw std::ios_base::failure("write failed: " + sidecar);
    }
    return kOk;
  }
  if (cfg.command == "phase-diagram") {
    const auto pts = phase_diagram(cfg.grid_n, ch, cfg.workers);
    if (format_or(cfg, Format::Csv) == Format::Json) {
      io::json arr = io::json::array();
      for (const auto& pt : pts) arr.push_back(io::to_json(pt));
      os << io::json{{"gamma", ch.damping_rate}, {"grid_n", cfg.grid_n}, {"points", arr}}.dump() << '\n';
    } else {
      io::write_phase_csv(os, pts);
    }
    return kOk;
  }
  if (cfg.command == "mc-verify") return mc_verify(cfg, os);
  throw std::logic_error("unhandled command " + cfg.command);
}

}  // namespace detail

/// Executes a parsed configuration. Output goes to `cfg.out` or, for "-", to `stdout_`.
inline int run(const RunConfig& cfg, std::ostream& stdout_, std::ostream& err) {
  try {
    detail::validate(cfg);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidParams;
  }

  try {
    if (cfg.out == "-") return detail::dispatch(cfg, stdout_);
    // Render fully before touching the file so failures leave no partial output.
    std::ostringstream buffer;
    const int code = detail::dispatch(cfg, buffer);
    std::ofstream file(cfg.out, std::ios::binary);
    if (!file) throw std::ios_base::failure("cannot open " + cfg.out);
    file << buffer.str();
    if (!file) throw std::ios_base::failure("write failed: " + cfg.out);
    return code;
  } catch (const std::ios_base::failure& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidParams;
  }
}

inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  auto parsed = parse(argc, argv, out, err);
  if (!parsed.config) return parsed.exit_code;
  return run(*parsed.config, out, err);
}

}  // namespace qcorr::cli
