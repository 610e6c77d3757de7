#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <iterator>
#include <thread>

#include <fmt/format.h>

#include "optomech/errors.hpp"

#ifndef OPTOMECH_EIT_VERSION
#define OPTOMECH_EIT_VERSION "unknown"
#endif

namespace optomech::cli::detail {

namespace {

using Buffer = fmt::memory_buffer;

void num(Buffer& b, double v) { fmt::format_to(std::back_inserter(b), "{:.17g}", v); }

void meta(Buffer& b, std::string_view key, double v) {
  fmt::format_to(std::back_inserter(b), "# {}={:.17g}\n", key, v);
}

void meta(Buffer& b, std::string_view key, std::string_view v) {
  fmt::format_to(std::back_inserter(b), "# {}={}\n", key, v);
}

void row(Buffer& b, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) b.push_back(',');
    num(b, v);
    first = false;
  }
  b.push_back('\n');
}

SystemModel build_model(const Scenario& sc, const RunContext& ctx) {
  SystemModel model = build_system(ctx.reference_off ? with_coupling_off(sc.system) : sc.system);
  if (ctx.warnings) {
    for (const auto& w : model.warnings()) *ctx.warnings << "warning: " << w << '\n';
  }
  return model;
}

void header(Buffer& b, std::string_view command, const Scenario& sc, const SystemModel& m) {
  fmt::format_to(std::back_inserter(b), "# optomech-eit {}\n", OPTOMECH_EIT_VERSION);
  meta(b, "command", command);
  meta(b, "omega_m_rad_s", sc.omega_m);
  meta(b, "kappa_rad_s", m.kappa());
  meta(b, "delta_eff_rad_s", m.delta_eff());
  meta(b, "omega_c_rad_s", m.cavity().omega_c);
  meta(b, "eps_L_per_s", m.eps_L());
  meta(b, "eps_p_per_s", m.eps_p());
  meta(b, "c0_abs", std::abs(m.c0()));
  meta(b, "membranes", static_cast<double>(m.size()));
  for (std::size_t n = 0; n < m.size(); ++n) {
    const auto& mode = m.membrane(n);
    const std::string p = fmt::format("membrane_{}_", n + 1);
    meta(b, p + "omega_rad_s", mode.omega);
    meta(b, p + "gamma_rad_s", mode.gamma);
    meta(b, p + "g_rad_s", mode.g);
    meta(b, p + "G_rad_s", m.effective_coupling(n));
  }
}

void range_meta(Buffer& b, const Scenario& sc) {
  meta(b, "range_over_omega_m", fmt::format("{:.17g},{:.17g}", sc.range_lo, sc.range_hi));
  meta(b, "points", static_cast<double>(sc.points));
}

double vg_or_nan(const SystemModel& m, double delta) {
  try {
    return spectral::group_velocity(m, delta);
  } catch (const SpectralError& e) {
    if (e.code() != SpectralErrc::DivergentGroupVelocity) throw;
    return std::nan("");
  }
}

std::string finish(const Buffer& b) { return fmt::to_string(b); }

}  // namespace

double GridAxis::value(std::size_t i) const {
  if (count == 1) return start;
  if (i + 1 == count) return stop;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

GridAxis parse_grid_axis(const std::string& text) {
  const auto eq = text.find('=');
  const auto bad = [&] {
    return ConfigError("--grid expects KEY=START:STOP:COUNT, got '" + text + "'");
  };
  if (eq == std::string::npos || eq == 0) throw bad();
  GridAxis axis;
  axis.key = text.substr(0, eq);
  const std::string bounds = text.substr(eq + 1);
  const auto c1 = bounds.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : bounds.find(':', c1 + 1);
  if (c2 == std::string::npos) throw bad();
  try {
    std::size_t used = 0;
    axis.start = std::stod(bounds.substr(0, c1), &used);
    if (used != c1) throw bad();
    axis.stop = std::stod(bounds.substr(c1 + 1, c2 - c1 - 1), &used);
    if (used != c2 - c1 - 1) throw bad();
    const long long count = std::stoll(bounds.substr(c2 + 1), &used);
    if (used != bounds.size() - c2 - 1 || count < 1) throw bad();
    axis.count = static_cast<std::size_t>(count);
  } catch (const std::logic_error&) {
    throw bad();
  }
  if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) throw bad();
  return axis;
}

std::string spectrum_csv(const Scenario& sc, const RunContext& ctx) {
  const SystemModel m = build_model(sc, ctx);
  const auto grid = spectral::uniform_grid(sc.range_lo * sc.omega_m, sc.range_hi * sc.omega_m, sc.points);
  const auto sweep = spectral::evaluate_spectrum(m, grid, ctx.threads);

  Buffer b;
  header(b, "spectrum", sc, m);
  range_meta(b, sc);
  meta(b, "reference_off", ctx.reference_off ? "true" : "false");
  fmt::format_to(std::back_inserter(b), "delta_rad_s,delta_over_omega_m,v_p,v_tilde_p,vg_over_c\n");
  for (const auto& r : sweep.responses) {
    row(b, {r.delta, r.delta / sc.omega_m, r.v_p, r.v_tilde_p, vg_or_nan(m, r.delta)});
  }
  return finish(b);
}

std::string groupvel_csv(const Scenario& sc, const RunContext& ctx) {
  const SystemModel m = build_model(sc, ctx);
  std::vector<double> deltas;
  if (sc.at.empty()) {
    deltas = spectral::uniform_grid(sc.range_lo * sc.omega_m, sc.range_hi * sc.omega_m, sc.points);
  } else {
    for (double x : sc.at) {
      if (!(x >= sc.range_lo && x <= sc.range_hi)) {
        throw ConfigError(fmt::format("--at value {} lies outside the range [{}, {}]", x,
                                      sc.range_lo, sc.range_hi));
      }
      deltas.push_back(x * sc.omega_m);
    }
  }

  Buffer b;
  header(b, "groupvel", sc, m);
  range_meta(b, sc);
  fmt::format_to(std::back_inserter(b), "delta_rad_s,delta_over_omega_m,vg_over_c\n");
  for (double d : deltas) {
    // explicit points must be well defined; a dense grid may cross a pole
    const double vg = sc.at.empty() ? vg_or_nan(m, d) : spectral::group_velocity(m, d);
    row(b, {d, d / sc.omega_m, vg});
  }
  return finish(b);
}

std::string windows_csv(const Scenario& sc, const RunContext& ctx) {
  const SystemModel m = build_model(sc, ctx);
  spectral::SweepOptions opts;
  opts.threads = ctx.threads;
  opts.windows = sc.windows;
  const auto sweep = spectral::sweep_spectrum(m, sc.range_lo * sc.omega_m,
                                              sc.range_hi * sc.omega_m, sc.points, opts);
  Buffer b;
  header(b, "windows", sc, m);
  range_meta(b, sc);
  meta(b, "depth_ratio", sc.windows.depth_ratio);
  meta(b, "windows_found", static_cast<double>(sweep.windows.size()));
  fmt::format_to(std::back_inserter(b), "center_delta,depth,fwhm_measured,fwhm_analytic\n");
  for (const auto& w : sweep.windows) {
    row(b, {w.center_delta, w.depth, w.fwhm_measured, w.fwhm_analytic});
  }
  return finish(b);
}

std::string storage_csv(const Scenario& sc, const RunContext& ctx) {
  const SystemModel m = build_model(sc, ctx);
  const dynamics::PulseProtocol p = sc.pulse_protocol(m);
  for (const auto& w : dynamics::validate_protocol(m, p)) {
    if (ctx.warnings) *ctx.warnings << "warning: " << w << '\n';
  }
  dynamics::TimeSeries ts = dynamics::integrate(m, p, sc.integrator);

  Buffer b;
  header(b, "storage", sc, m);
  meta(b, "tau_p_s", p.tau_p);
  meta(b, "tau_L_s", p.tau_L);
  meta(b, "t_wr_s", p.t_wr);
  meta(b, "t_rd_s", p.t_rd);
  meta(b, "t_end_s", p.t_end);
  meta(b, "delta_rad_s", p.delta);
  meta(b, "method", sc.integrator.method == dynamics::Method::adaptive ? "adaptive" : "fixed_rk4");
  meta(b, "rel_tol", sc.integrator.rel_tol);
  meta(b, "abs_tol", sc.integrator.abs_tol);
  meta(b, "max_step_s", sc.integrator.max_step);
  meta(b, "fixed_step_s", sc.integrator.fixed_step);
  meta(b, "report_points", static_cast<double>(sc.integrator.report_points));

  fmt::format_to(std::back_inserter(b),
                 "t_s,coupling_power_norm,probe_power_norm,output_power_norm,output_raw_norm");
  for (std::size_t n = 0; n < m.size(); ++n) {
    fmt::format_to(std::back_inserter(b), ",mech_intensity_{}", n + 1);
  }
  b.push_back('\n');
  for (std::size_t i = 0; i < ts.times.size(); ++i) {
    row(b, {ts.times[i], ts.coupling_power_norm[i], ts.probe_power_norm[i],
            ts.output_power_norm[i], ts.output_raw_norm[i]});
    b.resize(b.size() - 1);
    for (std::size_t n = 0; n < m.size(); ++n) {
      b.push_back(',');
      num(b, ts.mech_intensity[n][i]);
    }
    b.push_back('\n');
  }

  try {
    const auto report = dynamics::analyze_storage(std::move(ts), p);
    meta(b, "transmit_peak_time_s", report.transmit_peak_time);
    meta(b, "transmit_peak", report.transmit_peak);
    meta(b, "retrieve_peak_time_s", report.retrieve_peak_time);
    meta(b, "retrieve_peak", report.retrieve_peak);
    meta(b, "retrieval_efficiency", report.retrieval_efficiency);
  } catch (const DynamicsError& e) {
    if (e.code() != DynamicsErrc::NoRetrievedPeak) throw;
    if (ctx.warnings) *ctx.warnings << "warning: " << e.what() << '\n';
    meta(b, "retrieval", "none");
  }
  return finish(b);
}

std::string sweep_csv(const toml::table& doc, const std::vector<GridAxis>& axes,
                      const RunContext& ctx) {
  if (axes.empty()) throw ConfigError("sweep needs at least one --grid KEY=START:STOP:COUNT");
  std::size_t total = 1;
  for (const auto& a : axes) total *= a.count;

  // Validate every combination before any work so bad keys fail as usage errors.
  std::vector<Scenario> scenarios;
  std::vector<std::vector<double>> values;
  scenarios.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    toml::table copy = doc;
    std::vector<double> v;
    std::size_t rest = k;
    for (auto it = axes.rbegin(); it != axes.rend(); ++it) {
      v.push_back(it->value(rest % it->count));
      rest /= it->count;
    }
    std::reverse(v.begin(), v.end());
    for (std::size_t a = 0; a < axes.size(); ++a) set_number(copy, axes[a].key, v[a]);
    scenarios.push_back(parse_scenario(copy));
    values.push_back(std::move(v));
  }

  std::vector<std::string> rows(total);
  std::vector<std::exception_ptr> failures(total);
  auto work = [&](std::size_t k) {
    try {
      const Scenario& sc = scenarios[k];
      const SystemModel m = build_system(ctx.reference_off ? with_coupling_off(sc.system) : sc.system);
      spectral::SweepOptions opts;
      opts.windows = sc.windows;
      const auto sweep = spectral::sweep_spectrum(m, sc.range_lo * sc.omega_m,
                                                  sc.range_hi * sc.omega_m, sc.points, opts);
      std::vector<double> at = sc.at;
      if (at.empty()) {
        for (const auto& mode : m.membranes()) at.push_back(mode.omega / sc.omega_m);
      }
      Buffer b;
      for (double x : at) {
        const double d = x * sc.omega_m;
        const auto r = spectral::probe_response(m, d);
        for (double v : values[k]) {
          num(b, v);
          b.push_back(',');
        }
        row(b, {x, d, r.v_p, r.v_tilde_p, vg_or_nan(m, d), static_cast<double>(sweep.windows.size())});
      }
      rows[k] = fmt::to_string(b);
    } catch (...) {
      failures[k] = std::current_exception();
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(ctx.threads, 1, total);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < total; k += workers) work(k);
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  const SystemModel base = build_system(scenarios.front().system);
  Buffer b;
  header(b, "sweep", scenarios.front(), base);
  range_meta(b, scenarios.front());
  meta(b, "reference_off", ctx.reference_off ? "true" : "false");
  for (const auto& a : axes) {
    meta(b, "grid", fmt::format("{}={:.17g}:{:.17g}:{}", a.key, a.start, a.stop, a.count));
  }
  for (const auto& a : axes) fmt::format_to(std::back_inserter(b), "{},", a.key);
  fmt::format_to(std::back_inserter(b),
                 "delta_over_omega_m,delta_rad_s,v_p,v_tilde_p,vg_over_c,windows\n");
  for (const auto& r : rows) b.append(r.data(), r.data() + r.size());
  return finish(b);
}

}  // namespace optomech::cli::detail
