#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <utility>

#include <boost/numeric/odeint.hpp>

#include "hb_model.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"

namespace optomech::dynamics {

namespace odeint = boost::numeric::odeint;
using detail::State;

namespace {

// steps allowed between two report times before odeint gives up
constexpr int kMaxStepsBetweenReports = 5'000'000;

void check_options(const IntegratorOptions& o) {
  auto fail = [](const char* msg) { throw DynamicsError(DynamicsErrc::InvalidOptions, msg); };
  if (!(o.rel_tol > 0.0) || !std::isfinite(o.rel_tol)) fail("rel_tol must be positive");
  if (!(o.abs_tol >= 0.0) || !std::isfinite(o.abs_tol)) fail("abs_tol must be non-negative");
  if (!(o.max_step >= 0.0) || !std::isfinite(o.max_step)) fail("max_step must be non-negative");
  if (!(o.fixed_step > 0.0) || !std::isfinite(o.fixed_step)) fail("fixed_step must be positive");
  if (o.report_points < 2) fail("report_points must be at least 2");
}

double norm_or_one(double v) { return v != 0.0 ? v : 1.0; }

}  // namespace

TimeSeries integrate(const SystemModel& system, const PulseProtocol& protocol,
                     const IntegratorOptions& options) {
  check_options(options);
  validate_protocol(system, protocol);

  const detail::HarmonicBalanceSystem rhs(system, DriveSchedule::pulsed(protocol), protocol.delta,
                                          options.track_minus_block);
  const detail::HBLayout& layout = rhs.layout();
  const std::size_t n = system.size();

  std::vector<double> times(options.report_points);
  const double dt_report = protocol.t_end / static_cast<double>(options.report_points - 1);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * dt_report;
  times.back() = protocol.t_end;

  TimeSeries ts;
  ts.times.reserve(times.size());
  ts.states.reserve(times.size());

  auto observer = [&](const State& y, double t) {
    for (double v : y) {
      if (!std::isfinite(v)) {
        throw DynamicsError(DynamicsErrc::NonFiniteState,
                            "state became non-finite at t = " + std::to_string(t) + " s", t);
      }
    }
    ts.times.push_back(t);
    ts.states.push_back(detail::unpack(y, layout));
    if (layout.track_minus) {
      std::vector<cd> qm(n);
      for (std::size_t k = 0; k < n; ++k) qm[k] = detail::load(y, layout.q_minus(k));
      ts.Q_minus_tracked.push_back(std::move(qm));
    }
  };

  State y = detail::pack(HBState::zero(n), layout);
  try {
    if (options.method == Method::adaptive) {
      // sideband amplitudes scale like eps_p / kappa
      const double scale = norm_or_one(protocol.eps_p_peak) / system.kappa();
      const double abs_tol = options.abs_tol > 0.0 ? options.abs_tol : options.rel_tol * scale;
      const double max_step = options.max_step > 0.0 ? options.max_step : protocol.tau_p / 50.0;
      auto stepper = odeint::make_dense_output(abs_tol, options.rel_tol, max_step,
                                               odeint::runge_kutta_dopri5<State>());
      odeint::integrate_times(stepper, std::cref(rhs), y, times.begin(), times.end(),
                              std::min(max_step, dt_report), observer,
                              odeint::max_step_checker(kMaxStepsBetweenReports));
    } else {
      odeint::integrate_times(odeint::runge_kutta4<State>(), std::cref(rhs), y, times.begin(),
                              times.end(), options.fixed_step, observer,
                              odeint::max_step_checker(kMaxStepsBetweenReports));
    }
  } catch (const odeint::odeint_error& e) {
    const double t = ts.times.empty() ? 0.0 : ts.times.back();
    throw DynamicsError(DynamicsErrc::StepSizeUnderflow,
                        std::string("integrator could not advance: ") + e.what(), t);
  }

  const double kappa = system.kappa();
  const double ep = norm_or_one(protocol.eps_p_peak);
  const double eL = norm_or_one(protocol.eps_L_peak);
  const std::size_t m = ts.times.size();
  ts.coupling_power_norm.resize(m);
  ts.probe_power_norm.resize(m);
  ts.output_power_norm.resize(m);
  ts.output_raw_norm.resize(m);
  ts.mech_intensity.assign(n, std::vector<double>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const double t = ts.times[i];
    const HBState& s = ts.states[i];
    const double probe = protocol.probe_envelope(t);
    ts.coupling_power_norm[i] = std::pow(protocol.coupling_envelope(t) / eL, 2);
    ts.probe_power_norm[i] = std::pow(probe / ep, 2);
    ts.output_power_norm[i] = std::norm((2.0 * kappa * s.c_plus - probe) / ep);
    ts.output_raw_norm[i] = std::norm(2.0 * kappa * s.c_plus / ep);
    for (std::size_t k = 0; k < n; ++k) {
      ts.mech_intensity[k][i] = std::norm(kappa * s.Q_plus[k] / ep);
    }
  }
  return ts;
}

namespace {

struct WindowStats {
  double peak = 0.0;
  double peak_time = 0.0;
  double integral = 0.0;
};

WindowStats window_stats(const std::vector<double>& t, const std::vector<double>& v, double lo,
                         double hi) {
  WindowStats s;
  bool first = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo || t[i] > hi) continue;
    if (first || v[i] > s.peak) {
      s.peak = v[i];
      s.peak_time = t[i];
      first = false;
    }
    if (i > 0 && t[i - 1] >= lo) s.integral += 0.5 * (v[i] + v[i - 1]) * (t[i] - t[i - 1]);
  }
  return s;
}

}  // namespace

StorageReport storage_retrieval(const SystemModel& system, const PulseProtocol& protocol,
                                const IntegratorOptions& options) {
  return analyze_storage(integrate(system, protocol, options), protocol);
}

StorageReport analyze_storage(TimeSeries series, const PulseProtocol& protocol) {
  StorageReport report;
  report.series = std::move(series);
  const auto& ts = report.series;

  const double w = 3.0 * protocol.tau_L;
  const WindowStats write =
      window_stats(ts.times, ts.output_power_norm, protocol.t_wr - w, protocol.t_wr + w);
  const WindowStats read =
      window_stats(ts.times, ts.output_power_norm, protocol.t_rd - w, protocol.t_rd + w);
  const WindowStats probe_in =
      window_stats(ts.times, ts.probe_power_norm, protocol.t_wr - w, protocol.t_wr + w);

  if (!(read.peak >= 1e-6)) {
    throw DynamicsError(DynamicsErrc::NoRetrievedPeak,
                        "no retrieved output in the read window (max normalised power " +
                            std::to_string(read.peak) + ")");
  }
  report.transmit_peak_time = write.peak_time;
  report.transmit_peak = write.peak;
  report.retrieve_peak_time = read.peak_time;
  report.retrieve_peak = read.peak;
  report.retrieval_efficiency = probe_in.integral > 0.0 ? read.integral / probe_in.integral : 0.0;
  return report;
}

}  // namespace optomech::dynamics
