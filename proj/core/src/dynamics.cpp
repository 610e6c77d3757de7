#include <cmath>
#include <sstream>

#include "hb_model.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"
#include "optomech/spectral.hpp"

namespace optomech::dynamics {

namespace {

constexpr cd kI{0.0, 1.0};

double gaussian(double t, double centre, double width) {
  const double x = (t - centre) / width;
  return std::exp(-0.5 * x * x);
}

}  // namespace

double PulseProtocol::probe_envelope(double t) const {
  return eps_p_peak * gaussian(t, t_wr, tau_p);
}

double PulseProtocol::coupling_envelope(double t) const {
  return eps_L_peak * (gaussian(t, t_wr, tau_L) + gaussian(t, t_rd, tau_L));
}

std::vector<std::string> validate_protocol(const SystemModel& system, const PulseProtocol& p) {
  auto fail = [](const std::string& msg) {
    throw DynamicsError(DynamicsErrc::InvalidProtocol, "protocol: " + msg);
  };
  for (double v : {p.eps_p_peak, p.eps_L_peak, p.tau_p, p.tau_L, p.t_wr, p.t_rd, p.delta, p.t_end}) {
    if (!std::isfinite(v)) fail("all fields must be finite");
  }
  if (!(p.tau_p > 0.0) || !(p.tau_L > 0.0)) fail("pulse widths must be positive");
  if (!(p.t_end > 0.0)) fail("t_end must be positive");
  if (p.eps_p_peak < 0.0 || p.eps_L_peak < 0.0) fail("pulse amplitudes must be non-negative");
  if (p.tau_p > p.tau_L) fail("tau_p must not exceed tau_L");
  if (!(p.t_wr + 3.0 * p.tau_L < p.t_rd - 3.0 * p.tau_L)) {
    fail("write and read pulses overlap (need t_wr + 3 tau_L < t_rd - 3 tau_L)");
  }

  std::vector<std::string> warnings;
  for (std::size_t n = 0; n < system.size(); ++n) {
    const double w = spectral::fwhm_analytic(system, n);
    if (1.0 / p.tau_p >= w) {
      std::ostringstream os;
      os << "1/tau_p = " << 1.0 / p.tau_p << " rad/s is not below the EIT linewidth of membrane "
         << n + 1 << " (" << w << " rad/s)";
      warnings.push_back(os.str());
    }
  }
  return warnings;
}

DriveSchedule DriveSchedule::constant(double eps_p, double eps_L) {
  return DriveSchedule(Constant{eps_p, eps_L});
}

DriveSchedule DriveSchedule::pulsed(const PulseProtocol& protocol) { return DriveSchedule(protocol); }

double DriveSchedule::probe(double t) const {
  if (const auto* c = std::get_if<Constant>(&source_)) return c->eps_p;
  return std::get<PulseProtocol>(source_).probe_envelope(t);
}

double DriveSchedule::coupling(double t) const {
  if (const auto* c = std::get_if<Constant>(&source_)) return c->eps_L;
  return std::get<PulseProtocol>(source_).coupling_envelope(t);
}

std::vector<double> static_displacement(const SystemModel& system) {
  const double n2 = std::norm(system.c0());
  std::vector<double> q;
  q.reserve(system.size());
  for (const auto& m : system.membranes()) q.push_back(-m.g * n2 / m.omega);
  return q;
}

double bare_detuning(const SystemModel& system) {
  const auto q = static_displacement(system);
  double shift = 0.0;
  for (std::size_t n = 0; n < system.size(); ++n) shift += system.membrane(n).g * q[n];
  return system.delta_eff() - shift;
}

MeanFieldState MeanFieldState::zero(std::size_t n) {
  return {cd{}, std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

MeanFieldState MeanFieldState::steady(const SystemModel& system) {
  return {system.c0(), static_displacement(system), std::vector<double>(system.size(), 0.0)};
}

HBState HBState::zero(std::size_t n) {
  HBState s;
  s.Q0.assign(n, 0.0);
  s.P0.assign(n, 0.0);
  s.Q_plus.assign(n, cd{});
  s.P_plus.assign(n, cd{});
  return s;
}

HBState HBState::steady(const SystemModel& system) {
  HBState s = zero(system.size());
  s.c0 = system.c0();
  s.Q0 = static_displacement(system);
  return s;
}

namespace detail {

ModeTable::ModeTable(const SystemModel& system)
    : kappa(system.kappa()), bare_detuning(dynamics::bare_detuning(system)) {
  for (const auto& m : system.membranes()) {
    omega.push_back(m.omega);
    gamma.push_back(m.gamma);
    g.push_back(m.g);
  }
}

State pack(const HBState& s, const HBLayout& layout) {
  State y(layout.size(), 0.0);
  store(y, HBLayout::c0, s.c0);
  store(y, HBLayout::c_plus, s.c_plus);
  store(y, HBLayout::c_minus, s.c_minus);
  for (std::size_t k = 0; k < layout.n; ++k) {
    y[layout.q0(k)] = s.Q0[k];
    y[layout.p0(k)] = s.P0[k];
    store(y, layout.q_plus(k), s.Q_plus[k]);
    store(y, layout.p_plus(k), s.P_plus[k]);
    if (layout.track_minus) {
      store(y, layout.q_minus(k), std::conj(s.Q_plus[k]));
      store(y, layout.p_minus(k), std::conj(s.P_plus[k]));
    }
  }
  return y;
}

HBState unpack(const State& y, const HBLayout& layout) {
  HBState s = HBState::zero(layout.n);
  s.c0 = load(y, HBLayout::c0);
  s.c_plus = load(y, HBLayout::c_plus);
  s.c_minus = load(y, HBLayout::c_minus);
  for (std::size_t k = 0; k < layout.n; ++k) {
    s.Q0[k] = y[layout.q0(k)];
    s.P0[k] = y[layout.p0(k)];
    s.Q_plus[k] = load(y, layout.q_plus(k));
    s.P_plus[k] = load(y, layout.p_plus(k));
  }
  return s;
}

HarmonicBalanceSystem::HarmonicBalanceSystem(const SystemModel& system, DriveSchedule drive,
                                             double delta, bool track_minus)
    : modes_(system), drive_(std::move(drive)), delta_(delta), layout_{system.size(), track_minus} {}

void HarmonicBalanceSystem::operator()(const State& y, State& dy, double t) const {
  const HBLayout& L = layout_;
  const std::size_t n = L.n;
  const double kappa = modes_.kappa;

  const cd c0 = load(y, HBLayout::c0);
  const cd cp = load(y, HBLayout::c_plus);
  const cd cm = load(y, HBLayout::c_minus);
  const double c0_norm = std::norm(c0);

  double detuning = modes_.bare_detuning;
  cd pull_plus{};   // sum g Q+
  cd pull_minus{};  // sum g Q-
  for (std::size_t k = 0; k < n; ++k) {
    detuning += modes_.g[k] * y[L.q0(k)];
    const cd qp = load(y, L.q_plus(k));
    pull_plus += modes_.g[k] * qp;
    pull_minus += modes_.g[k] * (L.track_minus ? load(y, L.q_minus(k)) : std::conj(qp));
  }

  // zeroth order: probe removed, |c|^2 -> |c0|^2
  store(dy, HBLayout::c0, -cd{kappa, detuning} * c0 + drive_.coupling(t));

  // beat terms of |c|^2 at exp(-i delta t) and exp(+i delta t)
  const cd beat_plus = std::conj(c0) * cp + std::conj(cm) * c0;
  const cd beat_minus = std::conj(beat_plus);
  const cd rot{0.0, delta_};

  for (std::size_t k = 0; k < n; ++k) {
    const double w = modes_.omega[k];
    const double gam = modes_.gamma[k];
    const double g = modes_.g[k];
    const double q0 = y[L.q0(k)];
    const double p0 = y[L.p0(k)];
    dy[L.q0(k)] = w * p0;
    dy[L.p0(k)] = -w * q0 - g * c0_norm - gam * p0;

    const cd qp = load(y, L.q_plus(k));
    const cd pp = load(y, L.p_plus(k));
    store(dy, L.q_plus(k), rot * qp + w * pp);
    store(dy, L.p_plus(k), rot * pp - w * qp - gam * pp - g * beat_plus);

    if (L.track_minus) {
      const cd qm = load(y, L.q_minus(k));
      const cd pm = load(y, L.p_minus(k));
      store(dy, L.q_minus(k), -rot * qm + w * pm);
      store(dy, L.p_minus(k), -rot * pm - w * qm - gam * pm - g * beat_minus);
    }
  }

  const cd loss{kappa, detuning};
  store(dy, HBLayout::c_plus, (rot - loss) * cp - kI * pull_plus * c0 + drive_.probe(t));
  store(dy, HBLayout::c_minus, (-rot - loss) * cm - kI * pull_minus * c0);
}

MeanFieldSystem::MeanFieldSystem(const SystemModel& system, DriveSchedule drive, double delta)
    : modes_(system), drive_(std::move(drive)), delta_(delta) {}

void MeanFieldSystem::operator()(const State& y, State& dy, double t) const {
  const std::size_t n = modes_.size();
  const cd c = load(y, 0);
  const double photons = std::norm(c);
  double detuning = modes_.bare_detuning;
  for (std::size_t k = 0; k < n; ++k) {
    const double q = y[2 + k];
    const double p = y[2 + n + k];
    detuning += modes_.g[k] * q;
    dy[2 + k] = modes_.omega[k] * p;
    dy[2 + n + k] = -modes_.omega[k] * q - modes_.g[k] * photons - modes_.gamma[k] * p;
  }
  const cd probe = drive_.probe(t) * std::exp(cd{0.0, -delta_ * t});
  store(dy, 0, -cd{modes_.kappa, detuning} * c + drive_.coupling(t) + probe);
}

State pack(const MeanFieldState& s) {
  const std::size_t n = s.Q.size();
  State y(2 + 2 * n);
  store(y, 0, s.c);
  for (std::size_t k = 0; k < n; ++k) {
    y[2 + k] = s.Q[k];
    y[2 + n + k] = s.P[k];
  }
  return y;
}

MeanFieldState unpack_mean_field(const State& y, std::size_t n) {
  MeanFieldState s = MeanFieldState::zero(n);
  s.c = load(y, 0);
  for (std::size_t k = 0; k < n; ++k) {
    s.Q[k] = y[2 + k];
    s.P[k] = y[2 + n + k];
  }
  return s;
}

}  // namespace detail

MeanFieldState mean_field_rhs(const SystemModel& system, const MeanFieldState& state, double t,
                              const DriveSchedule& drive, double delta) {
  if (state.Q.size() != system.size() || state.P.size() != system.size()) {
    throw DynamicsError(DynamicsErrc::InvalidOptions, "state size does not match the system");
  }
  const detail::MeanFieldSystem f(system, drive, delta);
  const detail::State y = detail::pack(state);
  detail::State dy(y.size());
  f(y, dy, t);
  return detail::unpack_mean_field(dy, system.size());
}

HBState harmonic_balance_rhs(const SystemModel& system, const HBState& state, double t,
                             const DriveSchedule& drive, double delta) {
  if (state.size() != system.size() || state.Q_plus.size() != system.size() ||
      state.P0.size() != system.size() || state.P_plus.size() != system.size()) {
    throw DynamicsError(DynamicsErrc::InvalidOptions, "state size does not match the system");
  }
  const detail::HarmonicBalanceSystem f(system, drive, delta, false);
  const detail::State y = detail::pack(state, f.layout());
  detail::State dy(y.size());
  f(y, dy, t);
  return detail::unpack(dy, f.layout());
}

HBState harmonic_balance_rhs(const SystemModel& system, const HBState& state, double t,
                             const PulseProtocol& protocol) {
  return harmonic_balance_rhs(system, state, t, DriveSchedule::pulsed(protocol), protocol.delta);
}

}  // namespace optomech::dynamics
