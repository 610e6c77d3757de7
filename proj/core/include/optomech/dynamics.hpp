#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "optomech/system.hpp"

/// Time-domain mean-field dynamics.
///
/// Two models are provided:
///  - the full nonlinear mean-field equations for <Q_n>, <P_n>, <c> driven by
///    eps_L(t) + eps_p(t) exp(-i delta t);
///  - the first-order harmonic-balance system for o = o0 + o+ e^{-i delta t}
///    + o- e^{+i delta t}, where the o+- amplitudes absorb eps_p(t).
///
/// Both work with the bare detuning Delta0 = Delta - sum_n g_n Q_n0, chosen so
/// that the static steady state at the configured coupling strength has
/// effective detuning exactly Delta.
namespace optomech::dynamics {

using cd = std::complex<double>;

/// Gaussian write/read protocol.
struct PulseProtocol {
  double eps_p_peak = 0.0;
  double eps_L_peak = 0.0;
  double tau_p = 0.0;  ///< probe width (s)
  double tau_L = 0.0;  ///< coupling width (s)
  double t_wr = 0.0;   ///< write centre (s)
  double t_rd = 0.0;   ///< read centre (s)
  double delta = 0.0;  ///< probe detuning (rad/s)
  double t_end = 0.0;  ///< horizon (s)

  double probe_envelope(double t) const;
  double coupling_envelope(double t) const;
};

/// Throws DynamicsError(InvalidProtocol); returns advisory warnings
/// (1/tau_p not below every EIT linewidth).
std::vector<std::string> validate_protocol(const SystemModel& system, const PulseProtocol& protocol);

/// Drive amplitudes as functions of time: constant or pulsed.
class DriveSchedule {
 public:
  static DriveSchedule constant(double eps_p, double eps_L);
  static DriveSchedule pulsed(const PulseProtocol& protocol);

  double probe(double t) const;
  double coupling(double t) const;

 private:
  struct Constant {
    double eps_p;
    double eps_L;
  };
  std::variant<Constant, PulseProtocol> source_;
  explicit DriveSchedule(std::variant<Constant, PulseProtocol> s) : source_(std::move(s)) {}
};

/// Static displacement -g_n |c0|^2 / omega_n at the configured drive.
std::vector<double> static_displacement(const SystemModel& system);

/// Delta0 = Delta - sum_n g_n Q_n0 (closed form; Delta is effective by definition).
double bare_detuning(const SystemModel& system);

// ---------------------------------------------------------------------------
// Full nonlinear mean-field model

struct MeanFieldState {
  cd c;
  std::vector<double> Q;
  std::vector<double> P;

  static MeanFieldState zero(std::size_t n);
  /// c = c0, Q = static displacement, P = 0.
  static MeanFieldState steady(const SystemModel& system);
};

/// Time derivative of the mean-field equations at time t (rotating frame of
/// the coupling laser; the probe enters as eps_p(t) exp(-i delta t)).
MeanFieldState mean_field_rhs(const SystemModel& system, const MeanFieldState& state, double t,
                              const DriveSchedule& drive, double delta);

// ---------------------------------------------------------------------------
// Harmonic balance

/// Only the + sidebands of the real mechanical variables are stored; the -
/// ones are their complex conjugates.
struct HBState {
  cd c0;
  cd c_plus;
  cd c_minus;
  std::vector<double> Q0;
  std::vector<double> P0;
  std::vector<cd> Q_plus;
  std::vector<cd> P_plus;

  static HBState zero(std::size_t n);
  /// Zeroth order at its static fixed point, sidebands empty.
  static HBState steady(const SystemModel& system);

  cd Q_minus(std::size_t n) const { return std::conj(Q_plus.at(n)); }
  cd P_minus(std::size_t n) const { return std::conj(P_plus.at(n)); }
  std::size_t size() const noexcept { return Q0.size(); }
};

HBState harmonic_balance_rhs(const SystemModel& system, const HBState& state, double t,
                             const DriveSchedule& drive, double delta);
HBState harmonic_balance_rhs(const SystemModel& system, const HBState& state, double t,
                             const PulseProtocol& protocol);

// ---------------------------------------------------------------------------
// Integration

enum class Method { adaptive, fixed_rk4 };

struct IntegratorOptions {
  Method method = Method::adaptive;
  double rel_tol = 1e-9;
  double abs_tol = 0.0;          ///< 0 -> rel_tol * eps_p_peak / kappa
  double max_step = 0.0;         ///< 0 -> tau_p / 50 (adaptive only)
  double fixed_step = 1e-7;      ///< fixed_rk4 step (s)
  std::size_t report_points = 10000;
  /// Evolve Q-, P- as independent variables instead of conjugating Q+, P+.
  bool track_minus_block = false;
};

struct TimeSeries {
  std::vector<double> times;
  std::vector<HBState> states;
  /// Present only with track_minus_block: independently evolved Q-, per time.
  std::vector<std::vector<cd>> Q_minus_tracked;

  std::vector<double> coupling_power_norm;  ///< |eps_L(t) / eps_L|^2
  std::vector<double> probe_power_norm;     ///< |eps_p(t) / eps_p|^2
  std::vector<double> output_power_norm;    ///< |(2 kappa c+ - eps_p(t)) / eps_p|^2
  std::vector<double> output_raw_norm;      ///< |2 kappa c+ / eps_p|^2
  std::vector<std::vector<double>> mech_intensity;  ///< [n][i] = |kappa Q_n+ / eps_p|^2
};

/// Integrates the harmonic-balance system from the all-zero state at t = 0 to
/// protocol.t_end, reporting on a uniform grid of options.report_points.
/// Throws DynamicsError(StepSizeUnderflow | NonFiniteState | InvalidOptions).
TimeSeries integrate(const SystemModel& system, const PulseProtocol& protocol,
                     const IntegratorOptions& options = {});

struct StorageReport {
  TimeSeries series;
  double transmit_peak_time = 0.0;
  double retrieve_peak_time = 0.0;
  double transmit_peak = 0.0;
  double retrieve_peak = 0.0;
  /// integral of output power over the read window / integral of probe power over the write window
  double retrieval_efficiency = 0.0;
};

StorageReport storage_retrieval(const SystemModel& system, const PulseProtocol& protocol,
                                const IntegratorOptions& options = {});

/// Peak times and efficiency of an already integrated run.
/// Throws DynamicsError(NoRetrievedPeak).
StorageReport analyze_storage(TimeSeries series, const PulseProtocol& protocol);

// ---------------------------------------------------------------------------
// Steady-state cross-checks

/// 2 kappa c+ / eps_p from a direct solve of the constant-drive harmonic-balance
/// equations (no resonance or rotating-wave approximations).
cd exact_linear_response(const SystemModel& system, double delta);

struct SteadyStateOptions {
  std::size_t steps_per_period = 0;  ///< RK4 steps per mechanical period; 0 -> from the fastest rate
  double convergence = 1e-10;  ///< relative change of the sideband block per mechanical period
  double max_time = 0.5;       ///< s
};

struct SteadyStateCheck {
  cd c_plus_hb;         ///< c+ from the integrated harmonic-balance system
  cd eps_out_hb;        ///< 2 kappa c+ / eps_p
  cd eps_out_closed_form;  ///< closed-form spectral response
  cd eps_out_exact;     ///< exact_linear_response
  double relative_error = 0.0;        ///< |eps_out_hb - closed form| / |closed form|
  double relative_error_exact = 0.0;  ///< |eps_out_hb - exact| / |exact|
  double t_elapsed = 0.0;
  double eps_p = 0.0;
};

/// Integrates the constant-drive harmonic-balance system until the sideband
/// block settles. Throws DynamicsError(NoConvergence) after max_time.
SteadyStateCheck steady_state_crosscheck(const SystemModel& system, double delta,
                                         const SteadyStateOptions& options = {});

struct DemodulationOptions {
  double settle_time = 5e-3;           ///< s, starting from MeanFieldState::steady
  std::size_t periods = 200;           ///< probe beat periods 2 pi / delta averaged over
  std::size_t samples_per_period = 64;
  double rel_tol = 1e-12;
  double abs_tol = 1e-10;
};

/// Component of <c(t)> at exp(-i delta t) for the full nonlinear equations under
/// constant drives (absolute amplitude, i.e. including eps_p).
cd demodulated_probe_component(const SystemModel& system, double delta, double eps_p,
                               const DemodulationOptions& options = {});

}  // namespace optomech::dynamics
