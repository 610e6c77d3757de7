#include <algorithm>
#include <cmath>
#include <functional>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include "hb_model.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/errors.hpp"
#include "optomech/spectral.hpp"

namespace optomech::dynamics {

namespace odeint = boost::numeric::odeint;
using detail::State;

namespace {

constexpr cd kI{0.0, 1.0};

struct Converged {};

// |lambda dt| kept well inside the RK4 stability region on the imaginary axis
constexpr double kStableRk4Phase = 0.5;

}  // namespace

cd exact_linear_response(const SystemModel& system, double delta) {
  // Unknowns: Q+_n, P+_n (n = 1..N), c+, conj(c-). All equations are
  // complex-linear in these once c- is replaced by its conjugate.
  const std::size_t n = system.size();
  const Eigen::Index dim = static_cast<Eigen::Index>(2 * n + 2);
  const Eigen::Index ic = dim - 2;
  const Eigen::Index id = dim - 1;
  const double kappa = system.kappa();
  const double Delta = system.delta_eff();
  const cd c0 = system.c0();

  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(dim);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& m = system.membrane(k);
    const Eigen::Index q = static_cast<Eigen::Index>(2 * k);
    const Eigen::Index p = q + 1;
    A(q, q) = kI * delta;
    A(q, p) = m.omega;
    A(p, p) = kI * delta - m.gamma;
    A(p, q) = -m.omega;
    A(p, ic) = -m.g * std::conj(c0);
    A(p, id) = -m.g * c0;
    A(ic, q) = -kI * m.g * c0;
    A(id, q) = kI * m.g * std::conj(c0);
  }
  A(ic, ic) = cd{-kappa, delta - Delta};
  A(id, id) = cd{-kappa, delta + Delta};
  rhs(ic) = -1.0;  // unit probe

  const Eigen::VectorXcd x = A.partialPivLu().solve(rhs);
  return 2.0 * kappa * x(ic);
}

SteadyStateCheck steady_state_crosscheck(const SystemModel& system, double delta,
                                         const SteadyStateOptions& options) {
  if (!(options.convergence > 0.0) || !(options.max_time > 0.0)) {
    throw DynamicsError(DynamicsErrc::InvalidOptions, "steady-state options must be positive");
  }
  const double eps_p = system.eps_p() != 0.0 ? system.eps_p() : 1.0;
  const double kappa = system.kappa();
  const detail::HarmonicBalanceSystem rhs(system, DriveSchedule::constant(eps_p, system.eps_L()),
                                          delta, false);
  const detail::HBLayout& layout = rhs.layout();

  const double period = kTwoPi / system.omega_mean();
  const std::size_t chunks = static_cast<std::size_t>(std::ceil(options.max_time / period));
  std::vector<double> times(chunks + 1);
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i) * period;

  State y = detail::pack(HBState::steady(system), layout);
  State previous = y;
  State settled;
  double t_settled = 0.0;
  auto observer = [&](const State& s, double t) {
    if (t == 0.0) return;
    double change = 0.0;
    double size = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!std::isfinite(s[i])) {
        throw DynamicsError(DynamicsErrc::NonFiniteState, "non-finite steady-state iterate", t);
      }
      if (!layout.is_sideband(i)) continue;
      change = std::max(change, std::abs(s[i] - previous[i]));
      size = std::max(size, std::abs(s[i]));
    }
    previous = s;
    if (size > 0.0 && change <= options.convergence * size) {
      settled = s;
      t_settled = t;
      throw Converged{};
    }
  };

  // A fixed-step map shares the exact fixed point of the ODE and contracts onto
  // it; adaptive error control keeps a noise floor proportional to its tolerance.
  double rate = std::abs(delta) + std::abs(system.delta_eff()) + kappa;
  double widest = 0.0;
  for (std::size_t k = 0; k < system.size(); ++k) {
    widest = std::max(widest, system.membrane(k).omega + system.membrane(k).gamma);
    rate += system.effective_coupling(k);
  }
  rate += widest;
  const std::size_t steps =
      options.steps_per_period > 0
          ? options.steps_per_period
          : static_cast<std::size_t>(std::ceil(period * rate / kStableRk4Phase));
  const double dt = period / static_cast<double>(steps);
  try {
    odeint::integrate_times(odeint::runge_kutta4<State>(), std::cref(rhs), y, times.begin(),
                            times.end(), dt, observer,
                            odeint::max_step_checker(static_cast<int>(steps) + 16));
    throw DynamicsError(DynamicsErrc::NoConvergence,
                        "harmonic-balance steady state not reached within " +
                            std::to_string(options.max_time) + " s",
                        times.back());
  } catch (const Converged&) {
  } catch (const odeint::odeint_error& e) {
    throw DynamicsError(DynamicsErrc::StepSizeUnderflow,
                        std::string("integrator could not advance: ") + e.what());
  }

  SteadyStateCheck out;
  out.eps_p = eps_p;
  out.t_elapsed = t_settled;
  out.c_plus_hb = detail::load(settled, detail::HBLayout::c_plus);
  out.eps_out_hb = 2.0 * kappa * out.c_plus_hb / eps_p;
  out.eps_out_closed_form = spectral::probe_response(system, delta).eps_out_plus;
  out.eps_out_exact = exact_linear_response(system, delta);
  out.relative_error = std::abs(out.eps_out_hb - out.eps_out_closed_form) / std::abs(out.eps_out_closed_form);
  out.relative_error_exact = std::abs(out.eps_out_hb - out.eps_out_exact) / std::abs(out.eps_out_exact);
  return out;
}

cd demodulated_probe_component(const SystemModel& system, double delta, double eps_p,
                               const DemodulationOptions& options) {
  if (delta == 0.0 || !std::isfinite(delta)) {
    throw DynamicsError(DynamicsErrc::InvalidOptions, "demodulation needs a non-zero detuning");
  }
  if (options.periods == 0 || options.samples_per_period < 4 || !(options.settle_time >= 0.0)) {
    throw DynamicsError(DynamicsErrc::InvalidOptions, "invalid demodulation options");
  }
  const detail::MeanFieldSystem rhs(system, DriveSchedule::constant(eps_p, system.eps_L()), delta);

  const double beat = kTwoPi / std::abs(delta);
  const std::size_t samples = options.periods * options.samples_per_period;
  const double dt = beat / static_cast<double>(options.samples_per_period);
  std::vector<double> times;
  times.reserve(samples + 1);
  times.push_back(0.0);
  for (std::size_t j = 0; j < samples; ++j) {
    times.push_back(options.settle_time + static_cast<double>(j) * dt);
  }
  if (options.settle_time == 0.0) times.erase(times.begin());

  cd acc{};
  std::size_t count = 0;
  auto observer = [&](const State& y, double t) {
    if (t < options.settle_time) return;
    const cd c = detail::load(y, 0);
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw DynamicsError(DynamicsErrc::NonFiniteState, "mean-field state became non-finite", t);
    }
    acc += c * std::exp(cd{0.0, delta * t});
    ++count;
  };

  State y = detail::pack(MeanFieldState::steady(system));
  const double max_step = beat / 16.0;
  auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol, max_step,
                                           odeint::runge_kutta_dopri5<State>());
  try {
    odeint::integrate_times(stepper, std::cref(rhs), y, times.begin(), times.end(), max_step / 16.0,
                            observer, odeint::max_step_checker(5'000'000));
  } catch (const odeint::odeint_error& e) {
    throw DynamicsError(DynamicsErrc::StepSizeUnderflow,
                        std::string("integrator could not advance: ") + e.what());
  }
  return acc / static_cast<double>(count);
}

}  // namespace optomech::dynamics
