#include "optomech/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "optomech/errors.hpp"

namespace optomech::spectral {

namespace {

using cd = std::complex<double>;
constexpr cd kI{0.0, 1.0};

cd denominator(const SystemModel& sys, double delta) {
  cd d{sys.kappa(), -(delta - sys.omega_mean())};
  const auto G = sys.effective_couplings();
  const auto modes = sys.membranes();
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const cd mech{0.5 * modes[n].gamma, -(delta - modes[n].omega)};
    d += 0.5 * G[n] * G[n] / mech;
  }
  return d;
}

// dD/d(delta)
cd denominator_slope(const SystemModel& sys, double delta) {
  cd d = -kI;
  const auto G = sys.effective_couplings();
  const auto modes = sys.membranes();
  for (std::size_t n = 0; n < modes.size(); ++n) {
    const cd mech{0.5 * modes[n].gamma, -(delta - modes[n].omega)};
    d += 0.5 * G[n] * G[n] * kI / (mech * mech);
  }
  return d;
}

void require_finite_delta(double delta) {
  if (!std::isfinite(delta)) {
    throw SpectralError(SpectralErrc::InvalidGrid, "probe detuning is not finite");
  }
}

}  // namespace

ProbeResponse probe_response(const SystemModel& system, double delta) {
  require_finite_delta(delta);
  const cd eps = 2.0 * system.kappa() / denominator(system, delta);
  return {delta, eps, eps.real(), eps.imag()};
}

std::complex<double> response_derivative(const SystemModel& system, double delta) {
  require_finite_delta(delta);
  const cd d = denominator(system, delta);
  return -2.0 * system.kappa() * denominator_slope(system, delta) / (d * d);
}

double group_velocity(const SystemModel& system, double delta) {
  const ProbeResponse r = probe_response(system, delta);
  const double slope = response_derivative(system, delta).imag();
  const double denom = 1.0 + 0.5 * r.v_tilde_p + 0.5 * delta * slope;
  if (std::abs(denom) < 1e-12) {
    std::ostringstream os;
    os << "group velocity diverges at delta = " << delta << " rad/s";
    throw SpectralError(SpectralErrc::DivergentGroupVelocity, os.str());
  }
  return 1.0 / denom;
}

double fwhm_analytic(const SystemModel& system, std::size_t n, bool merged) {
  if (n >= system.size()) {
    throw SpectralError(SpectralErrc::IndexOutOfRange,
                        "membrane index " + std::to_string(n) + " out of range (N = " +
                            std::to_string(system.size()) + ")");
  }
  const auto modes = system.membranes();
  const auto G = system.effective_couplings();
  double g2 = G[n] * G[n];
  if (merged) {
    g2 = 0.0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
      if (std::abs(modes[k].omega - modes[n].omega) <= 1e-12 * modes[n].omega) {
        g2 += G[k] * G[k];
      }
    }
  }
  return modes[n].gamma + g2 / system.kappa();
}

SpectrumSweep evaluate_spectrum(const SystemModel& system, std::vector<double> grid,
                                unsigned threads) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw SpectralError(SpectralErrc::InvalidGrid, "grid must be strictly increasing");
    }
  }
  SpectrumSweep sweep;
  sweep.responses.resize(grid.size());
  const std::size_t n = grid.size();
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n / 256, 1));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) sweep.responses[i] = probe_response(system, grid[i]);
  };
  if (workers == 1) {
    run(0, n);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t b = w * chunk;
      const std::size_t e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(run, b, e);
    }
  }
  sweep.grid = std::move(grid);
  return sweep;
}

std::vector<double> uniform_grid(double delta_min, double delta_max, std::size_t points) {
  if (!std::isfinite(delta_min) || !std::isfinite(delta_max) || !(delta_min < delta_max)) {
    throw SpectralError(SpectralErrc::InvalidGrid, "sweep range must satisfy delta_min < delta_max");
  }
  if (points < 2) {
    throw SpectralError(SpectralErrc::InvalidGrid, "sweep needs at least 2 points");
  }
  std::vector<double> grid(points);
  const double step = (delta_max - delta_min) / static_cast<double>(points - 1);
  for (std::size_t i = 0; i < points; ++i) grid[i] = delta_min + static_cast<double>(i) * step;
  grid.back() = delta_max;
  return grid;
}

SpectrumSweep sweep_spectrum(const SystemModel& system, double delta_min, double delta_max,
                             std::size_t points, const SweepOptions& options) {
  SpectrumSweep sweep =
      evaluate_spectrum(system, uniform_grid(delta_min, delta_max, points), options.threads);
  sweep.windows = find_transparency_windows(system, sweep, options.windows);
  return sweep;
}

std::size_t required_grid_points(const SystemModel& system, double delta_min, double delta_max,
                                 const WindowOptions& options) {
  double narrowest = 0.0;
  const auto modes = system.membranes();
  const auto G = system.effective_couplings();
  for (std::size_t n = 0; n < modes.size(); ++n) {
    if (G[n] <= 0.0 || modes[n].omega < delta_min || modes[n].omega > delta_max) continue;
    const double w = fwhm_analytic(system, n);
    narrowest = narrowest == 0.0 ? w : std::min(narrowest, w);
  }
  if (narrowest == 0.0) return 2;
  const double max_step = narrowest / static_cast<double>(options.min_points_per_fwhm);
  return static_cast<std::size_t>(std::ceil((delta_max - delta_min) / max_step)) + 1;
}

}  // namespace optomech::spectral
