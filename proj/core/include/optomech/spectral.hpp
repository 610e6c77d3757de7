#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "optomech/system.hpp"

/// Closed-form steady-state probe response of the N-membrane cavity.
///
/// The output coefficient at the probe frequency is evaluated in the
/// resolved-sideband, near-resonance form
///
///   eps_out+(delta) = 2 kappa / D(delta),
///   D(delta) = kappa - i (delta - omega_m)
///              + sum_n (G_n^2 / 2) / (gamma_n / 2 - i (delta - omega_n)),
///
/// with omega_m the arithmetic mean of the membrane frequencies. The exact
/// linear response (no resonance approximations) is available from
/// dynamics::exact_linear_response.
namespace optomech::spectral {

struct ProbeResponse {
  double delta = 0.0;                ///< probe - coupling detuning (rad/s)
  std::complex<double> eps_out_plus; ///< dimensionless output coefficient
  double v_p = 0.0;                  ///< in-phase quadrature, Re(eps_out_plus)
  double v_tilde_p = 0.0;            ///< out-of-phase quadrature, Im(eps_out_plus)
};

struct TransparencyWindow {
  double center_delta = 0.0;   ///< refined local minimum of v_p (rad/s)
  double depth = 0.0;          ///< v_p at the minimum
  double fwhm_measured = 0.0;  ///< rad/s
  double fwhm_analytic = 0.0;  ///< gamma_n + sum G^2 / kappa of the nearest frequency group (rad/s)
  std::size_t membrane = 0;    ///< index of the membrane nearest center_delta
  double local_max = 0.0;      ///< reference level the dip is measured against
};

/// Detection knobs. Defaults follow the documented procedure; all are overridable.
struct WindowOptions {
  double depth_ratio = 0.5;             ///< a dip counts if depth < depth_ratio * local max
  double center_tolerance_kappa = 1e-6; ///< golden-section tolerance in units of kappa
  std::size_t min_points_per_fwhm = 5;  ///< grid density required for every coupled membrane
};

struct SpectrumSweep {
  std::vector<double> grid;
  std::vector<ProbeResponse> responses;
  std::vector<TransparencyWindow> windows;
};

struct SweepOptions {
  unsigned threads = 1;
  WindowOptions windows;
};

ProbeResponse probe_response(const SystemModel& system, double delta);

/// d(eps_out+)/d(delta), in 1/(rad/s), from the closed form -2 kappa D'/D^2.
std::complex<double> response_derivative(const SystemModel& system, double delta);

/// v_g / c = 1 / (1 + v~_p / 2 + (delta / 2) dv~_p/d(delta)), with delta in rad/s.
/// Throws SpectralError(DivergentGroupVelocity) when the denominator is below 1e-12.
double group_velocity(const SystemModel& system, double delta);

/// `points` equally spaced detunings from delta_min to delta_max inclusive.
/// Throws SpectralError(InvalidGrid).
std::vector<double> uniform_grid(double delta_min, double delta_max, std::size_t points);

/// Uniform grid over [delta_min, delta_max]; windows filled by find_transparency_windows.
SpectrumSweep sweep_spectrum(const SystemModel& system, double delta_min, double delta_max,
                             std::size_t points, const SweepOptions& options = {});

/// Evaluates the quadratures on an arbitrary strictly increasing grid.
SpectrumSweep evaluate_spectrum(const SystemModel& system, std::vector<double> grid,
                                unsigned threads = 1);

std::vector<TransparencyWindow> find_transparency_windows(const SystemModel& system,
                                                          const SpectrumSweep& sweep,
                                                          const WindowOptions& options = {});

/// gamma_n + G_n^2 / kappa. With `merged`, every membrane sharing omega_n
/// contributes its G^2 (gamma + L G^2 / kappa for L identical membranes).
double fwhm_analytic(const SystemModel& system, std::size_t n, bool merged = false);

/// Grid size over [delta_min, delta_max] that satisfies the window density rule.
std::size_t required_grid_points(const SystemModel& system, double delta_min, double delta_max,
                                 const WindowOptions& options = {});

}  // namespace optomech::spectral
