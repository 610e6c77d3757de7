#pragma once

#include <cmath>
#include <complex>
#include <initializer_list>
#include <utility>
#include <vector>

#include "optomech/dynamics.hpp"
#include "optomech/system.hpp"

namespace fixtures {

using namespace optomech;

inline const double kOmegaM = hz_to_rad_s(134e3);
inline const double kKappa = kOmegaM / 5.0;
inline const double kGamma = hz_to_rad_s(0.12);
inline const double kPower = 0.04e-6;
inline const double kLambda = 1064e-9;

inline CavityParams cavity() { return {kKappa, kOmegaM, optical_angular_frequency(kLambda)}; }

inline DriveParams drive(double probe_ratio = 1e-3, double power = kPower) {
  DriveParams d;
  d.coupling_power = power;
  d.eps_p = probe_ratio * coupling_rate_from_power(power, kKappa, cavity().omega_c);
  return d;
}

inline double c0_abs(double power = kPower) {
  return std::abs(steady_intracavity_amplitude(cavity(), coupling_rate_from_power(power, kKappa, cavity().omega_c)));
}

/// Membranes given as (omega / omega_m, G / kappa) at the reference drive.
inline SystemModel with_G(std::initializer_list<std::pair<double, double>> modes,
                          double probe_ratio = 1e-3) {
  std::vector<MembraneMode> ms;
  for (const auto& [w, G] : modes) ms.push_back({w * kOmegaM, kGamma, G * kKappa / c0_abs()});
  return build_system(cavity(), ms, drive(probe_ratio));
}

inline SystemModel two() { return with_G({{1.05, 0.4}, {0.95, 0.4}}); }
inline SystemModel three() { return with_G({{1.05, 0.4}, {1.0, 0.4}, {0.95, 0.4}}); }
inline SystemModel four() { return with_G({{1.05, 0.4}, {0.95, 0.4}, {1.1, 0.4}, {0.9, 0.4}}); }
inline SystemModel unequal() { return with_G({{1.05, 0.2}, {1.0, 0.4}, {0.95, 0.7}}); }
inline SystemModel triple() { return with_G({{1.05, 0.4}, {0.95, 0.4}, {0.95, 0.4}, {0.95, 0.4}}); }

/// Two membranes with g = 0.0008 kappa driven by 0.04 uW.
inline SystemModel storage(double probe_ratio = 1e-3) {
  std::vector<MembraneMode> ms{{1.05 * kOmegaM, kGamma, 0.0008 * kKappa},
                               {0.95 * kOmegaM, kGamma, 0.0008 * kKappa}};
  return build_system(cavity(), ms, drive(probe_ratio));
}

/// Write at 3 ms, read at 9 ms, 0.6 ms Gaussians, 12 ms horizon.
inline dynamics::PulseProtocol storage_protocol(const SystemModel& sys, double delta) {
  dynamics::PulseProtocol p;
  p.eps_p_peak = sys.eps_p();
  p.eps_L_peak = sys.eps_L();
  p.tau_p = 0.6e-3;
  p.tau_L = 0.6e-3;
  p.t_wr = 3e-3;
  p.t_rd = 9e-3;
  p.t_end = 12e-3;
  p.delta = delta;
  return p;
}

inline double rel(std::complex<double> a, std::complex<double> b) { return std::abs(a - b) / std::abs(b); }
inline double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace fixtures
