#pragma once

#include <vector>

#include "optomech/dynamics.hpp"
#include "optomech/system.hpp"

namespace bench {

inline const double kOmegaM = optomech::hz_to_rad_s(134e3);
inline const double kKappa = kOmegaM / 5.0;

// N membranes spread over [0.9, 1.1] omega_m, G = 0.4 kappa each
inline optomech::SystemModel membranes(int n) {
  using namespace optomech;
  const CavityParams cavity{kKappa, kOmegaM, optical_angular_frequency(1064e-9)};
  DriveParams drive;
  drive.coupling_power = 0.04e-6;
  const double eps_L = resolve_coupling_rate(cavity, drive);
  drive.eps_p = 1e-3 * eps_L;
  const double c0 = std::abs(steady_intracavity_amplitude(cavity, eps_L));
  std::vector<MembraneMode> ms;
  for (int k = 0; k < n; ++k) {
    const double x = n == 1 ? 1.0 : 0.9 + 0.2 * k / (n - 1);
    ms.push_back({x * kOmegaM, hz_to_rad_s(0.12), 0.4 * kKappa / c0});
  }
  return build_system(cavity, ms, drive);
}

inline optomech::SystemModel storage_system() {
  using namespace optomech;
  const CavityParams cavity{kKappa, kOmegaM, optical_angular_frequency(1064e-9)};
  DriveParams drive;
  drive.coupling_power = 0.04e-6;
  drive.eps_p = 1e-3 * resolve_coupling_rate(cavity, drive);
  std::vector<MembraneMode> ms{{1.05 * kOmegaM, hz_to_rad_s(0.12), 0.0008 * kKappa},
                               {0.95 * kOmegaM, hz_to_rad_s(0.12), 0.0008 * kKappa}};
  return build_system(cavity, ms, drive);
}

inline optomech::dynamics::PulseProtocol storage_protocol(const optomech::SystemModel& sys) {
  optomech::dynamics::PulseProtocol p;
  p.eps_p_peak = sys.eps_p();
  p.eps_L_peak = sys.eps_L();
  p.tau_p = p.tau_L = 0.6e-3;
  p.t_wr = 3e-3;
  p.t_rd = 9e-3;
  p.t_end = 12e-3;
  p.delta = sys.membrane(0).omega;
  return p;
}

}  // namespace bench
