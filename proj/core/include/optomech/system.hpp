#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace optomech {

// All frequencies and rates are angular (rad/s); times in s; powers in W.

inline constexpr double kHbar = 1.054571817e-34;        // J s
inline constexpr double kSpeedOfLight = 299792458.0;    // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double hz_to_rad_s(double hz) noexcept { return kTwoPi * hz; }
constexpr double rad_s_to_hz(double w) noexcept { return w / kTwoPi; }

/// Angular frequency of light with vacuum wavelength `lambda` (m).
double optical_angular_frequency(double lambda);

/// One mechanical membrane mode. `g` is the rescaled single-photon coupling
/// g_n = g_n0 * sqrt(hbar / (m_n * omega_n)).
struct MembraneMode {
  double omega = 0.0;
  double gamma = 0.0;
  double g = 0.0;

  /// Builds a mode from effective mass (kg), frequency, damping and the bare
  /// cavity-frequency slope g0 = d(omega_0)/dq (rad/s per m).
  static MembraneMode from_physical(double mass, double omega, double gamma, double g0);
};

struct CavityParams {
  double kappa = 0.0;      ///< amplitude decay rate
  double delta_eff = 0.0;  ///< coupling-laser detuning incl. static radiation-pressure shift
  double omega_c = 0.0;    ///< coupling-laser frequency, only used for power -> eps_L
};

/// Exactly one of `coupling_power` and `eps_L` must be set. `eps_p` shares the
/// units of `eps_L` (s^-1).
struct DriveParams {
  std::optional<double> coupling_power;
  std::optional<double> eps_L;
  double eps_p = 0.0;
};

/// eps_L = sqrt(2 kappa P / (hbar omega_c)).
double coupling_rate_from_power(double power, double kappa, double omega_c);

/// Resolves the drive to eps_L, validating the one-of rule.
double resolve_coupling_rate(const CavityParams& cavity, const DriveParams& drive);

/// c0 = eps_L / (kappa + i Delta).
std::complex<double> steady_intracavity_amplitude(const CavityParams& cavity, double eps_L);

/// Validated cavity + N-membrane parameter set with its derived quantities.
/// Immutable once built.
class SystemModel {
 public:
  const CavityParams& cavity() const noexcept { return cavity_; }
  double kappa() const noexcept { return cavity_.kappa; }
  double delta_eff() const noexcept { return cavity_.delta_eff; }

  std::span<const MembraneMode> membranes() const noexcept { return membranes_; }
  const MembraneMode& membrane(std::size_t n) const { return membranes_.at(n); }
  std::size_t size() const noexcept { return membranes_.size(); }

  const DriveParams& drive() const noexcept { return drive_; }
  double eps_L() const noexcept { return eps_L_; }
  double eps_p() const noexcept { return drive_.eps_p; }

  std::complex<double> c0() const noexcept { return c0_; }
  /// G_n = g_n |c0|.
  std::span<const double> effective_couplings() const noexcept { return G_; }
  double effective_coupling(std::size_t n) const { return G_.at(n); }
  double omega_mean() const noexcept { return omega_mean_; }

  /// sqrt(2) G_n < kappa
  bool weak_coupling(std::size_t n) const { return weak_.at(n) != 0; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  friend SystemModel build_system(CavityParams, std::vector<MembraneMode>, DriveParams);
  SystemModel() = default;

  CavityParams cavity_;
  std::vector<MembraneMode> membranes_;
  DriveParams drive_;
  double eps_L_ = 0.0;
  std::complex<double> c0_;
  std::vector<double> G_;
  std::vector<char> weak_;
  double omega_mean_ = 0.0;
  std::vector<std::string> warnings_;
};

/// Validates parameters and derives c0, G_n and the mean membrane frequency.
/// Throws ModelError. Advisory conditions (gamma_n >= 0.1 kappa, unresolved
/// sidebands, strong probe) are recorded in warnings() instead.
SystemModel build_system(CavityParams cavity, std::vector<MembraneMode> membranes,
                         DriveParams drive);

}  // namespace optomech
