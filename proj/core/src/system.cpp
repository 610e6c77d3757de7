#include "optomech/system.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

namespace {

void require_finite(double value, const std::string& name) {
  if (!std::isfinite(value)) {
    throw ModelError(ModelErrc::NonFiniteValue, name, name + " is not finite");
  }
}

void require_positive(double value, const std::string& name) {
  require_finite(value, name);
  if (!(value > 0.0)) {
    std::ostringstream os;
    os << name << " must be positive (got " << value << ")";
    throw ModelError(ModelErrc::NonPositiveRate, name, os.str());
  }
}

void require_non_negative(double value, const std::string& name) {
  require_finite(value, name);
  if (value < 0.0) {
    std::ostringstream os;
    os << name << " must be non-negative (got " << value << ")";
    throw ModelError(ModelErrc::NonPositiveRate, name, os.str());
  }
}

std::string indexed(const char* field, std::size_t n) {
  return "membrane[" + std::to_string(n + 1) + "]." + field;
}

}  // namespace

double optical_angular_frequency(double lambda) {
  return kTwoPi * kSpeedOfLight / lambda;
}

MembraneMode MembraneMode::from_physical(double mass, double omega, double gamma, double g0) {
  require_positive(mass, "mass");
  require_positive(omega, "omega");
  return {omega, gamma, g0 * std::sqrt(kHbar / (mass * omega))};
}

double coupling_rate_from_power(double power, double kappa, double omega_c) {
  return std::sqrt(2.0 * kappa * power / (kHbar * omega_c));
}

double resolve_coupling_rate(const CavityParams& cavity, const DriveParams& drive) {
  if (drive.coupling_power && drive.eps_L) {
    throw ModelError(ModelErrc::OverdeterminedDrive, "drive",
                     "drive: give either coupling_power or eps_L, not both");
  }
  if (drive.coupling_power) {
    require_non_negative(*drive.coupling_power, "coupling_power");
    require_positive(cavity.kappa, "kappa");
    require_positive(cavity.omega_c, "omega_c");
    return coupling_rate_from_power(*drive.coupling_power, cavity.kappa, cavity.omega_c);
  }
  if (drive.eps_L) {
    require_non_negative(*drive.eps_L, "eps_L");
    return *drive.eps_L;
  }
  throw ModelError(ModelErrc::UnderdeterminedDrive, "drive",
                   "drive: one of coupling_power or eps_L is required");
}

std::complex<double> steady_intracavity_amplitude(const CavityParams& cavity, double eps_L) {
  return eps_L / std::complex<double>(cavity.kappa, cavity.delta_eff);
}

SystemModel build_system(CavityParams cavity, std::vector<MembraneMode> membranes,
                         DriveParams drive) {
  if (membranes.empty()) {
    throw ModelError(ModelErrc::EmptyMembraneList, "membranes",
                     "at least one membrane is required");
  }
  require_positive(cavity.kappa, "kappa");
  require_positive(cavity.omega_c, "omega_c");
  require_finite(cavity.delta_eff, "delta_eff");
  for (std::size_t n = 0; n < membranes.size(); ++n) {
    require_positive(membranes[n].omega, indexed("omega", n));
    require_positive(membranes[n].gamma, indexed("gamma", n));
    require_non_negative(membranes[n].g, indexed("g", n));
  }
  require_finite(drive.eps_p, "eps_p");

  SystemModel sys;
  sys.eps_L_ = resolve_coupling_rate(cavity, drive);
  sys.cavity_ = cavity;
  sys.drive_ = drive;
  sys.c0_ = steady_intracavity_amplitude(cavity, sys.eps_L_);

  const double amp = std::abs(sys.c0_);
  sys.G_.reserve(membranes.size());
  sys.weak_.reserve(membranes.size());
  for (const auto& m : membranes) {
    const double G = m.g * amp;
    sys.G_.push_back(G);
    sys.weak_.push_back(std::sqrt(2.0) * G < cavity.kappa ? 1 : 0);
  }
  sys.omega_mean_ =
      std::accumulate(membranes.begin(), membranes.end(), 0.0,
                      [](double acc, const MembraneMode& m) { return acc + m.omega; }) /
      static_cast<double>(membranes.size());

  for (std::size_t n = 0; n < membranes.size(); ++n) {
    if (membranes[n].gamma >= 0.1 * cavity.kappa) {
      sys.warnings_.push_back(indexed("gamma", n) +
                              " >= 0.1 kappa; the gamma << kappa regime is assumed");
    }
  }
  if (cavity.kappa >= sys.omega_mean_) {
    sys.warnings_.push_back("kappa >= mean membrane frequency: not in the resolved-sideband regime");
  }
  if (std::abs(drive.eps_p) >= 0.1 * sys.eps_L_ && drive.eps_p != 0.0) {
    sys.warnings_.push_back("probe is not much weaker than the coupling field (|eps_p| >= 0.1 eps_L)");
  }

  sys.membranes_ = std::move(membranes);
  return sys;
}

}  // namespace optomech
