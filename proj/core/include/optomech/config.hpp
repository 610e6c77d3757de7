#pragma once

// Configuration documents are TOML:
//
//   [reference]            # optional; enables *_over_omega_ref keys
//   omega_hz = 134e3
//
//   [cavity]
//   kappa_over_omega_ref = 0.2        # or kappa_hz / kappa_rad_s
//   delta_eff_over_omega_ref = 1.0    # or delta_eff_hz / delta_eff_rad_s
//   wavelength_m = 1064e-9            # or omega_c_rad_s
//
//   [[membrane]]                      # repeated, N >= 1
//   omega_over_omega_ref = 1.05       # or omega_hz / omega_rad_s
//   gamma_hz = 0.12                   # or gamma_rad_s / gamma_over_kappa
//   G_over_kappa = 0.4                # or g_hz / g_rad_s / g_over_kappa,
//                                     # or mass_kg + g0_rad_s_per_m
//
//   [drive]
//   coupling_power_w = 0.04e-6        # or eps_L_per_s
//   eps_p_over_eps_L = 1e-3           # or eps_p_per_s (default 0)
//
// `_hz` keys are multiplied by 2 pi; `_rad_s` keys are taken as is. Unknown
// keys are rejected with ConfigError.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "optomech/system.hpp"

namespace optomech {

struct SystemConfig {
  CavityParams cavity;
  std::vector<MembraneMode> membranes;
  DriveParams drive;
  /// Normalisation frequency for delta axes; defaults to the mean membrane frequency.
  std::optional<double> omega_ref;
};

/// Reads one TOML table, tracking consumed keys so leftovers can be rejected.
class SectionReader {
 public:
  SectionReader(const toml::table& table, std::string path);

  bool has(std::string_view key) const;
  std::optional<double> number(std::string_view key);
  std::optional<std::int64_t> integer(std::string_view key);
  std::optional<std::string> string(std::string_view key);
  std::optional<bool> boolean(std::string_view key);
  std::optional<std::vector<double>> numbers(std::string_view key);

  /// Angular-rate quantity `base` given as base_hz (x 2 pi), base_rad_s, or,
  /// when a scale is available, base_over_<scale name>. At most one may appear.
  struct Scale {
    std::string_view suffix;
    std::optional<double> value;
  };
  std::optional<double> rate(std::string_view base, std::initializer_list<Scale> scales = {});

  /// Throws ConfigError naming every key that was never read.
  void finish() const;

  const std::string& path() const noexcept { return path_; }

 private:
  [[noreturn]] void fail(std::string_view key, const std::string& message) const;

  const toml::table& table_;
  std::string path_;
  std::set<std::string, std::less<>> used_;
};

/// Parses [reference], [cavity], [[membrane]] and [drive]. Other top-level
/// sections are ignored here; callers reject them via check_sections().
SystemConfig parse_system_config(const toml::table& doc);

/// Throws ConfigError if `doc` has a top-level key outside `allowed`.
void check_sections(const toml::table& doc, std::initializer_list<std::string_view> allowed);

SystemModel build_system(const SystemConfig& config);

/// Same configuration with the coupling field switched off (eps_L = 0); g_n are kept.
SystemConfig with_coupling_off(SystemConfig config);

toml::table parse_config_file(const std::string& path);
toml::table parse_config_text(std::string_view text);

}  // namespace optomech
