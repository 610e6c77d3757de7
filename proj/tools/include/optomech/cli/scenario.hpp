#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <toml.hpp>

#include "optomech/config.hpp"
#include "optomech/dynamics.hpp"
#include "optomech/spectral.hpp"

namespace optomech::cli {

// A scenario document is a system configuration plus optional command blocks:
//
//   [spectrum]   range = [0.8, 1.2]   points = 4001        # range in units of omega_m
//   [groupvel]   at = [1.05, 0.95]                         # units of omega_m
//   [windows]    depth_ratio, center_tolerance_kappa, min_points_per_fwhm
//   [protocol]   tau_p_s, tau_L_s, t_wr_s, t_rd_s, t_end_s and one of
//                delta_rad_s | delta_over_omega_m | address_membrane (1-based)
//   [integrator] method = "adaptive" | "fixed_rk4", rel_tol, abs_tol, max_step_s,
//                fixed_step_s, report_points, track_minus_block
//
// omega_m is [reference] omega when present, otherwise the mean membrane frequency.

struct ProtocolSpec {
  double tau_p = 0.0;
  double tau_L = 0.0;
  double t_wr = 0.0;
  double t_rd = 0.0;
  double t_end = 0.0;
  double delta = 0.0;  ///< rad/s, resolved
};

struct Scenario {
  SystemConfig system;
  double omega_m = 0.0;  ///< detuning axis unit (rad/s)

  double range_lo = 0.8;
  double range_hi = 1.2;
  std::size_t points = 4001;
  std::vector<double> at;  ///< units of omega_m

  spectral::WindowOptions windows;
  std::optional<ProtocolSpec> protocol;
  dynamics::IntegratorOptions integrator;

  dynamics::PulseProtocol pulse_protocol(const SystemModel& model) const;
};

/// Throws ConfigError / ModelError.
Scenario parse_scenario(const toml::table& doc);

/// Assigns `value_text` (any TOML value; bare words are taken as strings) at a
/// dotted path such as "cavity.kappa_hz" or "membrane.2.G_over_kappa".
void set_value(toml::table& doc, std::string_view path, std::string_view value_text);
void set_number(toml::table& doc, std::string_view path, double value);
void set_integer(toml::table& doc, std::string_view path, std::int64_t value);
void set_numbers(toml::table& doc, std::string_view path, const std::vector<double>& values);
void unset_value(toml::table& doc, std::string_view path);

std::vector<std::string_view> preset_names();
/// TOML text of a built-in preset, or nullopt.
std::optional<std::string_view> preset_text(std::string_view name);

}  // namespace optomech::cli
