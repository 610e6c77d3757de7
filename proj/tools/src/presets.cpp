#include <array>
#include <string>
#include <utility>

#include "optomech/cli/scenario.hpp"

namespace optomech::cli {

namespace {

constexpr std::string_view kBase = R"([reference]
omega_hz = 134000.0

[cavity]
kappa_over_omega_ref = 0.2
delta_eff_over_omega_ref = 1.0
wavelength_m = 1.064e-6

[drive]
coupling_power_w = 4e-8
eps_p_over_eps_L = 0.001

[spectrum]
range = [0.8, 1.2]
points = 4001
)";

std::string membranes(std::initializer_list<std::pair<double, double>> modes,
                      std::string_view coupling_key) {
  std::string out;
  for (const auto& [omega, coupling] : modes) {
    out += "\n[[membrane]]\nomega_over_omega_ref = " + std::to_string(omega) +
           "\ngamma_hz = 0.12\n" + std::string(coupling_key) + " = " + std::to_string(coupling) +
           "\n";
  }
  return out;
}

constexpr std::string_view kStorage = R"(
[protocol]
tau_p_s = 0.0006
tau_L_s = 0.0006
t_wr_s = 0.003
t_rd_s = 0.009
t_end_s = 0.012
)";

struct Preset {
  std::string_view name;
  std::string text;
};

const std::array<Preset, 7>& presets() {
  static const std::array<Preset, 7> table = [] {
    const std::string base(kBase);
    return std::array<Preset, 7>{{
        {"fig2", base + "\n[groupvel]\nat = [1.05, 0.95]\n" +
                     membranes({{1.05, 0.4}, {0.95, 0.4}}, "G_over_kappa")},
        {"fig3", base + "\n[groupvel]\nat = [1.05, 1.0, 0.95]\n" +
                     membranes({{1.05, 0.4}, {1.0, 0.4}, {0.95, 0.4}}, "G_over_kappa")},
        {"fig4", base + "\n[groupvel]\nat = [1.1, 1.05, 0.95, 0.9]\n" +
                     membranes({{1.05, 0.4}, {0.95, 0.4}, {1.1, 0.4}, {0.9, 0.4}}, "G_over_kappa")},
        {"fig6", base + "\n[groupvel]\nat = [1.05, 1.0, 0.95]\n" +
                     membranes({{1.05, 0.2}, {1.0, 0.4}, {0.95, 0.7}}, "G_over_kappa")},
        {"fig7", base + "\n[groupvel]\nat = [1.05, 0.95]\n" +
                     membranes({{1.05, 0.4}, {0.95, 0.4}, {0.95, 0.4}, {0.95, 0.4}},
                               "G_over_kappa")},
        {"fig8", base + std::string(kStorage) + "address_membrane = 1\n" +
                     membranes({{1.05, 0.0008}, {0.95, 0.0008}}, "g_over_kappa")},
        {"fig9", base + std::string(kStorage) + "address_membrane = 2\n" +
                     membranes({{1.05, 0.0008}, {0.95, 0.0008}}, "g_over_kappa")},
    }};
  }();
  return table;
}

}  // namespace

std::vector<std::string_view> preset_names() {
  std::vector<std::string_view> names;
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

std::optional<std::string_view> preset_text(std::string_view name) {
  for (const auto& p : presets()) {
    if (p.name == name) return std::string_view(p.text);
  }
  return std::nullopt;
}

}  // namespace optomech::cli
