#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <toml.hpp>

#include "optomech/cli/scenario.hpp"

namespace optomech::cli::detail {

struct RunContext {
  unsigned threads = 1;
  bool reference_off = false;
  std::ostream* warnings = nullptr;
};

struct GridAxis {
  std::string key;
  double start = 0.0;
  double stop = 0.0;
  std::size_t count = 1;

  double value(std::size_t i) const;
};

/// Parses KEY=START:STOP:COUNT. Throws ConfigError.
GridAxis parse_grid_axis(const std::string& text);

std::string spectrum_csv(const Scenario& sc, const RunContext& ctx);
std::string groupvel_csv(const Scenario& sc, const RunContext& ctx);
std::string windows_csv(const Scenario& sc, const RunContext& ctx);
std::string storage_csv(const Scenario& sc, const RunContext& ctx);
std::string sweep_csv(const toml::table& doc, const std::vector<GridAxis>& axes,
                      const RunContext& ctx);

}  // namespace optomech::cli::detail
