#include "optomech/cli/app.hpp"

#include <cstdlib>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "commands.hpp"
#include "optomech/errors.hpp"

namespace optomech::cli {

namespace {

struct Options {
  std::string config;
  std::string preset;
  std::string out;
  std::optional<std::size_t> points;
  std::vector<double> range;
  std::vector<double> at;
  bool reference_off = false;
  bool dump_config = false;
  std::vector<std::string> sets;
  std::vector<std::string> unsets;
  std::vector<std::string> grid;
};

void add_common(CLI::App& cmd, Options& o) {
  auto* config = cmd.add_option("--config", o.config, "Scenario TOML file");
  auto* preset = cmd.add_option("--preset", o.preset, "Built-in scenario")
                     ->check(CLI::IsMember(preset_names()));
  config->excludes(preset);
  cmd.add_option("--out", o.out, "Output path (default: stdout)");
  cmd.add_option("--set", o.sets, "Override a scenario value, KEY=VALUE (dotted key)");
  cmd.add_option("--unset", o.unsets, "Remove a scenario key (dotted key)");
  cmd.add_flag("--dump-config", o.dump_config, "Print the resolved scenario as TOML and exit");
}

void add_range(CLI::App& cmd, Options& o) {
  cmd.add_option("--points", o.points, "Number of grid points")->check(CLI::PositiveNumber);
  cmd.add_option("--range", o.range, "Detuning range A,B in units of omega_m")
      ->delimiter(',')
      ->expected(2);
  cmd.add_flag("--reference-off", o.reference_off, "Switch the coupling field off");
}

toml::table load_document(const Options& o) {
  toml::table doc;
  if (!o.config.empty()) {
    doc = parse_config_file(o.config);
  } else if (!o.preset.empty()) {
    doc = parse_config_text(*preset_text(o.preset));
  } else {
    throw ConfigError("one of --config or --preset is required");
  }
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects KEY=VALUE, got '" + s + "'");
    set_value(doc, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& u : o.unsets) unset_value(doc, u);
  return doc;
}

unsigned thread_count() {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const char* env = std::getenv("OPTOMECH_EIT_THREADS");
  if (!env || !*env) return hw;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1) {
    throw ConfigError(std::string("OPTOMECH_EIT_THREADS must be a positive integer, got '") + env + "'");
  }
  return static_cast<unsigned>(std::min<long>(v, 1024));
}

int classify(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ModelError*>(&e)) {
    return kUsageError;
  }
  if (const auto* s = dynamic_cast<const SpectralError*>(&e)) {
    return s->code() == SpectralErrc::DivergentGroupVelocity ? kRuntimeError : kUsageError;
  }
  if (const auto* d = dynamic_cast<const DynamicsError*>(&e)) {
    return d->code() == DynamicsErrc::InvalidProtocol || d->code() == DynamicsErrc::InvalidOptions
               ? kUsageError
               : kRuntimeError;
  }
  return kRuntimeError;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multi-membrane cavity optomechanics: EIT spectra, group velocity, pulse storage",
               "optomech-eit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", OPTOMECH_EIT_VERSION);

  Options o;
  auto* spectrum = app.add_subcommand("spectrum", "Probe quadratures and v_g/c over a detuning grid");
  auto* groupvel = app.add_subcommand("groupvel", "Group velocity at --at points or over the grid");
  auto* windows = app.add_subcommand("windows", "Detected transparency windows");
  auto* storage = app.add_subcommand("storage", "Pulse storage and retrieval time series");
  auto* sweep = app.add_subcommand("sweep", "Response at --at points over a parameter grid");
  for (auto* cmd : {spectrum, groupvel, windows, storage, sweep}) add_common(*cmd, o);
  for (auto* cmd : {spectrum, groupvel, windows, sweep}) add_range(*cmd, o);
  for (auto* cmd : {groupvel, sweep}) {
    cmd->add_option("--at", o.at, "Detunings in units of omega_m")->delimiter(',');
  }
  storage->add_option("--points", o.points, "Number of reported time points")
      ->check(CLI::PositiveNumber);
  sweep->add_option("--grid", o.grid, "Grid axis KEY=START:STOP:COUNT (repeatable)")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  CLI::App* cmd = app.get_subcommands().front();
  const std::string name = cmd->get_name();
  std::string text;
  try {
    toml::table doc = load_document(o);
    if (!o.range.empty()) set_numbers(doc, "spectrum.range", o.range);
    if (o.points) {
      set_integer(doc, name == "storage" ? "integrator.report_points" : "spectrum.points",
                  static_cast<std::int64_t>(*o.points));
    }
    if (!o.at.empty()) set_numbers(doc, "groupvel.at", o.at);
    const Scenario sc = parse_scenario(doc);

    if (o.dump_config) {
      std::ostringstream os;
      os << doc << '\n';
      text = os.str();
    } else {
      detail::RunContext ctx;
      ctx.threads = thread_count();
      ctx.reference_off = o.reference_off;
      ctx.warnings = &err;
      if (name == "spectrum") {
        text = detail::spectrum_csv(sc, ctx);
      } else if (name == "groupvel") {
        text = detail::groupvel_csv(sc, ctx);
      } else if (name == "windows") {
        text = detail::windows_csv(sc, ctx);
      } else if (name == "storage") {
        text = detail::storage_csv(sc, ctx);
      } else {
        std::vector<detail::GridAxis> axes;
        for (const auto& g : o.grid) axes.push_back(detail::parse_grid_axis(g));
        text = detail::sweep_csv(doc, axes, ctx);
      }
    }
  } catch (const SpectralError& e) {
    err << "error: " << e.what();
    if (e.required_points()) err << " (need at least " << *e.required_points() << " points)";
    err << '\n';
    return classify(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return classify(e);
  }

  if (o.out.empty()) {
    out << text;
    return kSuccess;
  }
  std::ofstream file(o.out, std::ios::binary | std::ios::trunc);
  if (!file || !(file << text) || !file.flush()) {
    err << "error: cannot write " << o.out << '\n';
    return kRuntimeError;
  }
  return kSuccess;
}

}  // namespace optomech::cli
