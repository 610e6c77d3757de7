#include "optomech/cli/scenario.hpp"

#include <charconv>
#include <cmath>

#include "optomech/errors.hpp"

namespace optomech::cli {

namespace {

const toml::table* optional_table(const toml::table& doc, std::string_view name) {
  const toml::node* node = doc.get(name);
  if (!node) return nullptr;
  const toml::table* t = node->as_table();
  if (!t) throw ConfigError("[" + std::string(name) + "] must be a table");
  return t;
}

std::size_t positive_count(SectionReader& r, std::string_view key, std::size_t fallback) {
  const auto v = r.integer(key);
  if (!v) return fallback;
  if (*v <= 0) throw ConfigError(r.path() + "." + std::string(key) + " must be a positive integer");
  return static_cast<std::size_t>(*v);
}

double positive(SectionReader& r, std::string_view key, double fallback) {
  const auto v = r.number(key);
  if (!v) return fallback;
  if (!(*v > 0.0)) throw ConfigError(r.path() + "." + std::string(key) + " must be positive");
  return *v;
}

// 0 selects the library default
double non_negative(SectionReader& r, std::string_view key, double fallback) {
  const auto v = r.number(key);
  if (!v) return fallback;
  if (*v < 0.0) throw ConfigError(r.path() + "." + std::string(key) + " must not be negative");
  return *v;
}

double required(SectionReader& r, std::string_view key) {
  const auto v = r.number(key);
  if (!v) throw ConfigError(r.path() + "." + std::string(key) + " is required");
  return *v;
}

std::vector<std::string> split(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t dot = path.find('.', start);
    parts.emplace_back(path.substr(start, dot - start));
    if (parts.back().empty()) throw ConfigError("malformed key path: " + std::string(path));
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return parts;
}

std::optional<std::size_t> as_index(const std::string& s) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Walks to the table that owns the last path component, creating tables on the way.
toml::table& parent_of(toml::table& doc, const std::vector<std::string>& parts,
                       std::string_view path) {
  toml::table* current = &doc;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* node = current->get(parts[i]);
    if (node && node->is_array()) {
      toml::array& arr = *node->as_array();
      const auto idx = as_index(parts[i + 1]);
      if (!idx || *idx == 0 || *idx > arr.size() || !arr.get(*idx - 1)->is_table()) {
        throw ConfigError("key path " + std::string(path) + ": '" + parts[i] +
                          "' needs a 1-based index of an existing entry");
      }
      if (i + 2 >= parts.size()) {
        throw ConfigError("key path " + std::string(path) + " names a table, not a value");
      }
      current = arr.get(*idx - 1)->as_table();
      ++i;
      continue;
    }
    if (!node) {
      current->insert(parts[i], toml::table{});
      node = current->get(parts[i]);
    }
    if (!node->is_table()) {
      throw ConfigError("key path " + std::string(path) + ": '" + parts[i] + "' is not a table");
    }
    current = node->as_table();
  }
  return *current;
}

}  // namespace

dynamics::PulseProtocol Scenario::pulse_protocol(const SystemModel& model) const {
  if (!protocol) throw ConfigError("storage needs a [protocol] section");
  dynamics::PulseProtocol p;
  p.eps_p_peak = model.eps_p();
  p.eps_L_peak = model.eps_L();
  p.tau_p = protocol->tau_p;
  p.tau_L = protocol->tau_L;
  p.t_wr = protocol->t_wr;
  p.t_rd = protocol->t_rd;
  p.t_end = protocol->t_end;
  p.delta = protocol->delta;
  return p;
}

Scenario parse_scenario(const toml::table& doc) {
  check_sections(doc, {"reference", "cavity", "membrane", "drive", "spectrum", "groupvel",
                       "windows", "protocol", "integrator"});
  Scenario sc;
  sc.system = parse_system_config(doc);
  if (sc.system.omega_ref) {
    sc.omega_m = *sc.system.omega_ref;
  } else {
    double sum = 0.0;
    for (const auto& m : sc.system.membranes) sum += m.omega;
    sc.omega_m = sum / static_cast<double>(sc.system.membranes.size());
  }
  if (!(sc.omega_m > 0.0) || !std::isfinite(sc.omega_m)) {
    throw ConfigError("reference frequency must be positive");
  }

  if (const auto* t = optional_table(doc, "spectrum")) {
    SectionReader r(*t, "spectrum");
    if (auto range = r.numbers("range")) {
      if (range->size() != 2) throw ConfigError("spectrum.range must have two entries");
      sc.range_lo = (*range)[0];
      sc.range_hi = (*range)[1];
    }
    sc.points = positive_count(r, "points", sc.points);
    r.finish();
  }
  if (!(sc.range_lo < sc.range_hi) || !std::isfinite(sc.range_lo) || !std::isfinite(sc.range_hi)) {
    throw ConfigError("spectrum.range must be increasing and finite");
  }
  if (sc.points < 2) throw ConfigError("spectrum.points must be at least 2");

  if (const auto* t = optional_table(doc, "groupvel")) {
    SectionReader r(*t, "groupvel");
    if (auto at = r.numbers("at")) sc.at = *at;
    r.finish();
  }

  if (const auto* t = optional_table(doc, "windows")) {
    SectionReader r(*t, "windows");
    sc.windows.depth_ratio = positive(r, "depth_ratio", sc.windows.depth_ratio);
    sc.windows.center_tolerance_kappa =
        positive(r, "center_tolerance_kappa", sc.windows.center_tolerance_kappa);
    sc.windows.min_points_per_fwhm =
        positive_count(r, "min_points_per_fwhm", sc.windows.min_points_per_fwhm);
    r.finish();
  }

  if (const auto* t = optional_table(doc, "protocol")) {
    SectionReader r(*t, "protocol");
    ProtocolSpec p;
    p.tau_p = required(r, "tau_p_s");
    p.tau_L = required(r, "tau_L_s");
    p.t_wr = required(r, "t_wr_s");
    p.t_rd = required(r, "t_rd_s");
    p.t_end = required(r, "t_end_s");
    const auto d_abs = r.number("delta_rad_s");
    const auto d_rel = r.number("delta_over_omega_m");
    const auto addr = r.integer("address_membrane");
    if ((d_abs ? 1 : 0) + (d_rel ? 1 : 0) + (addr ? 1 : 0) != 1) {
      throw ConfigError("protocol: give exactly one of delta_rad_s, delta_over_omega_m, address_membrane");
    }
    if (d_abs) p.delta = *d_abs;
    if (d_rel) p.delta = *d_rel * sc.omega_m;
    if (addr) {
      if (*addr < 1 || static_cast<std::size_t>(*addr) > sc.system.membranes.size()) {
        throw ConfigError("protocol.address_membrane must name an existing membrane (1-based)");
      }
      p.delta = sc.system.membranes[static_cast<std::size_t>(*addr) - 1].omega;
    }
    r.finish();
    sc.protocol = p;
  }

  if (const auto* t = optional_table(doc, "integrator")) {
    SectionReader r(*t, "integrator");
    if (auto m = r.string("method")) {
      if (*m == "adaptive") {
        sc.integrator.method = dynamics::Method::adaptive;
      } else if (*m == "fixed_rk4") {
        sc.integrator.method = dynamics::Method::fixed_rk4;
      } else {
        throw ConfigError("integrator.method must be \"adaptive\" or \"fixed_rk4\"");
      }
    }
    sc.integrator.rel_tol = positive(r, "rel_tol", sc.integrator.rel_tol);
    sc.integrator.abs_tol = non_negative(r, "abs_tol", sc.integrator.abs_tol);
    sc.integrator.max_step = non_negative(r, "max_step_s", sc.integrator.max_step);
    sc.integrator.fixed_step = positive(r, "fixed_step_s", sc.integrator.fixed_step);
    sc.integrator.report_points = positive_count(r, "report_points", sc.integrator.report_points);
    if (auto b = r.boolean("track_minus_block")) sc.integrator.track_minus_block = *b;
    r.finish();
  }
  return sc;
}

void set_value(toml::table& doc, std::string_view path, std::string_view value_text) {
  const auto parts = split(path);
  toml::table& parent = parent_of(doc, parts, path);
  toml::table parsed;
  try {
    parsed = toml::parse("v = " + std::string(value_text));
  } catch (const toml::parse_error&) {
    parsed.insert("v", std::string(value_text));
  }
  parent.insert_or_assign(parts.back(), std::move(*parsed.get("v")));
}

void set_number(toml::table& doc, std::string_view path, double value) {
  const auto parts = split(path);
  parent_of(doc, parts, path).insert_or_assign(parts.back(), value);
}

void set_integer(toml::table& doc, std::string_view path, std::int64_t value) {
  const auto parts = split(path);
  parent_of(doc, parts, path).insert_or_assign(parts.back(), value);
}

void set_numbers(toml::table& doc, std::string_view path, const std::vector<double>& values) {
  const auto parts = split(path);
  toml::array arr;
  for (double v : values) arr.push_back(v);
  parent_of(doc, parts, path).insert_or_assign(parts.back(), std::move(arr));
}

void unset_value(toml::table& doc, std::string_view path) {
  const auto parts = split(path);
  toml::table& parent = parent_of(doc, parts, path);
  if (!parent.erase(parts.back())) throw ConfigError("no such key: " + std::string(path));
}

}  // namespace optomech::cli
