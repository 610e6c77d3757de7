#include "optomech/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

SectionReader::SectionReader(const toml::table& table, std::string path)
    : table_(table), path_(std::move(path)) {}

void SectionReader::fail(std::string_view key, const std::string& message) const {
  throw ConfigError(path_ + "." + std::string(key) + ": " + message);
}

bool SectionReader::has(std::string_view key) const { return table_.contains(key); }

std::optional<double> SectionReader::number(std::string_view key) {
  const toml::node* node = table_.get(key);
  if (!node) return std::nullopt;
  used_.emplace(key);
  if (!node->is_number()) fail(key, "expected a number");
  const double v = node->value<double>().value();
  if (!std::isfinite(v)) fail(key, "value is not finite");
  return v;
}

std::optional<std::int64_t> SectionReader::integer(std::string_view key) {
  const toml::node* node = table_.get(key);
  if (!node) return std::nullopt;
  used_.emplace(key);
  if (!node->is_integer()) fail(key, "expected an integer");
  return node->value_exact<std::int64_t>().value();
}

std::optional<std::string> SectionReader::string(std::string_view key) {
  const toml::node* node = table_.get(key);
  if (!node) return std::nullopt;
  used_.emplace(key);
  if (!node->is_string()) fail(key, "expected a string");
  return node->value_exact<std::string>().value();
}

std::optional<bool> SectionReader::boolean(std::string_view key) {
  const toml::node* node = table_.get(key);
  if (!node) return std::nullopt;
  used_.emplace(key);
  if (!node->is_boolean()) fail(key, "expected true or false");
  return node->value_exact<bool>().value();
}

std::optional<std::vector<double>> SectionReader::numbers(std::string_view key) {
  const toml::node* node = table_.get(key);
  if (!node) return std::nullopt;
  used_.emplace(key);
  const toml::array* arr = node->as_array();
  if (!arr) fail(key, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(arr->size());
  for (const auto& el : *arr) {
    if (!el.is_number()) fail(key, "expected an array of numbers");
    out.push_back(el.value<double>().value());
  }
  return out;
}

std::optional<double> SectionReader::rate(std::string_view base,
                                          std::initializer_list<Scale> scales) {
  const std::string b(base);
  std::optional<double> result;
  std::string found;
  auto take = [&](const std::string& key, double factor) {
    if (auto v = number(key)) {
      if (result) fail(key, "conflicts with " + found + " (give only one)");
      result = *v * factor;
      found = key;
    }
  };
  take(b + "_hz", kTwoPi);
  take(b + "_rad_s", 1.0);
  for (const auto& s : scales) {
    const std::string key = b + "_over_" + std::string(s.suffix);
    if (!has(key)) continue;
    if (!s.value) fail(key, "requires " + std::string(s.suffix) + " to be defined");
    take(key, *s.value);
  }
  return result;
}

void SectionReader::finish() const {
  std::string unknown;
  for (const auto& [key, node] : table_) {
    (void)node;
    if (!used_.contains(key.str())) {
      if (!unknown.empty()) unknown += ", ";
      unknown += std::string(key.str());
    }
  }
  if (!unknown.empty()) throw ConfigError(path_ + ": unknown key(s): " + unknown);
}

namespace {

const toml::table& require_table(const toml::table& doc, std::string_view name) {
  const toml::node* node = doc.get(name);
  if (!node) throw ConfigError("missing [" + std::string(name) + "] section");
  const toml::table* t = node->as_table();
  if (!t) throw ConfigError("[" + std::string(name) + "] must be a table");
  return *t;
}

}  // namespace

void check_sections(const toml::table& doc, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, node] : doc) {
    (void)node;
    bool ok = false;
    for (auto a : allowed) ok = ok || key.str() == a;
    if (!ok) throw ConfigError("unknown section or key: " + std::string(key.str()));
  }
}

SystemConfig parse_system_config(const toml::table& doc) {
  SystemConfig cfg;

  if (const toml::node* ref = doc.get("reference")) {
    const toml::table* t = ref->as_table();
    if (!t) throw ConfigError("[reference] must be a table");
    SectionReader r(*t, "reference");
    cfg.omega_ref = r.rate("omega");
    if (!cfg.omega_ref) throw ConfigError("reference: omega_hz or omega_rad_s is required");
    r.finish();
  }
  const std::optional<double> omega_ref = cfg.omega_ref;

  {
    SectionReader r(require_table(doc, "cavity"), "cavity");
    auto kappa = r.rate("kappa", {{"omega_ref", omega_ref}});
    if (!kappa) throw ConfigError("cavity: kappa is required");
    cfg.cavity.kappa = *kappa;
    auto delta = r.rate("delta_eff", {{"omega_ref", omega_ref}, {"kappa", kappa}});
    if (!delta) throw ConfigError("cavity: delta_eff is required");
    cfg.cavity.delta_eff = *delta;
    auto omega_c = r.number("omega_c_rad_s");
    auto lambda = r.number("wavelength_m");
    if (omega_c && lambda) throw ConfigError("cavity: give omega_c_rad_s or wavelength_m, not both");
    if (lambda) {
      if (!(*lambda > 0.0)) throw ConfigError("cavity.wavelength_m must be positive");
      cfg.cavity.omega_c = optical_angular_frequency(*lambda);
    } else if (omega_c) {
      cfg.cavity.omega_c = *omega_c;
    } else {
      throw ConfigError("cavity: omega_c_rad_s or wavelength_m is required");
    }
    r.finish();
  }

  double eps_L = 0.0;
  {
    SectionReader r(require_table(doc, "drive"), "drive");
    cfg.drive.coupling_power = r.number("coupling_power_w");
    cfg.drive.eps_L = r.number("eps_L_per_s");
    // ModelError for the one-of rule is raised here so G_over_kappa can use |c0|.
    eps_L = resolve_coupling_rate(cfg.cavity, cfg.drive);
    auto eps_p = r.number("eps_p_per_s");
    auto ratio = r.number("eps_p_over_eps_L");
    if (eps_p && ratio) throw ConfigError("drive: give eps_p_per_s or eps_p_over_eps_L, not both");
    cfg.drive.eps_p = eps_p ? *eps_p : (ratio ? *ratio * eps_L : 0.0);
    r.finish();
  }
  const double c0_abs = std::abs(steady_intracavity_amplitude(cfg.cavity, eps_L));

  const toml::node* mnode = doc.get("membrane");
  if (!mnode) throw ConfigError("at least one [[membrane]] entry is required");
  const toml::array* arr = mnode->as_array();
  if (!arr || !arr->is_array_of_tables()) throw ConfigError("membrane must be an array of tables ([[membrane]])");
  std::size_t index = 0;
  for (const auto& el : *arr) {
    ++index;
    SectionReader r(*el.as_table(), "membrane[" + std::to_string(index) + "]");
    const std::optional<double> kappa = cfg.cavity.kappa;
    MembraneMode m;
    auto omega = r.rate("omega", {{"omega_ref", omega_ref}});
    if (!omega) throw ConfigError(r.path() + ": omega is required");
    m.omega = *omega;
    auto gamma = r.rate("gamma", {{"kappa", kappa}});
    if (!gamma) throw ConfigError(r.path() + ": gamma is required");
    m.gamma = *gamma;

    int given = 0;
    if (auto g = r.rate("g", {{"kappa", kappa}})) {
      m.g = *g;
      ++given;
    }
    if (auto G = r.number("G_over_kappa")) {
      if (*G != 0.0 && c0_abs == 0.0) {
        throw ConfigError(r.path() + ".G_over_kappa: needs a non-zero coupling field (|c0| = 0)");
      }
      m.g = *G == 0.0 ? 0.0 : *G * cfg.cavity.kappa / c0_abs;
      ++given;
    }
    auto mass = r.number("mass_kg");
    auto g0 = r.number("g0_rad_s_per_m");
    if (mass || g0) {
      if (!(mass && g0)) throw ConfigError(r.path() + ": mass_kg and g0_rad_s_per_m go together");
      m = MembraneMode::from_physical(*mass, m.omega, m.gamma, *g0);
      ++given;
    }
    if (given == 0) throw ConfigError(r.path() + ": a coupling (g_*, G_over_kappa or mass_kg+g0) is required");
    if (given > 1) throw ConfigError(r.path() + ": more than one coupling specification");
    r.finish();
    cfg.membranes.push_back(m);
  }
  return cfg;
}

SystemModel build_system(const SystemConfig& config) {
  return build_system(config.cavity, config.membranes, config.drive);
}

SystemConfig with_coupling_off(SystemConfig config) {
  config.drive.coupling_power.reset();
  config.drive.eps_L = 0.0;
  return config;
}

toml::table parse_config_text(std::string_view text) {
  try {
    return toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "config parse error: " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  }
}

toml::table parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace optomech
