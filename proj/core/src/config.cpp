#include "fpg/config.hpp"

#include <array>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace fpg::config {

using trainer::TrainConfig;

ConfigError::ConfigError(std::string source, std::size_t line, std::string key,
                         const std::string& what)
    : std::runtime_error([&] {
        std::string m = source;
        if (line > 0) m += ":" + std::to_string(line);
        if (!key.empty()) m += ": key '" + key + "'";
        return m + ": " + what;
      }()),
      source_(std::move(source)),
      line_(line),
      key_(std::move(key)) {}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

const char* tool_version() { return "0.1.0"; }

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw std::invalid_argument("expected a number, got '" + v + "'");
  return out;
}

template <typename Int>
Int to_int(const std::string& v) {
  Int out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) {
    throw std::invalid_argument("expected a nonnegative integer, got '" + v + "'");
  }
  return out;
}

bool to_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected true or false, got '" + v + "'");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

struct Field {
  const char* section;
  const char* key;
  std::function<void(TrainConfig&, const std::string&)> set;
  std::function<std::string(const TrainConfig&)> get;
};

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      {"run", "env", [](TrainConfig& c, const std::string& v) { c.env = v; },
       [](const TrainConfig& c) { return c.env; }},
      {"run", "algo", [](TrainConfig& c, const std::string& v) { c.algo = trainer::parse_algo(v); },
       [](const TrainConfig& c) { return trainer::to_string(c.algo); }},
      {"run", "seed", [](TrainConfig& c, const std::string& v) { c.seed = to_int<std::uint64_t>(v); },
       [](const TrainConfig& c) { return std::to_string(c.seed); }},
      {"run", "max_episodes",
       [](TrainConfig& c, const std::string& v) { c.max_episodes = to_int<std::size_t>(v); },
       [](const TrainConfig& c) { return std::to_string(c.max_episodes); }},
      {"run", "horizon", [](TrainConfig& c, const std::string& v) { c.horizon = to_int<std::size_t>(v); },
       [](const TrainConfig& c) { return std::to_string(c.horizon); }},
      {"run", "record_wall_time",
       [](TrainConfig& c, const std::string& v) { c.record_wall_time = to_bool(v); },
       [](const TrainConfig& c) { return from_bool(c.record_wall_time); }},

      {"train", "gamma", [](TrainConfig& c, const std::string& v) { c.gamma = to_double(v); },
       [](const TrainConfig& c) { return format_double(c.gamma); }},
      {"train", "beta_theta", [](TrainConfig& c, const std::string& v) { c.beta_theta = to_double(v); },
       [](const TrainConfig& c) { return format_double(c.beta_theta); }},
      {"train", "beta_v", [](TrainConfig& c, const std::string& v) { c.beta_v = to_double(v); },
       [](const TrainConfig& c) { return format_double(c.beta_v); }},
      {"train", "eps_clip", [](TrainConfig& c, const std::string& v) { c.eps_clip = to_double(v); },
       [](const TrainConfig& c) { return format_double(c.eps_clip); }},
      {"train", "minibatch", [](TrainConfig& c, const std::string& v) { c.minibatch = to_int<std::size_t>(v); },
       [](const TrainConfig& c) { return std::to_string(c.minibatch); }},
      {"train", "hidden", [](TrainConfig& c, const std::string& v) { c.hidden = to_int<int>(v); },
       [](const TrainConfig& c) { return std::to_string(c.hidden); }},
      {"train", "ppo_epochs", [](TrainConfig& c, const std::string& v) { c.ppo_epochs = to_int<int>(v); },
       [](const TrainConfig& c) { return std::to_string(c.ppo_epochs); }},
      {"train", "lr_accumulation",
       [](TrainConfig& c, const std::string& v) { c.lr_accumulation = trainer::parse_lr_accumulation(v); },
       [](const TrainConfig& c) { return trainer::to_string(c.lr_accumulation); }},
      {"train", "value_update",
       [](TrainConfig& c, const std::string& v) { c.value_update = trainer::parse_value_update(v); },
       [](const TrainConfig& c) { return trainer::to_string(c.value_update); }},

      {"frac", "alpha", [](TrainConfig& c, const std::string& v) { c.alpha = to_double(v); },
       [](const TrainConfig& c) { return format_double(c.alpha); }},
      {"frac", "mu_variant",
       [](TrainConfig& c, const std::string& v) { c.mu_variant = td::parse_mu_variant(v); },
       [](const TrainConfig& c) { return td::to_string(c.mu_variant); }},
      {"frac", "eta_variant",
       [](TrainConfig& c, const std::string& v) { c.eta_variant = td::parse_eta_variant(v); },
       [](const TrainConfig& c) { return td::to_string(c.eta_variant); }},
      {"frac", "eps_tol", [](TrainConfig& c, const std::string& v) { c.eps_tol = to_double(v); },
       [](const TrainConfig& c) { return format_double(c.eps_tol); }},
      {"frac", "clipping", [](TrainConfig& c, const std::string& v) { c.clipping = to_bool(v); },
       [](const TrainConfig& c) { return from_bool(c.clipping); }},

      {"ablation", "clipping_off",
       [](TrainConfig& c, const std::string& v) { c.ablations.clipping_off = to_bool(v); },
       [](const TrainConfig& c) { return from_bool(c.ablations.clipping_off); }},
      {"ablation", "recursion_off",
       [](TrainConfig& c, const std::string& v) { c.ablations.recursion_off = to_bool(v); },
       [](const TrainConfig& c) { return from_bool(c.ablations.recursion_off); }},
      {"ablation", "minibatch_off",
       [](TrainConfig& c, const std::string& v) { c.ablations.minibatch_off = to_bool(v); },
       [](const TrainConfig& c) { return from_bool(c.ablations.minibatch_off); }},
  };
  return table;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const auto& f : fields()) {
    if (section == f.section && key == f.key) return &f;
  }
  return nullptr;
}

bool known_section(const std::string& s) {
  return s == "run" || s == "train" || s == "frac" || s == "ablation";
}

struct Entry {
  std::size_t line;
  const Field* field;
  std::string value;
};

}  // namespace

TrainConfig parse_config(std::istream& in, const std::string& source) {
  std::vector<Entry> entries;
  std::set<const Field*> seen;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(source, line_no, "", "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_section(section)) {
        throw ConfigError(source, line_no, "", "unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line_no, "", "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source, line_no, "", "empty key");
    if (section.empty()) throw ConfigError(source, line_no, key, "key outside any section");
    const Field* f = find_field(section, key);
    if (!f) throw ConfigError(source, line_no, key, "unknown key in [" + section + "]");
    if (!seen.insert(f).second) throw ConfigError(source, line_no, key, "duplicate key");
    if (value.empty()) throw ConfigError(source, line_no, key, "empty value");
    entries.push_back({line_no, f, value});
  }

  TrainConfig config;
  for (const auto& e : entries) {
    if (std::string(e.field->key) == "env") {
      try {
        config = trainer::default_config(e.value);
      } catch (const std::exception& ex) {
        throw ConfigError(source, e.line, "env", ex.what());
      }
    }
  }
  for (const auto& e : entries) {
    try {
      e.field->set(config, e.value);
    } catch (const std::exception& ex) {
      throw ConfigError(source, e.line, e.field->key, ex.what());
    }
  }
  try {
    config.validate();
  } catch (const std::exception& ex) {
    throw ConfigError(source, 0, "", ex.what());
  }
  return config;
}

TrainConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "", "cannot open file");
  return parse_config(in, path.string());
}

void write_config(std::ostream& out, const TrainConfig& config) {
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out << '\n';
      section = f.section;
      out << '[' << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << '\n';
  }
}

std::string config_to_string(const TrainConfig& config) {
  std::ostringstream out;
  write_config(out, config);
  return out.str();
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

void write_manifest(std::ostream& out, const RunManifest& m) {
  out << "# fpg-manifest version=" << m.tool_version << '\n';
  out << "# timestamp=" << m.timestamp << '\n';
  for (const auto& [name, path] : m.artifacts) {
    out << "# artifact " << name << '=' << path << '\n';
  }
  write_config(out, m.config);
}

RunManifest read_manifest(std::istream& in, const std::string& source) {
  std::stringstream body;
  body << in.rdbuf();
  const std::string text = body.str();

  RunManifest m;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.rfind("# fpg-manifest version=", 0) == 0) {
      m.tool_version = line.substr(23);
    } else if (line.rfind("# timestamp=", 0) == 0) {
      m.timestamp = line.substr(12);
    } else if (line.rfind("# artifact ", 0) == 0) {
      const std::string rest = line.substr(11);
      const auto eq = rest.find('=');
      if (eq != std::string::npos) m.artifacts.emplace_back(rest.substr(0, eq), rest.substr(eq + 1));
    }
  }
  std::istringstream cfg(text);
  m.config = parse_config(cfg, source);
  return m;
}

std::filesystem::path default_output_root() {
  const char* env = std::getenv("FPG_OUTPUT_ROOT");
  if (env != nullptr && *env != '\0') return env;
  return "runs";
}

}  // namespace fpg::config
