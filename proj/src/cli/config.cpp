#include "ballet/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace ballet::cli {

namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

using Section = std::map<std::string, Entry>;

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> split_list(std::string_view value) {
  std::string v = trim(value);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') {
    v = v.substr(1, v.size() - 2);
  }
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = v.find(',', start);
    std::string item = trim(std::string_view(v).substr(start, comma - start));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

class Reader {
 public:
  Reader(const Section& s, std::string name) : s_(s), name_(std::move(name)) {}

  bool has(const std::string& key) const { return s_.count(key) > 0; }

  const Entry& require(const std::string& key) const {
    const auto it = s_.find(key);
    if (it == s_.end()) {
      throw ConfigError("[" + name_ + "] missing required key '" + key + "'",
                        key, 0);
    }
    return it->second;
  }

  [[noreturn]] void type_error(const std::string& key, const Entry& e,
                               const std::string& expected) const {
    std::ostringstream msg;
    msg << "line " << e.line << ": key '" << key << "' expects " << expected
        << ", got '" << e.value << "'";
    throw ConfigError(msg.str(), key, e.line);
  }

  template <class T>
  T number(const std::string& key, T fallback) const {
    const auto it = s_.find(key);
    if (it == s_.end()) return fallback;
    return parse_number<T>(key, it->second, it->second.value);
  }

  template <class T>
  T parse_number(const std::string& key, const Entry& e,
                 std::string_view text) const {
    T v{};
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
      type_error(key, e, std::is_integral_v<T> ? "an integer" : "a number");
    }
    return v;
  }

  bool boolean(const std::string& key, bool fallback) const {
    const auto it = s_.find(key);
    if (it == s_.end()) return fallback;
    const std::string v = lower(trim(it->second.value));
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    type_error(key, it->second, "true or false");
  }

  std::vector<std::uint64_t> seeds() const {
    const Entry& e = require("seeds");
    std::vector<std::uint64_t> out;
    for (const std::string& item : split_list(e.value)) {
      const auto dots = item.find("..");
      if (dots == std::string::npos) {
        out.push_back(parse_number<std::uint64_t>("seeds", e, item));
        continue;
      }
      const auto lo = parse_number<std::uint64_t>(
          "seeds", e, std::string_view(item).substr(0, dots));
      const auto hi = parse_number<std::uint64_t>(
          "seeds", e, std::string_view(item).substr(dots + 2));
      if (hi < lo) type_error("seeds", e, "an increasing range a..b");
      for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
    }
    if (out.empty()) type_error("seeds", e, "at least one seed");
    std::vector<std::uint64_t> sorted = out;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw ConfigError("line " + std::to_string(e.line) +
                            ": key 'seeds' contains a duplicate seed",
                        "seeds", e.line);
    }
    return out;
  }

 private:
  const Section& s_;
  std::string name_;
};

std::string sanitize(std::string s) {
  for (char& c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
      c = '-';
    }
  }
  return s;
}

std::vector<bench::ExperimentConfig> expand(const std::string& name,
                                            const Section& section) {
  const Reader r(section, name);
  bench::ExperimentConfig base;
  base.horizon = r.parse_number<long>("T", r.require("T"), r.require("T").value);
  base.seeds = r.seeds();
  base.n_warmup = r.number<int>("n_warmup", 10);
  base.delta = r.number<double>("delta", 0.2);
  base.beta_sqrt_filter = r.number<double>("beta_sqrt_filter", 0.2);
  base.filter_with_schedule = r.boolean("filter_schedule", false);
  base.beta_trace = r.number<double>("beta_trace", 2.0);
  base.refit_interval = r.number<int>("refit_interval", 1);
  base.pool_size = r.number<Index>("pool_size", 0);
  base.objective.noise_std = r.number<double>("noise_std", 0.0);
  base.hyperopt.restarts = r.number<int>("hyperopt_restarts", 8);
  base.hyperopt.sweeps = r.number<int>("hyperopt_sweeps", 25);
  base.standardize = r.boolean("standardize", true);
  const double beta_sqrt_acq = r.number<double>("beta_sqrt_acq", std::sqrt(2.0));

  if (r.has("kernel")) {
    const Entry& e = r.require("kernel");
    const std::string k = lower(trim(e.value));
    if (k == "rbf") {
      base.kernel = bench::KernelFamily::Rbf;
    } else if (k == "linear") {
      base.kernel = bench::KernelFamily::Linear;
    } else {
      r.type_error("kernel", e, "rbf or linear");
    }
  }
  if (r.has("intersection")) {
    const Entry& e = r.require("intersection");
    const std::string m = lower(trim(e.value));
    if (m == "per_step") {
      base.intersection = IntersectionMode::PerStep;
    } else if (m == "historical") {
      base.intersection = IntersectionMode::Historical;
    } else {
      r.type_error("intersection", e, "per_step or historical");
    }
  }

  std::vector<bench::ObjectiveSpec> objectives;
  {
    const Entry& e = r.require("objective");
    for (const std::string& item : split_list(e.value)) {
      bench::ObjectiveSpec o = base.objective;
      const std::string v = lower(item);
      if (v == "toy1d") {
        o.kind = bench::ObjectiveKind::Toy1D;
      } else if (v == "hdbo") {
        o.kind = bench::ObjectiveKind::HdboSum;
      } else if (v == "tabular") {
        o.kind = bench::ObjectiveKind::Tabular;
        o.path = trim(r.require("path").value);
      } else {
        r.type_error("objective", e, "toy1d, hdbo or tabular");
      }
      objectives.push_back(o);
    }
    if (objectives.empty()) r.type_error("objective", e, "an objective");
  }

  std::vector<AcquisitionSpec> methods;
  {
    const Entry& e = r.require("method");
    for (const std::string& item : split_list(e.value)) {
      try {
        AcquisitionSpec spec = parse_method(item);
        spec.beta_sqrt_acq = beta_sqrt_acq;
        methods.push_back(spec);
      } catch (const InputError& err) {
        throw ConfigError("line " + std::to_string(e.line) + ": key 'method': " +
                              err.what(),
                          "method", e.line);
      }
    }
    if (methods.empty()) r.type_error("method", e, "at least one method");
  }

  std::vector<bench::ExperimentConfig> out;
  for (const bench::ObjectiveSpec& o : objectives) {
    for (const AcquisitionSpec& m : methods) {
      bench::ExperimentConfig c = base;
      c.objective = o;
      c.acquisition = m;
      c.name = sanitize(name + "_" + bench::objective_name(o) + "_" +
                        method_name(m));
      try {
        bench::validate(c);
      } catch (const InputError& err) {
        const std::string what = err.what();
        // validate() reports "<name>: <field>: <why>".
        const auto a = what.find(": ");
        const auto b = what.find(": ", a + 2);
        const std::string key =
            (a != std::string::npos && b != std::string::npos)
                ? what.substr(a + 2, b - a - 2)
                : "";
        throw ConfigError("[" + name + "] " + what, key,
                          r.has(key) ? r.require(key).line : 0);
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = {
      "objective",        "method",          "T",
      "seeds",            "path",            "kernel",
      "n_warmup",         "delta",           "beta_sqrt_filter",
      "filter_schedule",  "beta_trace",      "beta_sqrt_acq",
      "refit_interval",   "pool_size",       "intersection",
      "noise_std",        "hyperopt_restarts", "hyperopt_sweeps",
      "standardize"};
  return keys;
}

std::vector<bench::ExperimentConfig> parse_config_text(
    std::string_view text, const std::string& source) {
  Section defaults;
  std::vector<std::pair<std::string, Section>> sections;
  Section* current = &defaults;
  std::vector<std::string> seen_names;

  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(where + ": unterminated section header", "", line_no);
      }
      std::string name = trim(std::string_view(line).substr(1, line.size() - 2));
      if (name.empty()) {
        throw ConfigError(where + ": empty section name", "", line_no);
      }
      if (std::find(seen_names.begin(), seen_names.end(), name) !=
          seen_names.end()) {
        throw ConfigError(where + ": duplicate section [" + name + "]", "",
                          line_no);
      }
      seen_names.push_back(name);
      sections.emplace_back(name, defaults);
      current = &sections.back().second;
      continue;
    }

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'", "", line_no);
    }
    std::string key = trim(std::string_view(line).substr(0, eq));
    if (key == "methods") key = "method";
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ConfigError(where + ": unknown key '" + key + "'", key, line_no);
    }
    (*current)[key] = Entry{trim(std::string_view(line).substr(eq + 1)), line_no};
  }

  if (sections.empty()) {
    if (defaults.empty()) {
      throw ConfigError(source + ": no experiments defined", "", 0);
    }
    sections.emplace_back("experiment", defaults);
  }

  std::vector<bench::ExperimentConfig> out;
  for (const auto& [name, section] : sections) {
    for (auto& c : expand(name, section)) out.push_back(std::move(c));
  }
  return out;
}

std::vector<bench::ExperimentConfig> parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config '" + path + "'", "", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

}  // namespace ballet::cli
