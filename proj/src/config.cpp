// Copyright 2026 The HiOCO Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hioco/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "hioco/engine.hpp"
#include "hioco/errors.hpp"

namespace hioco {

using nlohmann::json;

void to_json(json& j, const CompressionScheme& c) {
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, IdentityScheme>) {
          j = {{"kind", "identity"}};
        } else if constexpr (std::is_same_v<S, QuantizeScheme>) {
          j = {{"kind", "quantize"}, {"bits", s.bits}, {"lower", s.lower}, {"upper", s.upper}};
        } else {
          j = {{"kind", "noise"}, {"stddev", s.stddev}, {"seed", s.seed}};
        }
      },
      c);
}

void from_json(const json& j, CompressionScheme& c) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "identity") {
    c = IdentityScheme{};
  } else if (kind == "quantize") {
    QuantizeScheme q;
    q.bits = j.value("bits", q.bits);
    q.lower = j.value("lower", q.lower);
    q.upper = j.value("upper", q.upper);
    c = q;
  } else if (kind == "noise") {
    NoiseScheme n;
    n.stddev = j.at("stddev").get<double>();
    n.seed = j.value("seed", std::uint64_t{0});
    c = n;
  } else {
    throw ParameterError("unknown compression kind '" + kind + "'");
  }
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

// Typed field access that reports the dotted path of whatever went wrong.
class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected a table");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : node_.items())
      if (!ok.count(k)) throw ConfigError(join(path_, k), "unknown field");
  }

  bool has(const char* key) const { return node_.contains(key); }
  const json& raw(const char* key) const { return node_.at(key); }
  std::string path(const char* key) const { return join(path_, key); }

  template <class T>
  T get(const char* key) const {
    if (!has(key)) throw ConfigError(path(key), "missing required field");
    return convert<T>(node_.at(key), path(key));
  }

  template <class T>
  T get_or(const char* key, T fallback) const {
    return has(key) ? convert<T>(node_.at(key), path(key)) : fallback;
  }

  // A number or the string "auto".
  std::optional<double> auto_or_number(const char* key) const {
    if (!has(key)) return std::nullopt;
    const auto& v = node_.at(key);
    if (v.is_string()) {
      if (v.get<std::string>() != "auto") throw ConfigError(path(key), "expected a number or \"auto\"");
      return std::nullopt;
    }
    return convert<double>(v, path(key));
  }

  template <class T>
  static T convert(const json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected true or false");
      return v.get<bool>();
    } else if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      return v.get<double>();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(where, "expected a nonnegative integer");
      return static_cast<T>(v.get<unsigned long long>());
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
      return static_cast<T>(v.get<long long>());
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where, "expected a string");
      return v.get<std::string>();
    } else {
      return list<typename T::value_type>(v, where);
    }
  }

  template <class E>
  static std::vector<E> list(const json& v, const std::string& where) {
    if (!v.is_array()) throw ConfigError(where, "expected a list");
    std::vector<E> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert<E>(v[i], index(where, i)));
    return out;
  }

 private:
  const json& node_;
  std::string path_;
};

Vec vec_field(const Reader& r, const char* key, std::size_t dim, double fill) {
  if (!r.has(key)) return Vec::Constant(static_cast<Eigen::Index>(dim), fill);
  const auto v = r.get<std::vector<double>>(key);
  if (v.size() == 1) return Vec::Constant(static_cast<Eigen::Index>(dim), v[0]);
  if (v.size() != dim) throw ConfigError(r.path(key), "expected " + std::to_string(dim) + " entries");
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(dim));
}

SetDescriptor parse_set(const json& node, const std::string& where, std::size_t dim) {
  const Reader r(node, where);
  const auto kind = r.get<std::string>("kind");
  if (kind == "ball") {
    r.allow({"kind", "center", "radius"});
    const double radius = r.get<double>("radius");
    if (!(radius > 0.0)) throw ConfigError(r.path("radius"), "radius must be positive");
    return Ball{vec_field(r, "center", dim, 0.0), radius};
  }
  if (kind == "box") {
    r.allow({"kind", "lower", "upper"});
    Box b{vec_field(r, "lower", dim, 0.0), vec_field(r, "upper", dim, 0.0)};
    if (!r.has("lower") || !r.has("upper")) throw ConfigError(where, "box needs lower and upper");
    if (!(b.lower.array() < b.upper.array()).all()) throw ConfigError(where, "box needs lower < upper");
    return b;
  }
  throw ConfigError(r.path("kind"), "unknown feasible-set kind '" + kind + "'");
}

CompressionScheme parse_compression(const json& node, const std::string& where) {
  const Reader r(node, where);
  const auto kind = r.get<std::string>("kind");
  CompressionScheme out;
  if (kind == "identity") {
    r.allow({"kind"});
    out = IdentityScheme{};
  } else if (kind == "quantize") {
    r.allow({"kind", "bits", "lower", "upper"});
    QuantizeScheme q;
    q.bits = r.get_or<int>("bits", q.bits);
    q.lower = r.get_or<double>("lower", q.lower);
    q.upper = r.get_or<double>("upper", q.upper);
    out = q;
  } else if (kind == "noise") {
    r.allow({"kind", "stddev", "seed"});
    out = NoiseScheme{r.get<double>("stddev"), r.get_or<std::uint64_t>("seed", 0)};
  } else {
    throw ConfigError(r.path("kind"), "unknown compression kind '" + kind + "'");
  }
  try {
    validate(out);
  } catch (const ParameterError& e) {
    throw ConfigError(where, e.what());
  }
  return out;
}

ScenarioSpec parse_scenario(const json& node) {
  const Reader r(node, "scenario");
  r.allow({"C", "n", "dims", "m", "T", "mu", "a_max", "seed", "feasible", "drift"});
  ScenarioSpec s;
  if (r.has("dims")) {
    s.dims = r.get<std::vector<std::size_t>>("dims");
    if (r.has("C") && r.get<std::size_t>("C") != s.dims.size())
      throw ConfigError(r.path("C"), "does not match the length of dims");
    if (r.has("n")) throw ConfigError(r.path("n"), "give either dims or n, not both");
  } else {
    s.dims.assign(r.get<std::size_t>("C"), r.get<std::size_t>("n"));
  }
  if (s.dims.empty()) throw ConfigError(r.path("dims"), "need at least one worker");
  for (std::size_t c = 0; c < s.dims.size(); ++c)
    if (s.dims[c] == 0) throw ConfigError(index(r.path("dims"), c), "block dimension must be positive");
  s.m = r.get<std::size_t>("m");
  s.horizon = r.get<std::size_t>("T");
  s.mu = r.get<double>("mu");
  s.a_max = r.get_or<double>("a_max", 1.0);
  s.seed = r.get_or<std::uint64_t>("seed", 0);
  if (s.m == 0) throw ConfigError(r.path("m"), "must be positive");
  if (s.horizon == 0) throw ConfigError(r.path("T"), "must be positive");
  if (!(s.mu > 0.0)) throw ConfigError(r.path("mu"), "must be positive");
  if (!(s.a_max > 0.0)) throw ConfigError(r.path("a_max"), "must be positive");

  if (!r.has("feasible")) throw ConfigError(r.path("feasible"), "missing required field");
  const json& f = r.raw("feasible");
  if (f.is_array()) {
    if (f.size() != s.dims.size()) throw ConfigError(r.path("feasible"), "need one entry per worker");
    for (std::size_t c = 0; c < f.size(); ++c) s.feasible.push_back(parse_set(f[c], index(r.path("feasible"), c), s.dims[c]));
  } else {
    for (std::size_t c = 0; c < s.dims.size(); ++c) s.feasible.push_back(parse_set(f, r.path("feasible"), s.dims[c]));
  }

  if (r.has("drift")) {
    const Reader d(r.raw("drift"), r.path("drift"));
    d.allow({"kind", "sigma", "rho", "seed"});
    try {
      s.drift.kind = drift_kind_from_string(d.get<std::string>("kind"));
    } catch (const ParameterError& e) {
      throw ConfigError(d.path("kind"), e.what());
    }
    s.drift.sigma = d.get_or<double>("sigma", 0.0);
    s.drift.rho = d.get_or<double>("rho", 0.0);
    s.drift.seed = d.get_or<std::uint64_t>("seed", s.seed);
    if (s.drift.kind != DriftKind::Static && !(s.drift.sigma > 0.0))
      throw ConfigError(d.path("sigma"), "must be positive for a moving scenario");
    if (!(s.drift.rho >= 0.0)) throw ConfigError(d.path("rho"), "must be nonnegative");
  }
  return s;
}

template <class T>
T nonneg_int(const Reader& r, const char* key, T fallback) {
  return r.get_or<T>(key, fallback);
}

}  // namespace

bool SweepSpec::empty() const {
  return J_l.empty() && J_r.empty() && tau_r.empty() && tau_l.empty() && compression.empty() && baseline.empty();
}

void ExperimentConfig::validate() const {
  try {
    scenario.validate();
  } catch (const ParameterError& e) {
    throw ConfigError("scenario", e.what());
  }
  if (delays.round_trip() < 1) throw ConfigError("delays", "tau_u + tau_d must be at least 1");
  if (algorithm.J_l < 0) throw ConfigError("algorithm.J_l", "must be nonnegative");
  if (algorithm.J_r < 0) throw ConfigError("algorithm.J_r", "must be nonnegative");
  if (algorithm.J_l + algorithm.J_r < 1) throw ConfigError("algorithm", "J_l + J_r must be at least 1");
  if (algorithm.alpha && !(*algorithm.alpha > 0.0)) throw ConfigError("algorithm.alpha", "must be positive");
  for (std::size_t i = 0; i < sweep.J_l.size(); ++i)
    if (sweep.J_l[i] < 0) throw ConfigError(index("sweep.J_l", i), "must be nonnegative");
  for (std::size_t i = 0; i < sweep.J_r.size(); ++i)
    if (sweep.J_r[i] < 0) throw ConfigError(index("sweep.J_r", i), "must be nonnegative");
  for (std::size_t i = 0; i < sweep.tau_r.size(); ++i)
    if (sweep.tau_r[i] < 1) throw ConfigError(index("sweep.tau_r", i), "must be at least 1");
  for (std::size_t i = 0; i < sweep.baseline.size(); ++i) {
    if (sweep.baseline[i] == "hioco") continue;
    try {
      baseline_kind_from_string(sweep.baseline[i]);
    } catch (const ParameterError& e) {
      throw ConfigError(index("sweep.baseline", i), e.what());
    }
  }
  if (output.dir.empty()) throw ConfigError("output.dir", "must not be empty");
}

ExperimentConfig config_from_json(const json& j) {
  const Reader root(j, "");
  root.allow({"name", "seed", "threads", "scenario", "delays", "algorithm", "sweep", "output"});
  ExperimentConfig c;
  c.name = root.get_or<std::string>("name", c.name);
  c.seed = root.get_or<std::uint64_t>("seed", 0);
  c.threads = root.get_or<unsigned>("threads", 0);
  if (!root.has("scenario")) throw ConfigError("scenario", "missing required table");
  c.scenario = parse_scenario(root.raw("scenario"));

  if (root.has("delays")) {
    const Reader r(root.raw("delays"), "delays");
    r.allow({"tau_u", "tau_d", "tau_l"});
    c.delays.tau_u = nonneg_int<std::size_t>(r, "tau_u", c.delays.tau_u);
    c.delays.tau_d = nonneg_int<std::size_t>(r, "tau_d", c.delays.tau_d);
    c.delays.tau_l = nonneg_int<std::size_t>(r, "tau_l", c.delays.tau_l);
  }

  if (root.has("algorithm")) {
    const Reader r(root.raw("algorithm"), "algorithm");
    r.allow({"alpha", "gamma", "J_l", "J_r", "compression"});
    c.algorithm.alpha = r.auto_or_number("alpha");
    c.algorithm.gamma = r.auto_or_number("gamma");
    c.algorithm.J_l = r.get_or<int>("J_l", c.algorithm.J_l);
    c.algorithm.J_r = r.get_or<int>("J_r", c.algorithm.J_r);
    if (r.has("compression")) c.algorithm.compression = parse_compression(r.raw("compression"), r.path("compression"));
  }

  if (root.has("sweep")) {
    const Reader r(root.raw("sweep"), "sweep");
    r.allow({"J_l", "J_r", "tau_r", "tau_l", "compression", "baseline"});
    c.sweep.J_l = r.get_or<std::vector<int>>("J_l", {});
    c.sweep.J_r = r.get_or<std::vector<int>>("J_r", {});
    c.sweep.tau_r = r.get_or<std::vector<std::size_t>>("tau_r", {});
    c.sweep.tau_l = r.get_or<std::vector<std::size_t>>("tau_l", {});
    c.sweep.baseline = r.get_or<std::vector<std::string>>("baseline", {});
    if (r.has("compression")) {
      const json& list = r.raw("compression");
      if (!list.is_array()) throw ConfigError(r.path("compression"), "expected a list");
      for (std::size_t i = 0; i < list.size(); ++i)
        c.sweep.compression.push_back(parse_compression(list[i], index(r.path("compression"), i)));
    }
  }

  if (root.has("output")) {
    const Reader r(root.raw("output"), "output");
    r.allow({"dir", "traces"});
    c.output.dir = r.get_or<std::string>("dir", c.output.dir);
    c.output.traces = r.get_or<bool>("traces", c.output.traces);
  }

  c.validate();
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json algorithm{{"J_l", c.algorithm.J_l}, {"J_r", c.algorithm.J_r}, {"compression", c.algorithm.compression}};
  algorithm["alpha"] = c.algorithm.alpha ? json(*c.algorithm.alpha) : json("auto");
  algorithm["gamma"] = c.algorithm.gamma ? json(*c.algorithm.gamma) : json("auto");
  json scenario = c.scenario;
  scenario.erase("C");
  json sweep = json::object();
  if (!c.sweep.J_l.empty()) sweep["J_l"] = c.sweep.J_l;
  if (!c.sweep.J_r.empty()) sweep["J_r"] = c.sweep.J_r;
  if (!c.sweep.tau_r.empty()) sweep["tau_r"] = c.sweep.tau_r;
  if (!c.sweep.tau_l.empty()) sweep["tau_l"] = c.sweep.tau_l;
  if (!c.sweep.compression.empty()) sweep["compression"] = c.sweep.compression;
  if (!c.sweep.baseline.empty()) sweep["baseline"] = c.sweep.baseline;
  return json{{"name", c.name},
              {"seed", c.seed},
              {"threads", c.threads},
              {"scenario", scenario},
              {"delays", {{"tau_u", c.delays.tau_u}, {"tau_d", c.delays.tau_d}, {"tau_l", c.delays.tau_l}}},
              {"algorithm", algorithm},
              {"sweep", sweep},
              {"output", {{"dir", c.output.dir}, {"traces", c.output.traces}}}};
}

namespace {

json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    json out = json::object();
    for (const auto& [k, v] : *t) out[std::string(k.str())] = toml_to_json(v);
    return out;
  }
  if (const auto* a = node.as_array()) {
    json out = json::array();
    for (const auto& v : *a) out.push_back(toml_to_json(v));
    return out;
  }
  if (const auto* v = node.as_integer()) return json(v->get());
  if (const auto* v = node.as_floating_point()) return json(v->get());
  if (const auto* v = node.as_boolean()) return json(v->get());
  if (const auto* v = node.as_string()) return json(v->get());
  throw ConfigError("", "dates and times are not supported in configs");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, ConfigFormat format, const std::string& origin) {
  if (format == ConfigFormat::Json) {
    json j;
    try {
      j = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ConfigError(origin, std::string("JSON syntax error: ") + e.what());
    }
    try {
      return config_from_json(j);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + e.where(), e.message());
    }
  }

  toml::table table;
  try {
    table = toml::parse(text, origin);
  } catch (const toml::parse_error& e) {
    const auto& where = e.source().begin;
    throw ConfigError(origin + ":" + std::to_string(where.line) + ":" + std::to_string(where.column),
                      std::string("TOML syntax error: ") + std::string(e.description()));
  }
  try {
    return config_from_json(toml_to_json(table));
  } catch (const ConfigError& e) {
    std::string where = origin;
    // Walk up the dotted path until a node with a source position is found.
    std::string path = e.where();
    while (!path.empty()) {
      const auto node = table.at_path(path);
      if (node && node.node()->source().begin.line > 0) {
        where += ":" + std::to_string(node.node()->source().begin.line);
        break;
      }
      const auto cut = path.find_last_of(".[");
      path = cut == std::string::npos ? "" : path.substr(0, cut);
    }
    throw ConfigError(where + ":" + e.where(), e.message());
  }
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto dot = path.find_last_of('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
  if (ext == "toml") return parse_config(ss.str(), ConfigFormat::Toml, path);
  if (ext == "json") return parse_config(ss.str(), ConfigFormat::Json, path);
  throw ConfigError(path, "config files must end in .toml or .json");
}

namespace {

ScenarioSpec preset_scenario(std::uint64_t seed, std::size_t horizon, DriftModel drift) {
  ScenarioSpec s;
  s.dims = {4, 4, 4};
  s.m = 6;
  s.horizon = horizon;
  s.mu = 1.0;
  s.a_max = 1.0;
  s.seed = seed;
  s.drift = drift;
  for (auto d : s.dims) s.feasible.push_back(Ball{Vec::Zero(static_cast<Eigen::Index>(d)), 3.0});
  return s;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"static-sanity", "thm1", "thm2"};
  return names;
}

ExperimentConfig preset(const std::string& name) {
  ExperimentConfig c;
  c.name = name;
  c.seed = 42;
  c.output.dir = "out/" + name;
  if (name == "static-sanity") {
    c.scenario = preset_scenario(42, 300, DriftModel{DriftKind::Static, 0.0, 0.0, 42});
    c.algorithm.J_l = 1;
    c.algorithm.J_r = 1;
  } else if (name == "thm1") {
    c.scenario = preset_scenario(42, 500, DriftModel{DriftKind::DecayingWalk, 0.5, 0.6, 42});
    c.algorithm.J_l = 2;
    c.algorithm.J_r = 2;
  } else if (name == "thm2") {
    c.scenario = preset_scenario(42, 500, DriftModel{DriftKind::DecayingWalk, 0.5, 0.6, 42});
    c.delays.tau_l = 2;
    c.algorithm.J_l = 3;
    c.algorithm.J_r = 3;
  } else {
    throw ConfigError("preset", "unknown preset '" + name + "'");
  }
  c.validate();
  return c;
}

ResolvedAlgorithm resolve(const AlgorithmSpec& spec, const ScenarioConstants& k) {
  ResolvedAlgorithm r;
  if (spec.alpha) {
    r.alpha = *spec.alpha;
    if (r.alpha < k.L * (1.0 - 1e-12))
      throw ConfigError("algorithm.alpha", "alpha = " + std::to_string(r.alpha) + " is below L = " + std::to_string(k.L));
  } else {
    r.alpha = k.L;
    r.log.push_back("algorithm.alpha = auto -> L = " + std::to_string(k.L));
  }
  if (spec.gamma) {
    r.gamma = *spec.gamma;
    if (!(r.gamma > 0.0 && r.gamma < 2.0 * k.mu)) throw ConfigError("algorithm.gamma", "must lie in (0, 2 mu)");
  } else {
    r.gamma = k.mu;
    r.log.push_back("algorithm.gamma = auto -> mu = " + std::to_string(k.mu));
  }
  return r;
}

}  // namespace hioco
