#include "bdtaxis/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace bdtaxis {

namespace pt = boost::property_tree;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key + ": expected a number, got '" + raw + "'");
  return value;
}

int parse_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(key + ": expected an integer, got '" + raw + "'");
  return value;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::string s = raw;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string item; is >> item;) out.push_back(item);
  return out;
}

std::vector<double> parse_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  for (const auto& item : split_list(raw)) out.push_back(parse_double(key, item));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + format_double(xs[i]);
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"a", "b", "c", "m", "q", "r", "d", "mu", "h0", "chi0", "u_m"}},
      {"initial", {"family", "U", "V", "u0_samples", "v0_samples"}},
      {"numerics", {"N", "cfl", "dt_max", "t_max", "sample_dt", "react_cap", "snapshot_times"}},
      {"output", {"directory", "formats"}},
  };
  return s;
}

double* model_field(ModelParams& p, const std::string& name) {
  if (name == "a") return &p.a;
  if (name == "b") return &p.b;
  if (name == "c") return &p.c;
  if (name == "m") return &p.m;
  if (name == "q") return &p.q;
  if (name == "r") return &p.r;
  if (name == "d") return &p.d;
  if (name == "mu") return &p.mu;
  if (name == "h0") return &p.h0;
  if (name == "chi0") return &p.chi0;
  if (name == "u_m") return &p.u_m;
  return nullptr;
}

void check_positive(const std::string& key, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) throw ConfigError(key + " must be positive");
}

RunConfig resolve(const pt::ptree& tree) {
  for (const auto& [section, body] : tree) {
    const auto known = schema().find(section);
    if (known == schema().end()) throw ConfigError("unknown section [" + section + "]");
    if (!body.data().empty()) throw ConfigError("unexpected top-level key '" + section + "'");
    for (const auto& [key, value] : body)
      if (!known->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
  }
  auto get = [&](const std::string& path) { return tree.get_optional<std::string>(path); };

  RunConfig cfg;
  for (const auto& name : model_keys()) {
    const auto raw = get("model." + name);
    if (!raw) throw ConfigError("missing required parameter model." + name);
    *model_field(cfg.model, name) = parse_double("model." + name, *raw);
  }

  InitialSpec& in = cfg.initial;
  if (auto raw = get("initial.family")) in.family = trim(*raw);
  if (in.family != "cosine" && in.family != "samples")
    throw ConfigError("initial.family must be 'cosine' or 'samples', got '" + in.family + "'");
  if (auto raw = get("initial.U")) in.U = parse_double("initial.U", *raw);
  if (auto raw = get("initial.V")) in.V = parse_double("initial.V", *raw);
  if (auto raw = get("initial.u0_samples")) in.u0_samples = parse_list("initial.u0_samples", *raw);
  if (auto raw = get("initial.v0_samples")) in.v0_samples = parse_list("initial.v0_samples", *raw);
  if (in.family == "samples") {
    if (in.u0_samples.size() < 3 || in.v0_samples.size() < 3)
      throw ConfigError("initial.family = samples needs u0_samples and v0_samples (>= 3 values)");
  } else if (!in.u0_samples.empty() || !in.v0_samples.empty()) {
    throw ConfigError("initial.u0_samples/v0_samples require initial.family = samples");
  }

  NumericsSpec& nu = cfg.numerics;
  if (auto raw = get("numerics.N")) nu.N = parse_int("numerics.N", *raw);
  if (auto raw = get("numerics.cfl")) nu.cfl = parse_double("numerics.cfl", *raw);
  if (auto raw = get("numerics.dt_max")) nu.dt_max = parse_double("numerics.dt_max", *raw);
  if (auto raw = get("numerics.t_max")) nu.t_max = parse_double("numerics.t_max", *raw);
  if (auto raw = get("numerics.sample_dt")) nu.sample_dt = parse_double("numerics.sample_dt", *raw);
  if (auto raw = get("numerics.react_cap")) nu.react_cap = parse_double("numerics.react_cap", *raw);
  if (auto raw = get("numerics.snapshot_times"))
    nu.snapshot_times = parse_list("numerics.snapshot_times", *raw);
  if (nu.N < 16) throw ConfigError("numerics.N must be at least 16");
  check_positive("numerics.cfl", nu.cfl);
  check_positive("numerics.dt_max", nu.dt_max);
  check_positive("numerics.t_max", nu.t_max);
  check_positive("numerics.sample_dt", nu.sample_dt);
  check_positive("numerics.react_cap", nu.react_cap);
  for (double t : nu.snapshot_times)
    if (!(t >= 0.0) || !std::isfinite(t))
      throw ConfigError("numerics.snapshot_times must be finite and non-negative");

  if (auto raw = get("output.directory")) cfg.output.directory = trim(*raw);
  if (cfg.output.directory.empty()) throw ConfigError("output.directory must not be empty");
  if (auto raw = get("output.formats")) {
    cfg.output.formats = split_list(*raw);
    for (const auto& f : cfg.output.formats)
      if (f != "trajectory" && f != "snapshots" && f != "manifest")
        throw ConfigError("output.formats: unknown format '" + f + "'");
  }
  return cfg;
}

}  // namespace

bool OutputSpec::wants(const std::string& what) const {
  return std::find(formats.begin(), formats.end(), what) != formats.end();
}

const std::vector<std::string>& model_keys() {
  static const std::vector<std::string> keys = {"a", "b", "c",  "m",    "q",  "r",
                                                "d", "mu", "h0", "chi0", "u_m"};
  return keys;
}

void set_model_param(ModelParams& p, const std::string& name, double value) {
  double* field = model_field(p, name);
  if (!field) throw ConfigError("unknown model parameter '" + name + "'");
  *field = value;
}

double get_model_param(const ModelParams& p, const std::string& name) {
  ModelParams copy = p;
  double* field = model_field(copy, name);
  if (!field) throw ConfigError("unknown model parameter '" + name + "'");
  return *field;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

InitialData RunConfig::initial_data() const {
  const double h0 = model.h0;
  if (initial.family == "samples")
    return {Profile::sampled(initial.u0_samples, h0), Profile::sampled(initial.v0_samples, h0)};
  return {initial.U == 0.0 ? Profile::zero(h0) : Profile::cosine(initial.U, h0),
          Profile::cosine(initial.V, h0)};
}

Grid RunConfig::grid() const { return Grid(numerics.N); }

std::vector<double> RunConfig::snapshot_times() const {
  if (numerics.snapshot_times.empty()) return {0.0, numerics.t_max};
  std::vector<double> out;
  for (double t : numerics.snapshot_times)
    if (t <= numerics.t_max) out.push_back(t);
  return out;
}

Controls RunConfig::controls() const {
  Controls c;
  c.t_max = numerics.t_max;
  c.sample_dt = numerics.sample_dt;
  c.cfl = numerics.cfl;
  c.dt_max = numerics.dt_max;
  c.react_cap = numerics.react_cap;
  c.snapshot_times = snapshot_times();
  return c;
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  for (const auto& name : model_keys())
    os << "model." << name << " = " << format_double(get_model_param(model, name)) << '\n';
  os << "initial.family = " << initial.family << '\n';
  if (initial.family == "cosine") {
    os << "initial.U = " << format_double(initial.U) << '\n';
    os << "initial.V = " << format_double(initial.V) << '\n';
  } else {
    os << "initial.u0_samples = " << join(initial.u0_samples) << '\n';
    os << "initial.v0_samples = " << join(initial.v0_samples) << '\n';
  }
  os << "numerics.N = " << numerics.N << '\n';
  os << "numerics.cfl = " << format_double(numerics.cfl) << '\n';
  os << "numerics.dt_max = " << format_double(numerics.dt_max) << '\n';
  os << "numerics.t_max = " << format_double(numerics.t_max) << '\n';
  os << "numerics.sample_dt = " << format_double(numerics.sample_dt) << '\n';
  os << "numerics.react_cap = " << format_double(numerics.react_cap) << '\n';
  os << "numerics.snapshot_times = " << join(snapshot_times()) << '\n';
  os << "output.directory = " << output.directory << '\n';
  os << "output.formats =";
  for (const auto& f : output.formats) os << ' ' << f;
  os << '\n';
  return os.str();
}

RunConfig parse_config(std::istream& in, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const std::string path = eq == std::string::npos ? "" : trim(o.substr(0, eq));
    const auto dot = path.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot == 0 || dot + 1 == path.size())
      throw ConfigError("override '" + o + "' is not of the form section.key=value");
    tree.put(path, trim(o.substr(eq + 1)));
  }
  return resolve(tree);
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(in, overrides);
}

}  // namespace bdtaxis
