#include "roughdelay/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace roughdelay {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double parse_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a number, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing junk");
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError(line, "expected a nonnegative integer, got '" + v + "'");
  }
}

std::size_t parse_size(const std::string& v, int line) {
  return static_cast<std::size_t>(parse_u64(v, line));
}

std::vector<double> parse_double_list(const std::string& v, int line) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), line));
  if (out.empty()) throw ConfigError(line, "expected a comma-separated list");
  return out;
}

std::vector<std::uint64_t> parse_u64_list(const std::string& v, int line) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_u64(trim(item), line));
  if (out.empty()) throw ConfigError(line, "expected a comma-separated list");
  return out;
}

std::vector<std::vector<double>> parse_poly(const std::string& v, int line) {
  std::vector<std::vector<double>> out;
  std::stringstream ss(v);
  std::string group;
  while (std::getline(ss, group, ';')) out.push_back(parse_double_list(trim(group), line));
  if (out.empty()) throw ConfigError(line, "expected coefficient lists");
  return out;
}

struct KeyTracker {
  std::map<std::string, int> lines;
  int line_of(const std::string& key) const {
    const auto it = lines.find(key);
    return it == lines.end() ? 0 : it->second;
  }
};

void set_key(Config& cfg, const std::string& full_key, const std::string& value,
             int line) {
  if (full_key == "problem.T") cfg.T = parse_double(value, line);
  else if (full_key == "problem.solver_n") cfg.solver_n = parse_size(value, line);
  else if (full_key == "problem.r") cfg.r = parse_double(value, line);
  else if (full_key == "problem.r0") cfg.r0 = parse_double(value, line);
  else if (full_key == "problem.beta") cfg.beta = parse_double(value, line);
  else if (full_key == "problem.epsilon") cfg.epsilon = parse_double(value, line);
  else if (full_key == "problem.eta0") cfg.eta0 = parse_double_list(value, line);
  else if (full_key == "problem.eta_slope") cfg.eta_slope = parse_double(value, line);
  else if (full_key == "problem.K") cfg.K = parse_double(value, line);
  else if (full_key == "signal.kind") cfg.signal_kind = value;
  else if (full_key == "signal.dim") cfg.dim = parse_size(value, line);
  else if (full_key == "signal.T") cfg.T = parse_double(value, line);
  else if (full_key == "signal.fine_n") cfg.fine_n = parse_size(value, line);
  else if (full_key == "signal.fine_factor") cfg.fine_factor = parse_size(value, line);
  else if (full_key == "signal.seed") cfg.seed = parse_u64(value, line);
  else if (full_key == "signal.r_max") cfg.r_max = parse_double(value, line);
  else if (full_key == "signal.params.poly") cfg.poly = parse_poly(value, line);
  else if (full_key == "signal.params.amp") cfg.sine_amp = parse_double_list(value, line);
  else if (full_key == "signal.params.freq") cfg.sine_freq = parse_double_list(value, line);
  else if (full_key == "signal.params.phase") cfg.sine_phase = parse_double_list(value, line);
  else if (full_key == "signal.params.modes") cfg.fourier_modes = parse_size(value, line);
  else if (full_key == "signal.params.scale") cfg.fourier_scale = parse_double(value, line);
  else if (full_key == "coeff.name") cfg.coeff_name = value;
  else if (full_key == "coeff.lambda") cfg.lambda = parse_double(value, line);
  else if (full_key == "coeff.params.c") cfg.coeff_c = parse_double(value, line);
  else if (full_key == "coeff.params.b_const") cfg.b_const = parse_double_list(value, line);
  else if (full_key == "coeff.params.b_linear") cfg.b_linear = parse_double_list(value, line);
  else if (full_key == "study.r_list") cfg.r_list = parse_double_list(value, line);
  else if (full_key == "study.seeds") cfg.seeds = parse_u64_list(value, line);
  else if (full_key == "study.parallelism") cfg.parallelism = parse_size(value, line);
  else throw ConfigError(line, "unknown key '" + full_key + "'");
}

void validate(const Config& cfg, const KeyTracker& keys) {
  auto fail = [&](const std::string& key, const std::string& msg) {
    throw ConfigError(keys.line_of(key), msg);
  };
  if (!(cfg.T > 0.0)) fail("problem.T", "T must be positive");
  if (cfg.solver_n < 1) fail("problem.solver_n", "solver_n must be >= 1");
  try {
    (void)HolderExponents(cfg.beta, cfg.epsilon, cfg.lambda);
  } catch (const std::exception& e) {
    fail("problem.beta", e.what());
  }
  (void)signal_kind_from_string(cfg.signal_kind);
  if (cfg.dim < 1) fail("signal.dim", "dim must be >= 1");
  if (cfg.fine_factor < 1) fail("signal.fine_factor", "fine_factor must be >= 1");
  if (cfg.parallelism < 1) fail("study.parallelism", "parallelism must be >= 1");

  const double h = cfg.T / static_cast<double>(cfg.solver_n);
  const Grid solver(0.0, h, cfg.solver_n);
  auto require_multiple = [&](double r, const std::string& key) {
    try {
      (void)solver.delay_steps(r);
    } catch (const std::exception&) {
      fail(key, "r not a grid multiple");
    }
  };
  if (cfg.r < 0.0) fail("problem.r", "r must be nonnegative");
  require_multiple(cfg.r, "problem.r");
  if (cfg.r0 > 0.0) {
    require_multiple(cfg.r0, "problem.r0");
    if (cfg.r > cfg.r0) fail("problem.r", "need r <= r0");
  }
  // divisibility of r_list is enforced here only when the key was set in
  // the file; study_config() re-checks it for every converge run
  const bool r_list_from_file = keys.line_of("study.r_list") != 0;
  for (std::size_t i = 0; i < cfg.r_list.size(); ++i) {
    if (!(cfg.r_list[i] > 0.0)) fail("study.r_list", "r_list entries must be positive");
    if (r_list_from_file) require_multiple(cfg.r_list[i], "study.r_list");
    if (i > 0 && !(cfg.r_list[i] < cfg.r_list[i - 1]))
      fail("study.r_list", "r_list must be strictly decreasing");
  }
  if (cfg.seeds.empty()) fail("study.seeds", "seeds must not be empty");
  if (cfg.fine_n != 0 && cfg.fine_n % cfg.solver_n != 0)
    fail("signal.fine_n", "fine_n must be a multiple of solver_n");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

std::string fmt_list(const std::vector<std::uint64_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(v[i]);
  }
  return out;
}

} // namespace

Config parse_config(const std::string& text) {
  Config cfg;
  KeyTracker keys;
  std::string section;
  std::stringstream ss(text);
  std::string raw;
  int line = 0;
  while (std::getline(ss, raw)) {
    ++line;
    const std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "signal" && section != "coeff" && section != "problem" &&
          section != "study")
        throw ConfigError(line, "unknown section '" + section + "'");
      continue;
    }
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key=value");
    std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError(line, "empty key");
    if (!section.empty()) {
      if (key.rfind(section + ".", 0) != 0) key = section + "." + key;
    } else if (key.find('.') == std::string::npos) {
      throw ConfigError(line, "key '" + key + "' outside any section");
    }
    set_key(cfg, key, value, line);
    keys.lines[key] = line;
  }
  validate(cfg, keys);
  return cfg;
}

void apply_override(Config& cfg, const std::string& assignment) {
  const std::size_t eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError(0, "override must be key=value: " + assignment);
  set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), 0);
}

void validate_config(const Config& cfg) { validate(cfg, KeyTracker{}); }

std::string serialize_config(const Config& cfg) {
  std::string out;
  out += "[problem]\n";
  out += "T=" + fmt(cfg.T) + "\n";
  out += "solver_n=" + std::to_string(cfg.solver_n) + "\n";
  out += "r=" + fmt(cfg.r) + "\n";
  out += "r0=" + fmt(cfg.r0) + "\n";
  out += "beta=" + fmt(cfg.beta) + "\n";
  out += "epsilon=" + fmt(cfg.epsilon) + "\n";
  out += "eta0=" + fmt_list(cfg.eta0) + "\n";
  out += "eta_slope=" + fmt(cfg.eta_slope) + "\n";
  out += "K=" + fmt(cfg.K) + "\n";
  out += "[signal]\n";
  out += "kind=" + cfg.signal_kind + "\n";
  out += "dim=" + std::to_string(cfg.dim) + "\n";
  out += "fine_n=" + std::to_string(cfg.fine_n) + "\n";
  out += "fine_factor=" + std::to_string(cfg.fine_factor) + "\n";
  out += "seed=" + std::to_string(cfg.seed) + "\n";
  out += "r_max=" + fmt(cfg.r_max) + "\n";
  if (!cfg.poly.empty()) {
    out += "params.poly=";
    for (std::size_t i = 0; i < cfg.poly.size(); ++i) {
      if (i) out += ";";
      out += fmt_list(cfg.poly[i]);
    }
    out += "\n";
  }
  if (!cfg.sine_amp.empty()) out += "params.amp=" + fmt_list(cfg.sine_amp) + "\n";
  if (!cfg.sine_freq.empty()) out += "params.freq=" + fmt_list(cfg.sine_freq) + "\n";
  if (!cfg.sine_phase.empty()) out += "params.phase=" + fmt_list(cfg.sine_phase) + "\n";
  out += "params.modes=" + std::to_string(cfg.fourier_modes) + "\n";
  out += "params.scale=" + fmt(cfg.fourier_scale) + "\n";
  out += "[coeff]\n";
  out += "name=" + cfg.coeff_name + "\n";
  out += "lambda=" + fmt(cfg.lambda) + "\n";
  out += "params.c=" + fmt(cfg.coeff_c) + "\n";
  if (!cfg.b_const.empty()) out += "params.b_const=" + fmt_list(cfg.b_const) + "\n";
  if (!cfg.b_linear.empty()) out += "params.b_linear=" + fmt_list(cfg.b_linear) + "\n";
  out += "[study]\n";
  out += "r_list=" + fmt_list(cfg.r_list) + "\n";
  out += "seeds=" + fmt_list(cfg.seeds) + "\n";
  out += "parallelism=" + std::to_string(cfg.parallelism) + "\n";
  return out;
}

HolderExponents Config::exps() const {
  return HolderExponents(beta, epsilon, lambda);
}

SignalSpec Config::signal_spec() const {
  SignalSpec s;
  s.kind = signal_kind_from_string(signal_kind);
  s.dim = dim;
  s.T = T;
  s.fine_n = fine_n != 0 ? fine_n : fine_factor * solver_n;
  s.seed = seed;
  double rmax = r_max;
  if (rmax < 0.0) rmax = r0 > 0.0 ? r0 : std::max(r, 0.0);
  s.r_max = rmax;
  if (s.kind == SignalKind::smooth_poly) {
    s.poly_coeffs = poly.empty()
                        ? std::vector<std::vector<double>>(dim, {0.0, 1.0})
                        : poly;
    if (s.poly_coeffs.size() == 1 && dim > 1)
      s.poly_coeffs.assign(dim, s.poly_coeffs[0]);
    if (s.poly_coeffs.size() != dim)
      throw ConfigError(0, "params.poly must have 1 or dim groups");
  }
  if (s.kind == SignalKind::smooth_sine) {
    auto expand = [&](std::vector<double> v, double dflt) {
      if (v.empty()) v.assign(dim, dflt);
      if (v.size() == 1 && dim > 1) v.assign(dim, v[0]);
      if (v.size() != dim)
        throw ConfigError(0, "sine params must have 1 or dim entries");
      return v;
    };
    s.sine_amp = expand(sine_amp, 1.0);
    s.sine_freq = expand(sine_freq, 1.0);
    s.sine_phase = expand(sine_phase, 0.0);
  }
  s.fourier_modes = fourier_modes;
  s.fourier_beta = beta;
  s.fourier_scale = fourier_scale;
  return s;
}

ProblemSpec Config::problem_spec() const {
  ProblemSpec p;
  p.exps = exps();
  p.T = T;
  p.r = r;
  p.r0 = r0;
  p.solver_n = solver_n;
  p.fine_factor = fine_n != 0 ? fine_n / solver_n : fine_factor;
  p.signal_kind = signal_kind_from_string(signal_kind);
  p.dim = dim;
  p.seed = seed;
  p.eta0 = eta0;
  p.eta_slope = eta_slope;
  p.coeff_name = coeff_name;
  p.coeff_constant = coeff_c;
  p.lambda = lambda;
  p.drift.b_const = b_const;
  p.drift.b_linear = b_linear;
  if (p.signal_kind != SignalKind::brownian) {
    SignalSpec s = signal_spec();
    s.fine_n = p.fine_factor * solver_n;  // tied to the solver grid
    p.signal_override = s;
  }
  return p;
}

StudyConfig Config::study_config() const {
  StudyConfig sc;
  sc.base = problem_spec();
  if (sc.base.r0 <= 0.0 && !r_list.empty()) sc.base.r0 = r_list.front();
  const Grid solver(0.0, T / static_cast<double>(solver_n), solver_n);
  for (double r : r_list)
    if (!(r > 0.0) || solver.delay_steps(r) == 0)
      throw ConfigError(0, "r not a grid multiple");
  sc.r_list = r_list;
  sc.seeds = seeds;
  sc.K = K;
  sc.parallelism = parallelism;
  return sc;
}

} // namespace roughdelay
