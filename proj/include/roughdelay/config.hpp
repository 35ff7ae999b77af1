#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughdelay/analysis.hpp"

namespace roughdelay {

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error("config line " + std::to_string(line_) + ": " + msg),
        line(line_) {}
};

/// Typed view of a key=value config with sections [signal], [coeff],
/// [problem], [study]. Unknown keys are rejected with their line number.
struct Config {
  // [problem]
  double T = 1.0;
  std::size_t solver_n = 1024;
  double r = 0.0;
  double r0 = 0.0;  // 0 = derive (max of r and r_list entries)
  double beta = 0.4;
  double epsilon = 0.02;
  std::vector<double> eta0 = {0.0};
  double eta_slope = 0.0;
  double K = 1.0;

  // [signal]
  std::string signal_kind = "brownian";
  std::size_t dim = 1;
  std::size_t fine_n = 0;      // 0 = fine_factor * solver_n
  std::size_t fine_factor = 8;
  std::uint64_t seed = 1;
  double r_max = -1.0;         // <0 = derive from r0
  std::vector<std::vector<double>> poly;   // params.poly, ';' per dimension
  std::vector<double> sine_amp, sine_freq, sine_phase;
  std::size_t fourier_modes = 64;
  double fourier_scale = 1.0;

  // [coeff]
  std::string coeff_name = "tanh_diag";
  double lambda = 0.9;
  double coeff_c = 1.0;              // params.c
  std::vector<double> b_const;       // params.b_const
  std::vector<double> b_linear;      // params.b_linear, d x d row-major

  // [study]; the default list is dyadic so it sits on the default grid
  std::vector<double> r_list = {0.25, 0.125, 0.0625, 0.03125, 0.015625};
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::size_t parallelism = 1;

  HolderExponents exps() const;
  SignalSpec signal_spec() const;    // standalone generation (gen subcommand)
  ProblemSpec problem_spec() const;
  StudyConfig study_config() const;
};

/// Parses key=value text ('#' comments, [section] headers). Throws
/// ConfigError with the offending line number. Validation that needs the
/// whole config (delay divisibility, exponent constraints) runs at the end
/// and reports the line that set the offending key (or line 0).
Config parse_config(const std::string& text);

/// Canonical form: every effective value, fixed section and key order.
/// serialize(parse(s)) is idempotent.
std::string serialize_config(const Config& cfg);

/// Applies a "section.key=value" override (the --set flag).
void apply_override(Config& cfg, const std::string& assignment);

/// Re-runs the cross-key validation (after overrides).
void validate_config(const Config& cfg);

} // namespace roughdelay
