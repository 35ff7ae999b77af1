#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "roughdelay/runner.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw roughdelay::ConfigError(0, "cannot read config file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::size_t parallelism = 0;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed, "master seed (overrides signal.seed)")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--parallelism", opts.parallelism, "worker threads for converge");
  cmd->add_option("--set", opts.overrides, "override, e.g. --set problem.r=0.1")
      ->take_all();
}

roughdelay::Config load_config(const CommonOpts& opts) {
  roughdelay::Config cfg;
  if (!opts.config_path.empty())
    cfg = roughdelay::parse_config(read_file(opts.config_path));
  for (const auto& ov : opts.overrides) roughdelay::apply_override(cfg, ov);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (opts.parallelism > 0) cfg.parallelism = opts.parallelism;
  roughdelay::validate_config(cfg);
  return cfg;
}

std::string resolve_out(const CommonOpts& opts) {
  if (const char* env = std::getenv("ROUGHDELAY_OUT"); env && *env) return env;
  return opts.out_dir;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"delay equations driven by rough signals: generators, solver, "
               "convergence experiments"};
  app.require_subcommand(1);

  CommonOpts gen_o, solve_o, conv_o, check_o, bounds_o;
  CLI::App* gen = app.add_subcommand("gen", "generate a driving signal");
  add_common(gen, gen_o);
  CLI::App* solve = app.add_subcommand("solve", "solve one problem instance");
  add_common(solve, solve_o);
  CLI::App* conv = app.add_subcommand("converge", "run the r-sweep study");
  add_common(conv, conv_o);
  CLI::App* check = app.add_subcommand("check", "run the invariant suite");
  add_common(check, check_o);
  CLI::App* bounds = app.add_subcommand("bounds", "a-priori bound report");
  add_common(bounds, bounds_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return roughdelay::run_gen(load_config(gen_o), resolve_out(gen_o), std::cout);
    if (solve->parsed())
      return roughdelay::run_solve(load_config(solve_o), resolve_out(solve_o),
                                   std::cout);
    if (conv->parsed())
      return roughdelay::run_converge(load_config(conv_o), resolve_out(conv_o),
                                      std::cout);
    if (check->parsed())
      return roughdelay::run_check(load_config(check_o), std::cout);
    if (bounds->parsed())
      return roughdelay::run_bounds(load_config(bounds_o), std::cout);
  } catch (const roughdelay::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
