#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ladpm/commands.hpp"
#include "ladpm/config.hpp"
#include "ladpm/errors.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  unsigned threads = 1;
  std::vector<double> lambdas;
  std::vector<int> steps;
  std::optional<std::uint64_t> trials;
};

void add_common(CLI::App* cmd, Options& opt, bool config_required) {
  auto* c = cmd->add_option("--config", opt.config_path, "experiment config (JSON)");
  if (config_required) c->required();
  cmd->add_option("--seed", opt.seed, "overrides the config seed");
  cmd->add_option("--out", opt.out_dir, "overrides the config output directory");
  cmd->add_option("--threads", opt.threads, "worker threads (speed only, never results)")
      ->check(CLI::PositiveNumber);
}

ladpm::ExperimentConfig resolve(const Options& opt) {
  ladpm::ExperimentConfig cfg =
      opt.config_path.empty() ? ladpm::parse_config("{}", "defaults") : ladpm::load_config(opt.config_path);
  if (opt.seed) cfg.seed = *opt.seed;
  cfg.sampler.seed = cfg.seed;
  if (opt.out_dir) cfg.output_dir = *opt.out_dir;
  if (!opt.lambdas.empty()) {
    for (double v : opt.lambdas) {
      if (!(v >= 0.0)) throw ladpm::ConfigError("--lambdas must be non-negative");
    }
    cfg.sweep.lambdas = opt.lambdas;
  }
  if (!opt.steps.empty()) {
    if (opt.steps.size() < 2) throw ladpm::ConfigError("--steps needs at least two step counts");
    for (int n : opt.steps) {
      if (n < 1) throw ladpm::ConfigError("--steps must be positive");
    }
    cfg.convergence.steps = opt.steps;
  }
  if (opt.trials) {
    if (*opt.trials < 1) throw ladpm::ConfigError("--trials must be positive");
    cfg.theory.trials = *opt.trials;
  }
  return cfg;
}

void print_summary(const ladpm::CommandOutcome& outcome, const ladpm::ExperimentConfig& cfg) {
  std::cout << outcome.report["metrics"].dump() << "\n";
  std::cout << "outputs written to " << cfg.output_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lookahead diffusion samplers on analytic targets"};
  app.set_version_flag("--version", LADPM_VERSION);
  app.require_subcommand(1);

  Options opt;
  auto* sample = app.add_subcommand("sample", "draw samples and score them against the target");
  add_common(sample, opt, true);

  auto* sweep = app.add_subcommand("sweep-lambda", "score one run per lookahead strength");
  add_common(sweep, opt, true);
  sweep->add_option("--lambdas", opt.lambdas, "overrides sweep.lambdas");

  auto* conv = app.add_subcommand("convergence", "terminal error against step count on the identity flow");
  add_common(conv, opt, true);
  conv->add_option("--steps", opt.steps, "overrides convergence.steps");

  auto* theory = app.add_subcommand("validate-theory", "check the optimal-strength formula and its Monte-Carlo estimate");
  add_common(theory, opt, false);
  theory->add_option("--trials", opt.trials, "overrides theory.trials");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    const ladpm::ExperimentConfig cfg = resolve(opt);
    ladpm::CommandOutcome outcome;
    if (sample->parsed()) {
      outcome = ladpm::cmd_sample(cfg, opt.threads);
    } else if (sweep->parsed()) {
      outcome = ladpm::cmd_sweep_lambda(cfg, opt.threads);
    } else if (conv->parsed()) {
      outcome = ladpm::cmd_convergence(cfg, opt.threads);
    } else {
      outcome = ladpm::cmd_validate_theory(cfg, opt.threads);
    }
    print_summary(outcome, cfg);
    if (!outcome.passed) {
      std::cerr << "error: one or more checks failed; see report.json\n";
      return kExitNumeric;
    }
    return 0;
  } catch (const ladpm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ladpm::DomainError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ladpm::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
}
