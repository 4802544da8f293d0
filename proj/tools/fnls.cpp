// Batch driver for the truncated fractional NLS laboratory.
//
// Subcommands: evolve, sample, invariance, tails, converge, lambda.
// Exit codes: 0 success, 1 configuration error, 2 numerical abort,
// 3 asserted inequality failed. Diagnostics go to stderr; each subcommand
// prints a one-line summary to stdout and writes its artifacts under the
// --out prefix.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fnls/dynamics.hpp"
#include "fnls/errors.hpp"
#include "fnls/experiments.hpp"
#include "fnls/io.hpp"
#include "fnls/measures.hpp"
#include "fnls/parallel.hpp"
#include "fnls/spectral.hpp"

namespace {

using namespace fnls;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitAssertion = 3;

struct CommonOpts {
  double alpha = 0.75;
  int gamma = -1;
  int modes = 8;
  double s = 0.25;
  std::uint64_t seed = 0;
  std::string out = "fnls_out";
  int workers = default_workers();
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  // later occurrences win, so config-file tokens (inserted first) are
  // overridden by explicit flags
  cmd->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--alpha", o.alpha, "dispersion exponent in (1/2, 1]")
      ->required();
  cmd->add_option("--gamma", o.gamma, "+1 focusing, -1 defocusing");
  cmd->add_option("--modes", o.modes, "truncation N (|n| <= N)");
  cmd->add_option("--s", o.s, "Sobolev index for measures/norms");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output path prefix");
  cmd->add_option("--workers", o.workers, "max parallel workers");
}

// Expand `--config FILE` (flat key=value lines, '#' comments) into long-flag
// tokens inserted directly after the subcommand name, so explicit flags
// override the file.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  for (std::size_t i = 2; i < args.size(); ++i) {
    if (args[i] != "--config") continue;
    if (i + 1 >= args.size()) {
      throw std::invalid_argument("--config requires a file path");
    }
    const std::string path = args[i + 1];
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read config file: " + path);
    std::vector<std::string> tokens;
    std::string line;
    while (std::getline(in, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
      };
      const std::string key = trim(line.substr(0, eq));
      const std::string value = trim(line.substr(eq + 1));
      if (key.empty()) continue;
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
    args.erase(args.begin() + static_cast<long>(i),
               args.begin() + static_cast<long>(i) + 2);
    args.insert(args.begin() + 2, tokens.begin(), tokens.end());
    break;
  }
  return args;
}

ModelParams make_params(const CommonOpts& o) {
  ModelParams p;
  p.alpha = o.alpha;
  p.gamma = o.gamma;
  p.n_modes = o.modes;
  p.s = o.s;
  p.validate();
  return p;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

// --init plane_wave:n:a | power_law:s:delta:seed | file:path
SpectralState parse_initial_data(const std::string& spec, ModelParams& params) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw std::invalid_argument("empty --init spec");
  if (parts[0] == "plane_wave") {
    if (parts.size() != 3) {
      throw std::invalid_argument("plane_wave:<n>:<amplitude>");
    }
    const int n = std::stoi(parts[1]);
    const double a = std::stod(parts[2]);
    if (std::abs(n) > params.n_modes) {
      throw std::invalid_argument("plane_wave mode exceeds --modes");
    }
    SpectralState u(params.n_modes);
    u.at(n) = cplx(a, 0.0);
    return u;
  }
  if (parts[0] == "power_law") {
    if (parts.size() != 4) {
      throw std::invalid_argument("power_law:<s>:<delta>:<seed>");
    }
    return power_law_state(params.n_modes, std::stod(parts[1]),
                           std::stod(parts[2]),
                           static_cast<std::uint64_t>(std::stoull(parts[3])));
  }
  if (parts[0] == "file") {
    if (parts.size() < 2) throw std::invalid_argument("file:<path>");
    // paths may contain ':'; rejoin the tail
    std::string path = spec.substr(5);
    auto [state, alpha] = read_state_json(path);
    if (std::abs(alpha - params.alpha) > 1e-12) {
      throw std::invalid_argument("state file alpha disagrees with --alpha");
    }
    if (state.n_modes != params.n_modes) {
      throw std::invalid_argument("state file n_modes disagrees with --modes");
    }
    return state;
  }
  throw std::invalid_argument("unknown --init kind '" + parts[0] + "'");
}

ZeroModePolicy parse_zero_mode(const std::string& text, double& sigma0) {
  if (text == "pinned") return ZeroModePolicy::pinned_zero;
  const auto parts = split(text, ':');
  if (parts[0] == "gaussian") {
    if (parts.size() == 2) sigma0 = std::stod(parts[1]);
    return ZeroModePolicy::gaussian_proposal;
  }
  throw std::invalid_argument(
      "zero-mode must be 'pinned' or 'gaussian[:sigma0]'");
}

RunMeta base_meta(const CommonOpts& o) {
  RunMeta meta;
  meta.seed = o.seed;
  meta.add("alpha", o.alpha);
  meta.add("gamma", o.gamma);
  meta.add("modes", o.modes);
  meta.add("s", o.s);
  return meta;
}

// ---------------------------------------------------------------- evolve --

struct EvolveOpts {
  CommonOpts common;
  std::string init;
  double time = 1.0;
  double dt = 0.0;
  std::string scheme = "strang";
  int record_every = 1;
};

int run_evolve(const EvolveOpts& o) {
  ModelParams params = make_params(o.common);
  SpectralState u0 = parse_initial_data(o.init, params);

  IntegratorConfig cfg;
  cfg.scheme = scheme_from_name(o.scheme);
  cfg.dt = o.dt > 0.0 ? o.dt : default_dt(params);
  cfg.record_every = o.record_every;
  cfg.record_sigmas = {0.1, params.s};

  auto [uT, log] = evolve(u0, params, cfg, o.time);

  write_text_file(o.common.out + ".traj.csv", trajectory_to_csv(log));
  write_state_json(o.common.out + ".state.json", uT, params.alpha);

  std::cout << "evolve: T=" << format_full(o.time)
            << " mass=" << format_full(mass(uT))
            << " hamiltonian=" << format_full(hamiltonian(uT, params)) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- sample --

struct SampleOpts {
  CommonOpts common;
  long long count = 1000;
  std::string method = "rejection";
  std::string zero_mode = "pinned";
  double cutoff_b = 0.0;
};

MeasureConfig make_measure_config(const CommonOpts& common,
                                  const std::string& method,
                                  const std::string& zero_mode,
                                  double cutoff_b) {
  MeasureConfig cfg;
  cfg.params = make_params(common);
  if (cutoff_b > 0.0) cfg.l2_cutoff_b = cutoff_b;
  cfg.zero_mode = parse_zero_mode(zero_mode, cfg.sigma0);
  if (method == "rejection") {
    cfg.method = SamplingMethod::rejection;
  } else if (method == "importance") {
    cfg.method = SamplingMethod::importance;
  } else {
    throw std::invalid_argument("method must be rejection|importance");
  }
  cfg.validate();
  return cfg;
}

int run_sample(const SampleOpts& o) {
  const MeasureConfig cfg = make_measure_config(o.common, o.method,
                                                o.zero_mode, o.cutoff_b);
  const GibbsSampleResult res =
      sample_gibbs(cfg, o.common.seed, o.count, o.common.workers);
  write_text_file(o.common.out + ".samples.jsonl",
                  samples_to_jsonl(res.samples, cfg.params.alpha));
  std::cout << "sample: count=" << o.count << " method=" << o.method
            << " acceptance=" << format_full(res.acceptance_rate) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------ invariance --

struct InvarianceOpts {
  CommonOpts common;
  double time = 1.0;
  double dt = 1e-3;
  std::string scheme = "strang";
  long long count = 10000;
  std::string method = "rejection";
  std::string zero_mode = "gaussian:1.0";
  double cutoff_b = 0.0;
};

int run_invariance(const InvarianceOpts& o) {
  const MeasureConfig mcfg = make_measure_config(o.common, o.method,
                                                 o.zero_mode, o.cutoff_b);
  IntegratorConfig icfg;
  icfg.scheme = scheme_from_name(o.scheme);
  icfg.dt = o.dt;
  icfg.record_every = 1 << 30;

  const auto obs = default_observables(mcfg.params);
  const InvarianceReport r = invariance_test(mcfg, icfg, o.time, o.count, obs,
                                             o.common.seed, o.common.workers);

  RunMeta meta = base_meta(o.common);
  meta.add("T", o.time);
  meta.add("dt", o.dt);
  meta.add("scheme", o.scheme);
  meta.add("count", static_cast<long long>(o.count));
  meta.add("method", o.method);
  meta.add("zero_mode", o.zero_mode);

  write_text_file(o.common.out + ".json", invariance_to_json(r, meta));
  write_text_file(o.common.out + ".csv", invariance_to_csv(r));

  double max_z = 0.0;
  for (const InvarianceEntry& e : r.entries) {
    if (e.name == "mass") continue;  // pathwise invariant: z means drift only
    max_z = std::max(max_z, std::abs(e.z_score));
  }
  std::cout << "invariance: max|z|=" << format_full(max_z)
            << " ess=" << format_full(r.ess)
            << " acceptance=" << format_full(r.acceptance_rate)
            << (r.underpowered ? " UNDERPOWERED" : "") << "\n";
  return kExitOk;
}

// ----------------------------------------------------------------- tails --

struct TailOpts {
  CommonOpts common;
  double k_min = 1.0;
  double k_max = 4.0;
  double k_step = 0.5;
  long long count = 100000;
};

int run_tails(const TailOpts& o) {
  MeasureConfig mcfg;
  mcfg.params = make_params(o.common);

  std::vector<double> grid;
  for (double k = o.k_min; k <= o.k_max + 1e-12; k += o.k_step) {
    grid.push_back(k);
  }
  const TailReport r =
      tail_test(mcfg, grid, o.count, o.common.seed, o.common.workers);

  RunMeta meta = base_meta(o.common);
  meta.add("k_min", o.k_min);
  meta.add("k_max", o.k_max);
  meta.add("k_step", o.k_step);
  meta.add("count", static_cast<long long>(o.count));

  write_text_file(o.common.out + ".json", tail_to_json(r, meta));
  write_text_file(o.common.out + ".csv", tail_to_csv(r));

  std::cout << "tails: fitted_C=" << format_full(r.fitted_c) << " bound "
            << (r.bound_pass ? "pass" : "FAIL") << "\n";
  return r.bound_pass ? kExitOk : kExitAssertion;
}

// -------------------------------------------------------------- converge --

struct ConvergeOpts {
  CommonOpts common;
  double s_prime = 0.1;
  std::string n_list = "8,16,32,64";
  int n_ref = 256;
  double time = 0.5;
  double dt = 0.0;
  double delta = 0.01;
};

int run_converge(const ConvergeOpts& o) {
  ModelParams base = make_params(o.common);
  std::vector<int> n_list;
  for (const std::string& part : split(o.n_list, ',')) {
    n_list.push_back(std::stoi(part));
  }
  const ConvergenceTable t =
      convergence_study(base, o.common.s, o.s_prime, n_list, o.n_ref, o.time,
                        o.delta, o.common.seed, o.dt, o.common.workers);

  RunMeta meta = base_meta(o.common);
  meta.add("s_prime", o.s_prime);
  meta.add("n_ref", o.n_ref);
  meta.add("T", o.time);
  meta.add("dt", t.dt);
  meta.add("delta", o.delta);

  write_text_file(o.common.out + ".json", convergence_to_json(t, meta));
  write_text_file(o.common.out + ".csv", convergence_to_csv(t));

  std::cout << "converge: slope=" << format_full(t.slope)
            << " target=" << format_full(-(o.common.s - o.s_prime))
            << " residual=" << format_full(t.fit_residual) << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- lambda --

struct LambdaOpts {
  CommonOpts common;
  long long k_max = 1000000;
};

int run_lambda(const LambdaOpts& o) {
  // gamma/modes are irrelevant here; only alpha and s enter
  const LambdaDiagnostics d = lambda_k(o.common.alpha, o.common.s, o.k_max);

  RunMeta meta = base_meta(o.common);
  meta.add("k_max", static_cast<long long>(o.k_max));

  write_text_file(o.common.out + ".json", lambda_to_json(d, meta));
  write_text_file(o.common.out + ".csv", lambda_to_csv(d));

  std::cout << "lambda: lambda_k(" << o.k_max
            << ")=" << format_full(d.final_lambda)
            << " class=" << growth_class_name(d.growth)
            << (d.divergent ? " (divergent)" : " (convergent)") << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectral simulator and Monte Carlo laboratory for the "
               "Galerkin-truncated periodic fractional cubic NLS"};
  app.require_subcommand(1);

  EvolveOpts evolve_opts;
  auto* cmd_evolve = app.add_subcommand("evolve", "integrate one trajectory");
  add_common(cmd_evolve, evolve_opts.common);
  cmd_evolve
      ->add_option("--init", evolve_opts.init,
                   "plane_wave:n:a | power_law:s:delta:seed | file:path")
      ->required();
  cmd_evolve->add_option("--time", evolve_opts.time, "final time T");
  cmd_evolve->add_option("--dt", evolve_opts.dt, "step (default per N)");
  cmd_evolve->add_option("--scheme", evolve_opts.scheme, "strang|rk4|picard");
  cmd_evolve->add_option("--record-every", evolve_opts.record_every,
                         "steps between log rows");

  SampleOpts sample_opts;
  auto* cmd_sample = app.add_subcommand("sample", "draw mu_N samples");
  add_common(cmd_sample, sample_opts.common);
  cmd_sample->add_option("--count", sample_opts.count, "samples to draw");
  cmd_sample->add_option("--method", sample_opts.method,
                         "rejection|importance");
  cmd_sample->add_option("--zero-mode", sample_opts.zero_mode,
                         "pinned | gaussian[:sigma0]");
  cmd_sample->add_option("--cutoff-b", sample_opts.cutoff_b,
                         "L2 cutoff B (required for gamma=+1)");

  InvarianceOpts inv_opts;
  auto* cmd_inv = app.add_subcommand("invariance", "paired invariance test");
  add_common(cmd_inv, inv_opts.common);
  cmd_inv->add_option("--time", inv_opts.time, "flow time T");
  cmd_inv->add_option("--dt", inv_opts.dt, "integrator step");
  cmd_inv->add_option("--scheme", inv_opts.scheme, "strang|rk4|picard");
  cmd_inv->add_option("--count", inv_opts.count, "ensemble size");
  cmd_inv->add_option("--method", inv_opts.method, "rejection|importance");
  cmd_inv->add_option("--zero-mode", inv_opts.zero_mode,
                      "pinned | gaussian[:sigma0]");
  cmd_inv->add_option("--cutoff-b", inv_opts.cutoff_b, "L2 cutoff B");

  TailOpts tail_opts;
  auto* cmd_tails = app.add_subcommand("tails", "Gaussian norm tail bound");
  add_common(cmd_tails, tail_opts.common);
  cmd_tails->add_option("--k-min", tail_opts.k_min, "smallest K");
  cmd_tails->add_option("--k-max", tail_opts.k_max, "largest K");
  cmd_tails->add_option("--k-step", tail_opts.k_step, "K grid step");
  cmd_tails->add_option("--count", tail_opts.count, "samples");

  ConvergeOpts conv_opts;
  auto* cmd_conv = app.add_subcommand("converge", "truncation rate study");
  add_common(cmd_conv, conv_opts.common);
  cmd_conv->add_option("--s-prime", conv_opts.s_prime, "comparison index s'");
  cmd_conv->add_option("--n-list", conv_opts.n_list, "comma-separated N list");
  cmd_conv->add_option("--n-ref", conv_opts.n_ref, "reference truncation");
  cmd_conv->add_option("--time", conv_opts.time, "final time T");
  cmd_conv->add_option("--dt", conv_opts.dt, "step (default per n_ref)");
  cmd_conv->add_option("--delta", conv_opts.delta,
                       "spectral margin of the power-law data");

  LambdaOpts lambda_opts;
  auto* cmd_lambda =
      app.add_subcommand("lambda", "countable-additivity partial sums");
  add_common(cmd_lambda, lambda_opts.common);
  cmd_lambda->add_option("--k-max", lambda_opts.k_max, "largest k");

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  }
  // CLI11 parses the reversed token list
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  reversed.pop_back();  // drop the program name

  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    std::cerr << "run with --help for usage\n";
    return kExitConfig;
  }

  try {
    if (cmd_evolve->parsed()) return run_evolve(evolve_opts);
    if (cmd_sample->parsed()) return run_sample(sample_opts);
    if (cmd_inv->parsed()) return run_invariance(inv_opts);
    if (cmd_tails->parsed()) return run_tails(tail_opts);
    if (cmd_conv->parsed()) return run_converge(conv_opts);
    if (cmd_lambda->parsed()) return run_lambda(lambda_opts);
  } catch (const numerics_error& e) {
    std::cerr << "numerical abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const sampling_error& e) {
    std::cerr << "sampling abort: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
