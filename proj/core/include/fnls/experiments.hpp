#ifndef FNLS_EXPERIMENTS_HPP
#define FNLS_EXPERIMENTS_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fnls/dynamics.hpp"
#include "fnls/measures.hpp"
#include "fnls/params.hpp"
#include "fnls/state.hpp"

namespace fnls {

struct Observable {
  std::string name;
  std::function<double(const SpectralState&)> fn;
};

/// The standard observable set: mass, H^0.1 and H^s norms, the quartic
/// integral, |c_n|^2 for |n| <= min(N, 4), and Re c_1.
std::vector<Observable> default_observables(const ModelParams& params);

struct InvarianceEntry {
  std::string name;
  double mean_diff = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
};

struct InvarianceReport {
  std::vector<InvarianceEntry> entries;
  double T = 0.0;
  int n_modes = 0;
  long long count = 0;
  double ess = 0.0;
  Scheme scheme = Scheme::strang;
  double dt = 0.0;
  double acceptance_rate = 1.0;
  bool underpowered = false;  // ESS < 30
};

/// Paired Monte Carlo invariance test: draw u_i ~ mu_N, flow for time T and
/// report the weighted mean of phi(S_T u) - phi(u) per observable. Exact
/// invariance of mu_N makes every mean zero up to integrator drift.
InvarianceReport invariance_test(const MeasureConfig& mconfig,
                                 const IntegratorConfig& iconfig, double T,
                                 long long count,
                                 const std::vector<Observable>& observables,
                                 std::uint64_t master_seed, int workers = 1);

struct TailRow {
  double k = 0.0;
  double empirical_prob = 0.0;
  double std_error = 0.0;  // binomial
  double bound = 0.0;      // e^{-K^2/4}
};

struct TailReport {
  std::vector<TailRow> rows;
  double fitted_c = 0.0;  // smallest C with p_K <= C e^{-K^2/4} on the grid
  bool bound_pass = false;
  long long count = 0;
  double sigma = 0.0;  // Sobolev index of the tested norm
};

/// Empirical P(||u||_{H^s} > K) under the Gaussian sampler against the
/// Gaussian tail bound e^{-K^2/4} with a single fitted constant.
TailReport tail_test(const MeasureConfig& mconfig,
                     const std::vector<double>& k_grid, long long count,
                     std::uint64_t master_seed, int workers = 1);

struct ConvergenceRow {
  int n_modes = 0;
  double error = 0.0;  // ||u_ref(T) - u_N(T)||_{H^{s'}}
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double slope = 0.0;         // least-squares slope of log error vs log N
  double fit_residual = 0.0;  // RMS residual of that fit
  int n_ref = 0;
  double T = 0.0;
  double dt = 0.0;
  double s = 0.0;
  double s_prime = 0.0;
};

/// Deterministic power-law initial data c_n = |n|^{-s-1/2-delta} e^{i theta_n}
/// for 1 <= |n| <= N (zero mode pinned), theta_n seeded.
SpectralState power_law_state(int n_modes, double s, double delta,
                              std::uint64_t seed);

/// Truncation convergence study: RK4 reference at n_ref versus the truncated
/// flows from P_N u_0, all at the same dt (dt <= 0 selects the n_ref
/// default). Expected slope is -(s - s').
ConvergenceTable convergence_study(const ModelParams& base, double s,
                                   double s_prime,
                                   const std::vector<int>& n_list, int n_ref,
                                   double T, double delta, std::uint64_t seed,
                                   double dt = 0.0, int workers = 1);

struct NormGrowthRow {
  double t = 0.0;
  double q50 = 0.0;
  double q90 = 0.0;
  double q99 = 0.0;
};

struct NormGrowthReport {
  std::vector<NormGrowthRow> rows;
  double sigma = 0.0;
  long long count = 0;
  /// Fit q99(t) ~ a + b sqrt(log(1+t)) with b >= 0.
  double log_fit_a = 0.0;
  double log_fit_b = 0.0;
  double log_fit_residual = 0.0;
  /// Best competing fit a + b t^c over c >= 1/2 (b >= 0).
  double poly_fit_residual = 0.0;
  double poly_fit_exponent = 0.0;
  bool log_model_preferred = false;
  bool aborted = false;
  double last_good_time = 0.0;
};

/// Ensemble quantiles of ||u(t)||_{H^sigma} along the flow of a mu_N
/// ensemble, with the logarithmic-vs-polynomial growth model comparison.
NormGrowthReport norm_growth(const MeasureConfig& mconfig,
                             const IntegratorConfig& iconfig, double t_max,
                             const std::vector<double>& checkpoint_times,
                             long long count, double sigma,
                             std::uint64_t master_seed, int workers = 1);

}  // namespace fnls

#endif
