#include "fnls/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "fnls/errors.hpp"
#include "fnls/parallel.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTwoPi = 6.283185307179586476925286766559;

std::string format_sigma(double sigma) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", sigma);
  return buf;
}

}  // namespace

std::vector<Observable> default_observables(const ModelParams& params) {
  std::vector<Observable> obs;
  obs.push_back({"mass", [](const SpectralState& u) { return mass(u); }});
  std::vector<double> sigmas = {0.1};
  if (std::abs(params.s - 0.1) > 1e-12) sigmas.push_back(params.s);
  for (double sigma : sigmas) {
    obs.push_back({"h_norm_" + format_sigma(sigma),
                   [sigma](const SpectralState& u) {
                     return sobolev_norm(u, sigma);
                   }});
  }
  obs.push_back(
      {"quartic", [](const SpectralState& u) { return quartic_integral(u); }});
  const int n_max = std::min(params.n_modes, 4);
  for (int n = -n_max; n <= n_max; ++n) {
    obs.push_back({"abs2_" + std::to_string(n),
                   [n](const SpectralState& u) { return std::norm(u.at(n)); }});
  }
  obs.push_back(
      {"re_u_1", [](const SpectralState& u) { return u.at(1).real(); }});
  return obs;
}

InvarianceReport invariance_test(const MeasureConfig& mconfig,
                                 const IntegratorConfig& iconfig, double T,
                                 long long count,
                                 const std::vector<Observable>& observables,
                                 std::uint64_t master_seed, int workers) {
  if (observables.empty()) {
    throw std::invalid_argument("invariance_test: observables must be nonempty");
  }
  if (count < 100) {
    throw std::invalid_argument("invariance_test: count must be >= 100");
  }

  GibbsSampleResult draws =
      sample_gibbs(mconfig, master_seed, count, workers);

  const std::size_t n_obs = observables.size();
  std::vector<double> diffs(static_cast<std::size_t>(count) * n_obs, 0.0);
  std::vector<double> log_weights(static_cast<std::size_t>(count), 0.0);

  parallel_for(count, workers, [&](long long i) {
    const WeightedSample& ws = draws.samples[static_cast<std::size_t>(i)];
    log_weights[static_cast<std::size_t>(i)] = ws.log_weight;
    if (ws.log_weight == kNegInf) return;  // zero weight: leave diffs at 0
    auto [final_state, log] = evolve(ws.state, mconfig.params, iconfig, T);
    (void)log;
    for (std::size_t k = 0; k < n_obs; ++k) {
      diffs[static_cast<std::size_t>(i) * n_obs + k] =
          observables[k].fn(final_state) - observables[k].fn(ws.state);
    }
  });

  InvarianceReport report;
  report.T = T;
  report.n_modes = mconfig.params.n_modes;
  report.count = count;
  report.scheme = iconfig.scheme;
  report.dt = iconfig.dt;
  report.acceptance_rate = draws.acceptance_rate;

  std::vector<double> column(static_cast<std::size_t>(count));
  for (std::size_t k = 0; k < n_obs; ++k) {
    for (long long i = 0; i < count; ++i) {
      column[static_cast<std::size_t>(i)] =
          diffs[static_cast<std::size_t>(i) * n_obs + k];
    }
    const Estimate est = weighted_estimate(log_weights, column);
    InvarianceEntry entry;
    entry.name = observables[k].name;
    entry.mean_diff = est.estimate;
    entry.std_error = est.std_error;
    entry.z_score = est.std_error > 0.0 ? est.estimate / est.std_error : 0.0;
    report.entries.push_back(entry);
    report.ess = est.ess;  // same weights for every column
  }
  report.underpowered = report.ess < 30.0;
  return report;
}

TailReport tail_test(const MeasureConfig& mconfig,
                     const std::vector<double>& k_grid, long long count,
                     std::uint64_t master_seed, int workers) {
  if (k_grid.empty() || !std::is_sorted(k_grid.begin(), k_grid.end())) {
    throw std::invalid_argument("tail_test: k_grid must be ascending");
  }
  for (double k : k_grid) {
    if (k < 0.0) throw std::invalid_argument("tail_test: K must be >= 0");
  }
  if (count < 1) throw std::invalid_argument("tail_test: count must be >= 1");

  const double sigma = mconfig.params.s;
  std::vector<double> norms(static_cast<std::size_t>(count));
  parallel_for(count, workers, [&](long long i) {
    RngStream rng(master_seed, static_cast<std::uint64_t>(i));
    const SpectralState u = sample_gaussian(mconfig, rng);
    norms[static_cast<std::size_t>(i)] = sobolev_norm(u, sigma);
  });

  TailReport report;
  report.count = count;
  report.sigma = sigma;
  double fitted_c = 0.0;
  for (double k : k_grid) {
    long long exceed = 0;
    for (double x : norms) {
      if (x > k) ++exceed;
    }
    TailRow row;
    row.k = k;
    row.empirical_prob =
        static_cast<double>(exceed) / static_cast<double>(count);
    row.std_error = std::sqrt(row.empirical_prob *
                              (1.0 - row.empirical_prob) /
                              static_cast<double>(count));
    row.bound = std::exp(-k * k / 4.0);
    report.rows.push_back(row);
    if (row.empirical_prob > 0.0) {
      fitted_c = std::max(fitted_c, row.empirical_prob / row.bound);
    }
  }
  report.fitted_c = fitted_c;
  report.bound_pass = true;
  for (const TailRow& row : report.rows) {
    if (row.empirical_prob > report.fitted_c * row.bound * (1.0 + 1e-12)) {
      report.bound_pass = false;
    }
  }
  return report;
}

SpectralState power_law_state(int n_modes, double s, double delta,
                              std::uint64_t seed) {
  if (n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  SpectralState u(n_modes);
  RngStream rng(seed, stream_phase::initial_data);
  const double expo = -s - 0.5 - delta;
  for (int n = 1; n <= n_modes; ++n) {
    const double rho = std::pow(static_cast<double>(n), expo);
    const double theta_p = kTwoPi * rng.next_double();
    const double theta_m = kTwoPi * rng.next_double();
    u.at(n) = rho * cplx(std::cos(theta_p), std::sin(theta_p));
    u.at(-n) = rho * cplx(std::cos(theta_m), std::sin(theta_m));
  }
  return u;
}

ConvergenceTable convergence_study(const ModelParams& base, double s,
                                   double s_prime,
                                   const std::vector<int>& n_list, int n_ref,
                                   double T, double delta, std::uint64_t seed,
                                   double dt, int workers) {
  if (n_list.empty() || !std::is_sorted(n_list.begin(), n_list.end())) {
    throw std::invalid_argument("convergence_study: n_list must be ascending");
  }
  if (n_list.back() > n_ref) {
    throw std::invalid_argument("convergence_study: n_list must be <= n_ref");
  }
  if (!(s_prime < s)) {
    throw std::invalid_argument("convergence_study: require s' < s");
  }

  ModelParams ref_params = base;
  ref_params.n_modes = n_ref;
  ref_params.s = s;
  if (dt <= 0.0) dt = default_dt(ref_params);

  const SpectralState u0 = power_law_state(n_ref, s, delta, seed);

  IntegratorConfig icfg;
  icfg.scheme = Scheme::rk4;
  icfg.dt = dt;
  icfg.record_every = std::numeric_limits<int>::max();

  auto [u_ref, ref_log] = evolve(u0, ref_params, icfg, T);
  (void)ref_log;

  ConvergenceTable table;
  table.n_ref = n_ref;
  table.T = T;
  table.dt = dt;
  table.s = s;
  table.s_prime = s_prime;
  table.rows.resize(n_list.size());

  parallel_for(static_cast<long long>(n_list.size()), workers,
               [&](long long idx) {
                 const int N = n_list[static_cast<std::size_t>(idx)];
                 ModelParams p = ref_params;
                 p.n_modes = N;
                 auto [u_n, log_n] = evolve(resized(u0, N), p, icfg, T);
                 (void)log_n;
                 const SpectralState u_n_ext = resized(u_n, n_ref);
                 double err2 = 0.0;
                 for (int n = -n_ref; n <= n_ref; ++n) {
                   const double w = std::pow(
                       1.0 + static_cast<double>(n) * n, s_prime);
                   err2 += w * std::norm(u_ref.at(n) - u_n_ext.at(n));
                 }
                 table.rows[static_cast<std::size_t>(idx)] = {N,
                                                              std::sqrt(err2)};
               });

  // least squares on (log N, log error); rows with error 0 cannot enter
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const ConvergenceRow& row : table.rows) {
    if (row.error <= 0.0) continue;
    const double x = std::log(static_cast<double>(row.n_modes));
    const double y = std::log(row.error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    const double denom = m * sxx - sx * sx;
    table.slope = (m * sxy - sx * sy) / denom;
    const double intercept = (sy - table.slope * sx) / m;
    double rss = 0.0;
    for (const ConvergenceRow& row : table.rows) {
      if (row.error <= 0.0) continue;
      const double x = std::log(static_cast<double>(row.n_modes));
      const double r = std::log(row.error) - (intercept + table.slope * x);
      rss += r * r;
    }
    table.fit_residual = std::sqrt(rss / m);
  }
  return table;
}

namespace {

double weighted_quantile(std::vector<std::pair<double, double>>& value_weight,
                         double p) {
  std::sort(value_weight.begin(), value_weight.end());
  double total = 0.0;
  for (const auto& vw : value_weight) total += vw.second;
  if (total <= 0.0) return 0.0;
  double cum = 0.0;
  for (const auto& vw : value_weight) {
    cum += vw.second;
    if (cum >= p * total) return vw.first;
  }
  return value_weight.back().first;
}

struct LinearFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;
};

// least squares of y ~ a + b x with b clamped to >= 0
LinearFit fit_nonneg_slope(const std::vector<double>& x,
                           const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  LinearFit fit;
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) > 1e-300) {
    fit.b = (n * sxy - sx * sy) / denom;
  }
  if (fit.b < 0.0) fit.b = 0.0;
  fit.a = (sy - fit.b * sx) / static_cast<double>(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (fit.a + fit.b * x[i]);
    rss += r * r;
  }
  fit.rms = std::sqrt(rss / static_cast<double>(n));
  return fit;
}

}  // namespace

NormGrowthReport norm_growth(const MeasureConfig& mconfig,
                             const IntegratorConfig& iconfig, double t_max,
                             const std::vector<double>& checkpoint_times,
                             long long count, double sigma,
                             std::uint64_t master_seed, int workers) {
  if (checkpoint_times.empty() ||
      !std::is_sorted(checkpoint_times.begin(), checkpoint_times.end())) {
    throw std::invalid_argument("norm_growth: checkpoints must be ascending");
  }
  if (checkpoint_times.back() > t_max + 1e-12) {
    throw std::invalid_argument("norm_growth: checkpoints must be <= T_max");
  }

  std::vector<double> times = checkpoint_times;
  if (times.front() > 0.0) times.insert(times.begin(), 0.0);
  const std::size_t n_cp = times.size();

  GibbsSampleResult draws = sample_gibbs(mconfig, master_seed, count, workers);

  std::vector<double> norms(static_cast<std::size_t>(count) * n_cp, 0.0);
  std::vector<double> abort_time(static_cast<std::size_t>(count),
                                 std::numeric_limits<double>::infinity());

  parallel_for(count, workers, [&](long long i) {
    const WeightedSample& ws = draws.samples[static_cast<std::size_t>(i)];
    if (ws.log_weight == kNegInf) return;
    SpectralState u = ws.state;
    double t = 0.0;
    for (std::size_t j = 0; j < n_cp; ++j) {
      const double target = times[j];
      if (target > t) {
        try {
          auto [next, log] = evolve(u, mconfig.params, iconfig, target - t);
          (void)log;
          u = std::move(next);
        } catch (const numerics_error& e) {
          abort_time[static_cast<std::size_t>(i)] = t + e.last_good_time();
          return;
        }
        t = target;
      }
      norms[static_cast<std::size_t>(i) * n_cp + j] = sobolev_norm(u, sigma);
    }
  });

  NormGrowthReport report;
  report.sigma = sigma;
  report.count = count;

  double min_abort = std::numeric_limits<double>::infinity();
  for (double a : abort_time) min_abort = std::min(min_abort, a);
  if (std::isfinite(min_abort)) {
    report.aborted = true;
    report.last_good_time = min_abort;
  }

  for (std::size_t j = 0; j < n_cp; ++j) {
    if (times[j] > min_abort) break;  // partial table on abort
    std::vector<std::pair<double, double>> vw;
    vw.reserve(static_cast<std::size_t>(count));
    for (long long i = 0; i < count; ++i) {
      const double lw = draws.samples[static_cast<std::size_t>(i)].log_weight;
      if (lw == kNegInf) continue;
      vw.emplace_back(norms[static_cast<std::size_t>(i) * n_cp + j],
                      std::exp(lw));
    }
    NormGrowthRow row;
    row.t = times[j];
    row.q50 = weighted_quantile(vw, 0.50);
    row.q90 = weighted_quantile(vw, 0.90);
    row.q99 = weighted_quantile(vw, 0.99);
    report.rows.push_back(row);
  }

  if (report.rows.size() >= 2) {
    std::vector<double> x_log, x_poly_base, y;
    for (const NormGrowthRow& row : report.rows) {
      x_log.push_back(std::sqrt(std::log1p(row.t)));
      x_poly_base.push_back(row.t);
      y.push_back(row.q99);
    }
    const LinearFit lf = fit_nonneg_slope(x_log, y);
    report.log_fit_a = lf.a;
    report.log_fit_b = lf.b;
    report.log_fit_residual = lf.rms;

    double best_poly = std::numeric_limits<double>::infinity();
    double best_c = 0.5;
    for (double c : {0.5, 0.75, 1.0, 1.5, 2.0}) {
      std::vector<double> xp;
      for (double t : x_poly_base) xp.push_back(std::pow(t, c));
      const LinearFit pf = fit_nonneg_slope(xp, y);
      if (pf.rms < best_poly) {
        best_poly = pf.rms;
        best_c = c;
      }
    }
    report.poly_fit_residual = best_poly;
    report.poly_fit_exponent = best_c;
    report.log_model_preferred =
        report.log_fit_residual <= report.poly_fit_residual + 1e-12;
  }
  return report;
}

}  // namespace fnls
