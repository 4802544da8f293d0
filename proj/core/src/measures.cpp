#include "fnls/measures.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "fnls/errors.hpp"
#include "fnls/fourier.hpp"
#include "fnls/parallel.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// A stream aborts once it sees this many consecutive rejections: at an
// acceptance rate of 1e-4 the probability of a false abort is e^{-30}.
constexpr long long kMaxConsecutiveRejects = 300000;

}  // namespace

void MeasureConfig::validate() const {
  params.validate();
  if (params.gamma == 1 && !l2_cutoff_b.has_value()) {
    throw std::invalid_argument(
        "focusing (gamma = +1) requires an L2 cutoff B");
  }
  if (l2_cutoff_b.has_value() && !(*l2_cutoff_b > 0.0)) {
    throw std::invalid_argument("l2_cutoff_b must be > 0");
  }
  if (zero_mode == ZeroModePolicy::gaussian_proposal && !(sigma0 > 0.0)) {
    throw std::invalid_argument("sigma0 must be > 0");
  }
  if (method == SamplingMethod::rejection && params.gamma == 1) {
    throw std::invalid_argument(
        "rejection sampling requires gamma = -1 (bounded weight)");
  }
}

SpectralState sample_gaussian(const MeasureConfig& config, RngStream& rng) {
  const int N = config.params.n_modes;
  SpectralState state(N);
  // Draw order (part of the determinism contract): for n = 1..N the
  // components Re c_{+n}, Im c_{+n}, Re c_{-n}, Im c_{-n}, each
  // N(0, n^{-2 alpha}); then the zero mode when the policy is a Gaussian
  // proposal (Re, Im ~ N(0, sigma0^2)).
  for (int n = 1; n <= N; ++n) {
    const double sd = std::pow(static_cast<double>(n), -config.params.alpha);
    state.at(n) = cplx(sd * rng.next_gaussian(), sd * rng.next_gaussian());
    state.at(-n) = cplx(sd * rng.next_gaussian(), sd * rng.next_gaussian());
  }
  if (config.zero_mode == ZeroModePolicy::gaussian_proposal) {
    state.at(0) =
        cplx(config.sigma0 * rng.next_gaussian(),
             config.sigma0 * rng.next_gaussian());
  }
  return state;
}

double gibbs_log_weight(const SpectralState& state,
                        const MeasureConfig& config) {
  if (config.params.gamma == 1) {
    const double b = config.l2_cutoff_b.value();
    if (mass(state) > b * b) return kNegInf;
  }
  double lw = 0.25 * static_cast<double>(config.params.gamma) *
              quartic_integral(state);
  if (config.zero_mode == ZeroModePolicy::gaussian_proposal) {
    lw += std::norm(state.at(0)) / (2.0 * config.sigma0 * config.sigma0);
  }
  return lw;
}

double rejection_log_envelope(const MeasureConfig& config) {
  if (config.zero_mode == ZeroModePolicy::pinned_zero) return 0.0;
  const double s2 = config.sigma0 * config.sigma0;
  return 1.0 / (4.0 * s2 * s2);
}

namespace {

// Hot path for sample_gibbs: per-stream buffers, no state allocations until
// a draw is kept.
class ProposalEngine {
 public:
  explicit ProposalEngine(const MeasureConfig& config)
      : config_(config),
        N_(config.params.n_modes),
        M_(dealias_grid_size(config.params.n_modes)),
        sd_(static_cast<std::size_t>(config.params.n_modes) + 1),
        coeffs_(static_cast<std::size_t>(2 * config.params.n_modes + 1)),
        grid_(static_cast<std::size_t>(M_)) {
    for (int n = 1; n <= N_; ++n) {
      sd_[static_cast<std::size_t>(n)] =
          std::pow(static_cast<double>(n), -config.params.alpha);
    }
  }

  // Draws into the internal buffer and returns the log weight.
  double propose(RngStream& rng) {
    const double total_mass = draw(rng);
    if (config_.params.gamma == 1 &&
        total_mass > (*config_.l2_cutoff_b) * (*config_.l2_cutoff_b)) {
      return kNegInf;
    }
    return exact_log_weight();
  }

  // Rejection fast path (gamma = -1): the uniform is drawn in the same
  // stream position as in propose()+caller, and proposals whose cheap upper
  // bound lw <= -mass^2/4 + |c_0|^2/(2 sigma0^2) already fails the test are
  // rejected without the quartic evaluation. Identical output distribution
  // and identical stream consumption.
  bool propose_rejection(RngStream& rng, double log_env) {
    const double total_mass = draw(rng);
    const double log_u = std::log(1.0 - rng.next_double());  // (0, 1]
    double bound = -0.25 * total_mass * total_mass;
    if (config_.zero_mode == ZeroModePolicy::gaussian_proposal) {
      bound += std::norm(coeffs_[static_cast<std::size_t>(N_)]) /
               (2.0 * config_.sigma0 * config_.sigma0);
    }
    if (log_u >= bound - log_env) return false;
    return log_u < exact_log_weight() - log_env;
  }

  SpectralState take_state() const { return SpectralState(N_, coeffs_); }

 private:
  // Fills the coefficient buffer from the proposal and returns the mass.
  double draw(RngStream& rng) {
    auto& c = coeffs_;
    c[static_cast<std::size_t>(N_)] = cplx(0.0);
    for (int n = 1; n <= N_; ++n) {
      const double sd = sd_[static_cast<std::size_t>(n)];
      c[static_cast<std::size_t>(N_ + n)] =
          cplx(sd * rng.next_gaussian(), sd * rng.next_gaussian());
      c[static_cast<std::size_t>(N_ - n)] =
          cplx(sd * rng.next_gaussian(), sd * rng.next_gaussian());
    }
    if (config_.zero_mode == ZeroModePolicy::gaussian_proposal) {
      c[static_cast<std::size_t>(N_)] =
          cplx(config_.sigma0 * rng.next_gaussian(),
               config_.sigma0 * rng.next_gaussian());
    }
    double total_mass = 0.0;
    for (const cplx& v : c) total_mass += std::norm(v);
    return total_mass;
  }

  double exact_log_weight() {
    detail::pack_coeffs(coeffs_, N_, grid_);
    fft::backward(grid_);
    double quartic = 0.0;
    for (const cplx& v : grid_) {
      const double a2 = std::norm(v);
      quartic += a2 * a2;
    }
    quartic /= static_cast<double>(M_);
    double lw = 0.25 * static_cast<double>(config_.params.gamma) * quartic;
    if (config_.zero_mode == ZeroModePolicy::gaussian_proposal) {
      lw += std::norm(coeffs_[static_cast<std::size_t>(N_)]) /
            (2.0 * config_.sigma0 * config_.sigma0);
    }
    return lw;
  }

  const MeasureConfig& config_;
  int N_;
  int M_;
  std::vector<double> sd_;
  std::vector<cplx> coeffs_;
  std::vector<cplx> grid_;
};

}  // namespace

GibbsSampleResult sample_gibbs(const MeasureConfig& config,
                               std::uint64_t master_seed, long long count,
                               int workers, std::uint64_t stream_offset) {
  config.validate();
  if (count < 1) throw std::invalid_argument("count must be >= 1");

  GibbsSampleResult result;
  result.samples.resize(static_cast<std::size_t>(count));
  std::vector<long long> proposals(static_cast<std::size_t>(count), 0);

  if (config.method == SamplingMethod::importance) {
    parallel_for(count, workers, [&](long long i) {
      ProposalEngine engine(config);
      RngStream rng(master_seed, stream_offset + static_cast<std::uint64_t>(i));
      const double lw = engine.propose(rng);
      result.samples[static_cast<std::size_t>(i)] =
          WeightedSample{engine.take_state(), lw};
      proposals[static_cast<std::size_t>(i)] = 1;
    });
    result.proposals = count;
    result.acceptance_rate = 1.0;
    return result;
  }

  const double log_env = rejection_log_envelope(config);
  parallel_for(count, workers, [&](long long i) {
    ProposalEngine engine(config);
    RngStream rng(master_seed, stream_offset + static_cast<std::uint64_t>(i));
    long long rejects = 0;
    for (;;) {
      ++proposals[static_cast<std::size_t>(i)];
      if (engine.propose_rejection(rng, log_env)) {
        result.samples[static_cast<std::size_t>(i)] =
            WeightedSample{engine.take_state(), 0.0};
        return;
      }
      if (++rejects >= kMaxConsecutiveRejects) {
        throw sampling_error(
            "rejection acceptance rate below 1e-4; change parameters "
            "(smaller N, defocusing gamma, or importance sampling)");
      }
    }
  });

  long long total = 0;
  for (long long p : proposals) total += p;
  result.proposals = total;
  result.acceptance_rate =
      static_cast<double>(count) / static_cast<double>(total);
  return result;
}

namespace {

struct LogWeightMoments {
  double max_lw = kNegInf;
  double sum_w = 0.0;   // sum exp(lw - max_lw)
  double sum_w2 = 0.0;  // sum exp(2(lw - max_lw))
  long long n = 0;
  long long n_nonzero = 0;

  static LogWeightMoments from(const std::vector<double>& log_weights) {
    LogWeightMoments m;
    m.n = static_cast<long long>(log_weights.size());
    for (double lw : log_weights) {
      if (lw > m.max_lw) m.max_lw = lw;
    }
    if (m.max_lw == kNegInf) return m;
    for (double lw : log_weights) {
      if (lw == kNegInf) continue;
      const double w = std::exp(lw - m.max_lw);
      m.sum_w += w;
      m.sum_w2 += w * w;
      ++m.n_nonzero;
    }
    return m;
  }

  double ess() const { return sum_w2 > 0.0 ? sum_w * sum_w / sum_w2 : 0.0; }
};

}  // namespace

Estimate weighted_estimate(const std::vector<double>& log_weights,
                           const std::vector<double>& values) {
  if (log_weights.size() != values.size()) {
    throw std::invalid_argument("weighted_estimate: size mismatch");
  }
  const LogWeightMoments m = LogWeightMoments::from(log_weights);
  if (m.n_nonzero == 0) {
    throw sampling_error("weighted_estimate: every weight is zero");
  }
  double num = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (log_weights[i] == kNegInf) continue;
    num += std::exp(log_weights[i] - m.max_lw) * values[i];
  }
  const double estimate = num / m.sum_w;
  // delta-method variance of the ratio estimator
  double var = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (log_weights[i] == kNegInf) continue;
    const double w = std::exp(log_weights[i] - m.max_lw);
    const double dev = values[i] - estimate;
    var += w * w * dev * dev;
  }
  Estimate e;
  e.estimate = estimate;
  e.std_error = std::sqrt(var) / m.sum_w;
  e.ess = m.ess();
  e.n_samples = m.n;
  return e;
}

Estimate ensemble_estimate(
    const std::vector<WeightedSample>& samples,
    const std::function<double(const SpectralState&)>& observable) {
  if (samples.empty()) {
    throw std::invalid_argument("ensemble_estimate: no samples");
  }
  std::vector<double> lw(samples.size()), vals(samples.size(), 0.0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    lw[i] = samples[i].log_weight;
    if (lw[i] != kNegInf) vals[i] = observable(samples[i].state);
  }
  return weighted_estimate(lw, vals);
}

EnsembleReport estimate_all(
    const std::vector<WeightedSample>& samples,
    const std::vector<std::pair<
        std::string, std::function<double(const SpectralState&)>>>&
        observables) {
  EnsembleReport report;
  for (const auto& [name, fn] : observables) {
    report.entries.emplace_back(name, ensemble_estimate(samples, fn));
  }
  return report;
}

PartitionTable partition_stability(const MeasureConfig& config,
                                   const std::vector<int>& n_list,
                                   long long count, std::uint64_t master_seed,
                                   int workers) {
  if (n_list.empty()) throw std::invalid_argument("n_list must be nonempty");
  if (!std::is_sorted(n_list.begin(), n_list.end())) {
    throw std::invalid_argument("n_list must be ascending");
  }
  if (count < 2) throw std::invalid_argument("count must be >= 2");

  PartitionTable table;
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    MeasureConfig cfg = config;
    cfg.params.n_modes = n_list[idx];
    cfg.method = SamplingMethod::importance;
    cfg.validate();

    std::vector<double> lw(static_cast<std::size_t>(count));
    const std::uint64_t offset = static_cast<std::uint64_t>(idx) << 40;
    parallel_for(count, workers, [&](long long i) {
      ProposalEngine engine(cfg);
      RngStream rng(master_seed, offset + static_cast<std::uint64_t>(i));
      lw[static_cast<std::size_t>(i)] = engine.propose(rng);
    });

    const LogWeightMoments m = LogWeightMoments::from(lw);
    PartitionRow row;
    row.n_modes = n_list[idx];
    if (m.n_nonzero == 0) {
      row.z = 0.0;
      row.std_error = 0.0;
      row.ess = 0.0;
      row.flagged = true;
    } else {
      const double nn = static_cast<double>(count);
      const double m1 = m.sum_w / nn;
      const double m2 = m.sum_w2 / nn;
      const double scale = std::exp(m.max_lw);
      row.z = scale * m1;
      row.std_error =
          scale * std::sqrt(std::max(0.0, m2 - m1 * m1) / nn);
      row.ess = m.ess();
      row.flagged = row.ess < 10.0;
    }
    table.rows.push_back(row);
  }

  // Inverse-variance weighted constant fit; rows with zero SE dominate via a
  // floor at a tiny fraction of the value.
  double wsum = 0.0, wz = 0.0;
  for (const PartitionRow& r : table.rows) {
    const double se = std::max(r.std_error, 1e-300);
    const double w = 1.0 / (se * se);
    wsum += w;
    wz += w * r.z;
  }
  table.constant_fit = wsum > 0.0 ? wz / wsum : 0.0;
  const PartitionRow& last = table.rows.back();
  table.no_growth_pass =
      std::abs(last.z - table.constant_fit) <= 3.0 * last.std_error ||
      last.z <= table.constant_fit;  // shrinking tables never "grow"
  return table;
}

const char* growth_class_name(GrowthClass g) {
  switch (g) {
    case GrowthClass::bounded: return "bounded";
    case GrowthClass::logarithmic: return "logarithmic";
    case GrowthClass::power: return "power";
    case GrowthClass::indeterminate: return "indeterminate";
  }
  return "?";
}

LambdaDiagnostics lambda_k(double alpha, double s, long long k_max) {
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  const double expo = 2.0 * s - 2.0 * alpha;

  LambdaDiagnostics diag;
  diag.k_max = k_max;

  // geometric checkpoint grid: 16 points per decade, always including k_max
  std::vector<long long> marks;
  for (int j = 0;; ++j) {
    const long long k =
        static_cast<long long>(std::llround(std::pow(10.0, j / 16.0)));
    if (k >= k_max) break;
    if (marks.empty() || k > marks.back()) marks.push_back(k);
  }
  marks.push_back(k_max);

  // window sums for the growth classifier
  const long long w_hi = k_max;
  const long long w_mid = k_max / 10;
  const long long w_lo = k_max / 100;

  double sum = 0.0, comp = 0.0;  // Kahan
  double win1 = 0.0, win2 = 0.0;
  std::size_t mark_idx = 0;
  for (long long n = 1; n <= k_max; ++n) {
    const double term = 2.0 * std::pow(static_cast<double>(n), expo);
    const double y = term - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
    if (n > w_lo && n <= w_mid) win2 += term;
    if (n > w_mid && n <= w_hi) win1 += term;
    if (mark_idx < marks.size() && n == marks[mark_idx]) {
      diag.checkpoints.push_back({n, sum});
      ++mark_idx;
    }
  }
  diag.final_lambda = sum;

  if (k_max >= 100 && win1 > 0.0 && win2 > 0.0) {
    diag.fitted_exponent = std::log10(win1 / win2);
    const double eps = 0.01;
    if (diag.fitted_exponent < -eps) {
      diag.growth = GrowthClass::bounded;
    } else if (diag.fitted_exponent <= eps) {
      diag.growth = GrowthClass::logarithmic;
    } else {
      diag.growth = GrowthClass::power;
    }
    diag.divergent = diag.growth != GrowthClass::bounded;
  }
  return diag;
}

}  // namespace fnls
