#ifndef FNLS_MEASURES_HPP
#define FNLS_MEASURES_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fnls/params.hpp"
#include "fnls/rng.hpp"
#include "fnls/state.hpp"

namespace fnls {

enum class ZeroModePolicy { pinned_zero, gaussian_proposal };
enum class SamplingMethod { rejection, importance };

/// Configuration of the Gaussian proposal and the Gibbs target.
///
/// The Gaussian proposal draws Re c_n, Im c_n ~ N(0, |n|^{-2 alpha}) for
/// 1 <= |n| <= N. The symbol vanishes at n = 0, so the measure has no
/// Gaussian factor there: the zero mode is either pinned to 0 or drawn from
/// an auxiliary N(0, sigma0^2)-per-component proposal that is corrected in
/// the weight (full-measure experiments).
struct MeasureConfig {
  ModelParams params;
  /// L2 cutoff ||u|| <= B, i.e. mass <= B^2. Required when gamma = +1
  /// (the focusing weight is only integrable under a cutoff); unused by the
  /// weight when gamma = -1.
  std::optional<double> l2_cutoff_b;
  ZeroModePolicy zero_mode = ZeroModePolicy::pinned_zero;
  double sigma0 = 1.0;
  SamplingMethod method = SamplingMethod::rejection;

  void validate() const;
};

/// A state together with the natural log of its unnormalized importance
/// weight d(mu_N)/d(proposal). Rejection output carries log_weight = 0
/// (exact draws). -infinity marks an importance draw rejected by the L2
/// cutoff (weight zero); every other value is finite.
struct WeightedSample {
  SpectralState state;
  double log_weight = 0.0;
};

struct Estimate {
  double estimate = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  long long n_samples = 0;
};

/// One Gaussian proposal draw; consumes a fixed number of stream values
/// in a documented order (see measures.cpp).
SpectralState sample_gaussian(const MeasureConfig& config, RngStream& rng);

/// log of d(mu_N)/d(proposal) up to a constant:
///   (gamma/4) * quartic + |c_0|^2/(2 sigma0^2)  [gaussian_proposal only]
/// times the indicator mass <= B^2 when gamma = +1 (-inf when violated).
/// For gamma = -1 with a pinned zero mode the weight is <= 1 (log <= 0).
double gibbs_log_weight(const SpectralState& state, const MeasureConfig& config);

/// Hard envelope: sup over states of gibbs_log_weight for gamma = -1
/// (0 for pinned_zero, 1/(4 sigma0^4) for a Gaussian zero-mode proposal).
double rejection_log_envelope(const MeasureConfig& config);

struct GibbsSampleResult {
  std::vector<WeightedSample> samples;
  long long proposals = 0;
  double acceptance_rate = 1.0;  // 1 for the importance method
};

/// Draw `count` samples targeting mu_N. Rejection (gamma = -1 only) returns
/// exact draws with log_weight = 0; importance returns one weighted proposal
/// per sample. Sample i uses RngStream(master_seed, stream_offset + i), so
/// results are identical for every worker count.
GibbsSampleResult sample_gibbs(const MeasureConfig& config,
                               std::uint64_t master_seed, long long count,
                               int workers = 1,
                               std::uint64_t stream_offset = 0);

struct PartitionRow {
  int n_modes = 0;
  double z = 0.0;
  double std_error = 0.0;
  double ess = 0.0;
  bool flagged = false;  // degenerate ESS (< 10)
};

struct PartitionTable {
  std::vector<PartitionRow> rows;
  /// Inverse-variance weighted constant fit through the rows.
  double constant_fit = 0.0;
  /// No-growth acceptance: largest-N estimate within 3 SE of the fit.
  bool no_growth_pass = false;
};

/// Monte Carlo estimates of the Gibbs normalization Z_N = E_proposal[weight]
/// at each N in ascending n_list.
PartitionTable partition_stability(const MeasureConfig& config,
                                   const std::vector<int>& n_list,
                                   long long count, std::uint64_t master_seed,
                                   int workers = 1);

enum class GrowthClass { bounded, logarithmic, power, indeterminate };

const char* growth_class_name(GrowthClass g);

struct LambdaCheckpoint {
  long long k = 0;
  double lambda = 0.0;
};

struct LambdaDiagnostics {
  std::vector<LambdaCheckpoint> checkpoints;  // geometric grid plus k_max
  long long k_max = 0;
  double final_lambda = 0.0;
  GrowthClass growth = GrowthClass::indeterminate;
  /// Estimated growth exponent of the increments (2s - 2 alpha + 1 when the
  /// sum diverges polynomially; ~0 at the critical line).
  double fitted_exponent = 0.0;
  bool divergent = false;
};

/// Partial sums lambda_k = 2 sum_{n=1}^k n^{2s - 2 alpha} (both signs), with
/// compensated accumulation and a bounded / logarithmic / power growth
/// classification. The critical line s = alpha - 1/2 classifies as
/// logarithmic, hence divergent.
LambdaDiagnostics lambda_k(double alpha, double s, long long k_max);

/// Self-normalized importance estimate of E_mu[observable]:
/// sum w_i phi_i / sum w_i with delta-method standard error and
/// ESS = (sum w)^2 / sum w^2. Throws sampling_error when every weight is 0.
Estimate ensemble_estimate(
    const std::vector<WeightedSample>& samples,
    const std::function<double(const SpectralState&)>& observable);

/// Same estimator on precomputed observable values (values[i] belongs to
/// samples[i]'s weight).
Estimate weighted_estimate(const std::vector<double>& log_weights,
                           const std::vector<double>& values);

/// Named weighted Monte Carlo estimates over one ensemble. Invariants:
/// ess <= n_samples and std_error >= 0 for every entry.
struct EnsembleReport {
  std::vector<std::pair<std::string, Estimate>> entries;

  const Estimate* find(const std::string& name) const {
    for (const auto& [n, e] : entries) {
      if (n == name) return &e;
    }
    return nullptr;
  }
};

EnsembleReport estimate_all(
    const std::vector<WeightedSample>& samples,
    const std::vector<std::pair<
        std::string, std::function<double(const SpectralState&)>>>&
        observables);

}  // namespace fnls

#endif
