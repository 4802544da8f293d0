#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "fnls/errors.hpp"
#include "fnls/measures.hpp"
#include "fnls/spectral.hpp"
#include "test_util.hpp"

using namespace fnls;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MeasureConfig defocusing(int n_modes, double alpha = 0.75) {
  MeasureConfig cfg;
  cfg.params.alpha = alpha;
  cfg.params.gamma = -1;
  cfg.params.n_modes = n_modes;
  return cfg;
}

MeasureConfig focusing(int n_modes, double b) {
  MeasureConfig cfg;
  cfg.params.alpha = 0.75;
  cfg.params.gamma = 1;
  cfg.params.n_modes = n_modes;
  cfg.l2_cutoff_b = b;
  cfg.method = SamplingMethod::importance;
  return cfg;
}

}  // namespace

TEST_CASE("config validation") {
  MeasureConfig cfg = defocusing(4);
  CHECK_NOTHROW(cfg.validate());

  cfg.params.gamma = 1;  // focusing without cutoff
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.l2_cutoff_b = 2.0;
  cfg.method = SamplingMethod::rejection;  // rejection needs gamma = -1
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.method = SamplingMethod::importance;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("proposal moments: E|c_n|^2 = 2 |n|^{-2 alpha}") {
  const MeasureConfig cfg = defocusing(6);
  const int count = 100000;
  RngStream rng(2024, 0);
  std::vector<double> sum_sq(7, 0.0);
  double cross_re = 0.0, re_im = 0.0;
  for (int i = 0; i < count; ++i) {
    const SpectralState u = sample_gaussian(cfg, rng);
    for (int n = 1; n <= 6; ++n) sum_sq[(std::size_t)n] += std::norm(u.at(n));
    cross_re += (u.at(2) * std::conj(u.at(3))).real();
    re_im += u.at(2).real() * u.at(2).imag();
  }
  for (int n = 1; n <= 6; ++n) {
    const double expected = 2.0 * std::pow(static_cast<double>(n), -1.5);
    const double mean = sum_sq[(std::size_t)n] / count;
    // |c_n|^2 is exponential with mean m: SE = m / sqrt(count)
    const double se = expected / std::sqrt(static_cast<double>(count));
    CHECK(std::abs(mean - expected) < 3.0 * se);
  }
  // distinct modes are independent
  const double se_cross = 2.0 * std::pow(2.0, -0.75) * std::pow(3.0, -0.75) /
                          std::sqrt(static_cast<double>(count));
  CHECK(std::abs(cross_re / count) < 3.0 * se_cross);
  // real and imaginary parts are uncorrelated
  const double var2 = std::pow(2.0, -1.5);
  CHECK(std::abs(re_im / count) <
        3.0 * var2 / std::sqrt(static_cast<double>(count)));
}

TEST_CASE("pinned zero mode stays exactly zero; gaussian proposal does not") {
  MeasureConfig cfg = defocusing(4);
  RngStream rng(7, 0);
  for (int i = 0; i < 50; ++i) {
    CHECK(std::abs(sample_gaussian(cfg, rng).at(0)) == 0.0);
  }
  cfg.zero_mode = ZeroModePolicy::gaussian_proposal;
  RngStream rng2(7, 1);
  bool nonzero = false;
  for (int i = 0; i < 50; ++i) {
    if (std::abs(sample_gaussian(cfg, rng2).at(0)) > 0.0) nonzero = true;
  }
  CHECK(nonzero);
}

TEST_CASE("gibbs_log_weight closed forms") {
  const MeasureConfig cfg = defocusing(2);

  SpectralState zero(2);
  CHECK(gibbs_log_weight(zero, cfg) == 0.0);

  SpectralState plane(2);
  plane.at(1) = cplx(1.0, 0.0);
  CHECK(gibbs_log_weight(plane, cfg) == doctest::Approx(-0.25).epsilon(1e-13));

  // focusing cutoff: mass 4 > B^2 = 1 rejects
  MeasureConfig foc = focusing(2, 1.0);
  SpectralState heavy(2);
  heavy.at(0) = cplx(2.0, 0.0);
  CHECK(gibbs_log_weight(heavy, foc) == -kInf);
}

TEST_CASE("zero-mode proposal correction enters the weight") {
  MeasureConfig cfg = defocusing(2);
  cfg.zero_mode = ZeroModePolicy::gaussian_proposal;
  cfg.sigma0 = 1.0;
  SpectralState u(2);
  u.at(0) = cplx(0.5, 0.0);
  const double q = quartic_integral(u);
  CHECK(gibbs_log_weight(u, cfg) ==
        doctest::Approx(-0.25 * q + 0.125).epsilon(1e-13));
  CHECK(rejection_log_envelope(cfg) == doctest::Approx(0.25).epsilon(1e-15));
  cfg.zero_mode = ZeroModePolicy::pinned_zero;
  CHECK(rejection_log_envelope(cfg) == 0.0);
}

TEST_CASE("defocusing weights are bounded: log weight <= envelope") {
  for (ZeroModePolicy policy :
       {ZeroModePolicy::pinned_zero, ZeroModePolicy::gaussian_proposal}) {
    MeasureConfig cfg = defocusing(5);
    cfg.zero_mode = policy;
    const double env = rejection_log_envelope(cfg);
    RngStream rng(99, 3);
    for (int i = 0; i < 2000; ++i) {
      const SpectralState u = sample_gaussian(cfg, rng);
      CHECK(gibbs_log_weight(u, cfg) <= env + 1e-12);
    }
  }
}

TEST_CASE("rejection output: exact draws with log_weight 0, sane acceptance") {
  MeasureConfig cfg = defocusing(4);
  const GibbsSampleResult res = sample_gibbs(cfg, 11, 500, 2);
  CHECK(res.samples.size() == 500);
  for (const WeightedSample& ws : res.samples) {
    CHECK(ws.log_weight == 0.0);
    CHECK(ws.state.is_finite());
    CHECK(std::abs(ws.state.at(0)) == 0.0);
  }
  CHECK(res.acceptance_rate > 0.0);
  CHECK(res.acceptance_rate <= 1.0);
  CHECK(res.proposals >= 500);
}

TEST_CASE("rejection and importance estimators agree (same target)") {
  MeasureConfig rej = defocusing(4);
  const GibbsSampleResult a = sample_gibbs(rej, 5, 2000, 2);

  MeasureConfig imp = defocusing(4);
  imp.method = SamplingMethod::importance;
  const GibbsSampleResult b = sample_gibbs(imp, 6, 60000, 2);

  // two independent estimators of the same target, over five observables
  const std::vector<
      std::pair<const char*, std::function<double(const SpectralState&)>>>
      observables = {
          {"quartic", [](const SpectralState& u) { return quartic_integral(u); }},
          {"mass", [](const SpectralState& u) { return mass(u); }},
          {"abs2_1", [](const SpectralState& u) { return std::norm(u.at(1)); }},
          {"h_norm_0.1",
           [](const SpectralState& u) { return sobolev_norm(u, 0.1); }},
          {"re_u_1", [](const SpectralState& u) { return u.at(1).real(); }},
      };
  for (const auto& [name, fn] : observables) {
    const Estimate ea = ensemble_estimate(a.samples, fn);
    const Estimate eb = ensemble_estimate(b.samples, fn);
    const double combined =
        std::sqrt(ea.std_error * ea.std_error + eb.std_error * eb.std_error);
    INFO(name);
    CHECK(std::abs(ea.estimate - eb.estimate) < 3.0 * combined);
  }
  const Estimate ea = ensemble_estimate(a.samples, observables[0].second);
  const Estimate eb = ensemble_estimate(b.samples, observables[0].second);
  CHECK(ea.ess == doctest::Approx(2000.0));  // unit weights
  CHECK(eb.ess < 60000.0);
}

TEST_CASE("focusing: samples with nonzero weight satisfy the cutoff") {
  MeasureConfig cfg = focusing(4, 2.0);
  cfg.zero_mode = ZeroModePolicy::gaussian_proposal;
  const GibbsSampleResult res = sample_gibbs(cfg, 21, 20000, 2);
  long long live = 0;
  for (const WeightedSample& ws : res.samples) {
    if (ws.log_weight == -kInf) continue;
    ++live;
    CHECK(mass(ws.state) <= 4.0 + 1e-12);
    CHECK(std::abs(ws.state.at(0)) <= 2.0 + 1e-12);
  }
  CHECK(live > 0);
  CHECK(live < 20000);  // the cutoff does reject a positive fraction
}

TEST_CASE("partition_stability: defocusing Z in (0,1], no growth") {
  MeasureConfig cfg = defocusing(4);
  const PartitionTable t = partition_stability(cfg, {4, 8, 16}, 20000, 31, 2);
  REQUIRE(t.rows.size() == 3);
  for (const PartitionRow& row : t.rows) {
    CHECK(row.z > 0.0);
    CHECK(row.z <= 1.0);
    CHECK(row.std_error > 0.0);
  }
  // Z_N decreases as modes are added (more quartic mass in the exponent)
  CHECK(t.rows[0].z > t.rows[1].z);
  CHECK(t.rows[1].z > t.rows[2].z);
  CHECK(t.no_growth_pass);
}

TEST_CASE("partition_stability: focusing Z is monotone in the cutoff B") {
  // identical streams for both runs, so the comparison is pathwise exact
  const PartitionTable small =
      partition_stability(focusing(4, 1.0), {4}, 20000, 77, 2);
  const PartitionTable big =
      partition_stability(focusing(4, 2.0), {4}, 20000, 77, 2);
  CHECK(small.rows[0].z <= big.rows[0].z);
  CHECK(big.rows[0].z > 0.0);
  for (const PartitionRow& row : {small.rows[0], big.rows[0]}) {
    CHECK(row.flagged == (row.ess < 10.0));
  }
}

TEST_CASE("rejection aborts when the acceptance rate degenerates") {
  // At N = 256 the defocusing acceptance rate sits below the 1e-4 contract,
  // so this stream exhausts the rejection cap and aborts.
  MeasureConfig cfg = defocusing(256);
  CHECK_THROWS_AS(sample_gibbs(cfg, 1, 1, 1), sampling_error);
}

TEST_CASE("lambda_k: convergent case matches 2 zeta(3/2)") {
  const LambdaDiagnostics d = lambda_k(0.75, 0.0, 1000000);
  CHECK(d.final_lambda == doctest::Approx(5.224750697).epsilon(0.01));
  CHECK(d.growth == GrowthClass::bounded);
  CHECK(!d.divergent);
  CHECK(d.fitted_exponent < -0.3);  // true increment exponent is -1/2
  // checkpoints are ascending in k and include k_max
  CHECK(d.checkpoints.back().k == 1000000);
  for (std::size_t i = 1; i < d.checkpoints.size(); ++i) {
    CHECK(d.checkpoints[i].k > d.checkpoints[i - 1].k);
    CHECK(d.checkpoints[i].lambda >= d.checkpoints[i - 1].lambda);
  }
}

TEST_CASE("lambda_k: critical line is logarithmic, hence divergent") {
  const LambdaDiagnostics d = lambda_k(0.75, 0.25, 1000000);
  // 2 sum 1/n = 2 (log k + gamma_E) ~ 28.785 at k = 1e6
  CHECK(d.final_lambda == doctest::Approx(28.7854).epsilon(1e-4));
  CHECK(d.growth == GrowthClass::logarithmic);
  CHECK(d.divergent);
}

TEST_CASE("lambda_k: supercritical power growth with the right exponent") {
  const LambdaDiagnostics d = lambda_k(0.75, 0.5, 100000);
  // 2s - 2 alpha + 1 = 0.5
  CHECK(d.growth == GrowthClass::power);
  CHECK(d.divergent);
  CHECK(std::abs(d.fitted_exponent - 0.5) < 0.05);
}

TEST_CASE("lambda_k: classifier matches sign of s - (alpha - 1/2) on a grid") {
  int checked = 0;
  for (double alpha : {0.6, 0.7, 0.75, 0.8, 0.9}) {
    for (double offset : {-0.06, -0.02, 0.02, 0.06}) {
      const double s = alpha - 0.5 + offset;
      const LambdaDiagnostics d = lambda_k(alpha, s, 100000);
      if (offset < 0.0) {
        CHECK(!d.divergent);
      } else {
        CHECK(d.divergent);
      }
      ++checked;
    }
    // the critical line itself classifies divergent
    const LambdaDiagnostics crit = lambda_k(alpha, alpha - 0.5, 100000);
    CHECK(crit.divergent);
  }
  CHECK(checked == 20);
}

TEST_CASE("ensemble_estimate: uniform weights give the plain mean") {
  std::vector<WeightedSample> samples;
  SpectralState u(1);
  for (int i = 0; i < 10; ++i) {
    u.at(0) = cplx(static_cast<double>(i), 0.0);
    samples.push_back({u, 0.0});
  }
  const Estimate e =
      ensemble_estimate(samples, [](const SpectralState& s) {
        return s.at(0).real();
      });
  CHECK(e.estimate == doctest::Approx(4.5).epsilon(1e-14));
  CHECK(e.ess == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(e.n_samples == 10);
}

TEST_CASE("ensemble_estimate: single nonzero weight") {
  std::vector<WeightedSample> samples;
  SpectralState u(1);
  for (int i = 0; i < 5; ++i) {
    u.at(0) = cplx(static_cast<double>(i), 0.0);
    samples.push_back({u, i == 3 ? -1.0 : -kInf});
  }
  const Estimate e =
      ensemble_estimate(samples, [](const SpectralState& s) {
        return s.at(0).real();
      });
  CHECK(e.estimate == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(e.ess == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ensemble_estimate: all-zero weights is an error") {
  std::vector<WeightedSample> samples(3, {SpectralState(1), -kInf});
  CHECK_THROWS_AS(ensemble_estimate(
                      samples, [](const SpectralState&) { return 1.0; }),
                  sampling_error);
}

TEST_CASE("ensemble_estimate: known Gaussian moment within 3 SE") {
  MeasureConfig cfg = defocusing(4);
  cfg.method = SamplingMethod::importance;
  std::vector<WeightedSample> samples;
  RngStream rng(321, 0);
  for (int i = 0; i < 100000; ++i) {
    samples.push_back({sample_gaussian(cfg, rng), 0.0});  // plain Gaussian
  }
  const Estimate e = ensemble_estimate(samples, [](const SpectralState& u) {
    return std::norm(u.at(2));
  });
  const double expected = 2.0 * std::pow(2.0, -1.5);  // 0.70711
  CHECK(std::abs(e.estimate - expected) < 3.0 * e.std_error);
  CHECK(e.estimate == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("estimate_all: report invariants hold for every entry") {
  MeasureConfig cfg = defocusing(4);
  cfg.method = SamplingMethod::importance;
  const GibbsSampleResult res = sample_gibbs(cfg, 3, 5000, 2);
  const EnsembleReport report = estimate_all(
      res.samples,
      {{"mass", [](const SpectralState& u) { return mass(u); }},
       {"quartic", [](const SpectralState& u) { return quartic_integral(u); }},
       {"re_u_1", [](const SpectralState& u) { return u.at(1).real(); }}});
  REQUIRE(report.entries.size() == 3);
  for (const auto& [name, e] : report.entries) {
    CHECK(e.std_error >= 0.0);
    CHECK(e.ess <= static_cast<double>(e.n_samples));
    CHECK(e.n_samples == 5000);
  }
  REQUIRE(report.find("quartic") != nullptr);
  CHECK(report.find("quartic")->estimate > 0.0);
  CHECK(report.find("nope") == nullptr);
}

TEST_CASE("determinism: identical (seed, index) across worker counts") {
  MeasureConfig cfg = defocusing(4);
  const GibbsSampleResult one = sample_gibbs(cfg, 909, 200, 1);
  const GibbsSampleResult two = sample_gibbs(cfg, 909, 200, 2);
  const GibbsSampleResult four = sample_gibbs(cfg, 909, 200, 4);
  REQUIRE(one.samples.size() == two.samples.size());
  for (std::size_t i = 0; i < one.samples.size(); ++i) {
    CHECK(test::max_coeff_distance(one.samples[i].state,
                                   two.samples[i].state) == 0.0);
    CHECK(test::max_coeff_distance(one.samples[i].state,
                                   four.samples[i].state) == 0.0);
  }
  CHECK(one.proposals == two.proposals);
  CHECK(one.proposals == four.proposals);
}
