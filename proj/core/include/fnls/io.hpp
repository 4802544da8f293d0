#ifndef FNLS_IO_HPP
#define FNLS_IO_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fnls/dynamics.hpp"
#include "fnls/experiments.hpp"
#include "fnls/measures.hpp"
#include "fnls/state.hpp"

namespace fnls {

/// Render a double with 17 significant digits (%.17g): every writer in this
/// module emits full double precision.
std::string format_full(double x);

/// Resolved run configuration embedded in every artifact, in insertion
/// order, so identical configs always serialize identically. Execution-only
/// parameters (worker count, output paths) are deliberately excluded:
/// artifacts must be byte-identical across worker counts.
struct RunMeta {
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> config;  // name -> JSON value

  void add(const std::string& name, double v);
  void add(const std::string& name, long long v);
  void add(const std::string& name, int v);
  void add(const std::string& name, const std::string& v);
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// State file format:
/// {"alpha": a, "n_modes": N, "coeffs": [[re, im], ...]} with 2N+1 pairs in
/// ascending mode order.
std::string state_to_json(const SpectralState& state, double alpha);
void write_state_json(const std::string& path, const SpectralState& state,
                      double alpha);
std::pair<SpectralState, double> read_state_json(const std::string& path);

/// Header: t,mass,hamiltonian,h_norm_<sigma>...,linf
std::string trajectory_to_csv(const TrajectoryLog& log);

/// JSON-lines, one {"log_weight": w, "state": {...}} object per line.
/// A cutoff-rejected sample (weight zero) writes "log_weight": null.
std::string samples_to_jsonl(const std::vector<WeightedSample>& samples,
                             double alpha);
struct SamplesFile {
  double alpha = 0.0;
  std::vector<WeightedSample> samples;
};
SamplesFile read_samples_jsonl(const std::string& path);

std::string invariance_to_json(const InvarianceReport& r, const RunMeta& meta);
std::string invariance_to_csv(const InvarianceReport& r);
std::string tail_to_json(const TailReport& r, const RunMeta& meta);
std::string tail_to_csv(const TailReport& r);
std::string convergence_to_json(const ConvergenceTable& t, const RunMeta& meta);
std::string convergence_to_csv(const ConvergenceTable& t);
std::string norm_growth_to_json(const NormGrowthReport& r, const RunMeta& meta);
std::string norm_growth_to_csv(const NormGrowthReport& r);
std::string partition_to_json(const PartitionTable& t, const RunMeta& meta);
std::string partition_to_csv(const PartitionTable& t);  // N,Z,std_error,ess
std::string lambda_to_json(const LambdaDiagnostics& d, const RunMeta& meta);
std::string lambda_to_csv(const LambdaDiagnostics& d);  // k,lambda_k

}  // namespace fnls

#endif
