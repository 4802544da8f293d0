#include "fnls/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fnls {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string meta_block(const RunMeta& meta) {
  std::string out = "\"seed\": " + std::to_string(meta.seed) +
                    ",\n  \"config\": {";
  for (std::size_t i = 0; i < meta.config.size(); ++i) {
    if (i) out += ", ";
    out += quoted(meta.config[i].first) + ": " + meta.config[i].second;
  }
  out += "}";
  return out;
}

}  // namespace

std::string format_full(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void RunMeta::add(const std::string& name, double v) {
  config.emplace_back(name, format_full(v));
}
void RunMeta::add(const std::string& name, long long v) {
  config.emplace_back(name, std::to_string(v));
}
void RunMeta::add(const std::string& name, int v) {
  config.emplace_back(name, std::to_string(v));
}
void RunMeta::add(const std::string& name, const std::string& v) {
  config.emplace_back(name, quoted(v));
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string state_to_json(const SpectralState& state, double alpha) {
  std::string out = "{\"alpha\": " + format_full(alpha) +
                    ", \"n_modes\": " + std::to_string(state.n_modes) +
                    ", \"coeffs\": [";
  for (int i = 0; i < state.size(); ++i) {
    if (i) out += ", ";
    const cplx& c = state.coeffs[static_cast<std::size_t>(i)];
    out += "[" + format_full(c.real()) + ", " + format_full(c.imag()) + "]";
  }
  out += "]}";
  return out;
}

void write_state_json(const std::string& path, const SpectralState& state,
                      double alpha) {
  write_text_file(path, state_to_json(state, alpha) + "\n");
}

namespace {

std::pair<SpectralState, double> parse_state(const nlohmann::json& j) {
  const double alpha = j.at("alpha").get<double>();
  const int n_modes = j.at("n_modes").get<int>();
  const auto& arr = j.at("coeffs");
  if (!arr.is_array() || static_cast<int>(arr.size()) != 2 * n_modes + 1) {
    throw std::runtime_error("state JSON: coeffs must have 2N+1 entries");
  }
  std::vector<cplx> coeffs;
  coeffs.reserve(arr.size());
  for (const auto& pair : arr) {
    if (!pair.is_array() || pair.size() != 2) {
      throw std::runtime_error("state JSON: coefficient must be [re, im]");
    }
    coeffs.emplace_back(pair[0].get<double>(), pair[1].get<double>());
  }
  SpectralState state(n_modes, std::move(coeffs));
  if (!state.is_finite()) {
    throw std::runtime_error("state JSON: non-finite coefficient");
  }
  return {std::move(state), alpha};
}

}  // namespace

std::pair<SpectralState, double> read_state_json(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(read_text_file(path));
  return parse_state(j);
}

std::string trajectory_to_csv(const TrajectoryLog& log) {
  std::string out = "t,mass,hamiltonian";
  for (double sigma : log.sigmas) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", sigma);
    out += ",h_norm_";
    out += buf;
  }
  out += ",linf\n";
  for (const TrajectoryRow& row : log.rows) {
    out += format_full(row.t) + "," + format_full(row.mass) + "," +
           format_full(row.hamiltonian);
    for (double h : row.h_norms) out += "," + format_full(h);
    out += "," + format_full(row.linf_grid) + "\n";
  }
  return out;
}

std::string samples_to_jsonl(const std::vector<WeightedSample>& samples,
                             double alpha) {
  std::string out;
  for (const WeightedSample& ws : samples) {
    out += "{\"log_weight\": ";
    out += (ws.log_weight == kNegInf) ? "null" : format_full(ws.log_weight);
    out += ", \"state\": " + state_to_json(ws.state, alpha) + "}\n";
  }
  return out;
}

SamplesFile read_samples_jsonl(const std::string& path) {
  SamplesFile file;
  std::istringstream in(read_text_file(path));
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    WeightedSample ws;
    if (j.at("log_weight").is_null()) {
      ws.log_weight = kNegInf;
    } else {
      ws.log_weight = j.at("log_weight").get<double>();
    }
    auto [state, alpha] = parse_state(j.at("state"));
    ws.state = std::move(state);
    if (first) {
      file.alpha = alpha;
      first = false;
    }
    file.samples.push_back(std::move(ws));
  }
  return file;
}

std::string invariance_to_json(const InvarianceReport& r, const RunMeta& meta) {
  std::string out = "{\n  " + meta_block(meta) + ",\n";
  out += "  \"T\": " + format_full(r.T) + ",\n";
  out += "  \"n_modes\": " + std::to_string(r.n_modes) + ",\n";
  out += "  \"count\": " + std::to_string(r.count) + ",\n";
  out += "  \"ess\": " + format_full(r.ess) + ",\n";
  out += "  \"scheme\": " + quoted(scheme_name(r.scheme)) + ",\n";
  out += "  \"dt\": " + format_full(r.dt) + ",\n";
  out += "  \"acceptance_rate\": " + format_full(r.acceptance_rate) + ",\n";
  out += std::string("  \"underpowered\": ") +
         (r.underpowered ? "true" : "false") + ",\n";
  out += "  \"observables\": [\n";
  for (std::size_t i = 0; i < r.entries.size(); ++i) {
    const InvarianceEntry& e = r.entries[i];
    out += "    {\"name\": " + quoted(e.name) +
           ", \"mean_diff\": " + format_full(e.mean_diff) +
           ", \"std_error\": " + format_full(e.std_error) +
           ", \"z_score\": " + format_full(e.z_score) + "}";
    out += (i + 1 < r.entries.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string invariance_to_csv(const InvarianceReport& r) {
  std::string out = "observable,mean_diff,std_error,z_score\n";
  for (const InvarianceEntry& e : r.entries) {
    out += e.name + "," + format_full(e.mean_diff) + "," +
           format_full(e.std_error) + "," + format_full(e.z_score) + "\n";
  }
  return out;
}

std::string tail_to_json(const TailReport& r, const RunMeta& meta) {
  std::string out = "{\n  " + meta_block(meta) + ",\n";
  out += "  \"count\": " + std::to_string(r.count) + ",\n";
  out += "  \"sigma\": " + format_full(r.sigma) + ",\n";
  out += "  \"fitted_c\": " + format_full(r.fitted_c) + ",\n";
  out += std::string("  \"bound_pass\": ") + (r.bound_pass ? "true" : "false") +
         ",\n  \"rows\": [\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const TailRow& row = r.rows[i];
    out += "    {\"K\": " + format_full(row.k) +
           ", \"empirical_prob\": " + format_full(row.empirical_prob) +
           ", \"std_error\": " + format_full(row.std_error) +
           ", \"bound\": " + format_full(row.bound) + "}";
    out += (i + 1 < r.rows.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string tail_to_csv(const TailReport& r) {
  std::string out = "K,empirical_prob,std_error,bound\n";
  for (const TailRow& row : r.rows) {
    out += format_full(row.k) + "," + format_full(row.empirical_prob) + "," +
           format_full(row.std_error) + "," + format_full(row.bound) + "\n";
  }
  return out;
}

std::string convergence_to_json(const ConvergenceTable& t, const RunMeta& meta) {
  std::string out = "{\n  " + meta_block(meta) + ",\n";
  out += "  \"n_ref\": " + std::to_string(t.n_ref) + ",\n";
  out += "  \"T\": " + format_full(t.T) + ",\n";
  out += "  \"dt\": " + format_full(t.dt) + ",\n";
  out += "  \"s\": " + format_full(t.s) + ",\n";
  out += "  \"s_prime\": " + format_full(t.s_prime) + ",\n";
  out += "  \"slope\": " + format_full(t.slope) + ",\n";
  out += "  \"fit_residual\": " + format_full(t.fit_residual) + ",\n";
  out += "  \"rows\": [\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    out += "    {\"N\": " + std::to_string(t.rows[i].n_modes) +
           ", \"error\": " + format_full(t.rows[i].error) + "}";
    out += (i + 1 < t.rows.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string convergence_to_csv(const ConvergenceTable& t) {
  std::string out = "N,error\n";
  for (const ConvergenceRow& row : t.rows) {
    out += std::to_string(row.n_modes) + "," + format_full(row.error) + "\n";
  }
  return out;
}

std::string norm_growth_to_json(const NormGrowthReport& r, const RunMeta& meta) {
  std::string out = "{\n  " + meta_block(meta) + ",\n";
  out += "  \"sigma\": " + format_full(r.sigma) + ",\n";
  out += "  \"count\": " + std::to_string(r.count) + ",\n";
  out += "  \"log_fit_a\": " + format_full(r.log_fit_a) + ",\n";
  out += "  \"log_fit_b\": " + format_full(r.log_fit_b) + ",\n";
  out += "  \"log_fit_residual\": " + format_full(r.log_fit_residual) + ",\n";
  out += "  \"poly_fit_residual\": " + format_full(r.poly_fit_residual) + ",\n";
  out += "  \"poly_fit_exponent\": " + format_full(r.poly_fit_exponent) + ",\n";
  out += std::string("  \"log_model_preferred\": ") +
         (r.log_model_preferred ? "true" : "false") + ",\n";
  out += std::string("  \"aborted\": ") + (r.aborted ? "true" : "false") + ",\n";
  out += "  \"last_good_time\": " + format_full(r.last_good_time) + ",\n";
  out += "  \"rows\": [\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const NormGrowthRow& row = r.rows[i];
    out += "    {\"t\": " + format_full(row.t) +
           ", \"q50\": " + format_full(row.q50) +
           ", \"q90\": " + format_full(row.q90) +
           ", \"q99\": " + format_full(row.q99) + "}";
    out += (i + 1 < r.rows.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string norm_growth_to_csv(const NormGrowthReport& r) {
  std::string out = "t,q50,q90,q99\n";
  for (const NormGrowthRow& row : r.rows) {
    out += format_full(row.t) + "," + format_full(row.q50) + "," +
           format_full(row.q90) + "," + format_full(row.q99) + "\n";
  }
  return out;
}

std::string partition_to_json(const PartitionTable& t, const RunMeta& meta) {
  std::string out = "{\n  " + meta_block(meta) + ",\n";
  out += "  \"constant_fit\": " + format_full(t.constant_fit) + ",\n";
  out += std::string("  \"no_growth_pass\": ") +
         (t.no_growth_pass ? "true" : "false") + ",\n";
  out += "  \"rows\": [\n";
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const PartitionRow& row = t.rows[i];
    out += "    {\"N\": " + std::to_string(row.n_modes) +
           ", \"Z\": " + format_full(row.z) +
           ", \"std_error\": " + format_full(row.std_error) +
           ", \"ess\": " + format_full(row.ess) + ", \"flagged\": " +
           (row.flagged ? "true" : "false") + "}";
    out += (i + 1 < t.rows.size()) ? ",\n" : "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string partition_to_csv(const PartitionTable& t) {
  std::string out = "N,Z,std_error,ess\n";
  for (const PartitionRow& row : t.rows) {
    out += std::to_string(row.n_modes) + "," + format_full(row.z) + "," +
           format_full(row.std_error) + "," + format_full(row.ess) + "\n";
  }
  return out;
}

std::string lambda_to_json(const LambdaDiagnostics& d, const RunMeta& meta) {
  std::string out = "{\n  " + meta_block(meta) + ",\n";
  out += "  \"k_max\": " + std::to_string(d.k_max) + ",\n";
  out += "  \"final_lambda\": " + format_full(d.final_lambda) + ",\n";
  out += "  \"growth\": " + quoted(growth_class_name(d.growth)) + ",\n";
  out += "  \"fitted_exponent\": " + format_full(d.fitted_exponent) + ",\n";
  out += std::string("  \"divergent\": ") + (d.divergent ? "true" : "false") +
         "\n}\n";
  return out;
}

std::string lambda_to_csv(const LambdaDiagnostics& d) {
  std::string out = "k,lambda_k\n";
  for (const LambdaCheckpoint& c : d.checkpoints) {
    out += std::to_string(c.k) + "," + format_full(c.lambda) + "\n";
  }
  return out;
}

}  // namespace fnls
