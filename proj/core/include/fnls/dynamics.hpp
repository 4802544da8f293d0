#ifndef FNLS_DYNAMICS_HPP
#define FNLS_DYNAMICS_HPP

#include <utility>
#include <vector>

#include "fnls/params.hpp"
#include "fnls/state.hpp"

namespace fnls {

enum class Scheme { strang, rk4, picard };

const char* scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

struct IntegratorConfig {
  Scheme scheme = Scheme::strang;
  double dt = 1e-3;
  int record_every = 1;
  /// H^sigma norms recorded in trajectory rows.
  std::vector<double> record_sigmas = {0.1};

  void validate() const;
};

struct TrajectoryRow {
  double t = 0.0;
  double mass = 0.0;
  double hamiltonian = 0.0;
  std::vector<double> h_norms;  // one per TrajectoryLog::sigmas
  double linf_grid = 0.0;
};

struct TrajectoryLog {
  std::vector<double> sigmas;
  std::vector<TrajectoryRow> rows;
};

/// Exact linear propagator: c_n -> e^{i t |n|^{2 alpha}} c_n. Unimodular,
/// so every |c_n| (hence mass and all H^sigma norms) is preserved.
SpectralState linear_flow(const SpectralState& state, double t, double alpha);

/// Dealiased Galerkin cubic P_N(|u|^2 u): grid product on the power-of-two
/// grid >= 4N+1, transformed back and truncated. The caller applies gamma.
SpectralState cubic_term(const SpectralState& state);

/// Vector field of the truncated system:
///   c_n' = i |n|^{2 alpha} c_n - i gamma (P_N |u|^2 u)_n.
SpectralState rhs(const SpectralState& state, const ModelParams& params);

/// One Strang step: half linear flow, exact pointwise nonlinear rotation
/// u -> u e^{-i gamma |u|^2 dt} on the dealiasing grid (projected back to N
/// modes), half linear flow. Second order, symmetric; mass is conserved up
/// to the energy the projection discards.
SpectralState step_strang(const SpectralState& state, const ModelParams& params,
                          double dt);

/// Classical RK4 step of `rhs`. Stable for dt well below ~2.8/N^{2 alpha}.
SpectralState step_rk4(const SpectralState& state, const ModelParams& params,
                       double dt);

struct PicardResult {
  SpectralState state;
  /// sup-over-nodes l2 distance between successive iterates.
  std::vector<double> iterate_deltas;
};

/// Fixed-point iteration of the Duhamel integral equation on a uniform
/// quadrature grid over [0, T]. Integrator-independent oracle; contracts for
/// T small (roughly T <= 0.1/(1+||u0||^2)). Throws numerics_error when the
/// iterates stop contracting.
PicardResult picard_solve(const SpectralState& state, const ModelParams& params,
                          double T, int iterations, int quad_nodes = 257);

/// Composed steps covering [0, T]; the final partial step is shortened.
/// Negative T runs the time-reversed flow. Log rows are written at t = 0,
/// every record_every steps, and at t = T. NaN/Inf aborts with the last good
/// time attached (numerics_error).
std::pair<SpectralState, TrajectoryLog> evolve(const SpectralState& state,
                                               const ModelParams& params,
                                               const IntegratorConfig& config,
                                               double T);

}  // namespace fnls

#endif
