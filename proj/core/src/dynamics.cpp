#include "fnls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "fnls/errors.hpp"
#include "fnls/fourier.hpp"
#include "fnls/spectral.hpp"

namespace fnls {

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::strang: return "strang";
    case Scheme::rk4: return "rk4";
    case Scheme::picard: return "picard";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "strang") return Scheme::strang;
  if (name == "rk4") return Scheme::rk4;
  if (name == "picard") return Scheme::picard;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (expected strang|rk4|picard)");
}

void IntegratorConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
}

namespace {

using buffer = std::vector<cplx>;

// Per-trajectory scratch. Not shared between threads.
struct Workspace {
  int N;
  int M;
  double gamma;
  std::vector<double> symbol;  // |n|^{2 alpha}, n = -N..N
  buffer grid;

  Workspace(const ModelParams& p)
      : N(p.n_modes),
        M(dealias_grid_size(p.n_modes)),
        gamma(static_cast<double>(p.gamma)),
        symbol(static_cast<std::size_t>(2 * p.n_modes + 1)),
        grid(static_cast<std::size_t>(M)) {
    for (int n = -N; n <= N; ++n)
      symbol[static_cast<std::size_t>(n + N)] = p.symbol(n);
  }

  void apply_linear(buffer& c, double t) const {
    for (int k = 0; k < 2 * N + 1; ++k) {
      const double phase = t * symbol[static_cast<std::size_t>(k)];
      c[static_cast<std::size_t>(k)] *= cplx(std::cos(phase), std::sin(phase));
    }
  }

  // c <- coefficients of P_N(|u|^2 u) where u has coefficients c.
  void cubic_inplace(buffer& c) {
    detail::pack_coeffs(c, N, grid);
    fft::backward(grid);
    for (cplx& v : grid) v *= std::norm(v);
    fft::forward(grid);
    detail::unpack_coeffs(grid, N, c);
  }

  void rhs_inplace(const buffer& c, buffer& out) {
    out = c;
    cubic_inplace(out);
    for (int k = 0; k < 2 * N + 1; ++k) {
      const auto ks = static_cast<std::size_t>(k);
      out[ks] = cplx(0.0, 1.0) *
                (symbol[ks] * c[ks] - gamma * out[ks]);
    }
  }

  void strang_step(buffer& c, double dt) {
    apply_linear(c, 0.5 * dt);
    detail::pack_coeffs(c, N, grid);
    fft::backward(grid);
    for (cplx& v : grid) {
      const double angle = -gamma * dt * std::norm(v);
      v *= cplx(std::cos(angle), std::sin(angle));
    }
    fft::forward(grid);
    detail::unpack_coeffs(grid, N, c);
    apply_linear(c, 0.5 * dt);
  }

  void rk4_step(buffer& c, double dt, buffer& k1, buffer& k2, buffer& k3,
                buffer& k4, buffer& tmp) {
    const std::size_t len = c.size();
    rhs_inplace(c, k1);
    tmp.resize(len);
    for (std::size_t i = 0; i < len; ++i) tmp[i] = c[i] + 0.5 * dt * k1[i];
    rhs_inplace(tmp, k2);
    for (std::size_t i = 0; i < len; ++i) tmp[i] = c[i] + 0.5 * dt * k2[i];
    rhs_inplace(tmp, k3);
    for (std::size_t i = 0; i < len; ++i) tmp[i] = c[i] + dt * k3[i];
    rhs_inplace(tmp, k4);
    for (std::size_t i = 0; i < len; ++i) {
      c[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
};

bool all_finite(const buffer& c) {
  for (const cplx& v : c) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  }
  return true;
}

double l2_distance(const buffer& a, const buffer& b) {
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::norm(a[i] - b[i]);
  return std::sqrt(sum);
}

}  // namespace

SpectralState linear_flow(const SpectralState& state, double t, double alpha) {
  SpectralState out = state;
  for (int n = -state.n_modes; n <= state.n_modes; ++n) {
    const double phase =
        n == 0 ? 0.0
               : t * std::pow(std::abs(static_cast<double>(n)), 2.0 * alpha);
    out.at(n) *= cplx(std::cos(phase), std::sin(phase));
  }
  return out;
}

SpectralState cubic_term(const SpectralState& state) {
  ModelParams p;
  p.n_modes = state.n_modes;
  Workspace ws(p);
  buffer c = state.coeffs;
  ws.cubic_inplace(c);
  return SpectralState(state.n_modes, std::move(c));
}

SpectralState rhs(const SpectralState& state, const ModelParams& params) {
  if (state.n_modes != params.n_modes) {
    throw std::invalid_argument("rhs: state/params dimension mismatch");
  }
  Workspace ws(params);
  buffer out;
  ws.rhs_inplace(state.coeffs, out);
  return SpectralState(state.n_modes, std::move(out));
}

SpectralState step_strang(const SpectralState& state, const ModelParams& params,
                          double dt) {
  Workspace ws(params);
  buffer c = state.coeffs;
  ws.strang_step(c, dt);
  return SpectralState(state.n_modes, std::move(c));
}

SpectralState step_rk4(const SpectralState& state, const ModelParams& params,
                       double dt) {
  Workspace ws(params);
  buffer c = state.coeffs;
  buffer k1, k2, k3, k4, tmp;
  ws.rk4_step(c, dt, k1, k2, k3, k4, tmp);
  return SpectralState(state.n_modes, std::move(c));
}

PicardResult picard_solve(const SpectralState& state, const ModelParams& params,
                          double T, int iterations, int quad_nodes) {
  if (state.n_modes != params.n_modes) {
    throw std::invalid_argument("picard_solve: dimension mismatch");
  }
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (quad_nodes < 3) throw std::invalid_argument("quad_nodes must be >= 3");

  Workspace ws(params);
  const int J = quad_nodes;
  const double h = T / static_cast<double>(J - 1);
  const std::size_t len = state.coeffs.size();

  // Iterate in the interaction picture: V_j = e^{-i Lambda tau_j} U_j, so the
  // Duhamel integral becomes a plain cumulative integral of
  // W_j = -i gamma e^{-i Lambda tau_j} cubic(U_j).
  std::vector<buffer> u(static_cast<std::size_t>(J));
  for (int j = 0; j < J; ++j) {
    u[static_cast<std::size_t>(j)] = state.coeffs;
    ws.apply_linear(u[static_cast<std::size_t>(j)], h * j);
  }

  std::vector<buffer> w(static_cast<std::size_t>(J));
  buffer cum(len), work(len);
  PicardResult result;
  result.state = state;

  for (int it = 0; it < iterations; ++it) {
    for (int j = 0; j < J; ++j) {
      work = u[static_cast<std::size_t>(j)];
      ws.cubic_inplace(work);
      ws.apply_linear(work, -h * j);
      for (std::size_t i = 0; i < len; ++i) {
        work[i] *= cplx(0.0, -ws.gamma);
      }
      w[static_cast<std::size_t>(j)] = work;
    }
    // cumulative trapezoid, then back to the lab frame
    std::fill(cum.begin(), cum.end(), cplx(0.0));
    double max_delta = 0.0;
    for (int j = 0; j < J; ++j) {
      const auto js = static_cast<std::size_t>(j);
      if (j > 0) {
        for (std::size_t i = 0; i < len; ++i) {
          cum[i] += 0.5 * h * (w[js - 1][i] + w[js][i]);
        }
      }
      buffer next(len);
      for (std::size_t i = 0; i < len; ++i) next[i] = state.coeffs[i] + cum[i];
      ws.apply_linear(next, h * j);
      max_delta = std::max(max_delta, l2_distance(next, u[js]));
      u[js] = std::move(next);
    }
    result.iterate_deltas.push_back(max_delta);
    const std::size_t k = result.iterate_deltas.size();
    if (k >= 2 && max_delta > result.iterate_deltas[k - 2] &&
        max_delta > 1e-12) {
      throw numerics_error(
          "picard_solve: iterates stopped contracting (delta " +
              std::to_string(max_delta) + "); reduce T",
          0.0);
    }
    if (max_delta < 1e-15) break;
  }
  result.state = SpectralState(state.n_modes, u[static_cast<std::size_t>(J - 1)]);
  if (!result.state.is_finite()) {
    throw numerics_error("picard_solve: non-finite iterate; reduce T", 0.0);
  }
  return result;
}

namespace {

TrajectoryRow make_row(double t, const buffer& c, const ModelParams& params,
                       const std::vector<double>& sigmas, Workspace& ws) {
  TrajectoryRow row;
  row.t = t;
  SpectralState s(params.n_modes, c);
  row.mass = mass(s);
  row.hamiltonian = hamiltonian(s, params);
  row.h_norms.reserve(sigmas.size());
  for (double sigma : sigmas) row.h_norms.push_back(sobolev_norm(s, sigma));
  detail::pack_coeffs(c, ws.N, ws.grid);
  fft::backward(ws.grid);
  double linf = 0.0;
  for (const cplx& v : ws.grid) linf = std::max(linf, std::abs(v));
  row.linf_grid = linf;
  return row;
}

}  // namespace

std::pair<SpectralState, TrajectoryLog> evolve(const SpectralState& state,
                                               const ModelParams& params,
                                               const IntegratorConfig& config,
                                               double T) {
  if (state.n_modes != params.n_modes) {
    throw std::invalid_argument("evolve: state/params dimension mismatch");
  }
  config.validate();
  params.validate();

  if (config.scheme == Scheme::rk4) {
    const double stiff = std::pow(static_cast<double>(params.n_modes),
                                  2.0 * params.alpha);
    if (config.dt * stiff > 2.5) {
      std::fprintf(stderr,
                   "warning: rk4 dt = %g is near or beyond the stability "
                   "threshold ~2.8/N^(2 alpha) = %g\n",
                   config.dt, 2.8 / stiff);
    }
  }

  Workspace ws(params);
  TrajectoryLog log;
  log.sigmas = config.record_sigmas;

  buffer c = state.coeffs;
  log.rows.push_back(make_row(0.0, c, params, log.sigmas, ws));

  const double direction = T < 0.0 ? -1.0 : 1.0;
  const double total = std::abs(T);
  const long long n_full = static_cast<long long>(total / config.dt + 1e-12);
  double rem = total - static_cast<double>(n_full) * config.dt;
  if (rem < 1e-12 * std::max(1.0, total)) rem = 0.0;
  const long long n_steps = n_full + (rem > 0.0 ? 1 : 0);

  buffer k1, k2, k3, k4, tmp;
  double t = 0.0;
  for (long long step = 1; step <= n_steps; ++step) {
    const double dt_step =
        (step <= n_full ? config.dt : rem) * direction;
    switch (config.scheme) {
      case Scheme::strang:
        ws.strang_step(c, dt_step);
        break;
      case Scheme::rk4:
        ws.rk4_step(c, dt_step, k1, k2, k3, k4, tmp);
        break;
      case Scheme::picard: {
        SpectralState cur(params.n_modes, c);
        PicardResult r = picard_solve(cur, params, dt_step, 12, 9);
        c = r.state.coeffs;
        break;
      }
    }
    if (!all_finite(c)) {
      throw numerics_error("evolve: non-finite state at t = " +
                               std::to_string(t + dt_step),
                           t);
    }
    t = (step == n_steps) ? direction * total
                          : direction * config.dt * static_cast<double>(step);
    if (step % config.record_every == 0 || step == n_steps) {
      log.rows.push_back(make_row(t, c, params, log.sigmas, ws));
    }
  }

  return {SpectralState(params.n_modes, std::move(c)), std::move(log)};
}

}  // namespace fnls
