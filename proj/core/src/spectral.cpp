#include "fnls/spectral.hpp"

#include <cmath>
#include <stdexcept>

#include "fnls/fourier.hpp"

namespace fnls {

double sobolev_norm(const SpectralState& state, double sigma) {
  double sum = 0.0;
  const int N = state.n_modes;
  for (int n = -N; n <= N; ++n) {
    const double w = std::pow(1.0 + static_cast<double>(n) * n, sigma);
    sum += w * std::norm(state.at(n));
  }
  return std::sqrt(sum);
}

double mass(const SpectralState& state) {
  double sum = 0.0;
  for (const cplx& c : state.coeffs) sum += std::norm(c);
  return sum;
}

double quartic_integral(const SpectralState& state) {
  return quartic_integral(state, dealias_grid_size(state.n_modes));
}

double quartic_integral(const SpectralState& state, int m_points) {
  if (m_points < 4 * state.n_modes + 1) {
    throw std::invalid_argument(
        "quartic_integral: m_points must be >= 4N+1 for exact quadrature");
  }
  const GridField g = to_grid(state, m_points);
  double sum = 0.0;
  for (const cplx& v : g.values) {
    const double a2 = std::norm(v);
    sum += a2 * a2;
  }
  return sum / static_cast<double>(m_points);
}

double hamiltonian(const SpectralState& state, const ModelParams& params) {
  if (state.n_modes != params.n_modes) {
    throw std::invalid_argument("hamiltonian: state/params dimension mismatch");
  }
  double kinetic = 0.0;
  for (int n = -state.n_modes; n <= state.n_modes; ++n) {
    kinetic += params.symbol(n) * std::norm(state.at(n));
  }
  return 0.5 * kinetic -
         0.25 * static_cast<double>(params.gamma) * quartic_integral(state);
}

SpectralState project(const SpectralState& state, int n_cut) {
  if (n_cut < 0 || n_cut > state.n_modes) {
    throw std::invalid_argument("project: require 0 <= n_cut <= n_modes");
  }
  SpectralState out = state;
  for (int n = -state.n_modes; n <= state.n_modes; ++n) {
    if (std::abs(n) > n_cut) out.at(n) = cplx(0.0);
  }
  return out;
}

SpectralState resized(const SpectralState& state, int n_modes) {
  if (n_modes < 0) throw std::invalid_argument("resized: n_modes must be >= 0");
  SpectralState out(n_modes);
  const int keep = std::min(n_modes, state.n_modes);
  for (int n = -keep; n <= keep; ++n) out.at(n) = state.at(n);
  return out;
}

std::vector<cplx> to_hs_coords(const SpectralState& state, double s) {
  std::vector<cplx> coords(state.coeffs.size());
  for (int n = -state.n_modes; n <= state.n_modes; ++n) {
    coords[static_cast<std::size_t>(n + state.n_modes)] =
        std::pow(bracket(n), s) * state.at(n);
  }
  return coords;
}

SpectralState from_hs_coords(const std::vector<cplx>& coords, double s) {
  if (coords.size() % 2 == 0) {
    throw std::invalid_argument("from_hs_coords: need 2N+1 entries");
  }
  const int N = (static_cast<int>(coords.size()) - 1) / 2;
  SpectralState out(N);
  for (int n = -N; n <= N; ++n) {
    out.at(n) = std::pow(bracket(n), -s) * coords[static_cast<std::size_t>(n + N)];
  }
  return out;
}

}  // namespace fnls
