#ifndef FNLS_SPECTRAL_HPP
#define FNLS_SPECTRAL_HPP

#include <vector>

#include "fnls/params.hpp"
#include "fnls/state.hpp"

namespace fnls {

/// Japanese bracket <n> = (1 + n^2)^{1/2}.
inline double bracket(int n) {
  const double x = static_cast<double>(n);
  return std::sqrt(1.0 + x * x);
}

/// || u ||_{H^sigma} = sqrt( sum <n>^{2 sigma} |c_n|^2 ). sigma = 0 is the
/// plain l^2 coefficient norm.
double sobolev_norm(const SpectralState& state, double sigma);

/// M(u) = sum |c_n|^2 = (1/2pi) \int_T |u|^2 (Parseval in the normalized
/// convention).
double mass(const SpectralState& state);

/// (1/2pi) \int_T |u|^4, computed exactly by quadrature on m_points nodes.
/// The default uses the smallest power of two >= 4N+1, which is alias-free
/// for the degree-4N integrand. Explicit m_points must also be >= 4N+1.
double quartic_integral(const SpectralState& state);
double quartic_integral(const SpectralState& state, int m_points);

/// Conserved energy of the truncated flow,
///   H(u) = 1/2 sum |n|^{2 alpha} |c_n|^2 - (gamma/4) (1/2pi) \int |u|^4.
/// Requires state.n_modes == params.n_modes.
double hamiltonian(const SpectralState& state, const ModelParams& params);

/// Zero all modes with |n| > n_cut, keeping the array size. Idempotent and
/// non-expansive in every H^sigma norm. Requires 0 <= n_cut <= n_modes.
SpectralState project(const SpectralState& state, int n_cut);

/// Copy into a state of a different truncation: extra modes are zero-padded,
/// surplus modes are discarded (so resized(u, m) with m < N equals the
/// reindexed projection).
SpectralState resized(const SpectralState& state, int n_modes);

/// Coordinates u_n = <n>^s c_n, in which H^s is a plain l^2 space. Ordered
/// n = -N..N like the coefficients. s = 0 is the identity.
std::vector<cplx> to_hs_coords(const SpectralState& state, double s);

/// Inverse of to_hs_coords: c_n = <n>^{-s} u_n.
SpectralState from_hs_coords(const std::vector<cplx>& coords, double s);

}  // namespace fnls

#endif
