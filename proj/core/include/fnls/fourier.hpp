#ifndef FNLS_FOURIER_HPP
#define FNLS_FOURIER_HPP

#include <complex>
#include <vector>

#include "fnls/state.hpp"

namespace fnls {

namespace fft {

/// In-place unnormalized DFTs on a length-M complex buffer.
/// backward: b_j = sum_k a_k e^{+2 pi i jk/M}  (synthesis, coeffs -> grid)
/// forward:  b_k = sum_j a_j e^{-2 pi i jk/M}  (analysis, grid -> M * coeffs)
/// Plans are cached per size and executed thread-safely; plan selection is
/// deterministic (FFTW_ESTIMATE), so outputs are reproducible bit-for-bit.
void backward(std::vector<cplx>& buf);
void forward(std::vector<cplx>& buf);

}  // namespace fft

/// Smallest power of two >= 4N+1: alias-free grid for cubic products.
int dealias_grid_size(int n_modes);

/// Smallest power of two >= 2N+1: lossless grid for linear transforms.
int transform_grid_size(int n_modes);

/// Evaluate the trig polynomial on M equispaced nodes. Requires M >= 2N+1
/// (anything smaller loses information and is rejected).
GridField to_grid(const SpectralState& state, int m_points);

/// Recover coefficients |n| <= N from grid samples; exact inverse of to_grid
/// whenever M >= 2N+1. Requires M >= 2N+1.
SpectralState from_grid(const GridField& field, int n_modes);

namespace detail {
// Scatter coefficients (n = -N..N) into a length-M DFT buffer in standard
// wrap-around order and gather them back. Used by the steppers to avoid
// intermediate GridField values on hot paths.
void pack_coeffs(const std::vector<cplx>& coeffs, int n_modes,
                 std::vector<cplx>& buf);
void unpack_coeffs(const std::vector<cplx>& buf, int n_modes,
                   std::vector<cplx>& coeffs);
}  // namespace detail

}  // namespace fnls

#endif
