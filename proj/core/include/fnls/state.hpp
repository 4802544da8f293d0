#ifndef FNLS_STATE_HPP
#define FNLS_STATE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace fnls {

using cplx = std::complex<double>;

/// Truncated Fourier representation of u(x) = sum_{|n|<=N} c_n e^{inx}.
/// Coefficients are stored in ascending mode order n = -N..N, so the zero
/// mode sits at index N. All operations treat states as immutable values.
struct SpectralState {
  int n_modes = 0;
  std::vector<cplx> coeffs;  // size 2*n_modes + 1

  SpectralState() = default;

  explicit SpectralState(int n) : n_modes(n), coeffs(2 * n + 1, cplx(0.0)) {
    if (n < 0) throw std::invalid_argument("n_modes must be >= 0");
  }

  SpectralState(int n, std::vector<cplx> c) : n_modes(n), coeffs(std::move(c)) {
    if (n < 0) throw std::invalid_argument("n_modes must be >= 0");
    if (static_cast<int>(coeffs.size()) != 2 * n + 1) {
      throw std::invalid_argument("coefficient array must have 2N+1 entries");
    }
  }

  /// Access by signed mode index, n in [-N, N].
  cplx& at(int n) { return coeffs[static_cast<std::size_t>(n + n_modes)]; }
  const cplx& at(int n) const {
    return coeffs[static_cast<std::size_t>(n + n_modes)];
  }

  int size() const { return 2 * n_modes + 1; }

  bool is_finite() const {
    for (const cplx& c : coeffs) {
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    }
    return true;
  }
};

/// Collocation values u(x_j) at the equispaced nodes x_j = 2 pi j / M.
struct GridField {
  int m_points = 0;
  std::vector<cplx> values;  // size m_points

  GridField() = default;
  GridField(int m, std::vector<cplx> v) : m_points(m), values(std::move(v)) {
    if (m < 1) throw std::invalid_argument("m_points must be >= 1");
    if (static_cast<int>(values.size()) != m) {
      throw std::invalid_argument("value array must have m_points entries");
    }
  }
};

}  // namespace fnls

#endif
