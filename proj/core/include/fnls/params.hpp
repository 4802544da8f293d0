#ifndef FNLS_PARAMS_HPP
#define FNLS_PARAMS_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace fnls {

/// Model parameters of the truncated fractional cubic Schrödinger system on
/// the circle: dispersion exponent alpha, nonlinearity sign gamma
/// (+1 focusing, -1 defocusing), truncation N (modes |n| <= N) and the
/// Sobolev index s used for measure and norm contexts.
struct ModelParams {
  double alpha = 0.75;
  int gamma = -1;
  int n_modes = 8;
  double s = 0.25;

  void validate() const {
    if (!(alpha > 0.5) || !(alpha <= 1.0)) {
      throw std::invalid_argument("alpha must lie in (1/2, 1], got " +
                                  std::to_string(alpha));
    }
    if (gamma != 1 && gamma != -1) {
      throw std::invalid_argument("gamma must be +1 or -1");
    }
    if (n_modes < 1) {
      throw std::invalid_argument("n_modes must be >= 1");
    }
    if (!std::isfinite(s)) {
      throw std::invalid_argument("s must be finite");
    }
  }

  /// Fractional Laplacian symbol |n|^{2 alpha}; zero at n = 0.
  double symbol(int n) const {
    return n == 0 ? 0.0 : std::pow(std::abs(static_cast<double>(n)), 2.0 * alpha);
  }
};

/// Stable default step size: keeps RK4 inside its stability region for the
/// stiffest retained mode and both schemes within the conservation tolerances
/// used by the test suites.
inline double default_dt(const ModelParams& p) {
  const double stiff = std::pow(static_cast<double>(p.n_modes), 2.0 * p.alpha);
  return std::min(1e-3, 0.5 / stiff);
}

}  // namespace fnls

#endif
