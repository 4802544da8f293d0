#include "fnls/fourier.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace fnls {

namespace {

struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

// One plan pair per transform size, created on first use. FFTW_UNALIGNED lets
// the same plan run on any caller buffer via fftw_execute_dft, which is
// thread-safe; creation is serialized because the FFTW planner is not.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  PlanPair get(int m) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(m);
    if (it != plans_.end()) return it->second;

    std::vector<cplx> scratch(static_cast<std::size_t>(m));
    auto* raw = reinterpret_cast<fftw_complex*>(scratch.data());
    PlanPair pair;
    pair.forward = fftw_plan_dft_1d(m, raw, raw, FFTW_FORWARD,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
    pair.backward = fftw_plan_dft_1d(m, raw, raw, FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (pair.forward == nullptr || pair.backward == nullptr) {
      throw std::runtime_error("FFTW plan creation failed for size " +
                               std::to_string(m));
    }
    plans_.emplace(m, pair);
    return pair;
  }

 private:
  PlanCache() = default;
  std::mutex mutex_;
  std::unordered_map<int, PlanPair> plans_;
};

}  // namespace

namespace fft {

void backward(std::vector<cplx>& buf) {
  PlanPair p = PlanCache::instance().get(static_cast<int>(buf.size()));
  auto* raw = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(p.backward, raw, raw);
}

void forward(std::vector<cplx>& buf) {
  PlanPair p = PlanCache::instance().get(static_cast<int>(buf.size()));
  auto* raw = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(p.forward, raw, raw);
}

}  // namespace fft

int dealias_grid_size(int n_modes) {
  int m = 1;
  while (m < 4 * n_modes + 1) m <<= 1;
  return m;
}

int transform_grid_size(int n_modes) {
  int m = 1;
  while (m < 2 * n_modes + 1) m <<= 1;
  return m;
}

namespace detail {

void pack_coeffs(const std::vector<cplx>& coeffs, int n_modes,
                 std::vector<cplx>& buf) {
  const int m = static_cast<int>(buf.size());
  std::fill(buf.begin(), buf.end(), cplx(0.0));
  for (int n = -n_modes; n <= n_modes; ++n) {
    const int idx = ((n % m) + m) % m;
    buf[static_cast<std::size_t>(idx)] =
        coeffs[static_cast<std::size_t>(n + n_modes)];
  }
}

void unpack_coeffs(const std::vector<cplx>& buf, int n_modes,
                   std::vector<cplx>& coeffs) {
  const int m = static_cast<int>(buf.size());
  const double scale = 1.0 / static_cast<double>(m);
  coeffs.resize(static_cast<std::size_t>(2 * n_modes + 1));
  for (int n = -n_modes; n <= n_modes; ++n) {
    const int idx = ((n % m) + m) % m;
    coeffs[static_cast<std::size_t>(n + n_modes)] =
        buf[static_cast<std::size_t>(idx)] * scale;
  }
}

}  // namespace detail

GridField to_grid(const SpectralState& state, int m_points) {
  if (m_points < 2 * state.n_modes + 1) {
    throw std::invalid_argument(
        "to_grid: m_points must be >= 2N+1 (would lose modes)");
  }
  std::vector<cplx> buf(static_cast<std::size_t>(m_points));
  detail::pack_coeffs(state.coeffs, state.n_modes, buf);
  fft::backward(buf);
  return GridField(m_points, std::move(buf));
}

SpectralState from_grid(const GridField& field, int n_modes) {
  if (field.m_points < 2 * n_modes + 1) {
    throw std::invalid_argument(
        "from_grid: m_points must be >= 2N+1 (modes are not resolvable)");
  }
  std::vector<cplx> buf = field.values;
  fft::forward(buf);
  SpectralState out(n_modes);
  detail::unpack_coeffs(buf, n_modes, out.coeffs);
  return out;
}

}  // namespace fnls
