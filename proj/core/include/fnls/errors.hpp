#ifndef FNLS_ERRORS_HPP
#define FNLS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fnls {

/// Thrown when a trajectory produces NaN/Inf or an iteration stops contracting.
/// Carries the last time at which the state was still finite.
class numerics_error : public std::runtime_error {
 public:
  numerics_error(std::string msg, double last_good_time)
      : std::runtime_error(std::move(msg)), last_good_time_(last_good_time) {}

  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

/// Thrown by samplers: degenerate acceptance rate, all-zero weights, invalid
/// sampler configuration for the requested method.
class sampling_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace fnls

#endif
