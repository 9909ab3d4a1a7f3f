#include "mconv/approximation.hpp"

#include <cmath>
#include <limits>

namespace mconv {

namespace {
void check_common(double delta, std::size_t constraints, double range_width) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (constraints == 0) throw std::invalid_argument("at least one constraint is required");
  if (!(range_width >= 0.0) || !std::isfinite(range_width)) throw std::invalid_argument("range width must be finite and >= 0");
}
}  // namespace

std::uint64_t hoeffding_samples(double slack, double delta, std::size_t constraints, double range_width) {
  if (!(slack > 0.0) || !std::isfinite(slack)) throw std::invalid_argument("slack must be positive");
  check_common(delta, constraints, range_width);
  if (range_width == 0.0) return 1;
  const double n = range_width * range_width * std::log(2.0 * static_cast<double>(constraints) / delta) /
                   (2.0 * slack * slack);
  if (n >= static_cast<double>(std::numeric_limits<std::uint64_t>::max() / 2))
    throw std::invalid_argument("required sample count overflows");
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(n)));
}

double hoeffding_slack(std::uint64_t n, double delta, std::size_t constraints, double range_width) {
  check_common(delta, constraints, range_width);
  if (n == 0) throw std::invalid_argument("at least one sample is required");
  return range_width * std::sqrt(std::log(2.0 * static_cast<double>(constraints) / delta) / (2.0 * static_cast<double>(n)));
}

std::string to_string(ApproximationStatus s) {
  switch (s) {
    case ApproximationStatus::inside:
      return "inside";
    case ApproximationStatus::statistical_failure:
      return "statistical-failure";
    case ApproximationStatus::unsolvable:
      return "unsolvable";
  }
  return "unknown";
}

}  // namespace mconv
