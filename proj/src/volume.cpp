#include "orient3d/volume.hpp"

#include <cmath>

namespace orient3d {

double omega_axis(std::int64_t k, std::int64_t n) {
  return 2.0 * M_PI * static_cast<double>(signed_freq(k, n)) / static_cast<double>(n);
}

}  // namespace orient3d
