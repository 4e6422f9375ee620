#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "orient3d/errors.hpp"

namespace orient3d {

using cplx = std::complex<double>;

// Grid dimensions (nx, ny, nz). Linear index is x-fastest: x + nx*(y + ny*z).
struct Dims3 {
  std::int64_t nx = 0, ny = 0, nz = 0;

  std::size_t nvox() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny) *
           static_cast<std::size_t>(nz);
  }
  bool operator==(const Dims3&) const = default;
};

inline void check_dims(const Dims3& d, std::int64_t max_side = 256) {
  if (d.nx < 1 || d.ny < 1 || d.nz < 1)
    throw ParamError("dims must be positive, got " + std::to_string(d.nx) + "," +
                     std::to_string(d.ny) + "," + std::to_string(d.nz));
  if (d.nx > max_side || d.ny > max_side || d.nz > max_side)
    throw LimitError("grid side exceeds supported envelope of " + std::to_string(max_side));
}

// Scalar field on the grid. `kind` records whether the data is semantically
// real (imaginary parts are structural zeros); IO uses it to pick the payload type.
enum class VolumeKind { real, complex };

struct Volume {
  Dims3 dims;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};  // mm/voxel, metadata only
  VolumeKind kind = VolumeKind::real;
  std::vector<cplx> data;  // size dims.nvox(), x-fastest

  Volume() = default;
  Volume(Dims3 d, VolumeKind k) : dims(d), kind(k), data(d.nvox()) {}

  std::size_t idx(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(dims.nx) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims.ny) * z);
  }
  cplx& at(std::int64_t x, std::int64_t y, std::int64_t z) { return data[idx(x, y, z)]; }
  const cplx& at(std::int64_t x, std::int64_t y, std::int64_t z) const {
    return data[idx(x, y, z)];
  }
};

// Signed DFT frequency index for bin k on an axis of size n: k for k <= n/2, else k-n.
inline std::int64_t signed_freq(std::int64_t k, std::int64_t n) {
  return (2 * k <= n) ? k : k - n;
}

// Angular frequency (rad/voxel) of bin k: 2*pi*signed_freq/n, in (-pi, pi].
double omega_axis(std::int64_t k, std::int64_t n);

// True on even axes where bin k is the shared +/-Nyquist plane (|omega| = pi).
inline bool is_nyquist(std::int64_t k, std::int64_t n) { return n % 2 == 0 && 2 * k == n; }

}  // namespace orient3d
