#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orient3d/volume.hpp"
#include "orient3d/sphere.hpp"

namespace orient3d {

// Gaussian-profile tube: intensity * exp(-d^2 / (2 r^2)), d = distance from
// the axis line through `point` with unit direction `dir`.
struct Tube {
  Vec3 point{0, 0, 0};
  Vec3 dir{0, 0, 1};
  double radius = 2.0;
  double intensity = 1.0;
};

// Voxelized max-combination of tubes on an integer grid (voxel centers at
// integer coordinates). Presets: "crossing" = two unit-intensity radius-2
// tubes through the grid center along (1,1,0)/sqrt2 and (1,-1,0)/sqrt2.
Volume phantom(const Dims3& dims, const std::vector<Tube>& tubes);
Volume phantom_preset(const Dims3& dims, const std::string& name);

// Additive white Gaussian noise, sigma >= 0. Deterministic: mt19937_64 seeded
// with `seed`, Box-Muller pairs consumed in voxel order.
Volume add_noise(const Volume& f, double sigma, std::uint64_t seed);

struct Metrics {
  double rel_l2 = 0;  // ||a - b|| / ||b||
  double psnr = 0;    // 20*log10(max|b| / rms(a-b)), capped at 200 dB
  double max_abs = 0; // max |a - b|
};
Metrics compare(const Volume& a, const Volume& b);

}  // namespace orient3d
