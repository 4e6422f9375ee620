#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "orient3d/errors.hpp"

namespace orient3d {

using Vec3 = std::array<double, 3>;

// Orientation sampling of the unit sphere by subdivided icosahedron.
//
// Invariants maintained by icosphere():
//  - directions are unit vectors, sorted by (z, y, x) ascending;
//  - the set is exactly antipodally symmetric: directions[antipode[i]] is the
//    exact negation of directions[i], and antipode[antipode[i]] == i;
//  - adjacency is the symmetric edge structure of the triangulated mesh;
//  - weights are uniform, 4*pi/N, summing to 4*pi.
struct OrientationSet {
  std::vector<Vec3> directions;
  std::vector<double> weights;
  std::vector<std::vector<std::int32_t>> adjacency;
  std::vector<std::int32_t> antipode;

  std::size_t size() const { return directions.size(); }
};

// Subdivision order o >= 0 gives 10*4^o + 2 vertices (12, 42, 162, ...).
// Orders above 6 (41k directions) are outside the supported envelope.
OrientationSet icosphere(int order);

// Index pairing i -> j with dirs[j] == -dirs[i] (exact match required).
std::vector<std::int32_t> antipodal_pairing(const std::vector<Vec3>& dirs);

// Uniform quadrature weights 4*pi/N for an N-point sphere sampling.
std::vector<double> quadrature_weights_uniform(std::size_t n);

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

// Geodesic (great-circle) distance between unit vectors, in [0, pi].
double geodesic(const Vec3& a, const Vec3& b);

}  // namespace orient3d
