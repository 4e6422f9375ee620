#include "orient3d/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "orient3d/threads.hpp"

namespace orient3d {

namespace {

Vec3 unit_or_throw(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  if (!(n > 0.0)) throw ParamError("tube direction must be nonzero");
  return {v[0] / n, v[1] / n, v[2] / n};
}

}  // namespace

Volume phantom(const Dims3& dims, const std::vector<Tube>& tubes) {
  check_dims(dims, 256);
  std::vector<Tube> ts = tubes;
  for (Tube& t : ts) {
    if (!(t.radius > 0.0)) throw ParamError("tube radius must be > 0");
    t.dir = unit_or_throw(t.dir);
  }
  Volume out(dims, VolumeKind::real);
#pragma omp parallel for collapse(2) num_threads(threads()) schedule(static)
  for (std::int64_t z = 0; z < dims.nz; ++z)
    for (std::int64_t y = 0; y < dims.ny; ++y)
      for (std::int64_t x = 0; x < dims.nx; ++x) {
        double best = 0.0;
        for (const Tube& t : ts) {
          const double dx = static_cast<double>(x) - t.point[0];
          const double dy = static_cast<double>(y) - t.point[1];
          const double dz = static_cast<double>(z) - t.point[2];
          const double along = dx * t.dir[0] + dy * t.dir[1] + dz * t.dir[2];
          const double d2 = dx * dx + dy * dy + dz * dz - along * along;
          best = std::max(best,
                          t.intensity * std::exp(-std::max(d2, 0.0) / (2.0 * t.radius * t.radius)));
        }
        out.at(x, y, z) = best;
      }
  return out;
}

Volume phantom_preset(const Dims3& dims, const std::string& name) {
  if (name == "crossing") {
    const Vec3 c = {0.5 * static_cast<double>(dims.nx - 1), 0.5 * static_cast<double>(dims.ny - 1),
                    0.5 * static_cast<double>(dims.nz - 1)};
    const double s = std::sqrt(0.5);
    return phantom(dims, {Tube{c, {s, s, 0.0}, 2.0, 1.0}, Tube{c, {s, -s, 0.0}, 2.0, 1.0}});
  }
  throw ParamError("unknown phantom preset '" + name + "' (available: crossing)");
}

Volume add_noise(const Volume& f, double sigma, std::uint64_t seed) {
  if (sigma < 0.0) throw ParamError("noise sigma must be >= 0");
  Volume out = f;
  if (sigma == 0.0) return out;
  // Fixed generator: mt19937_64 + Box-Muller, voxel order, one draw per voxel.
  // std::normal_distribution is implementation-defined, so it is not used.
  std::mt19937_64 rng(seed);
  auto uniform01 = [&rng]() {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
  };
  bool have_spare = false;
  double spare = 0.0;
  for (cplx& v : out.data) {
    double z;
    if (have_spare) {
      z = spare;
      have_spare = false;
    } else {
      const double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
      const double u2 = uniform01();
      const double r = std::sqrt(-2.0 * std::log(u1));
      z = r * std::cos(2.0 * M_PI * u2);
      spare = r * std::sin(2.0 * M_PI * u2);
      have_spare = true;
    }
    v += sigma * z;
  }
  return out;
}

Metrics compare(const Volume& a, const Volume& b) {
  if (!(a.dims == b.dims)) throw DimError("metric volumes have different grids");
  double diff2 = 0.0, ref2 = 0.0, peak = 0.0, worst = 0.0;
  for (std::size_t k = 0; k < a.data.size(); ++k) {
    const double d = std::abs(a.data[k] - b.data[k]);
    diff2 += d * d;
    ref2 += std::norm(b.data[k]);
    peak = std::max(peak, std::abs(b.data[k]));
    worst = std::max(worst, d);
  }
  Metrics m;
  m.max_abs = worst;
  m.rel_l2 = ref2 > 0.0 ? std::sqrt(diff2 / ref2) : std::sqrt(diff2);
  const double rms = std::sqrt(diff2 / static_cast<double>(a.data.size()));
  m.psnr = (rms == 0.0 || peak == 0.0) ? 200.0 : std::min(200.0, 20.0 * std::log10(peak / rms));
  return m;
}

}  // namespace orient3d
