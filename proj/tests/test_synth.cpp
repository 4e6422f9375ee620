#include <doctest.h>

#include <cmath>

#include "orient3d/synth.hpp"

using namespace orient3d;

TEST_CASE("tube phantom profile") {
  const Dims3 d{21, 21, 21};
  Tube t;
  t.point = {10, 10, 10};
  t.dir = {0, 0, 1};
  t.radius = 2.0;
  t.intensity = 3.0;
  const Volume v = phantom(d, {t});
  // on-axis voxels carry the full intensity at any z
  for (std::int64_t z = 0; z < 21; ++z)
    CHECK(v.at(10, 10, z).real() == doctest::Approx(3.0).epsilon(1e-14));
  // one radius away the profile reads intensity * exp(-1/2)
  CHECK(v.at(12, 10, 7).real() == doctest::Approx(3.0 * std::exp(-0.5)).epsilon(1e-12));
  CHECK(v.kind == VolumeKind::real);
}

TEST_CASE("crossing tubes combine by max, not sum") {
  const Dims3 d{21, 21, 21};
  Tube a, b;
  a.point = b.point = {10, 10, 10};
  a.dir = {1, 0, 0};
  b.dir = {0, 1, 0};
  const Volume v = phantom(d, {a, b});
  CHECK(v.at(10, 10, 10).real() == doctest::Approx(1.0).epsilon(1e-14));  // max(1,1), not 2
}

TEST_CASE("phantom validates tubes and the preset name") {
  const Dims3 d{12, 12, 12};
  Tube t;
  t.radius = 0.0;
  CHECK_THROWS_AS(phantom(d, {t}), ParamError);
  t = Tube{};
  t.dir = {0, 0, 0};
  CHECK_THROWS_AS(phantom(d, {t}), ParamError);
  CHECK_THROWS_AS(phantom_preset(d, "nonsense"), ParamError);
}

TEST_CASE("crossing preset carries two unit tubes through the center") {
  const Dims3 d{32, 32, 32};
  const Volume v = phantom_preset(d, "crossing");
  double peak = 0;
  for (const cplx& z : v.data) peak = std::max(peak, z.real());
  // nearest voxels sit at squared distance (z - 15.5)^2 = 1/4 from the axes,
  // so the maximum is exp(-0.25 / (2 * 2^2)) of the unit intensity
  CHECK(peak == doctest::Approx(std::exp(-1.0 / 32.0)).epsilon(1e-12));
  // center voxel (grid center at (n-1)/2 = 15.5 is off-lattice; its neighbors are bright)
  CHECK(v.at(15, 15, 15).real() > 0.8);
  CHECK(v.at(16, 16, 15).real() > 0.8);
  // the tubes live in the z = center plane
  CHECK(v.at(15, 15, 2).real() < 0.1);
}

TEST_CASE("noise is seed-deterministic with sigma = 0 the identity") {
  const Dims3 d{12, 12, 12};
  const Volume f = phantom_preset(d, "crossing");
  const Volume a = add_noise(f, 0.3, 42);
  const Volume b = add_noise(f, 0.3, 42);
  const Volume c = add_noise(f, 0.3, 43);
  for (std::size_t k = 0; k < d.nvox(); ++k) CHECK(a.data[k] == b.data[k]);
  double diff = 0;
  for (std::size_t k = 0; k < d.nvox(); ++k) diff = std::max(diff, std::abs(a.data[k] - c.data[k]));
  CHECK(diff > 0.0);

  const Volume z = add_noise(f, 0.0, 7);
  for (std::size_t k = 0; k < d.nvox(); ++k) CHECK(z.data[k] == f.data[k]);

  CHECK_THROWS_AS(add_noise(f, -0.1, 7), ParamError);
}

TEST_CASE("noise sample standard deviation is calibrated") {
  const Dims3 d{64, 64, 64};
  const Volume f(d, VolumeKind::real);
  const double sigma = 0.3;
  const Volume n = add_noise(f, sigma, 12345);
  double mean = 0;
  for (const cplx& z : n.data) mean += z.real();
  mean /= static_cast<double>(d.nvox());
  double var = 0;
  for (const cplx& z : n.data) var += (z.real() - mean) * (z.real() - mean);
  var /= static_cast<double>(d.nvox() - 1);
  CHECK(std::sqrt(var) == doctest::Approx(sigma).epsilon(0.02));
  CHECK(std::abs(mean) < 3.0 * sigma / std::sqrt(static_cast<double>(d.nvox())));
}

TEST_CASE("metrics contract") {
  const Dims3 d{8, 8, 8};
  const Volume b = add_noise(Volume(d, VolumeKind::real), 1.0, 3);

  const Metrics same = compare(b, b);
  CHECK(same.rel_l2 == 0.0);
  CHECK(same.psnr == 200.0);
  CHECK(same.max_abs == 0.0);

  Volume twice = b;
  for (cplx& z : twice.data) z *= 2.0;
  CHECK(compare(twice, b).rel_l2 == doctest::Approx(1.0).epsilon(1e-12));

  Volume off = b;
  for (cplx& z : off.data) z += 0.25;
  const Metrics m = compare(off, b);
  CHECK(m.max_abs == doctest::Approx(0.25).epsilon(1e-12));
  double peak = 0;
  for (const cplx& z : b.data) peak = std::max(peak, std::abs(z));
  CHECK(m.psnr == doctest::Approx(20.0 * std::log10(peak / 0.25)).epsilon(1e-10));

  CHECK_THROWS_AS(compare(b, Volume(Dims3{9, 8, 8}, VolumeKind::real)), DimError);
}
