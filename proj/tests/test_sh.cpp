#include <doctest.h>

#include <cmath>
#include <random>

#include "orient3d/cakewavelet.hpp"
#include "orient3d/sh.hpp"

using namespace orient3d;

namespace {

constexpr double kPi = 3.14159265358979323846;

double n_l(int l) { return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)); }

Vec3 rotate(const std::array<std::array<double, 3>, 3>& r, const Vec3& v) {
  return Vec3{r[0][0] * v[0] + r[0][1] * v[1] + r[0][2] * v[2],
              r[1][0] * v[0] + r[1][1] * v[1] + r[1][2] * v[2],
              r[2][0] * v[0] + r[2][1] * v[1] + r[2][2] * v[2]};
}

// z-x-z Euler rotation, enough to reach any axis from e_z
std::array<std::array<double, 3>, 3> euler(double a, double b, double c) {
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cc = std::cos(c), sc = std::sin(c);
  return {{{ca * cc - sa * cb * sc, -ca * sc - sa * cb * cc, sa * sb},
           {sa * cc + ca * cb * sc, -sa * sc + ca * cb * cc, -ca * sb},
           {sb * sc, sb * cc, cb}}};
}

}  // namespace

TEST_CASE("legendre matches closed forms") {
  CHECK(legendre(0, 0.3) == doctest::Approx(1.0));
  CHECK(legendre(1, 0.3) == doctest::Approx(0.3));
  CHECK(legendre(2, 0.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(legendre(2, 0.5) == doctest::Approx(0.5 * (3 * 0.25 - 1)).epsilon(1e-15));
  CHECK(legendre(3, 0.5) == doctest::Approx(0.5 * (5 * 0.125 - 3 * 0.5)).epsilon(1e-15));
  for (int l = 0; l <= 20; ++l) {
    CHECK(legendre(l, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(legendre(l, -1.0) == doctest::Approx(l % 2 ? -1.0 : 1.0).epsilon(1e-13));
  }
  CHECK_THROWS_AS(legendre(2, 1.5), ParamError);
  CHECK_THROWS_AS(legendre(-1, 0.0), ParamError);
}

TEST_CASE("gauss_legendre integrates polynomials exactly") {
  std::vector<double> x, w;
  gauss_legendre(8, x, w);
  REQUIRE(x.size() == 8);
  double sum = 0;
  for (double wi : w) sum += wi;
  CHECK(sum == doctest::Approx(2.0).epsilon(1e-14));
  // exact for degree <= 15: check x^14 against 2/15
  double acc = 0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * std::pow(x[i], 14);
  CHECK(acc == doctest::Approx(2.0 / 15.0).epsilon(1e-12));
  // nodes ascending and symmetric
  for (std::size_t i = 1; i < x.size(); ++i) CHECK(x[i] > x[i - 1]);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(x[i] == doctest::Approx(-x[7 - i]).epsilon(1e-14));
}

TEST_CASE("fit_zonal reproduces a basis function") {
  // f = Y_3^0
  auto f = [](double theta) { return n_l(3) * legendre(3, std::cos(theta)); };
  const ZonalSpectrum s = fit_zonal(f, 8);
  for (int l = 0; l <= 8; ++l)
    CHECK(s.c[l] == doctest::Approx(l == 3 ? 1.0 : 0.0).epsilon(1e-10).scale(1.0));
}

TEST_CASE("fit_zonal of the constant gives c_0 = sqrt(4*pi)") {
  const ZonalSpectrum s = fit_zonal([](double) { return 1.0; }, 6);
  CHECK(s.c[0] == doctest::Approx(std::sqrt(4.0 * kPi)).epsilon(1e-12));
  for (int l = 1; l <= 6; ++l) CHECK(std::abs(s.c[l]) < 1e-8);
}

TEST_CASE("fit residual decreases when L grows") {
  auto f = [](double theta) { return bspline(2, theta / 0.7); };
  auto rms = [&](const ZonalSpectrum& s) {
    double acc = 0;
    const int n = 400;
    for (int i = 0; i < n; ++i) {
      const double theta = kPi * (i + 0.5) / n;
      const double d = f(theta) - eval_zonal(s, theta);
      acc += d * d;
    }
    return std::sqrt(acc / n);
  };
  CHECK(rms(fit_zonal(f, 16)) < rms(fit_zonal(f, 8)));
}

TEST_CASE("refitting an evaluated spectrum is stable") {
  ZonalSpectrum s;
  s.c = {0.4, -0.2, 0.9, 0.0, 0.3, -0.5};
  const ZonalSpectrum t = fit_zonal([&](double theta) { return eval_zonal(s, theta); }, 5);
  for (int l = 0; l <= 5; ++l) CHECK(t.c[l] == doctest::Approx(s.c[l]).epsilon(1e-10).scale(1.0));
}

TEST_CASE("funk multiplies by 2*pi*P_l(0)") {
  ZonalSpectrum s;
  s.c = {1.0, 1.0, 1.0, 1.0, 1.0};
  const ZonalSpectrum t = funk(s);
  CHECK(t.c[0] == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(t.c[1] == 0.0);
  CHECK(t.c[2] == doctest::Approx(-kPi).epsilon(1e-14));
  CHECK(t.c[3] == 0.0);
  CHECK(t.c[4] == doctest::Approx(2.0 * kPi * 0.375).epsilon(1e-14));  // P_4(0) = 3/8
}

TEST_CASE("antisymmetrize zeroes even l and doubles odd l") {
  ZonalSpectrum s;
  s.c = {0.0, 0.0, 5.0, 5.0};
  const ZonalSpectrum t = antisymmetrize(s);
  CHECK(t.c[2] == 0.0);
  CHECK(t.c[3] == 10.0);
}

TEST_CASE("antisymmetrized spectra are odd under theta -> pi - theta") {
  ZonalSpectrum s;
  s.c = {0.7, -0.3, 0.2, 0.9, -0.4, 0.1};
  const ZonalSpectrum t = antisymmetrize(s);
  for (int i = 0; i < 9; ++i) {
    const double theta = 0.3 + 0.07 * i;
    CHECK(std::abs(eval_zonal(t, theta) + eval_zonal(t, kPi - theta)) < 1e-10);
  }
}

TEST_CASE("antisymmetrize twice doubles; funk and antisymmetrize commute") {
  ZonalSpectrum s;
  s.c = {0.7, -0.3, 0.2, 0.9, -0.4, 0.1, 0.05};
  const ZonalSpectrum a = antisymmetrize(s);
  const ZonalSpectrum aa = antisymmetrize(a);
  for (std::size_t l = 0; l < s.c.size(); ++l) CHECK(aa.c[l] == doctest::Approx(2.0 * a.c[l]));
  const ZonalSpectrum fa = funk(antisymmetrize(s));
  const ZonalSpectrum af = antisymmetrize(funk(s));
  for (std::size_t l = 0; l < s.c.size(); ++l) CHECK(fa.c[l] == doctest::Approx(af.c[l]));
}

TEST_CASE("steer_zonal with n = e_z matches eval_zonal on a meridian") {
  ZonalSpectrum s;
  s.c = {0.4, -0.2, 0.9, 0.0, 0.3};
  std::vector<Vec3> dirs;
  std::vector<double> thetas;
  for (int i = 0; i <= 10; ++i) {
    const double theta = kPi * i / 10.0;
    dirs.push_back(Vec3{std::sin(theta), 0.0, std::cos(theta)});
    thetas.push_back(theta);
  }
  const std::vector<double> v = steer_zonal(s, Vec3{0, 0, 1}, dirs);
  for (std::size_t i = 0; i < dirs.size(); ++i)
    CHECK(v[i] == doctest::Approx(eval_zonal(s, thetas[i])).epsilon(1e-12).scale(1.0));
}

TEST_CASE("steer_zonal at the axis itself gives the polar value") {
  ZonalSpectrum s;
  s.c = {0.4, -0.2, 0.9, 0.6};
  const Vec3 n{0.48, -0.6, 0.64};
  const std::vector<double> v = steer_zonal(s, n, {n});
  CHECK(v[0] == doctest::Approx(eval_zonal(s, 0.0)).epsilon(1e-12));
}

TEST_CASE("steer_zonal rejects non-unit axes") {
  ZonalSpectrum s;
  s.c = {1.0};
  CHECK_THROWS_AS(steer_zonal(s, Vec3{0, 0, 1.01}, {Vec3{0, 0, 1}}), ParamError);
}

TEST_CASE("steering is rotation-equivariant") {
  ZonalSpectrum s;
  s.c = {0.4, -0.2, 0.9, 0.0, 0.3, -0.5, 0.2};
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto r = euler(2 * kPi * uni(rng), std::acos(2 * uni(rng) - 1), 2 * kPi * uni(rng));
    const Vec3 n = rotate(r, Vec3{0, 0, 1});
    for (int i = 0; i < 6; ++i) {
      const double theta = kPi * (i + 0.5) / 6.0;
      const double phi = 2 * kPi * uni(rng);
      const Vec3 w{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                   std::cos(theta)};
      const std::vector<double> v = steer_zonal(s, n, {rotate(r, w)});
      CHECK(v[0] == doctest::Approx(eval_zonal(s, theta)).epsilon(1e-10).scale(1.0));
    }
  }
}

TEST_CASE("two rotations sharing the axis steer identically") {
  ZonalSpectrum s;
  s.c = {0.4, -0.2, 0.9, 0.0, 0.3};
  // two Euler triples with the same R e_z but different spin about it
  const auto r1 = euler(0.7, 1.1, 0.0);
  const auto r2 = euler(0.7, 1.1, 2.1);
  const Vec3 n1 = rotate(r1, Vec3{0, 0, 1});
  const Vec3 n2 = rotate(r2, Vec3{0, 0, 1});
  REQUIRE(std::abs(n1[0] - n2[0]) < 1e-15);
  const std::vector<Vec3> probe{{0.6, 0.0, 0.8}, {0.0, -0.28, 0.96}, {1.0, 0.0, 0.0}};
  const std::vector<double> a = steer_zonal(s, n1, probe);
  const std::vector<double> b = steer_zonal(s, n2, probe);
  for (std::size_t i = 0; i < probe.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-14));
}

TEST_CASE("great-circle quadrature reproduces the funk coefficient rule") {
  // average Y_l^0 over the great circle perpendicular to n(theta,phi) and
  // compare with 2*pi*P_l(0)*Y_l^0(theta,phi), via 512-node trapezoid (exact
  // for trigonometric polynomials of degree < 512)
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double theta = std::acos(2 * uni(rng) - 1);
    const double phi = 2 * kPi * uni(rng);
    const Vec3 n{std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                 std::cos(theta)};
    // orthonormal frame (e1, e2) spanning the circle
    const Vec3 a = std::abs(n[2]) < 0.9 ? Vec3{0.0, 0.0, 1.0} : Vec3{1.0, 0.0, 0.0};
    Vec3 e1{n[1] * a[2] - n[2] * a[1], n[2] * a[0] - n[0] * a[2], n[0] * a[1] - n[1] * a[0]};
    const double len = std::sqrt(dot(e1, e1));
    for (double& c : e1) c /= len;
    const Vec3 e2{n[1] * e1[2] - n[2] * e1[1], n[2] * e1[0] - n[0] * e1[2],
                  n[0] * e1[1] - n[1] * e1[0]};
    for (int l = 0; l <= 16; ++l) {
      const int nodes = 512;
      double acc = 0;
      for (int q = 0; q < nodes; ++q) {
        const double alpha = 2 * kPi * q / nodes;
        const double z = std::cos(alpha) * e1[2] + std::sin(alpha) * e2[2];
        acc += n_l(l) * legendre(l, z);
      }
      acc *= 2 * kPi / nodes;
      const double expect = 2 * kPi * legendre(l, 0.0) * n_l(l) * legendre(l, std::cos(theta));
      CHECK(std::abs(acc - expect) < 1e-8);
    }
  }
}
