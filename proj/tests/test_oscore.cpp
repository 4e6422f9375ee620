#include <doctest.h>

#include <cmath>
#include <vector>

#include "orient3d/fft.hpp"
#include "orient3d/oscore.hpp"
#include "orient3d/synth.hpp"

using namespace orient3d;

namespace {

constexpr double kPi = 3.14159265358979323846;

WaveletStack small_stack(const Dims3& d, int lmax = 10) {
  WaveletParams p;
  p.lmax = lmax;
  return build_wavelet_stack(icosphere(1), d, p);
}

Volume random_volume(const Dims3& d, std::uint64_t seed) {
  return add_noise(Volume(d, VolumeKind::real), 1.0, seed);
}

double rel_err(const OrientationScore& a, const OrientationScore& b) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    num += std::norm(a.data[i] - b.data[i]);
    den += std::norm(b.data[i]);
  }
  return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("forward of an impulse reproduces the centered spatial kernel") {
  const Dims3 d{16, 16, 16};
  const WaveletStack st = small_stack(d);
  Volume f(d, VolumeKind::real);
  f.at(8, 8, 8) = 1.0;
  const OrientationScore u = forward(f, st);
  for (std::size_t i : {std::size_t(0), std::size_t(17), std::size_t(41)}) {
    const Volume ker = spatial_kernel(st, i);
    double dev = 0, peak = 0;
    for (std::size_t k = 0; k < d.nvox(); ++k) {
      dev = std::max(dev, std::abs(u.slab(i)[k] - ker.data[k]));
      peak = std::max(peak, std::abs(ker.data[k]));
    }
    CHECK(dev <= 1e-12 * peak);
  }
}

TEST_CASE("forward is linear and sends zero to zero") {
  const Dims3 d{12, 12, 12};
  const WaveletStack st = small_stack(d, 8);
  const Volume f = random_volume(d, 1);
  const Volume g = random_volume(d, 2);
  Volume fg(d, VolumeKind::real);
  const double a = 1.7, b = -0.6;
  for (std::size_t k = 0; k < d.nvox(); ++k) fg.data[k] = a * f.data[k] + b * g.data[k];

  const OrientationScore uf = forward(f, st);
  const OrientationScore ug = forward(g, st);
  const OrientationScore ufg = forward(fg, st);
  OrientationScore lin = uf;
  for (std::size_t k = 0; k < lin.data.size(); ++k)
    lin.data[k] = a * uf.data[k] + b * ug.data[k];
  CHECK(rel_err(ufg, lin) <= 1e-12);

  const OrientationScore uz = forward(Volume(d, VolumeKind::real), st);
  for (const cplx& v : uz.data) CHECK(v == cplx(0.0, 0.0));
}

TEST_CASE("forward is translation-equivariant under periodic shifts") {
  const Dims3 d{12, 12, 12};
  const WaveletStack st = small_stack(d, 8);
  const Volume f = random_volume(d, 3);
  Volume fs(d, VolumeKind::real);
  const std::int64_t sx = 5, sy = 2, sz = 9;
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x)
        fs.at(x, y, z) = f.at((x + sx) % d.nx, (y + sy) % d.ny, (z + sz) % d.nz);

  const OrientationScore u = forward(f, st);
  const OrientationScore us = forward(fs, st);
  double dev = 0, peak = 0;
  for (std::size_t i = 0; i < st.set.size(); ++i)
    for (std::int64_t z = 0; z < d.nz; ++z)
      for (std::int64_t y = 0; y < d.ny; ++y)
        for (std::int64_t x = 0; x < d.nx; ++x) {
          const cplx a = us.slab(i)[fs.idx(x, y, z)];
          const cplx b = u.slab(i)[f.idx((x + sx) % d.nx, (y + sy) % d.ny, (z + sz) % d.nz)];
          dev = std::max(dev, std::abs(a - b));
          peak = std::max(peak, std::abs(b));
        }
  CHECK(dev <= 1e-12 * peak);
}

TEST_CASE("forward rejects grid mismatch") {
  const WaveletStack st = small_stack(Dims3{12, 12, 12}, 6);
  CHECK_THROWS_AS(forward(Volume(Dims3{16, 12, 12}, VolumeKind::real), st), DimError);
}

TEST_CASE("round trip is exact on the pass band") {
  const Dims3 d{24, 24, 24};
  const WaveletStack st = small_stack(d, 12);

  // random full-band volume: compare DFT coefficients on {M >= 0.01}
  const Volume f = random_volume(d, 7);
  const Volume r = reconstruct_exact(forward(f, st), st);
  std::vector<cplx> fh(d.nvox()), rh(d.nvox());
  fft3(d, f.data.data(), fh.data());
  fft3(d, r.data.data(), rh.data());
  double num = 0, den = 0;
  for (std::size_t k = 0; k < d.nvox(); ++k) {
    if (st.m_psi[k] < 0.01) continue;
    num += std::norm(rh[k] - fh[k]);
    den += std::norm(fh[k]);
  }
  CHECK(std::sqrt(num / den) <= 1e-6);

  // pre-filtered volume: full-support round trip
  const Volume fb = ball_limit(f, 0.6);
  const Volume rb = reconstruct_exact(forward(fb, st), st);
  const Metrics m = compare(rb, fb);
  CHECK(m.rel_l2 <= 1e-6);

  // zero score -> zero volume
  const Volume z = reconstruct_exact(OrientationScore(d, st.set), st);
  for (const cplx& v : z.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("reconstruct_exact validates its inputs") {
  const Dims3 d{12, 12, 12};
  const WaveletStack st = small_stack(d, 6);
  const OrientationScore u = forward(random_volume(d, 1), st);
  CHECK_THROWS_AS(reconstruct_exact(u, st, 0.0), ParamError);
  CHECK_THROWS_AS(reconstruct_exact(u, st, -1.0), ParamError);
  // strict mode refuses when the band minimum sits below eps
  CHECK_THROWS_AS(reconstruct_exact(u, st, 1.0, Stabilize::strict), StabilityError);
  CHECK_NOTHROW(reconstruct_exact(u, st, 1e-6, Stabilize::strict));
  // score/stack mismatch
  const WaveletStack other = small_stack(Dims3{16, 16, 16}, 6);
  CHECK_THROWS_AS(reconstruct_exact(u, other), DimError);
}

TEST_CASE("clamp and mask agree on covered bands and differ on starved ones") {
  const Dims3 d{16, 16, 16};
  const WaveletStack st = small_stack(d, 8);
  const Volume fb = ball_limit(random_volume(d, 4), 0.5);
  const OrientationScore u = forward(fb, st);
  const Volume rc = reconstruct_exact(u, st, 1e-6, Stabilize::clamp);
  const Volume rm = reconstruct_exact(u, st, 1e-6, Stabilize::mask);
  const Metrics m = compare(rm, rc);
  CHECK(m.rel_l2 <= 1e-9);  // the pass band dominates; starved bins carry ~0 energy here
}

TEST_CASE("reconstruct_approx tracks the original within the calibrated bound") {
  const Dims3 d{32, 32, 32};
  const WaveletStack st = build_wavelet_stack(icosphere(1), d, WaveletParams{});
  const Volume f = ball_limit(phantom_preset(d, "crossing"), 0.7);
  const OrientationScore u = forward(f, st);
  const Metrics m = compare(reconstruct_approx(u), f);
  CHECK(m.rel_l2 <= 0.1);

  const Volume z = reconstruct_approx(OrientationScore(d, st.set));
  for (const cplx& v : z.data) CHECK(std::abs(v) == 0.0);
}

TEST_CASE("approx equals exact on a synthetic flat stack") {
  // two antipodal orientations with weights and filters arranged so that
  // sum_i w_i filter_i = 1 and m_psi = 1 everywhere: the two formulas coincide
  OrientationSet set;
  set.directions = {Vec3{0, 0, -1}, Vec3{0, 0, 1}};
  set.weights = {0.5, 0.5};
  set.adjacency = {{1}, {0}};
  set.antipode = {1, 0};
  const Dims3 d{10, 10, 10};
  WaveletStack st;
  st.dims = d;
  st.set = set;
  st.filters.assign(2, std::vector<double>(d.nvox(), 1.0));
  st.m_psi.assign(d.nvox(), 1.0);

  const Volume f = random_volume(d, 5);
  const OrientationScore u = forward(f, st);
  const Volume ra = reconstruct_approx(u);
  const Volume re = reconstruct_exact(u, st, 1e-12);
  const Metrics m = compare(ra, re);
  CHECK(m.max_abs <= 1e-12);
}

TEST_CASE("m-weighted inner product realizes the isometry") {
  const Dims3 d{16, 16, 16};
  const WaveletStack st = small_stack(d, 8);
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Volume f = ball_limit(random_volume(d, 2 * seed + 10), 0.6);
    const Volume g = ball_limit(random_volume(d, 2 * seed + 11), 0.6);
    cplx direct = 0;
    for (std::size_t k = 0; k < d.nvox(); ++k) direct += std::conj(f.data[k]) * g.data[k];
    const cplx ip = m_inner_product(forward(f, st), forward(g, st), st);
    CHECK(std::abs(ip - direct) <= 1e-6 * std::abs(direct));
  }
  // norm preservation
  const Volume f = ball_limit(random_volume(d, 42), 0.6);
  double n2 = 0;
  for (const cplx& v : f.data) n2 += std::norm(v);
  const OrientationScore u = forward(f, st);
  const cplx self = m_inner_product(u, u, st);
  CHECK(std::abs(self - n2) <= 1e-6 * n2);
  CHECK(std::abs(self.imag()) <= 1e-9 * n2);
}

TEST_CASE("disjoint frequency supports are M-orthogonal") {
  const Dims3 d{16, 16, 16};
  const WaveletStack st = small_stack(d, 8);
  const Volume a = ball_limit(random_volume(d, 21), 0.3);
  Volume b = random_volume(d, 22);
  // annulus: full band minus the inner ball
  const Volume b_in = ball_limit(b, 0.3);
  for (std::size_t k = 0; k < d.nvox(); ++k) b.data[k] -= b_in.data[k];
  const cplx ip = m_inner_product(forward(a, st), forward(b, st), st);
  double na = 0, nb = 0;
  for (const cplx& v : a.data) na += std::norm(v);
  for (const cplx& v : b.data) nb += std::norm(v);
  CHECK(std::abs(ip) <= 1e-9 * std::sqrt(na * nb));
}

TEST_CASE("projection fixes scores, is idempotent and non-expansive") {
  const Dims3 d{16, 16, 16};
  const WaveletStack st = small_stack(d, 8);

  const Volume f = random_volume(d, 31);
  const OrientationScore wf = forward(f, st);
  const OrientationScore pwf = project(wf, st);
  CHECK(rel_err(pwf, wf) <= 1e-6);

  // random, non-score data
  OrientationScore noise(d, st.set);
  for (std::size_t i = 0; i < st.set.size(); ++i) {
    const Volume re = random_volume(d, 100 + 2 * i);
    const Volume im = random_volume(d, 101 + 2 * i);
    for (std::size_t k = 0; k < d.nvox(); ++k)
      noise.slab(i)[k] = cplx(re.data[k].real(), im.data[k].real());
  }
  const OrientationScore p1 = project(noise, st);
  const OrientationScore p2 = project(p1, st);
  CHECK(rel_err(p2, p1) <= 1e-6);

  const double m_noise = std::abs(m_inner_product(noise, noise, st));
  const double m_proj = std::abs(m_inner_product(p1, p1, st));
  CHECK(m_proj <= m_noise * (1.0 + 1e-9));

  CHECK_THROWS_AS(project(noise, st, -1.0), ParamError);
}

TEST_CASE("ball_limit basics") {
  const Dims3 d{14, 14, 14};
  const Volume f = random_volume(d, 55);
  CHECK_THROWS_AS(ball_limit(f, 0.0), ParamError);
  CHECK_THROWS_AS(ball_limit(f, 1.5), ParamError);

  const Volume b1 = ball_limit(f, 0.5);
  const Volume b2 = ball_limit(b1, 0.5);
  const Metrics m = compare(b2, b1);
  CHECK(m.max_abs <= 1e-14);
  CHECK(b1.kind == VolumeKind::real);

  // spectrum vanishes exactly outside the ball
  std::vector<cplx> bh(d.nvox());
  fft3(d, b1.data.data(), bh.data());
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const double wx = omega_axis(x, d.nx), wy = omega_axis(y, d.ny), wz = omega_axis(z, d.nz);
        if (std::sqrt(wx * wx + wy * wy + wz * wz) > 0.5 * kPi)
          CHECK(std::abs(bh[f.idx(x, y, z)]) <= 1e-11);
      }

  // fraction = 1 on an already band-limited input is the identity up to roundoff
  const Volume c1 = ball_limit(f, 1.0);
  const Volume c2 = ball_limit(c1, 1.0);
  CHECK(compare(c2, c1).max_abs <= 1e-13);
}

TEST_CASE("antipodal conjugacy holds for real inputs") {
  const Dims3 d{16, 16, 16};
  const WaveletStack st = small_stack(d, 8);
  const OrientationScore u = forward(random_volume(d, 91), st);
  double peak = 0;
  for (const cplx& v : u.data) peak = std::max(peak, std::abs(v));
  CHECK(antipodal_residual(u) <= 1e-9 * peak);

  OrientationScore no_pairing = u;
  no_pairing.set.antipode.clear();
  CHECK_THROWS_AS(antipodal_residual(no_pairing), DataError);
}
