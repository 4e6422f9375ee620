#include "orient3d/oscore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orient3d/fft.hpp"
#include "orient3d/threads.hpp"

namespace orient3d {

namespace {

void check_score_envelope(const Dims3& dims, std::size_t no) {
  check_dims(dims, 128);
  if (no > 162)
    throw LimitError("orientation count " + std::to_string(no) +
                     " exceeds the supported envelope (162)");
  if (no == 0) throw ParamError("empty orientation set");
}

void check_compatible(const OrientationScore& u, const WaveletStack& stack) {
  if (!(u.dims == stack.dims)) throw DimError("score grid does not match stack grid");
  if (u.set.size() != stack.set.size())
    throw DimError("score orientation count does not match stack");
  for (std::size_t i = 0; i < u.set.size(); ++i) {
    const Vec3 &a = u.set.directions[i], &b = stack.set.directions[i];
    if (std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]) > 1e-9)
      throw DimError("score and stack orientation sets differ at index " + std::to_string(i));
  }
}

double resolve_eps(const WaveletStack& stack, std::optional<double> eps) {
  if (eps) {
    if (!(*eps > 0.0)) throw ParamError("eps must be positive, got " + std::to_string(*eps));
    return *eps;
  }
  double mx = 0.0;
  for (double m : stack.m_psi) mx = std::max(mx, m);
  return 1e-8 * mx;
}

// Accumulate S(k) = sum_i w_i Psi_hat_i(k) U_hat_i(k): FFTs run in parallel
// batches, the per-bin sums in a fixed ascending orientation order so the
// result is bitwise independent of the thread count.
std::vector<cplx> weighted_filter_sum(const OrientationScore& u, const WaveletStack& stack) {
  const std::size_t nvox = u.dims.nvox();
  const std::size_t no = u.set.size();
  const int nt = std::max(1, threads());
  std::vector<cplx> shat(nvox, cplx(0.0, 0.0));
  std::vector<std::vector<cplx>> scratch(std::min<std::size_t>(nt, no),
                                         std::vector<cplx>(nvox));
  for (std::size_t base = 0; base < no; base += scratch.size()) {
    const std::size_t batch = std::min(scratch.size(), no - base);
#pragma omp parallel for num_threads(nt) schedule(static, 1)
    for (std::size_t b = 0; b < batch; ++b)
      fft3(u.dims, u.slab(base + b), scratch[b].data());
    for (std::size_t b = 0; b < batch; ++b) {
      const double w = stack.set.weights[base + b];
      const std::vector<double>& f = stack.filters[base + b];
      const cplx* s = scratch[b].data();
#pragma omp parallel for num_threads(nt) schedule(static)
      for (std::size_t k = 0; k < nvox; ++k) shat[k] += w * f[k] * s[k];
    }
  }
  return shat;
}

}  // namespace

OrientationScore forward(const Volume& f, const WaveletStack& stack) {
  if (!(f.dims == stack.dims)) throw DimError("volume grid does not match stack grid");
  check_score_envelope(f.dims, stack.set.size());
  const std::size_t nvox = f.dims.nvox();

  std::vector<cplx> fhat(nvox);
  fft3(f.dims, f.data.data(), fhat.data());

  OrientationScore u(f.dims, stack.set);
  u.spacing = f.spacing;
#pragma omp parallel for num_threads(threads()) schedule(dynamic)
  for (std::size_t i = 0; i < stack.set.size(); ++i) {
    cplx* slab = u.slab(i);
    const std::vector<double>& filt = stack.filters[i];
    // conj(Psi_hat) * f_hat; filters are real so conjugation is a no-op.
    for (std::size_t k = 0; k < nvox; ++k) slab[k] = filt[k] * fhat[k];
    ifft3(f.dims, slab, slab);
  }
  return u;
}

Volume reconstruct_exact(const OrientationScore& u, const WaveletStack& stack,
                         std::optional<double> eps, Stabilize mode) {
  check_compatible(u, stack);
  check_score_envelope(u.dims, u.set.size());
  const double e = resolve_eps(stack, eps);

  if (mode == Stabilize::strict) {
    const BandStats st = mpsi_band_stats(stack, 0.8);
    if (st.min < e)
      throw StabilityError("stability map minimum " + std::to_string(st.min) +
                           " over the 0.8-band falls below eps " + std::to_string(e) +
                           "; use clamp or mask stabilization");
  }

  std::vector<cplx> shat = weighted_filter_sum(u, stack);
  const std::size_t nvox = u.dims.nvox();
#pragma omp parallel for num_threads(threads()) schedule(static)
  for (std::size_t k = 0; k < nvox; ++k) {
    const double m = stack.m_psi[k];
    if (mode == Stabilize::mask) {
      shat[k] = (m >= e) ? shat[k] / m : cplx(0.0, 0.0);
    } else {
      shat[k] /= std::max(m, e);
    }
  }

  Volume out(u.dims, VolumeKind::complex);
  out.spacing = u.spacing;
  ifft3(u.dims, shat.data(), out.data.data());
  return out;
}

Volume reconstruct_approx(const OrientationScore& u) {
  check_score_envelope(u.dims, u.set.size());
  const std::size_t nvox = u.dims.nvox();
  Volume out(u.dims, VolumeKind::complex);
  out.spacing = u.spacing;
#pragma omp parallel for num_threads(threads()) schedule(static)
  for (std::size_t x = 0; x < nvox; ++x) {
    cplx acc(0.0, 0.0);
    for (std::size_t i = 0; i < u.set.size(); ++i) acc += u.set.weights[i] * u.data[i * nvox + x];
    out.data[x] = acc;
  }
  return out;
}

cplx m_inner_product(const OrientationScore& u, const OrientationScore& v,
                     const WaveletStack& stack, std::optional<double> eps) {
  check_compatible(u, stack);
  check_compatible(v, stack);
  check_score_envelope(u.dims, u.set.size());
  const double e = resolve_eps(stack, eps);
  const std::size_t nvox = u.dims.nvox();

  std::vector<cplx> uhat(nvox), vhat(nvox);
  double acc_re = 0.0, acc_im = 0.0;
  for (std::size_t i = 0; i < u.set.size(); ++i) {
    fft3(u.dims, u.slab(i), uhat.data());
    fft3(v.dims, v.slab(i), vhat.data());
    const double w = stack.set.weights[i];
    double re = 0.0, im = 0.0;
#pragma omp parallel for num_threads(threads()) schedule(static) reduction(+ : re, im)
    for (std::size_t k = 0; k < nvox; ++k) {
      const double m = stack.m_psi[k];
      if (m < e) continue;
      const cplx t = std::conj(uhat[k]) * vhat[k] / m;
      re += t.real();
      im += t.imag();
    }
    acc_re += w * re;
    acc_im += w * im;
  }
  const double n = static_cast<double>(nvox);
  return cplx(acc_re / n, acc_im / n);
}

OrientationScore project(const OrientationScore& u, const WaveletStack& stack, double eps) {
  check_compatible(u, stack);
  check_score_envelope(u.dims, u.set.size());
  if (eps < 0.0) throw ParamError("projection eps must be >= 0");
  const std::size_t nvox = u.dims.nvox();

  std::vector<cplx> shat = weighted_filter_sum(u, stack);
#pragma omp parallel for num_threads(threads()) schedule(static)
  for (std::size_t k = 0; k < nvox; ++k) {
    const double m = stack.m_psi[k];
    shat[k] = (m > eps) ? shat[k] / m : cplx(0.0, 0.0);
  }

  OrientationScore out(u.dims, u.set);
  out.spacing = u.spacing;
#pragma omp parallel for num_threads(threads()) schedule(dynamic)
  for (std::size_t i = 0; i < u.set.size(); ++i) {
    cplx* slab = out.slab(i);
    const std::vector<double>& filt = stack.filters[i];
    for (std::size_t k = 0; k < nvox; ++k) slab[k] = filt[k] * shat[k];
    ifft3(u.dims, slab, slab);
  }
  return out;
}

Volume ball_limit(const Volume& f, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ParamError("ball fraction must lie in (0, 1], got " + std::to_string(fraction));
  check_dims(f.dims, 128);
  const Dims3& d = f.dims;
  std::vector<cplx> hat(d.nvox());
  fft3(d, f.data.data(), hat.data());
  const double rmax = fraction * rho_nyquist;
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const double wx = omega_axis(x, d.nx);
        const double wy = omega_axis(y, d.ny);
        const double wz = omega_axis(z, d.nz);
        if (std::sqrt(wx * wx + wy * wy + wz * wz) > rmax)
          hat[static_cast<std::size_t>(x) +
              static_cast<std::size_t>(d.nx) *
                  (static_cast<std::size_t>(y) +
                   static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z))] = cplx(0.0, 0.0);
      }
  Volume out(d, f.kind);
  out.spacing = f.spacing;
  ifft3(d, hat.data(), out.data.data());
  if (f.kind == VolumeKind::real)
    for (cplx& v : out.data) v = cplx(v.real(), 0.0);
  return out;
}

double antipodal_residual(const OrientationScore& u) {
  if (u.set.antipode.size() != u.set.size())
    throw DataError("orientation set carries no antipode map");
  const std::size_t nvox = u.dims.nvox();
  double worst = 0.0;
#pragma omp parallel for num_threads(threads()) schedule(static) reduction(max : worst)
  for (std::size_t i = 0; i < u.set.size(); ++i) {
    const cplx* a = u.slab(static_cast<std::size_t>(u.set.antipode[i]));
    const cplx* b = u.slab(i);
    double w = 0.0;
    for (std::size_t k = 0; k < nvox; ++k) w = std::max(w, std::abs(a[k] - std::conj(b[k])));
    worst = std::max(worst, w);
  }
  return worst;
}

}  // namespace orient3d
