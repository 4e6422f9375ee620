#include "orient3d/cakewavelet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "orient3d/fft.hpp"
#include "orient3d/threads.hpp"

namespace orient3d {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_stack_envelope(const OrientationSet& set, const Dims3& dims) {
  if (dims.nx < 8 || dims.ny < 8 || dims.nz < 8)
    throw DimError("wavelet grid needs at least 8 voxels per axis");
  check_dims(dims, 128);
  if (set.size() > 162)
    throw LimitError("orientation count " + std::to_string(set.size()) +
                     " exceeds the supported envelope (162)");
}

}  // namespace

void WaveletParams::validate() const {
  if (!(s_theta > 0.0) || s_theta > kPi)
    throw ParamError("angular scale s_theta must lie in (0, pi], got " + std::to_string(s_theta));
  if (k < 0 || k > 10) throw ParamError("B-spline order k must lie in [0, 10]");
  if (big_n < 0 || big_n > 100) throw ParamError("radial Taylor order N must lie in [0, 100]");
  if (!(gamma > 0.0 && gamma < 1.0))
    throw ParamError("inflection fraction gamma must lie in (0, 1), got " + std::to_string(gamma));
  if (lmax < 1) throw ParamError("band limit L must be >= 1");
  if (lmax > 64) throw LimitError("band limit L above supported envelope (64)");
}

double bspline(int k, double x) {
  if (k < 0) throw ParamError("B-spline order must be >= 0");
  // midpoint value at the box jumps keeps the recursion exact when it lands
  // on a breakpoint (e.g. B^1(0) = 1)
  if (k == 0) return std::abs(x) < 0.5 ? 1.0 : (std::abs(x) == 0.5 ? 0.5 : 0.0);
  const double half = 0.5 * (k + 1);
  if (std::abs(x) >= half) return 0.0;
  return ((x + half) * bspline(k - 1, x + 0.5) + (half - x) * bspline(k - 1, x - 0.5)) / k;
}

double radial_profile(double rho, int big_n, double gamma) {
  if (rho < 0) throw ParamError("frequency magnitude must be >= 0");
  const double t = 2.0 * (gamma * rho_nyquist) * (gamma * rho_nyquist) / (1.0 + 2.0 * big_n);
  const double u = rho * rho / t;
  double term = 1.0, sum = 1.0;
  for (int q = 1; q <= big_n; ++q) {
    term *= u / q;
    sum += term;
  }
  return std::exp(-u) * sum;
}

AngularSpectra angular_spectra(const WaveletParams& p) {
  p.validate();
  AngularSpectra s;
  s.window = fit_zonal([&](double theta) { return bspline(p.k, theta / p.s_theta); }, p.lmax);
  s.re = funk(s.window);
  s.im = antisymmetrize(s.window);
  s.total = s.re;
  for (int l = 0; l <= s.total.lmax(); ++l) s.total.c[l] += s.im.c[l];
  return s;
}

namespace detail {

WaveletStack build_stack_with_spectrum(const OrientationSet& set, const Dims3& dims,
                                       const WaveletParams& params, const ZonalSpectrum& h,
                                       double dc_value) {
  params.validate();
  check_stack_envelope(set, dims);
  const std::size_t nvox = dims.nvox();
  const std::size_t no = set.size();

  WaveletStack stack;
  stack.dims = dims;
  stack.params = params;
  stack.set = set;
  stack.filters.assign(no, std::vector<double>(nvox, 0.0));
  stack.m_psi.assign(nvox, 0.0);

  // Shared per-bin geometry: radial envelope (zero on even-axis Nyquist
  // planes, where +/-pi alias and antipodal filter symmetry cannot hold) and
  // the unit frequency direction.
  std::vector<double> g(nvox), ux(nvox), uy(nvox), uz(nvox);
#pragma omp parallel for collapse(2) num_threads(threads()) schedule(static)
  for (std::int64_t z = 0; z < dims.nz; ++z)
    for (std::int64_t y = 0; y < dims.ny; ++y)
      for (std::int64_t x = 0; x < dims.nx; ++x) {
        const std::size_t k = static_cast<std::size_t>(x) +
                              static_cast<std::size_t>(dims.nx) *
                                  (static_cast<std::size_t>(y) + static_cast<std::size_t>(dims.ny) * z);
        const double wx = omega_axis(x, dims.nx);
        const double wy = omega_axis(y, dims.ny);
        const double wz = omega_axis(z, dims.nz);
        const double rho = std::sqrt(wx * wx + wy * wy + wz * wz);
        if (rho == 0.0 || is_nyquist(x, dims.nx) || is_nyquist(y, dims.ny) ||
            is_nyquist(z, dims.nz)) {
          g[k] = 0.0;
          ux[k] = uy[k] = uz[k] = 0.0;
        } else {
          g[k] = radial_profile(rho, params.big_n, params.gamma);
          ux[k] = wx / rho;
          uy[k] = wy / rho;
          uz[k] = wz / rho;
        }
      }

  // Premultiplied coefficients b_l = c_l * sqrt((2l+1)/(4*pi)).
  std::vector<double> b(h.c.size());
  for (std::size_t l = 0; l < h.c.size(); ++l)
    b[l] = h.c[l] * std::sqrt((2.0 * l + 1.0) / (4.0 * kPi));
  const int lmax = static_cast<int>(b.size()) - 1;

#pragma omp parallel for num_threads(threads()) schedule(dynamic)
  for (std::size_t i = 0; i < no; ++i) {
    const Vec3 n = set.directions[i];
    std::vector<double>& f = stack.filters[i];
    for (std::size_t k = 0; k < nvox; ++k) {
      if (g[k] == 0.0) continue;
      const double mu = std::clamp(n[0] * ux[k] + n[1] * uy[k] + n[2] * uz[k], -1.0, 1.0);
      double acc = b[0];
      double pm1 = 1.0, p = mu;
      if (lmax >= 1) acc += b[1] * p;
      for (int l = 2; l <= lmax; ++l) {
        const double pl = ((2.0 * l - 1.0) * mu * p - (l - 1.0) * pm1) / l;
        pm1 = p;
        p = pl;
        acc += b[l] * pl;
      }
      f[k] = g[k] * acc;
    }
    f[0] = dc_value;
  }

  // m_psi(omega) = sum_i w_i filter_i(omega)^2, fixed orientation order per bin.
#pragma omp parallel for num_threads(threads()) schedule(static)
  for (std::size_t k = 0; k < nvox; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < no; ++i) {
      const double v = stack.filters[i][k];
      acc += set.weights[i] * v * v;
    }
    stack.m_psi[k] = acc;
  }
  return stack;
}

}  // namespace detail

WaveletStack build_wavelet_stack(const OrientationSet& set, const Dims3& dims,
                                 const WaveletParams& params) {
  AngularSpectra sp = angular_spectra(params);
  // Scale so that sum_i w_i filter_i(omega) ~= g(|omega|) ~= 1 in the pass
  // band: the odd part cancels over an antipodal set and the even part's
  // weighted sum approximates its spherical mean a0/sqrt(4*pi) times 4*pi.
  const double a0 = sp.re.c[0];
  if (!(a0 > 0.0))
    throw NumericError("angular window has non-positive spherical mean; cannot normalize");
  const double scale = 1.0 / (std::sqrt(4.0 * kPi) * a0);
  ZonalSpectrum h = sp.total;
  for (double& c : h.c) c *= scale;
  const double dc =
      params.dc == DcPolicy::split_real_mean ? scale * a0 / std::sqrt(4.0 * kPi) : 0.0;
  return detail::build_stack_with_spectrum(set, dims, params, h, dc);
}

Volume spatial_kernel(const WaveletStack& stack, std::size_t orientation) {
  if (orientation >= stack.filters.size())
    throw ParamError("orientation index " + std::to_string(orientation) + " out of range");
  const Dims3& d = stack.dims;
  std::vector<cplx> hat(d.nvox());
  const std::vector<double>& f = stack.filters[orientation];
  for (std::size_t k = 0; k < d.nvox(); ++k) hat[k] = f[k];
  std::vector<cplx> ker(d.nvox());
  ifft3(d, hat.data(), ker.data());

  // Center the origin at voxel (nx/2, ny/2, nz/2).
  Volume out(d, VolumeKind::complex);
  const std::int64_t cx = d.nx / 2, cy = d.ny / 2, cz = d.nz / 2;
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x)
        out.at(x, y, z) =
            ker[static_cast<std::size_t>((x - cx + d.nx) % d.nx) +
                static_cast<std::size_t>(d.nx) *
                    (static_cast<std::size_t>((y - cy + d.ny) % d.ny) +
                     static_cast<std::size_t>(d.ny) * static_cast<std::size_t>((z - cz + d.nz) % d.nz))];
  return out;
}

BandStats mpsi_band_stats(const WaveletStack& stack, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0))
    throw ParamError("band fraction must lie in (0, 1], got " + std::to_string(fraction));
  const Dims3& d = stack.dims;
  BandStats st;
  st.min = std::numeric_limits<double>::infinity();
  st.max = -std::numeric_limits<double>::infinity();
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const double wx = omega_axis(x, d.nx);
        const double wy = omega_axis(y, d.ny);
        const double wz = omega_axis(z, d.nz);
        const double rho = std::sqrt(wx * wx + wy * wy + wz * wz);
        if (rho == 0.0 || rho > fraction * rho_nyquist) continue;
        const double m = stack.m_psi[static_cast<std::size_t>(x) +
                                     static_cast<std::size_t>(d.nx) *
                                         (static_cast<std::size_t>(y) +
                                          static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z))];
        st.min = std::min(st.min, m);
        st.max = std::max(st.max, m);
        ++st.bins;
      }
  if (st.bins == 0) {
    st.min = st.max = 0.0;
  }
  return st;
}

double patch_mpsi_deviation(const WaveletStack& stack, std::int64_t half_width) {
  if (half_width < 1) throw ParamError("patch half-width must be >= 1 voxel");
  const Dims3& d = stack.dims;
  const std::size_t nvox = d.nvox();
  const std::size_t no = stack.filters.size();

  // Raised-cosine taper on the signed (wrap-centered) voxel radius.
  std::vector<double> win(nvox);
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const double sx = static_cast<double>(2 * x <= d.nx ? x : x - d.nx);
        const double sy = static_cast<double>(2 * y <= d.ny ? y : y - d.ny);
        const double sz = static_cast<double>(2 * z <= d.nz ? z : z - d.nz);
        const double r = std::sqrt(sx * sx + sy * sy + sz * sz);
        win[static_cast<std::size_t>(x) +
            static_cast<std::size_t>(d.nx) *
                (static_cast<std::size_t>(y) + static_cast<std::size_t>(d.ny) * z)] =
            r >= half_width ? 0.0 : 0.5 * (1.0 + std::cos(kPi * r / half_width));
      }

  std::vector<double> m_patch(nvox, 0.0);
  std::vector<cplx> hat(nvox), ker(nvox);
  for (std::size_t i = 0; i < no; ++i) {
    const std::vector<double>& f = stack.filters[i];
    for (std::size_t k = 0; k < nvox; ++k) hat[k] = f[k];
    ifft3(d, hat.data(), ker.data());
    for (std::size_t k = 0; k < nvox; ++k) ker[k] *= win[k];
    fft3(d, ker.data(), hat.data());
    const double w = stack.set.weights[i];
    for (std::size_t k = 0; k < nvox; ++k) m_patch[k] += w * std::norm(hat[k]);
  }

  double worst = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < nvox; ++k) {
    worst = std::max(worst, std::abs(m_patch[k] - stack.m_psi[k]));
    peak = std::max(peak, stack.m_psi[k]);
  }
  return peak > 0.0 ? worst / peak : 0.0;
}

}  // namespace orient3d
