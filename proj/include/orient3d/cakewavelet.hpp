#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "orient3d/sh.hpp"
#include "orient3d/volume.hpp"

namespace orient3d {

// Nyquist radius in angular frequency units (rad/voxel).
inline constexpr double rho_nyquist = 3.14159265358979323846;

// How the ambiguous DC bin (omega = 0) is shared among orientations.
// split_real_mean: every filter gets 1/(4*pi) at DC so the weighted sum over
// orientations is exactly 1 and reconstruction preserves the volume mean.
enum class DcPolicy { split_real_mean, zero };

struct WaveletParams {
  double s_theta = 0.7;  // angular spread of the B-spline window (radians-ish units)
  int k = 2;             // B-spline order
  int big_n = 20;        // Taylor order N of the radial envelope
  double gamma = 0.85;   // inflection point of the radial profile, as a fraction of rho_N
  int lmax = 16;         // spherical-harmonic band limit L
  DcPolicy dc = DcPolicy::split_real_mean;

  void validate() const;
};

// Centered cardinal B-spline B^k(x), support [-(k+1)/2, (k+1)/2].
double bspline(int k, double x);

// Radial Fourier envelope e^{-rho^2/t} * sum_{q<=N} (rho^2/t)^q / q! with
// t = 2*(gamma*rho_N)^2 / (1+2N); equals 1 at rho=0, has its inflection at
// gamma*rho_N, and decays beyond it.
double radial_profile(double rho, int big_n, double gamma);

// Zonal spectra of the angular part. `window` is the B-spline cone
// B^k(theta/s_theta) projected to degree <= L; `re` is its Funk transform
// (purely even degrees -> even real spatial part, the line detector); `im` is
// its antisymmetrization (purely odd degrees -> odd imaginary spatial part,
// the edge detector); `total` = re + im is what the filters steer.
struct AngularSpectra {
  ZonalSpectrum window, re, im, total;
};
AngularSpectra angular_spectra(const WaveletParams& p);

// Fourier-domain filter bank on a voxel grid: filters[i] is real-valued
// (stored as doubles), sampled on the unnormalized DFT grid of `dims`.
// m_psi[k] = sum_i weights[i] * filters[i][k]^2 is kept alongside.
struct WaveletStack {
  Dims3 dims;
  WaveletParams params;
  OrientationSet set;
  std::vector<std::vector<double>> filters;  // [orientation][bin]
  std::vector<double> m_psi;                 // [bin]
};

// Build the bank by steering one zonal angular profile to every orientation
// and multiplying by the shared radial envelope. Filters are exactly zero on
// even-axis Nyquist planes (those bins alias +/-pi and sit outside the
// reconstruction band) and are normalized so sum_i w_i * filter_i ~= 1 inside
// the band, with the DC bin handled by params.dc.
WaveletStack build_wavelet_stack(const OrientationSet& set, const Dims3& dims,
                                 const WaveletParams& params);

// Spatial wavelet for one orientation: inverse DFT of the filter, centered by
// fftshift so the kernel origin sits at the voxel (nx/2, ny/2, nz/2).
// Real part is the even (line-detecting) component, imaginary part the odd
// (edge-detecting) one.
Volume spatial_kernel(const WaveletStack& stack, std::size_t orientation);

// Min/max of m_psi over the band {0 < |omega| <= fraction * rho_N}.
struct BandStats {
  double min = 0, max = 0;
  std::size_t bins = 0;
};
BandStats mpsi_band_stats(const WaveletStack& stack, double fraction);

// Kernel-inspection diagnostic: window every spatial kernel with a raised
// cosine vanishing at radius `half_width` voxels from the kernel center,
// rebuild the windowed bank's stability map and return
// max_k |m_patch[k] - m_psi[k]| / max_k m_psi[k]. Windowed kernels are for
// inspection only; this quantifies what truncation would cost.
double patch_mpsi_deviation(const WaveletStack& stack, std::int64_t half_width);

namespace detail {

// Bare synthesis path: steer an arbitrary zonal angular spectrum (no Funk /
// antisymmetrization / normalization applied) against the shared radial
// envelope; dc_value is placed in every filter's DC bin. Used by tests and
// kernel-inspection tooling; build_wavelet_stack is a thin wrapper.
WaveletStack build_stack_with_spectrum(const OrientationSet& set, const Dims3& dims,
                                       const WaveletParams& params, const ZonalSpectrum& h,
                                       double dc_value);

}  // namespace detail

}  // namespace orient3d
