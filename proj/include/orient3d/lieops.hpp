#pragma once

#include <optional>

#include "orient3d/oscore.hpp"

namespace orient3d {

// Left-invariant evolution on position-orientation space R^3 x S^2.
// The generator is D33 * (n.grad)^2 + D11 * (Laplace - (n.grad)^2) + D44 * Laplace_S2,
// discretized per orientation:
//  - (n.grad)^2 : second difference along n with trilinearly interpolated,
//    periodically wrapped samples at x +/- n;
//  - lateral    : 7-point Laplacian minus the along-n second difference;
//  - Laplace_S2 : graph Laplacian on the orientation mesh with inverse-square
//    geodesic edge weights, scaled by 4/mean-valence so it tracks -l(l+1).
struct DiffusionParams {
  double d11 = 0.1;   // lateral (cross-fiber) diffusivity
  double d33 = 1.0;   // along-fiber diffusivity
  double d44 = 0.02;  // angular diffusivity
  double t = 1.0;     // total evolution time
  double dt = 0.0;    // explicit Euler step; 0 = auto (half the stability bound)

  void validate() const;
};

// The three generator pieces, exposed individually (one application each).
OrientationScore along_second_derivative(const OrientationScore& u);
OrientationScore lateral_laplacian(const OrientationScore& u);
OrientationScore angular_laplacian(const OrientationScore& u);

// Stability bound for the explicit scheme: 1 / (2*(D11*2/h^2 + D33/h^2 +
// D44*lambda_max)), h = 1 voxel, lambda_max estimated by 20 power-iteration
// steps on the mesh Laplacian of `set`.
double stable_dt(const OrientationSet& set, const DiffusionParams& p);

// Explicit Euler evolution to time t (last step shortened to land exactly on
// t). dt above the stability bound raises StabilityError; t = 0 or an all-zero
// diffusivity triple returns the input bitwise.
OrientationScore diffuse(const OrientationScore& u, const DiffusionParams& p);

// Pointwise power-law sharpening, p > 0. phase mode: |z|^p * phase(z) with
// phase(0) = 0 (unit-phase reading of sgn for complex scores); real mode:
// |Re z|^p * sgn(Re z), imaginary part dropped.
enum class ThresholdMode { phase, real_part };
OrientationScore soft_threshold(const OrientationScore& u, double p,
                                ThresholdMode mode = ThresholdMode::phase);

enum class Recon { exact, approx };

// forward -> diffuse -> optional soft threshold -> reconstruct. The threshold
// is applied in max-normalized units (U -> m * Phi(U/m), m = max |U|) so the
// nonlinearity is scale-invariant.
Volume enhance(const Volume& f, const WaveletStack& stack, const DiffusionParams& p,
               std::optional<double> threshold_p = std::nullopt,
               Recon recon = Recon::exact, std::optional<double> eps = std::nullopt,
               ThresholdMode mode = ThresholdMode::phase);

}  // namespace orient3d
