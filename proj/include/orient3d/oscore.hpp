#pragma once

#include <optional>

#include "orient3d/cakewavelet.hpp"
#include "orient3d/volume.hpp"

namespace orient3d {

// Orientation score U(x, n_i): one complex scalar field per orientation,
// stored orientation-major, each slab x-fastest like Volume. For real inputs
// filtered through an antipodally symmetric stack, U(x, a(i)) == conj(U(x, i)).
struct OrientationScore {
  Dims3 dims;
  std::array<double, 3> spacing{1.0, 1.0, 1.0};
  OrientationSet set;
  std::vector<cplx> data;  // size set.size() * dims.nvox()

  OrientationScore() = default;
  OrientationScore(const Dims3& d, const OrientationSet& s)
      : dims(d), set(s), data(s.size() * d.nvox()) {}

  cplx* slab(std::size_t i) { return data.data() + i * dims.nvox(); }
  const cplx* slab(std::size_t i) const { return data.data() + i * dims.nvox(); }
};

// Stabilization of the division by M_psi in exact reconstruction.
//  clamp : divide by max(M, eps) everywhere (default);
//  mask  : zero frequency content where M < eps (true orthogonal projection);
//  strict: refuse to run if min M over the support of the score is < eps.
enum class Stabilize { clamp, mask, strict };

// Correlation with every wavelet: U_i = F^{-1}[ conj(Psi_hat_i) .* F[f] ].
// Filters are real in the Fourier domain, so the conjugation is a no-op
// numerically but kept in the formula.
OrientationScore forward(const Volume& f, const WaveletStack& stack);

// Stable inverse: f = F^{-1}[ sum_i w_i Psi_hat_i .* F[U_i] / max(M_psi, eps) ].
// eps defaults to 1e-8 * max(m_psi); an explicit eps must be positive. mask
// zeroes bins with M < eps instead of clamping; strict refuses (StabilityError)
// when min M over the 0.8-band is below eps.
Volume reconstruct_exact(const OrientationScore& u, const WaveletStack& stack,
                         std::optional<double> eps = std::nullopt,
                         Stabilize mode = Stabilize::clamp);

// Integral over orientations: f(x) ~= sum_i w_i U_i(x). Cheap, assumes the
// filters tile the band (they are normalized to), no division.
Volume reconstruct_approx(const OrientationScore& u);

// M-weighted inner product (U, V)_M = (1/Nvox) sum_k sum_i w_i conj(U_hat_i)
// V_hat_i / M over bins with M >= eps (eps defaults like reconstruct_exact).
// Normalized so <f, g> == (Wf, Wg)_M exactly for band-limited f, g.
cplx m_inner_product(const OrientationScore& u, const OrientationScore& v,
                     const WaveletStack& stack, std::optional<double> eps = std::nullopt);

// Orthogonal projector onto the range of the forward transform: forward of the
// masked reconstruction. eps = 0 (default) masks only bins where m_psi is
// exactly zero and divides by the raw m_psi elsewhere, which fixes true
// orientation scores of arbitrary volumes to machine precision; a positive eps
// widens the masked set.
OrientationScore project(const OrientationScore& u, const WaveletStack& stack,
                         double eps = 0.0);

// Restrict a volume to the centered frequency ball |omega| <= fraction * rho_N.
// fraction must lie in (0, 1]. Real inputs produce real outputs.
Volume ball_limit(const Volume& f, double fraction);

// max_i max_x |U(x, a(i)) - conj(U(x, i))|: antipodal-conjugacy residual.
double antipodal_residual(const OrientationScore& u);

}  // namespace orient3d
