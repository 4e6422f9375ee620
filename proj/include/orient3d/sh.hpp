#pragma once

#include <functional>
#include <vector>

#include "orient3d/sphere.hpp"

namespace orient3d {

// Zonal (m = 0, axially symmetric) spherical-harmonic spectrum: coefficients
// c[l], l = 0..L, of f(theta) = sum_l c[l] * sqrt((2l+1)/(4*pi)) * P_l(cos theta).
struct ZonalSpectrum {
  std::vector<double> c;

  int lmax() const { return static_cast<int>(c.size()) - 1; }
};

// Legendre polynomial P_l(x) by the three-term recurrence; requires |x| <= 1.
double legendre(int l, double x);

// Gauss-Legendre nodes/weights on [-1, 1] (Newton iteration on the recurrence).
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

// Evaluate a zonal spectrum at polar angle theta (radians).
double eval_zonal(const ZonalSpectrum& s, double theta);

// Same, parameterised by mu = cos(theta); requires |mu| <= 1.
double eval_zonal_mu(const ZonalSpectrum& s, double mu);

// Project f(theta) onto zonal harmonics up to degree L by Gauss-Legendre
// quadrature in cos(theta) with at least 4*(L+1) nodes (exact for polynomial
// integrands up to degree 8L+7, far beyond the band limit).
ZonalSpectrum fit_zonal(const std::function<double(double)>& f, int lmax);

// Funk transform (great-circle average) acting on the spectrum: c_l -> 2*pi*P_l(0)*c_l.
// Kills odd degrees, flips the sign pattern of even ones.
ZonalSpectrum funk(const ZonalSpectrum& s);

// Antipodal antisymmetrization f(n) - f(-n) on the spectrum: c_l -> (1 - (-1)^l)*c_l.
ZonalSpectrum antisymmetrize(const ZonalSpectrum& s);

// Rotate a zonal profile so its axis points along `axis` (unit vector) and
// evaluate at each direction: out[i] = sum_l c_l * sqrt((2l+1)/(4*pi)) * P_l(axis . dir_i).
std::vector<double> steer_zonal(const ZonalSpectrum& s, const Vec3& axis,
                                const std::vector<Vec3>& dirs);

}  // namespace orient3d
