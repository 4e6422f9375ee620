#include "orient3d/sh.hpp"

#include <algorithm>
#include <cmath>

#include "orient3d/errors.hpp"

namespace orient3d {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Normalization of the zonal harmonic Y_l^0 = N_l * P_l(cos theta).
double n_l(int l) { return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi)); }

// P_l(0): odd degrees vanish; even follow P_{l}(0) = -P_{l-2}(0) * (l-1)/l.
double legendre_at_zero(int l) {
  if (l % 2 == 1) return 0.0;
  double p = 1.0;
  for (int k = 2; k <= l; k += 2) p *= -static_cast<double>(k - 1) / k;
  return p;
}

}  // namespace

double legendre(int l, double x) {
  if (l < 0) throw ParamError("legendre degree must be >= 0, got " + std::to_string(l));
  if (!(std::abs(x) <= 1.0))
    throw ParamError("legendre argument must satisfy |x| <= 1, got " + std::to_string(x));
  double pm1 = 1.0, p = x;
  if (l == 0) return 1.0;
  for (int k = 2; k <= l; ++k) {
    double pk = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
    pm1 = p;
    p = pk;
  }
  return p;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ParamError("quadrature needs at least one node");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi-style initial guess, then Newton on P_n computed by recurrence.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double pm1 = 1.0, p = x;
      for (int k = 2; k <= n; ++k) {
        double pk = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
        pm1 = p;
        p = pk;
      }
      dp = n * (x * p - pm1) / (x * x - 1.0);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;  // ascending order
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

double eval_zonal_mu(const ZonalSpectrum& s, double mu) {
  if (!(std::abs(mu) <= 1.0))
    throw ParamError("eval_zonal argument must satisfy |cos theta| <= 1");
  if (s.c.empty()) return 0.0;
  double acc = s.c[0] * n_l(0);
  double pm1 = 1.0, p = mu;
  if (s.lmax() >= 1) acc += s.c[1] * n_l(1) * p;
  for (int l = 2; l <= s.lmax(); ++l) {
    double pl = ((2.0 * l - 1.0) * mu * p - (l - 1.0) * pm1) / l;
    pm1 = p;
    p = pl;
    acc += s.c[l] * n_l(l) * pl;
  }
  return acc;
}

double eval_zonal(const ZonalSpectrum& s, double theta) {
  return eval_zonal_mu(s, std::cos(theta));
}

ZonalSpectrum fit_zonal(const std::function<double(double)>& f, int lmax) {
  if (lmax < 0) throw ParamError("band limit must be >= 0");
  const int nq = 4 * (lmax + 1);
  std::vector<double> x, w;
  gauss_legendre(nq, x, w);
  std::vector<double> fx(nq);
  for (int q = 0; q < nq; ++q) {
    fx[q] = f(std::acos(x[q]));
    if (!std::isfinite(fx[q]))
      throw NumericError("fit_zonal: non-finite sample at cos(theta) = " + std::to_string(x[q]));
  }
  // c_l = 2*pi * N_l * int_{-1}^{1} f(acos mu) P_l(mu) dmu.
  ZonalSpectrum s;
  s.c.assign(lmax + 1, 0.0);
  for (int q = 0; q < nq; ++q) {
    double pm1 = 1.0, p = x[q];
    double fw = 2.0 * kPi * w[q] * fx[q];
    s.c[0] += fw * n_l(0);
    if (lmax >= 1) s.c[1] += fw * n_l(1) * p;
    for (int l = 2; l <= lmax; ++l) {
      double pl = ((2.0 * l - 1.0) * x[q] * p - (l - 1.0) * pm1) / l;
      pm1 = p;
      p = pl;
      s.c[l] += fw * n_l(l) * pl;
    }
  }
  return s;
}

ZonalSpectrum funk(const ZonalSpectrum& s) {
  ZonalSpectrum out = s;
  for (int l = 0; l <= out.lmax(); ++l) out.c[l] *= 2.0 * kPi * legendre_at_zero(l);
  return out;
}

ZonalSpectrum antisymmetrize(const ZonalSpectrum& s) {
  ZonalSpectrum out = s;
  for (int l = 0; l <= out.lmax(); ++l) out.c[l] *= (l % 2 == 0) ? 0.0 : 2.0;
  return out;
}

std::vector<double> steer_zonal(const ZonalSpectrum& s, const Vec3& axis,
                                const std::vector<Vec3>& dirs) {
  double n2 = dot(axis, axis);
  if (std::abs(n2 - 1.0) > 1e-9)
    throw ParamError("steering axis must be a unit vector, |axis|^2 = " + std::to_string(n2));
  std::vector<double> out(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i)
    out[i] = eval_zonal_mu(s, std::clamp(dot(axis, dirs[i]), -1.0, 1.0));
  return out;
}

}  // namespace orient3d
