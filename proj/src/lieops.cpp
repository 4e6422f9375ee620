#include "orient3d/lieops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "orient3d/threads.hpp"

namespace orient3d {

namespace {

void check_spatial_grid(const Dims3& d) {
  if (d.nx < 3 || d.ny < 3 || d.nz < 3)
    throw DimError("spatial derivative stencils need at least 3 voxels per axis");
}

// Trilinear gather plan for one constant offset vector: wrapped base indices
// per axis plus the 8 corner weights. Weights are identical for every voxel,
// which keeps the operator exactly shift-invariant (and mass-conserving).
struct TriPlan {
  std::vector<std::int64_t> ix[2], iy[2], iz[2];
  double w[8];
};

std::int64_t wrap(std::int64_t v, std::int64_t n) { return ((v % n) + n) % n; }

TriPlan make_tri_plan(const Dims3& d, const Vec3& offset) {
  TriPlan p;
  double frac[3];
  std::int64_t base[3];
  for (int a = 0; a < 3; ++a) {
    base[a] = static_cast<std::int64_t>(std::floor(offset[a]));
    frac[a] = offset[a] - static_cast<double>(base[a]);
  }
  const std::int64_t ns[3] = {d.nx, d.ny, d.nz};
  std::vector<std::int64_t>* tabs[3] = {p.ix, p.iy, p.iz};
  for (int a = 0; a < 3; ++a) {
    tabs[a][0].resize(ns[a]);
    tabs[a][1].resize(ns[a]);
    for (std::int64_t v = 0; v < ns[a]; ++v) {
      tabs[a][0][v] = wrap(v + base[a], ns[a]);
      tabs[a][1][v] = wrap(v + base[a] + 1, ns[a]);
    }
  }
  for (int c = 0; c < 8; ++c) {
    const double wx = (c & 1) ? frac[0] : 1.0 - frac[0];
    const double wy = (c & 2) ? frac[1] : 1.0 - frac[1];
    const double wz = (c & 4) ? frac[2] : 1.0 - frac[2];
    p.w[c] = wx * wy * wz;
  }
  return p;
}

cplx tri_sample(const TriPlan& p, const cplx* u, const Dims3& d, std::int64_t x, std::int64_t y,
                std::int64_t z) {
  cplx acc(0.0, 0.0);
  for (int c = 0; c < 8; ++c) {
    const std::size_t idx =
        static_cast<std::size_t>(p.ix[c & 1][x]) +
        static_cast<std::size_t>(d.nx) *
            (static_cast<std::size_t>(p.iy[(c >> 1) & 1][y]) +
             static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(p.iz[(c >> 2) & 1][z]));
    acc += p.w[c] * u[idx];
  }
  return acc;
}

// (n.grad)^2 of one slab: U(x+n) + U(x-n) - 2 U(x), trilinear off-grid samples.
void along_slab(const cplx* u, cplx* out, const Dims3& d, const TriPlan& plus,
                const TriPlan& minus) {
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const std::size_t k = static_cast<std::size_t>(x) +
                              static_cast<std::size_t>(d.nx) *
                                  (static_cast<std::size_t>(y) +
                                   static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z));
        out[k] = tri_sample(plus, u, d, x, y, z) + tri_sample(minus, u, d, x, y, z) - 2.0 * u[k];
      }
}

// 7-point Laplacian of one slab, periodic.
void lap7_slab(const cplx* u, cplx* out, const Dims3& d) {
  std::vector<std::int64_t> xm(d.nx), xp(d.nx), ym(d.ny), yp(d.ny), zm(d.nz), zp(d.nz);
  for (std::int64_t v = 0; v < d.nx; ++v) xm[v] = wrap(v - 1, d.nx), xp[v] = wrap(v + 1, d.nx);
  for (std::int64_t v = 0; v < d.ny; ++v) ym[v] = wrap(v - 1, d.ny), yp[v] = wrap(v + 1, d.ny);
  for (std::int64_t v = 0; v < d.nz; ++v) zm[v] = wrap(v - 1, d.nz), zp[v] = wrap(v + 1, d.nz);
  auto at = [&](std::int64_t x, std::int64_t y, std::int64_t z) -> const cplx& {
    return u[static_cast<std::size_t>(x) +
             static_cast<std::size_t>(d.nx) *
                 (static_cast<std::size_t>(y) + static_cast<std::size_t>(d.ny) * z)];
  };
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const std::size_t k = static_cast<std::size_t>(x) +
                              static_cast<std::size_t>(d.nx) *
                                  (static_cast<std::size_t>(y) +
                                   static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z));
        out[k] = at(xm[x], y, z) + at(xp[x], y, z) + at(x, ym[y], z) + at(x, yp[y], z) +
                 at(x, y, zm[z]) + at(x, y, zp[z]) - 6.0 * u[k];
      }
}

// Orientation-mesh Laplacian: inverse-square geodesic edge weights scaled by
// 4/mean-valence, so the Rayleigh quotients track the -l(l+1) spectrum of the
// Laplace-Beltrami operator on S^2.
struct AngularGraph {
  std::vector<std::vector<std::pair<std::int32_t, double>>> nbrs;
  double lambda_max = 0.0;
};

AngularGraph build_angular_graph(const OrientationSet& set) {
  const std::size_t n = set.size();
  if (set.adjacency.size() != n) throw DataError("orientation set carries no adjacency");
  std::size_t edges = 0;
  for (const auto& a : set.adjacency) edges += a.size();
  if (edges == 0) throw DataError("orientation set adjacency is empty");
  const double mean_valence = static_cast<double>(edges) / static_cast<double>(n);
  const double c = 4.0 / mean_valence;

  AngularGraph g;
  g.nbrs.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::int32_t j : set.adjacency[i]) {
      const double d = geodesic(set.directions[i], set.directions[j]);
      if (!(d > 0.0)) throw DataError("coincident directions in orientation set adjacency");
      g.nbrs[i].emplace_back(j, c / (d * d));
    }

  // lambda_max of A, (Av)_i = sum_j w_ij (v_i - v_j), by 20 power-iteration
  // steps from a fixed pseudo-random start (deterministic).
  std::vector<double> v(n), av(n);
  std::uint64_t s = 0x9e3779b97f4a7c15ull;
  for (std::size_t i = 0; i < n; ++i) {
    s = s * 6364136223846793005ull + 1442695040888963407ull;
    v[i] = static_cast<double>(s >> 11) * 0x1.0p-53 - 0.5;
  }
  auto matvec = [&](const std::vector<double>& in, std::vector<double>& out) {
    for (std::size_t i = 0; i < n; ++i) {
      double acc = 0.0;
      for (const auto& [j, w] : g.nbrs[i]) acc += w * (in[i] - in[j]);
      out[i] = acc;
    }
  };
  for (int it = 0; it < 20; ++it) {
    matvec(v, av);
    double nrm = 0.0;
    for (double x : av) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) break;
    for (std::size_t i = 0; i < n; ++i) v[i] = av[i] / nrm;
  }
  matvec(v, av);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += v[i] * av[i];
    den += v[i] * v[i];
  }
  g.lambda_max = den > 0.0 ? num / den : 0.0;
  return g;
}

void angular_slabwise(const cplx* cur, cplx* out, const AngularGraph& g, std::size_t nvox,
                      std::size_t no) {
#pragma omp parallel for num_threads(threads()) schedule(static)
  for (std::size_t x = 0; x < nvox; ++x)
    for (std::size_t i = 0; i < no; ++i) {
      const cplx ui = cur[i * nvox + x];
      cplx acc(0.0, 0.0);
      for (const auto& [j, w] : g.nbrs[i]) acc += w * (cur[j * nvox + x] - ui);
      out[i * nvox + x] = acc;
    }
}

}  // namespace

void DiffusionParams::validate() const {
  if (d11 < 0 || d33 < 0 || d44 < 0) throw ParamError("diffusivities must be >= 0");
  if (t < 0) throw ParamError("diffusion time must be >= 0");
  if (dt < 0) throw ParamError("time step must be >= 0 (0 selects the automatic step)");
}

OrientationScore along_second_derivative(const OrientationScore& u) {
  check_spatial_grid(u.dims);
  OrientationScore out(u.dims, u.set);
  out.spacing = u.spacing;
  const std::size_t nvox = u.dims.nvox();
#pragma omp parallel for num_threads(threads()) schedule(dynamic)
  for (std::size_t i = 0; i < u.set.size(); ++i) {
    const Vec3 n = u.set.directions[i];
    const TriPlan plus = make_tri_plan(u.dims, n);
    const TriPlan minus = make_tri_plan(u.dims, {-n[0], -n[1], -n[2]});
    along_slab(u.data.data() + i * nvox, out.data.data() + i * nvox, u.dims, plus, minus);
  }
  return out;
}

OrientationScore lateral_laplacian(const OrientationScore& u) {
  check_spatial_grid(u.dims);
  OrientationScore out(u.dims, u.set);
  out.spacing = u.spacing;
  const std::size_t nvox = u.dims.nvox();
#pragma omp parallel for num_threads(threads()) schedule(dynamic)
  for (std::size_t i = 0; i < u.set.size(); ++i) {
    const Vec3 n = u.set.directions[i];
    const TriPlan plus = make_tri_plan(u.dims, n);
    const TriPlan minus = make_tri_plan(u.dims, {-n[0], -n[1], -n[2]});
    std::vector<cplx> along(nvox);
    along_slab(u.data.data() + i * nvox, along.data(), u.dims, plus, minus);
    lap7_slab(u.data.data() + i * nvox, out.data.data() + i * nvox, u.dims);
    cplx* o = out.data.data() + i * nvox;
    for (std::size_t k = 0; k < nvox; ++k) o[k] -= along[k];
  }
  return out;
}

OrientationScore angular_laplacian(const OrientationScore& u) {
  const AngularGraph g = build_angular_graph(u.set);
  OrientationScore out(u.dims, u.set);
  out.spacing = u.spacing;
  angular_slabwise(u.data.data(), out.data.data(), g, u.dims.nvox(), u.set.size());
  return out;
}

double stable_dt(const OrientationSet& set, const DiffusionParams& p) {
  p.validate();
  double lmax = 0.0;
  if (p.d44 > 0.0) lmax = build_angular_graph(set).lambda_max;
  const double denom = 2.0 * (p.d11 * 2.0 + p.d33 + p.d44 * lmax);
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

OrientationScore diffuse(const OrientationScore& u, const DiffusionParams& p) {
  p.validate();
  check_dims(u.dims, 128);
  if (p.t == 0.0 || (p.d11 == 0.0 && p.d33 == 0.0 && p.d44 == 0.0)) return u;

  const bool spatial = p.d11 > 0.0 || p.d33 > 0.0;
  const bool angular = p.d44 > 0.0;
  if (spatial) check_spatial_grid(u.dims);

  AngularGraph graph;
  if (angular) graph = build_angular_graph(u.set);
  const double denom = 2.0 * (p.d11 * 2.0 + p.d33 + p.d44 * graph.lambda_max);
  const double bound = 1.0 / denom;
  const double dt = p.dt > 0.0 ? p.dt : 0.5 * bound;
  if (dt > bound * (1.0 + 1e-9))
    throw StabilityError("time step " + std::to_string(dt) + " exceeds the stability bound " +
                         std::to_string(bound));

  std::size_t steps = static_cast<std::size_t>(std::floor(p.t / dt + 1e-9));
  double rem = p.t - static_cast<double>(steps) * dt;
  if (rem < 1e-9 * dt) rem = 0.0;

  const std::size_t nvox = u.dims.nvox();
  const std::size_t no = u.set.size();

  // Gather plans once per orientation; they are read-only during stepping.
  std::vector<TriPlan> plus(no), minus(no);
  if (spatial)
    for (std::size_t i = 0; i < no; ++i) {
      const Vec3 n = u.set.directions[i];
      plus[i] = make_tri_plan(u.dims, n);
      minus[i] = make_tri_plan(u.dims, {-n[0], -n[1], -n[2]});
    }

  std::vector<cplx> cur = u.data, nxt(u.data.size());
  std::vector<cplx> spat(spatial ? u.data.size() : 0);
  std::vector<cplx> ang(angular ? u.data.size() : 0);

  auto step = [&](double h) {
    if (spatial) {
#pragma omp parallel for num_threads(threads()) schedule(dynamic)
      for (std::size_t i = 0; i < no; ++i) {
        const cplx* ui = cur.data() + i * nvox;
        cplx* si = spat.data() + i * nvox;
        std::vector<cplx> along(nvox);
        along_slab(ui, along.data(), u.dims, plus[i], minus[i]);
        lap7_slab(ui, si, u.dims);
        // D11 * (lap - along) + D33 * along = D11 * lap + (D33 - D11) * along
        const double ca = p.d33 - p.d11;
        for (std::size_t k = 0; k < nvox; ++k) si[k] = p.d11 * si[k] + ca * along[k];
      }
    }
    if (angular) angular_slabwise(cur.data(), ang.data(), graph, nvox, no);
#pragma omp parallel for num_threads(threads()) schedule(static)
    for (std::size_t k = 0; k < cur.size(); ++k) {
      cplx rhs(0.0, 0.0);
      if (spatial) rhs += spat[k];
      if (angular) rhs += p.d44 * ang[k];
      nxt[k] = cur[k] + h * rhs;
    }
    cur.swap(nxt);
  };

  for (std::size_t s = 0; s < steps; ++s) step(dt);
  if (rem > 0.0) step(rem);

  OrientationScore out(u.dims, u.set);
  out.spacing = u.spacing;
  out.data = std::move(cur);
  return out;
}

OrientationScore soft_threshold(const OrientationScore& u, double p, ThresholdMode mode) {
  if (!(p > 0.0)) throw ParamError("threshold exponent must be > 0, got " + std::to_string(p));
  OrientationScore out(u.dims, u.set);
  out.spacing = u.spacing;
#pragma omp parallel for num_threads(threads()) schedule(static)
  for (std::size_t k = 0; k < u.data.size(); ++k) {
    const cplx z = u.data[k];
    if (mode == ThresholdMode::phase) {
      const double a = std::abs(z);
      out.data[k] = a == 0.0 ? cplx(0.0, 0.0) : std::pow(a, p) * (z / a);
    } else {
      const double r = z.real();
      out.data[k] = cplx(r == 0.0 ? 0.0 : std::pow(std::abs(r), p) * (r > 0 ? 1.0 : -1.0), 0.0);
    }
  }
  return out;
}

Volume enhance(const Volume& f, const WaveletStack& stack, const DiffusionParams& p,
               std::optional<double> threshold_p, Recon recon, std::optional<double> eps,
               ThresholdMode mode) {
  OrientationScore u = forward(f, stack);
  u = diffuse(u, p);
  if (threshold_p) {
    // Apply Phi in max-normalized units: U -> m * Phi(U/m), m = max |U|, so
    // the power law acts on shape, not on the arbitrary data scale.
    double m = 0.0;
#pragma omp parallel for num_threads(threads()) schedule(static) reduction(max : m)
    for (std::size_t k = 0; k < u.data.size(); ++k) m = std::max(m, std::abs(u.data[k]));
    if (m > 0.0) {
      for (cplx& z : u.data) z /= m;
      u = soft_threshold(u, *threshold_p, mode);
      for (cplx& z : u.data) z *= m;
    }
  }
  return recon == Recon::exact ? reconstruct_exact(u, stack, eps) : reconstruct_approx(u);
}

}  // namespace orient3d
