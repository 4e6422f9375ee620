#include "orient3d/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <tuple>

namespace orient3d {

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec3 normalized(const Vec3& v) {
  double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

// All arithmetic used below (add, negate, divide by a shared norm, sqrt) is
// sign-symmetric in IEEE round-to-nearest, so a vertex set closed under exact
// negation stays closed through subdivision and normalization.

struct Tri {
  int a, b, c;
};

struct Mesh {
  std::vector<Vec3> verts;
  std::vector<Tri> faces;
};

Mesh base_icosahedron() {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  Mesh m;
  for (double s1 : {-1.0, 1.0})
    for (double s2 : {-1.0, 1.0}) {
      m.verts.push_back({0.0, s1 * 1.0, s2 * phi});
      m.verts.push_back({s1 * 1.0, s2 * phi, 0.0});
      m.verts.push_back({s1 * phi, 0.0, s2 * 1.0});
    }
  // Faces = vertex triples with pairwise squared distance 4 (the edge length
  // of this embedding); reconstructing them beats hand-copying an index table.
  auto d2 = [&](int i, int j) {
    double s = 0;
    for (int k = 0; k < 3; ++k) {
      double d = m.verts[i][k] - m.verts[j][k];
      s += d * d;
    }
    return s;
  };
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j)
      for (int k = j + 1; k < 12; ++k)
        if (std::abs(d2(i, j) - 4) < 1e-9 && std::abs(d2(i, k) - 4) < 1e-9 &&
            std::abs(d2(j, k) - 4) < 1e-9)
          m.faces.push_back({i, j, k});
  for (auto& v : m.verts) v = normalized(v);
  return m;
}

Mesh subdivide(const Mesh& in) {
  Mesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int i, int j) {
    auto key = std::minmax(i, j);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Vec3 &a = out.verts[i], &b = out.verts[j];
    Vec3 m = normalized({a[0] + b[0], a[1] + b[1], a[2] + b[2]});
    int id = static_cast<int>(out.verts.size());
    out.verts.push_back(m);
    midpoint.emplace(key, id);
    return id;
  };
  for (const Tri& f : in.faces) {
    int ab = mid(f.a, f.b), bc = mid(f.b, f.c), ca = mid(f.c, f.a);
    out.faces.push_back({f.a, ab, ca});
    out.faces.push_back({f.b, bc, ab});
    out.faces.push_back({f.c, ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

}  // namespace

OrientationSet icosphere(int order) {
  if (order < 0) throw ParamError("icosphere order must be >= 0, got " + std::to_string(order));
  if (order > 6)
    throw LimitError("icosphere order " + std::to_string(order) +
                     " exceeds the supported envelope (max 6, 40962 directions)");

  Mesh m = base_icosahedron();
  for (int o = 0; o < order; ++o) m = subdivide(m);

  // Canonical vertex order: ascending (z, y, x).
  const int n = static_cast<int>(m.verts.size());
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::sort(perm.begin(), perm.end(), [&](int i, int j) {
    const Vec3 &a = m.verts[i], &b = m.verts[j];
    return std::tie(a[2], a[1], a[0]) < std::tie(b[2], b[1], b[0]);
  });
  std::vector<int> inv(n);
  for (int i = 0; i < n; ++i) inv[perm[i]] = i;

  OrientationSet set;
  set.directions.resize(n);
  for (int i = 0; i < n; ++i) set.directions[i] = m.verts[perm[i]];

  std::vector<std::set<std::int32_t>> adj(n);
  for (const Tri& f : m.faces) {
    int a = inv[f.a], b = inv[f.b], c = inv[f.c];
    adj[a].insert(b);
    adj[a].insert(c);
    adj[b].insert(a);
    adj[b].insert(c);
    adj[c].insert(a);
    adj[c].insert(b);
  }
  set.adjacency.resize(n);
  for (int i = 0; i < n; ++i) set.adjacency[i].assign(adj[i].begin(), adj[i].end());

  set.antipode = antipodal_pairing(set.directions);
  set.weights = quadrature_weights_uniform(set.directions.size());
  return set;
}

std::vector<std::int32_t> antipodal_pairing(const std::vector<Vec3>& dirs) {
  std::map<Vec3, std::int32_t> index;
  for (std::size_t i = 0; i < dirs.size(); ++i) index[dirs[i]] = static_cast<std::int32_t>(i);
  std::vector<std::int32_t> pair(dirs.size());
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const Vec3& d = dirs[i];
    auto it = index.find({-d[0], -d[1], -d[2]});
    if (it == index.end())
      throw DataError("direction set is not antipodally symmetric (no exact partner for index " +
                      std::to_string(i) + ")");
    pair[i] = it->second;
  }
  return pair;
}

std::vector<double> quadrature_weights_uniform(std::size_t n) {
  if (n == 0) throw ParamError("empty direction set");
  return std::vector<double>(n, 4.0 * kPi / static_cast<double>(n));
}

double geodesic(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(dot(a, b), -1.0, 1.0));
}

}  // namespace orient3d
