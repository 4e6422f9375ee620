#include "orient3d/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>

namespace orient3d {

namespace {

static_assert(std::endian::native == std::endian::little,
              "file layer assumes a little-endian host");

using nlohmann::json;

constexpr char kMagicVolume[8] = {'O', 'S', '3', 'D', 'V', 'O', 'L', '\0'};
constexpr char kMagicStack[8] = {'O', 'S', '3', 'D', 'S', 'T', 'K', '\0'};
constexpr char kMagicScore[8] = {'O', 'S', '3', 'D', 'S', 'C', 'R', '\0'};
constexpr std::uint32_t kVersion = 1;

// All writes go through a temp file renamed into place, so readers never see
// partial files and identical reruns produce byte-identical results.
void atomic_write(const std::string& path, const std::function<void(std::ofstream&)>& fill) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open '" + tmp + "' for writing");
    fill(out);
    out.flush();
    if (!out) throw FormatError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_container(const std::string& path, const char magic[8], const json& header,
                     const std::function<void(std::ofstream&)>& payload) {
  atomic_write(path, [&](std::ofstream& out) {
    out.write(magic, 8);
    put_u32(out, kVersion);
    const std::string h = header.dump();
    put_u32(out, static_cast<std::uint32_t>(h.size()));
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    payload(out);
  });
}

struct Reader {
  std::ifstream in;
  std::string path;

  Reader(const std::string& p, const char magic[8]) : in(p, std::ios::binary), path(p) {
    if (!in) throw FormatError("cannot open '" + p + "'");
    char m[8];
    if (!in.read(m, 8)) throw FormatError("'" + p + "': too short for a container header");
    if (std::memcmp(m, magic, 8) != 0) throw FormatError("'" + p + "': bad magic");
    const std::uint32_t version = u32();
    if (version != kVersion)
      throw FormatError("'" + p + "': unsupported format version " + std::to_string(version));
  }

  std::uint32_t u32() {
    std::uint32_t v;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v))
      throw FormatError("'" + path + "': truncated header");
    return v;
  }

  json header() {
    const std::uint32_t len = u32();
    if (len > (1u << 28)) throw FormatError("'" + path + "': implausible header length");
    std::string h(len, '\0');
    if (!in.read(h.data(), len)) throw FormatError("'" + path + "': truncated header");
    try {
      return json::parse(h);
    } catch (const json::exception& e) {
      throw FormatError("'" + path + "': malformed header: " + e.what());
    }
  }

  void bytes(void* dst, std::size_t n) {
    if (!in.read(static_cast<char*>(dst), static_cast<std::streamsize>(n)))
      throw FormatError("'" + path + "': truncated payload");
  }

  void expect_eof() {
    in.peek();
    if (!in.eof()) throw FormatError("'" + path + "': trailing bytes after payload");
  }
};

Dims3 dims_from(const json& j, const std::string& path) {
  if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].size() != 3)
    throw FormatError("'" + path + "': header lacks a 3-element dims field");
  Dims3 d{j["dims"][0].get<std::int64_t>(), j["dims"][1].get<std::int64_t>(),
          j["dims"][2].get<std::int64_t>()};
  if (d.nx < 1 || d.ny < 1 || d.nz < 1) throw FormatError("'" + path + "': non-positive dims");
  return d;
}

std::array<double, 3> spacing_from(const json& j) {
  std::array<double, 3> s{1.0, 1.0, 1.0};
  if (j.contains("spacing") && j["spacing"].is_array() && j["spacing"].size() == 3)
    for (int a = 0; a < 3; ++a) s[a] = j["spacing"][a].get<double>();
  return s;
}

json orientations_json(const OrientationSet& set) {
  json dirs = json::array(), adj = json::array();
  for (const Vec3& d : set.directions) dirs.push_back({d[0], d[1], d[2]});
  for (const auto& a : set.adjacency) adj.push_back(a);
  return json{{"directions", dirs},
              {"weights", set.weights},
              {"adjacency", adj},
              {"antipode", set.antipode}};
}

OrientationSet orientations_from(const json& j, const std::string& path) {
  if (!j.contains("orientations"))
    throw FormatError("'" + path + "': header lacks the orientation table");
  const json& o = j["orientations"];
  OrientationSet set;
  try {
    for (const auto& d : o.at("directions"))
      set.directions.push_back({d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()});
    set.weights = o.at("weights").get<std::vector<double>>();
    for (const auto& a : o.at("adjacency"))
      set.adjacency.push_back(a.get<std::vector<std::int32_t>>());
    set.antipode = o.at("antipode").get<std::vector<std::int32_t>>();
  } catch (const json::exception& e) {
    throw FormatError("'" + path + "': malformed orientation table: " + e.what());
  }
  const std::size_t n = set.directions.size();
  if (set.weights.size() != n || set.adjacency.size() != n ||
      (!set.antipode.empty() && set.antipode.size() != n))
    throw DataError("'" + path + "': inconsistent orientation table sizes");
  return set;
}

void check_finite(double v, const std::string& path) {
  if (!std::isfinite(v)) throw DataError("'" + path + "': non-finite sample in payload");
}

void append_num(std::string& s, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  s += buf;
}

}  // namespace

void write_volume(const Volume& v, const std::string& path, const std::string& manifest) {
  json h{{"dims", {v.dims.nx, v.dims.ny, v.dims.nz}},
         {"spacing", {v.spacing[0], v.spacing[1], v.spacing[2]}},
         {"kind", v.kind == VolumeKind::real ? "real32" : "complex64"},
         {"manifest", manifest}};
  write_container(path, kMagicVolume, h, [&](std::ofstream& out) {
    if (v.kind == VolumeKind::real) {
      for (const cplx& z : v.data) {
        const float f = static_cast<float>(z.real());
        out.write(reinterpret_cast<const char*>(&f), sizeof f);
      }
    } else {
      out.write(reinterpret_cast<const char*>(v.data.data()),
                static_cast<std::streamsize>(v.data.size() * sizeof(cplx)));
    }
  });
}

Volume read_volume(const std::string& path, std::string* manifest) {
  Reader r(path, kMagicVolume);
  const json h = r.header();
  const Dims3 d = dims_from(h, path);
  const std::string kind = h.value("kind", "");
  if (kind != "real32" && kind != "complex64")
    throw FormatError("'" + path + "': unknown payload kind '" + kind + "'");
  Volume v(d, kind == "real32" ? VolumeKind::real : VolumeKind::complex);
  v.spacing = spacing_from(h);
  if (manifest) *manifest = h.value("manifest", "");
  if (v.kind == VolumeKind::real) {
    std::vector<float> buf(d.nvox());
    r.bytes(buf.data(), buf.size() * sizeof(float));
    for (std::size_t k = 0; k < buf.size(); ++k) {
      check_finite(buf[k], path);
      v.data[k] = cplx(buf[k], 0.0);
    }
  } else {
    r.bytes(v.data.data(), v.data.size() * sizeof(cplx));
    for (const cplx& z : v.data) {
      check_finite(z.real(), path);
      check_finite(z.imag(), path);
    }
  }
  r.expect_eof();
  return v;
}

void write_stack(const WaveletStack& s, const std::string& path, const std::string& manifest) {
  json h{{"dims", {s.dims.nx, s.dims.ny, s.dims.nz}},
         {"params",
          {{"L", s.params.lmax},
           {"s_theta", s.params.s_theta},
           {"k", s.params.k},
           {"N", s.params.big_n},
           {"gamma", s.params.gamma},
           {"dc_policy", s.params.dc == DcPolicy::split_real_mean ? "split_real_mean" : "zero"}}},
         {"orientations", orientations_json(s.set)},
         {"manifest", manifest}};
  write_container(path, kMagicStack, h, [&](std::ofstream& out) {
    // Filters are real-valued; stored as complex64 (zero imaginary part) to
    // keep a single lossless payload type across stacks and scores.
    for (const std::vector<double>& f : s.filters)
      for (double v : f) {
        const double pair[2] = {v, 0.0};
        out.write(reinterpret_cast<const char*>(pair), sizeof pair);
      }
  });
}

WaveletStack read_stack(const std::string& path, std::string* manifest) {
  Reader r(path, kMagicStack);
  const json h = r.header();
  WaveletStack s;
  s.dims = dims_from(h, path);
  s.set = orientations_from(h, path);
  if (manifest) *manifest = h.value("manifest", "");
  try {
    const json& p = h.at("params");
    s.params.lmax = p.at("L").get<int>();
    s.params.s_theta = p.at("s_theta").get<double>();
    s.params.k = p.at("k").get<int>();
    s.params.big_n = p.at("N").get<int>();
    s.params.gamma = p.at("gamma").get<double>();
    const std::string dc = p.at("dc_policy").get<std::string>();
    if (dc == "split_real_mean")
      s.params.dc = DcPolicy::split_real_mean;
    else if (dc == "zero")
      s.params.dc = DcPolicy::zero;
    else
      throw FormatError("'" + path + "': unknown dc_policy '" + dc + "'");
  } catch (const json::exception& e) {
    throw FormatError("'" + path + "': malformed params: " + e.what());
  }
  s.params.validate();

  const std::size_t nvox = s.dims.nvox();
  const std::size_t no = s.set.size();
  s.filters.assign(no, std::vector<double>(nvox));
  std::vector<double> buf(2 * nvox);
  for (std::size_t i = 0; i < no; ++i) {
    r.bytes(buf.data(), buf.size() * sizeof(double));
    for (std::size_t k = 0; k < nvox; ++k) {
      check_finite(buf[2 * k], path);
      if (buf[2 * k + 1] != 0.0)
        throw DataError("'" + path + "': stack filters must be real-valued");
      s.filters[i][k] = buf[2 * k];
    }
  }
  r.expect_eof();

  // m_psi is derived data; recomputing it (same summation order as the
  // builder) keeps the invariant intact no matter where the file came from.
  s.m_psi.assign(nvox, 0.0);
  for (std::size_t k = 0; k < nvox; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < no; ++i) {
      const double v = s.filters[i][k];
      acc += s.set.weights[i] * v * v;
    }
    s.m_psi[k] = acc;
  }
  return s;
}

void write_score(const OrientationScore& u, const std::string& path, const std::string& manifest) {
  json h{{"dims", {u.dims.nx, u.dims.ny, u.dims.nz}},
         {"spacing", {u.spacing[0], u.spacing[1], u.spacing[2]}},
         {"orientations", orientations_json(u.set)},
         {"manifest", manifest}};
  write_container(path, kMagicScore, h, [&](std::ofstream& out) {
    out.write(reinterpret_cast<const char*>(u.data.data()),
              static_cast<std::streamsize>(u.data.size() * sizeof(cplx)));
  });
}

OrientationScore read_score(const std::string& path, std::string* manifest) {
  Reader r(path, kMagicScore);
  const json h = r.header();
  const Dims3 d = dims_from(h, path);
  OrientationSet set = orientations_from(h, path);
  if (set.size() == 0) throw DataError("'" + path + "': empty orientation table");
  OrientationScore u(d, set);
  u.spacing = spacing_from(h);
  if (manifest) *manifest = h.value("manifest", "");
  r.bytes(u.data.data(), u.data.size() * sizeof(cplx));
  for (const cplx& z : u.data) {
    check_finite(z.real(), path);
    check_finite(z.imag(), path);
  }
  r.expect_eof();
  return u;
}

std::string peek_magic(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "";
  char m[8] = {};
  in.read(m, 8);
  return std::string(m, m + in.gcount());
}

void write_orientations_csv(const OrientationSet& set, const std::string& path) {
  atomic_write(path, [&](std::ofstream& out) {
    std::string s = "index,x,y,z,weight\n";
    for (std::size_t i = 0; i < set.size(); ++i) {
      s += std::to_string(i);
      for (int a = 0; a < 3; ++a) {
        s += ',';
        append_num(s, set.directions[i][a]);
      }
      s += ',';
      append_num(s, set.weights[i]);
      s += '\n';
    }
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  });
}

void write_spectrum_csv(const ZonalSpectrum& sp, const std::string& path) {
  atomic_write(path, [&](std::ofstream& out) {
    std::string s = "l,c\n";
    for (int l = 0; l <= sp.lmax(); ++l) {
      s += std::to_string(l);
      s += ',';
      append_num(s, sp.c[l]);
      s += '\n';
    }
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  });
}

void write_mpsi_csv(const WaveletStack& st, const std::string& path, int bins, double fraction) {
  if (bins < 1) throw ParamError("mpsi report needs at least one bin");
  const BandStats band = mpsi_band_stats(st, fraction);
  const Dims3& d = st.dims;
  const double rmax = std::sqrt(3.0) * rho_nyquist;

  struct Bin {
    std::size_t count = 0;
    double min = std::numeric_limits<double>::infinity(), max = 0, sum = 0;
  };
  std::vector<Bin> acc(bins);
  double gmin = std::numeric_limits<double>::infinity(), gmax = 0;
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x) {
        const double wx = omega_axis(x, d.nx);
        const double wy = omega_axis(y, d.ny);
        const double wz = omega_axis(z, d.nz);
        const double rho = std::sqrt(wx * wx + wy * wy + wz * wz);
        if (rho == 0.0) continue;
        const double m = st.m_psi[static_cast<std::size_t>(x) +
                                  static_cast<std::size_t>(d.nx) *
                                      (static_cast<std::size_t>(y) +
                                       static_cast<std::size_t>(d.ny) * static_cast<std::size_t>(z))];
        gmin = std::min(gmin, m);
        gmax = std::max(gmax, m);
        const int b = std::min(bins - 1, static_cast<int>(rho / rmax * bins));
        acc[b].count++;
        acc[b].min = std::min(acc[b].min, m);
        acc[b].max = std::max(acc[b].max, m);
        acc[b].sum += m;
      }

  atomic_write(path, [&](std::ofstream& out) {
    std::string s = "# m_psi radial profile (|omega| in rad/voxel)\n";
    s += "# global_min=";
    append_num(s, gmin);
    s += "\n# global_max=";
    append_num(s, gmax);
    s += "\n# band_fraction=";
    append_num(s, fraction);
    s += "\n# band_min=";
    append_num(s, band.min);
    s += "\n# band_max=";
    append_num(s, band.max);
    s += "\nrho_lo,rho_hi,count,min,mean,max\n";
    for (int b = 0; b < bins; ++b) {
      append_num(s, rmax * b / bins);
      s += ',';
      append_num(s, rmax * (b + 1) / bins);
      s += ',';
      s += std::to_string(acc[b].count);
      if (acc[b].count == 0) {
        s += ",0,0,0\n";
        continue;
      }
      s += ',';
      append_num(s, acc[b].min);
      s += ',';
      append_num(s, acc[b].sum / static_cast<double>(acc[b].count));
      s += ',';
      append_num(s, acc[b].max);
      s += '\n';
    }
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  });
}

namespace {

// Slice geometry: returns width/height and a sampler mapping (col, row) to the
// linear voxel index.
struct SlicePlan {
  std::int64_t w = 0, h = 0;
  std::function<std::size_t(std::int64_t, std::int64_t)> at;
};

SlicePlan slice_plan(const Volume& v, char axis, std::int64_t index) {
  const Dims3& d = v.dims;
  SlicePlan p;
  auto lin = [&d](std::int64_t x, std::int64_t y, std::int64_t z) {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(d.nx) *
               (static_cast<std::size_t>(y) + static_cast<std::size_t>(d.ny) * z);
  };
  switch (axis) {
    case 'z':
      if (index < 0 || index >= d.nz) throw ParamError("slice index out of range for axis z");
      p.w = d.nx;
      p.h = d.ny;
      p.at = [lin, index](std::int64_t c, std::int64_t r) { return lin(c, r, index); };
      break;
    case 'y':
      if (index < 0 || index >= d.ny) throw ParamError("slice index out of range for axis y");
      p.w = d.nx;
      p.h = d.nz;
      p.at = [lin, index](std::int64_t c, std::int64_t r) { return lin(c, index, r); };
      break;
    case 'x':
      if (index < 0 || index >= d.nx) throw ParamError("slice index out of range for axis x");
      p.w = d.ny;
      p.h = d.nz;
      p.at = [lin, index](std::int64_t c, std::int64_t r) { return lin(index, c, r); };
      break;
    default:
      throw ParamError(std::string("slice axis must be x, y or z, got '") + axis + "'");
  }
  return p;
}

double take_part(const cplx& z, Part part) {
  switch (part) {
    case Part::real:
      return z.real();
    case Part::imag:
      return z.imag();
    default:
      return std::abs(z);
  }
}

const char* part_name(Part p) {
  return p == Part::real ? "real" : (p == Part::imag ? "imag" : "abs");
}

}  // namespace

void write_slice_csv(const Volume& v, char axis, std::int64_t index, Part part,
                     const std::string& path) {
  const SlicePlan p = slice_plan(v, axis, index);
  atomic_write(path, [&](std::ofstream& out) {
    std::string s;
    for (std::int64_t r = 0; r < p.h; ++r) {
      for (std::int64_t c = 0; c < p.w; ++c) {
        if (c) s += ',';
        append_num(s, take_part(v.data[p.at(c, r)], part));
      }
      s += '\n';
    }
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  });
}

void write_slice_pgm(const Volume& v, char axis, std::int64_t index, Part part,
                     const std::string& path) {
  const SlicePlan p = slice_plan(v, axis, index);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::int64_t r = 0; r < p.h; ++r)
    for (std::int64_t c = 0; c < p.w; ++c) {
      const double x = take_part(v.data[p.at(c, r)], part);
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  const double span = hi - lo;
  atomic_write(path, [&](std::ofstream& out) {
    std::string head = "P5\n" + std::to_string(p.w) + " " + std::to_string(p.h) + "\n255\n";
    out.write(head.data(), static_cast<std::streamsize>(head.size()));
    std::vector<unsigned char> row(static_cast<std::size_t>(p.w));
    for (std::int64_t r = 0; r < p.h; ++r) {
      for (std::int64_t c = 0; c < p.w; ++c) {
        const double x = take_part(v.data[p.at(c, r)], part);
        row[static_cast<std::size_t>(c)] = span > 0.0
            ? static_cast<unsigned char>(std::lround(255.0 * (x - lo) / span))
            : 0;
      }
      out.write(reinterpret_cast<const char*>(row.data()), p.w);
    }
  });
  // Sidecar records the normalization so pixel values stay interpretable.
  nlohmann::json side{{"axis", std::string(1, axis)}, {"index", index},
                      {"part", part_name(part)},      {"min", lo},
                      {"max", hi},                    {"width", p.w},
                      {"height", p.h}};
  atomic_write(path + ".json", [&](std::ofstream& out) {
    const std::string s = side.dump(2) + "\n";
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
  });
}

}  // namespace orient3d
