// Python surface over the core library. Arrays are numpy C-order (nz, ny, nx)
// with x fastest, matching the native layout; orientation scores carry a
// leading orientation axis. Real-kind volumes round-trip as float64, complex
// ones as complex128.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>

#include "orient3d/io.hpp"
#include "orient3d/lieops.hpp"
#include "orient3d/synth.hpp"
#include "orient3d/threads.hpp"

namespace py = pybind11;
using namespace orient3d;

namespace {

Dims3 dims_from_shape(const std::array<std::int64_t, 3>& t) { return Dims3{t[2], t[1], t[0]}; }

py::tuple shape_tuple(const Dims3& d) { return py::make_tuple(d.nz, d.ny, d.nx); }

Volume vol_from_array(const py::array& a) {
  if (a.ndim() != 3) throw ParamError("expected a 3-d array shaped (nz, ny, nx)");
  const Dims3 d{a.shape(2), a.shape(1), a.shape(0)};
  if (py::isinstance<py::array_t<cplx>>(a)) {
    auto r = py::array_t<cplx, py::array::c_style | py::array::forcecast>::ensure(a);
    Volume v(d, VolumeKind::complex);
    std::copy(r.data(), r.data() + v.data.size(), v.data.begin());
    return v;
  }
  auto r = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(a);
  Volume v(d, VolumeKind::real);
  const double* src = r.data();
  for (std::size_t k = 0; k < v.data.size(); ++k) v.data[k] = cplx(src[k], 0.0);
  return v;
}

py::array vol_to_array(const Volume& v) {
  const std::vector<py::ssize_t> shape{v.dims.nz, v.dims.ny, v.dims.nx};
  if (v.kind == VolumeKind::real) {
    py::array_t<double> out(shape);
    double* dst = out.mutable_data();
    for (std::size_t k = 0; k < v.data.size(); ++k) dst[k] = v.data[k].real();
    return out;
  }
  py::array_t<cplx> out(shape);
  std::copy(v.data.begin(), v.data.end(), out.mutable_data());
  return out;
}

py::array_t<cplx> score_to_array(const OrientationScore& u) {
  py::array_t<cplx> out(std::vector<py::ssize_t>{
      static_cast<py::ssize_t>(u.set.size()), u.dims.nz, u.dims.ny, u.dims.nx});
  std::copy(u.data.begin(), u.data.end(), out.mutable_data());
  return out;
}

OrientationScore score_from_array(const py::array& a, const OrientationSet& set) {
  if (a.ndim() != 4) throw ParamError("expected a 4-d array shaped (n_orient, nz, ny, nx)");
  if (static_cast<std::size_t>(a.shape(0)) != set.size())
    throw DimError("leading axis does not match the orientation count");
  auto r = py::array_t<cplx, py::array::c_style | py::array::forcecast>::ensure(a);
  OrientationScore u(Dims3{a.shape(3), a.shape(2), a.shape(1)}, set);
  std::copy(r.data(), r.data() + u.data.size(), u.data.begin());
  return u;
}

Stabilize stabilize_from(const std::string& s) {
  if (s == "clamp") return Stabilize::clamp;
  if (s == "mask") return Stabilize::mask;
  if (s == "strict") return Stabilize::strict;
  throw ParamError("stabilize must be clamp, mask or strict, got '" + s + "'");
}

ThresholdMode mode_from(const std::string& s) {
  if (s == "phase") return ThresholdMode::phase;
  if (s == "real") return ThresholdMode::real_part;
  throw ParamError("threshold mode must be phase or real, got '" + s + "'");
}

}  // namespace

PYBIND11_MODULE(orient3d, m) {
  m.doc() = "invertible 3D orientation-score transforms from cake-wavelet filter banks";
  m.attr("__version__") = "1.0.0";

  py::register_exception<ParamError>(m, "ParamError", PyExc_ValueError);
  py::register_exception<LimitError>(m, "LimitError", PyExc_ValueError);
  py::register_exception<DimError>(m, "DimError", PyExc_ValueError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_IOError);
  py::register_exception<DataError>(m, "DataError", PyExc_IOError);
  py::register_exception<StabilityError>(m, "StabilityError", PyExc_ArithmeticError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<OrientationSet>(m, "OrientationSet")
      .def("__len__", &OrientationSet::size)
      .def_property_readonly("directions",
                             [](const OrientationSet& s) {
                               py::array_t<double> out(std::vector<py::ssize_t>{
                                   static_cast<py::ssize_t>(s.size()), 3});
                               double* d = out.mutable_data();
                               for (std::size_t i = 0; i < s.size(); ++i)
                                 for (int a = 0; a < 3; ++a) d[3 * i + a] = s.directions[i][a];
                               return out;
                             })
      .def_readonly("weights", &OrientationSet::weights)
      .def_readonly("adjacency", &OrientationSet::adjacency)
      .def_readonly("antipode", &OrientationSet::antipode);

  m.def("icosphere", &icosphere, py::arg("order"),
        "triangulated sphere sampling: 10*4^order + 2 directions");

  py::class_<WaveletParams>(m, "WaveletParams")
      .def(py::init<>())
      .def_readwrite("lmax", &WaveletParams::lmax)
      .def_readwrite("s_theta", &WaveletParams::s_theta)
      .def_readwrite("k", &WaveletParams::k)
      .def_readwrite("n", &WaveletParams::big_n)
      .def_readwrite("gamma", &WaveletParams::gamma)
      .def_property(
          "dc_policy",
          [](const WaveletParams& p) {
            return p.dc == DcPolicy::zero ? "zero" : "split_real_mean";
          },
          [](WaveletParams& p, const std::string& s) {
            if (s == "zero")
              p.dc = DcPolicy::zero;
            else if (s == "split_real_mean")
              p.dc = DcPolicy::split_real_mean;
            else
              throw ParamError("dc_policy must be split_real_mean or zero, got '" + s + "'");
          });

  py::class_<WaveletStack>(m, "WaveletStack")
      .def_property_readonly("shape", [](const WaveletStack& s) { return shape_tuple(s.dims); })
      .def_readonly("set", &WaveletStack::set)
      .def_readonly("params", &WaveletStack::params)
      .def_property_readonly("m_psi",
                             [](const WaveletStack& s) {
                               py::array_t<double> out(std::vector<py::ssize_t>{
                                   s.dims.nz, s.dims.ny, s.dims.nx});
                               std::copy(s.m_psi.begin(), s.m_psi.end(), out.mutable_data());
                               return out;
                             })
      .def("band_stats", [](const WaveletStack& s, double fraction) {
        const BandStats b = mpsi_band_stats(s, fraction);
        return py::dict(py::arg("min") = b.min, py::arg("max") = b.max, py::arg("bins") = b.bins);
      }, py::arg("fraction") = 0.8);

  m.def(
      "build_wavelet_stack",
      [](const OrientationSet& set, const std::array<std::int64_t, 3>& shape, const WaveletParams& p) {
        return build_wavelet_stack(set, dims_from_shape(shape), p);
      },
      py::arg("set"), py::arg("shape"), py::arg("params") = WaveletParams{});

  m.def(
      "spatial_kernel",
      [](const WaveletStack& s, std::size_t i) { return vol_to_array(spatial_kernel(s, i)); },
      py::arg("stack"), py::arg("orientation"));

  py::class_<OrientationScore>(m, "OrientationScore")
      .def(py::init(&score_from_array), py::arg("array"), py::arg("set"))
      .def_property_readonly("array", &score_to_array)
      .def_property_readonly("shape", [](const OrientationScore& u) { return shape_tuple(u.dims); })
      .def_readonly("set", &OrientationScore::set);

  m.def(
      "forward", [](const py::array& f, const WaveletStack& s) { return forward(vol_from_array(f), s); },
      py::arg("volume"), py::arg("stack"));
  m.def(
      "reconstruct_exact",
      [](const OrientationScore& u, const WaveletStack& s, std::optional<double> eps,
         const std::string& stabilize) {
        return vol_to_array(reconstruct_exact(u, s, eps, stabilize_from(stabilize)));
      },
      py::arg("score"), py::arg("stack"), py::arg("eps") = py::none(),
      py::arg("stabilize") = "clamp");
  m.def(
      "reconstruct_approx",
      [](const OrientationScore& u) { return vol_to_array(reconstruct_approx(u)); },
      py::arg("score"));
  m.def(
      "project",
      [](const OrientationScore& u, const WaveletStack& s, double eps) {
        return project(u, s, eps);
      },
      py::arg("score"), py::arg("stack"), py::arg("eps") = 0.0);
  m.def(
      "m_inner_product",
      [](const OrientationScore& u, const OrientationScore& v, const WaveletStack& s,
         std::optional<double> eps) { return m_inner_product(u, v, s, eps); },
      py::arg("u"), py::arg("v"), py::arg("stack"), py::arg("eps") = py::none());
  m.def(
      "ball_limit",
      [](const py::array& f, double fraction) {
        return vol_to_array(ball_limit(vol_from_array(f), fraction));
      },
      py::arg("volume"), py::arg("fraction"));

  py::class_<DiffusionParams>(m, "DiffusionParams")
      .def(py::init<>())
      .def_readwrite("d11", &DiffusionParams::d11)
      .def_readwrite("d33", &DiffusionParams::d33)
      .def_readwrite("d44", &DiffusionParams::d44)
      .def_readwrite("t", &DiffusionParams::t)
      .def_readwrite("dt", &DiffusionParams::dt);

  m.def("stable_dt", &stable_dt, py::arg("set"), py::arg("params"));
  m.def("diffuse", &diffuse, py::arg("score"), py::arg("params"));
  m.def(
      "soft_threshold",
      [](const OrientationScore& u, double p, const std::string& mode) {
        return soft_threshold(u, p, mode_from(mode));
      },
      py::arg("score"), py::arg("p"), py::arg("mode") = "phase");
  m.def(
      "enhance",
      [](const py::array& f, const WaveletStack& s, const DiffusionParams& dp,
         std::optional<double> threshold_p, const std::string& recon, std::optional<double> eps,
         const std::string& mode) {
        if (recon != "exact" && recon != "approx")
          throw ParamError("recon must be exact or approx, got '" + recon + "'");
        return vol_to_array(enhance(vol_from_array(f), s, dp, threshold_p,
                                    recon == "exact" ? Recon::exact : Recon::approx, eps,
                                    mode_from(mode)));
      },
      py::arg("volume"), py::arg("stack"), py::arg("params") = DiffusionParams{},
      py::arg("threshold_p") = py::none(), py::arg("recon") = "exact",
      py::arg("eps") = py::none(), py::arg("mode") = "phase");

  py::class_<Tube>(m, "Tube")
      .def(py::init<>())
      .def_readwrite("point", &Tube::point)
      .def_readwrite("dir", &Tube::dir)
      .def_readwrite("radius", &Tube::radius)
      .def_readwrite("intensity", &Tube::intensity);

  m.def(
      "phantom",
      [](const std::array<std::int64_t, 3>& shape, const std::vector<Tube>& tubes) {
        return vol_to_array(phantom(dims_from_shape(shape), tubes));
      },
      py::arg("shape"), py::arg("tubes"));
  m.def(
      "phantom_preset",
      [](const std::array<std::int64_t, 3>& shape, const std::string& name) {
        return vol_to_array(phantom_preset(dims_from_shape(shape), name));
      },
      py::arg("shape"), py::arg("preset") = "crossing");
  m.def(
      "add_noise",
      [](const py::array& f, double sigma, std::uint64_t seed) {
        return vol_to_array(add_noise(vol_from_array(f), sigma, seed));
      },
      py::arg("volume"), py::arg("sigma"), py::arg("seed"));
  m.def(
      "compare",
      [](const py::array& a, const py::array& b) {
        const Metrics mt = compare(vol_from_array(a), vol_from_array(b));
        return py::dict(py::arg("rel_l2") = mt.rel_l2, py::arg("psnr_db") = mt.psnr,
                        py::arg("max_abs") = mt.max_abs);
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "write_volume",
      [](const py::array& f, const std::string& path, const std::string& manifest) {
        write_volume(vol_from_array(f), path, manifest);
      },
      py::arg("volume"), py::arg("path"), py::arg("manifest") = "");
  m.def(
      "read_volume",
      [](const std::string& path) {
        std::string manifest;
        const Volume v = read_volume(path, &manifest);
        return py::make_tuple(vol_to_array(v), manifest);
      },
      py::arg("path"));
  m.def(
      "write_score",
      [](const OrientationScore& u, const std::string& path, const std::string& manifest) {
        write_score(u, path, manifest);
      },
      py::arg("score"), py::arg("path"), py::arg("manifest") = "");
  m.def("read_score", [](const std::string& path) { return read_score(path); }, py::arg("path"));
  m.def(
      "write_stack",
      [](const WaveletStack& s, const std::string& path, const std::string& manifest) {
        write_stack(s, path, manifest);
      },
      py::arg("stack"), py::arg("path"), py::arg("manifest") = "");
  m.def("read_stack", [](const std::string& path) { return read_stack(path); }, py::arg("path"));

  m.def("set_threads", &set_threads, py::arg("n"));
  m.def("threads", &threads);
}
