// orient3d: invertible 3D orientation-score transforms from cake-wavelet
// filter banks. Subcommands cover the full pipeline: phantom synthesis, noise,
// wavelet construction, transform/reconstruct, stability reporting, diffusion,
// one-shot enhancement, metrics and slice export.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "orient3d/io.hpp"
#include "orient3d/lieops.hpp"
#include "orient3d/synth.hpp"
#include "orient3d/threads.hpp"

namespace o3 = orient3d;

namespace {

constexpr const char* kVersion = "orient3d 1.0.0";

std::string join_args(int argc, char** argv) {
  std::string m = kVersion;
  for (int i = 1; i < argc; ++i) {
    m += ' ';
    m += argv[i];
  }
  return m;
}

o3::Dims3 to_dims(const std::vector<std::int64_t>& v) {
  return o3::Dims3{v[0], v[1], v[2]};
}

o3::Part parse_part(const std::string& s) {
  if (s == "real") return o3::Part::real;
  if (s == "imag") return o3::Part::imag;
  if (s == "abs") return o3::Part::abs;
  throw o3::ParamError("part must be real, imag or abs, got '" + s + "'");
}

o3::Volume pad_volume(const o3::Volume& v, std::int64_t pad) {
  if (pad == 0) return v;
  o3::Dims3 d{v.dims.nx + 2 * pad, v.dims.ny + 2 * pad, v.dims.nz + 2 * pad};
  o3::Volume out(d, v.kind);
  out.spacing = v.spacing;
  for (std::int64_t z = 0; z < v.dims.nz; ++z)
    for (std::int64_t y = 0; y < v.dims.ny; ++y)
      for (std::int64_t x = 0; x < v.dims.nx; ++x)
        out.at(x + pad, y + pad, z + pad) = v.at(x, y, z);
  return out;
}

o3::Volume crop_volume(const o3::Volume& v, std::int64_t crop) {
  if (crop == 0) return v;
  o3::Dims3 d{v.dims.nx - 2 * crop, v.dims.ny - 2 * crop, v.dims.nz - 2 * crop};
  if (d.nx < 1 || d.ny < 1 || d.nz < 1)
    throw o3::ParamError("crop larger than the volume");
  o3::Volume out(d, v.kind);
  out.spacing = v.spacing;
  for (std::int64_t z = 0; z < d.nz; ++z)
    for (std::int64_t y = 0; y < d.ny; ++y)
      for (std::int64_t x = 0; x < d.nx; ++x)
        out.at(x, y, z) = v.at(x + crop, y + crop, z + crop);
  return out;
}

struct Options {
  std::string manifest;

  // phantom
  std::vector<std::int64_t> dims{32, 32, 32};
  std::vector<double> spacing{1.0, 1.0, 1.0};
  std::string preset = "crossing";
  std::vector<std::vector<double>> tubes;
  std::string out;

  // noise
  std::string in;
  double sigma = 0.1;
  std::uint64_t seed = 1;

  // make-wavelets
  int order = 1;
  o3::WaveletParams wp;
  std::string dc_policy = "split_real_mean";
  std::string dump_spectra;
  std::string orientations_csv;
  std::int64_t patch = 0;
  std::string kernel_slice;
  std::size_t kernel_index = 0;
  std::string kernel_axis = "z";
  std::int64_t kernel_slice_index = -1;
  std::string kernel_part = "real";

  // transform / reconstruct
  std::string stack_path;
  std::int64_t pad = 0;
  std::int64_t crop = 0;
  std::string method = "exact";
  std::string stabilize = "clamp";
  double eps = 0.0;  // 0 = auto (1e-8 * max M)
  std::string out_kind = "real32";

  // mpsi-report
  int bins = 64;
  double fraction = 0.8;

  // diffuse / enhance
  o3::DiffusionParams dp;
  double threshold_p = 0.0;  // 0 = no threshold
  bool threshold_real = false;
  std::string recon = "exact";

  // metrics
  std::string path_a, path_b;

  // slice
  std::string axis = "z";
  std::int64_t index = 0;
  std::string part = "real";
  std::string format = "pgm";
  std::int64_t orientation = 0;
};

std::optional<double> opt_eps(double eps) {
  return eps > 0.0 ? std::optional<double>(eps) : std::nullopt;
}

o3::Stabilize parse_stabilize(const std::string& s) {
  if (s == "clamp") return o3::Stabilize::clamp;
  if (s == "mask") return o3::Stabilize::mask;
  if (s == "strict") return o3::Stabilize::strict;
  throw o3::ParamError("stabilize must be clamp, mask or strict, got '" + s + "'");
}

int run_phantom(const Options& o) {
  o3::Volume v = o.tubes.empty() ? o3::phantom_preset(to_dims(o.dims), o.preset) : [&] {
    std::vector<o3::Tube> ts;
    for (const auto& t : o.tubes) {
      if (t.size() != 8)
        throw o3::ParamError("--tube wants 8 numbers: px,py,pz,dx,dy,dz,radius,intensity");
      ts.push_back(o3::Tube{{t[0], t[1], t[2]}, {t[3], t[4], t[5]}, t[6], t[7]});
    }
    return o3::phantom(to_dims(o.dims), ts);
  }();
  v.spacing = {o.spacing[0], o.spacing[1], o.spacing[2]};
  o3::write_volume(v, o.out, o.manifest);
  return 0;
}

int run_noise(const Options& o) {
  o3::Volume v = o3::read_volume(o.in);
  o3::write_volume(o3::add_noise(v, o.sigma, o.seed), o.out, o.manifest);
  return 0;
}

int run_make_wavelets(const Options& o) {
  o3::WaveletParams wp = o.wp;
  if (o.dc_policy == "split_real_mean")
    wp.dc = o3::DcPolicy::split_real_mean;
  else if (o.dc_policy == "zero")
    wp.dc = o3::DcPolicy::zero;
  else
    throw o3::ParamError("dc-policy must be split_real_mean or zero, got '" + o.dc_policy + "'");

  const o3::OrientationSet set = o3::icosphere(o.order);
  const o3::WaveletStack stack = o3::build_wavelet_stack(set, to_dims(o.dims), wp);
  o3::write_stack(stack, o.out, o.manifest);

  if (!o.dump_spectra.empty()) {
    const o3::AngularSpectra sp = o3::angular_spectra(wp);
    o3::write_spectrum_csv(sp.window, o.dump_spectra + "window.csv");
    o3::write_spectrum_csv(sp.re, o.dump_spectra + "re.csv");
    o3::write_spectrum_csv(sp.im, o.dump_spectra + "im.csv");
  }
  if (!o.orientations_csv.empty()) o3::write_orientations_csv(set, o.orientations_csv);
  if (!o.kernel_slice.empty()) {
    if (o.kernel_axis.size() != 1) throw o3::ParamError("kernel axis must be x, y or z");
    const o3::Volume ker = o3::spatial_kernel(stack, o.kernel_index);
    std::int64_t idx = o.kernel_slice_index;
    if (idx < 0)
      idx = (o.kernel_axis[0] == 'x' ? ker.dims.nx : o.kernel_axis[0] == 'y' ? ker.dims.ny : ker.dims.nz) / 2;
    o3::write_slice_pgm(ker, o.kernel_axis[0], idx, parse_part(o.kernel_part), o.kernel_slice);
  }
  if (o.patch > 0) {
    // Kernel-inspection path: window every spatial kernel with a raised cosine
    // of half-width `patch`, rebuild the filters, and report how far the
    // windowed bank's stability map drifts from the full-grid one.
    double dev = o3::patch_mpsi_deviation(stack, o.patch);
    std::printf("patch=%lld  max |M_patch - M| / max M = %.6g\n",
                static_cast<long long>(o.patch), dev);
  }
  return 0;
}

int run_transform(const Options& o) {
  o3::Volume v = o3::read_volume(o.in);
  v = pad_volume(v, o.pad);
  const o3::WaveletStack stack = o3::read_stack(o.stack_path);
  o3::write_score(o3::forward(v, stack), o.out, o.manifest);
  return 0;
}

int run_reconstruct(const Options& o) {
  const o3::OrientationScore u = o3::read_score(o.in);
  o3::Volume v;
  if (o.method == "approx") {
    v = o3::reconstruct_approx(u);
  } else if (o.method == "exact") {
    const o3::WaveletStack stack = o3::read_stack(o.stack_path);
    v = o3::reconstruct_exact(u, stack, opt_eps(o.eps), parse_stabilize(o.stabilize));
  } else {
    throw o3::ParamError("method must be exact or approx, got '" + o.method + "'");
  }
  v = crop_volume(v, o.crop);
  if (o.out_kind == "real32")
    v.kind = o3::VolumeKind::real;
  else if (o.out_kind == "complex64")
    v.kind = o3::VolumeKind::complex;
  else
    throw o3::ParamError("kind must be real32 or complex64, got '" + o.out_kind + "'");
  o3::write_volume(v, o.out, o.manifest);
  return 0;
}

int run_mpsi_report(const Options& o) {
  const o3::WaveletStack stack = o3::read_stack(o.stack_path);
  o3::write_mpsi_csv(stack, o.out, o.bins, o.fraction);
  return 0;
}

int run_diffuse(const Options& o) {
  const o3::OrientationScore u = o3::read_score(o.in);
  o3::write_score(o3::diffuse(u, o.dp), o.out, o.manifest);
  return 0;
}

int run_enhance(const Options& o) {
  const o3::Volume v = o3::read_volume(o.in);
  const o3::WaveletStack stack = o3::read_stack(o.stack_path);
  const o3::Recon recon = o.recon == "approx" ? o3::Recon::approx : o3::Recon::exact;
  if (o.recon != "exact" && o.recon != "approx")
    throw o3::ParamError("recon must be exact or approx, got '" + o.recon + "'");
  const auto p = o.threshold_p > 0.0 ? std::optional<double>(o.threshold_p) : std::nullopt;
  o3::Volume out = o3::enhance(v, stack, o.dp, p, recon, opt_eps(o.eps),
                               o.threshold_real ? o3::ThresholdMode::real_part
                                                : o3::ThresholdMode::phase);
  if (o.out_kind == "real32")
    out.kind = o3::VolumeKind::real;
  else if (o.out_kind == "complex64")
    out.kind = o3::VolumeKind::complex;
  else
    throw o3::ParamError("kind must be real32 or complex64, got '" + o.out_kind + "'");
  o3::write_volume(out, o.out, o.manifest);
  return 0;
}

int run_metrics(const Options& o) {
  const o3::Volume a = o3::read_volume(o.path_a);
  const o3::Volume b = o3::read_volume(o.path_b);
  const o3::Metrics m = o3::compare(a, b);
  std::printf("rel_l2=%.17g\npsnr_db=%.17g\nmax_abs=%.17g\n", m.rel_l2, m.psnr, m.max_abs);
  return 0;
}

int run_slice(const Options& o) {
  const std::string magic = o3::peek_magic(o.in);
  o3::Volume v;
  if (magic == std::string("OS3DSCR\0", 8)) {
    const o3::OrientationScore u = o3::read_score(o.in);
    if (o.orientation < 0 || static_cast<std::size_t>(o.orientation) >= u.set.size())
      throw o3::ParamError("orientation index out of range");
    v = o3::Volume(u.dims, o3::VolumeKind::complex);
    const o3::cplx* slab = u.slab(static_cast<std::size_t>(o.orientation));
    std::copy(slab, slab + u.dims.nvox(), v.data.begin());
  } else {
    v = o3::read_volume(o.in);
  }
  if (o.axis.size() != 1) throw o3::ParamError("axis must be x, y or z");
  if (o.format == "pgm")
    o3::write_slice_pgm(v, o.axis[0], o.index, parse_part(o.part), o.out);
  else if (o.format == "csv")
    o3::write_slice_csv(v, o.axis[0], o.index, parse_part(o.part), o.out);
  else
    throw o3::ParamError("format must be pgm or csv, got '" + o.format + "'");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  o3::threads();  // resolve ORIENT3D_THREADS once, before any parallel region

  CLI::App app{"3D orientation-score transforms via cake-wavelet filter banks"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config")->description("read flags from a TOML-style config file");
  app.require_subcommand(1);

  Options o;
  o.manifest = join_args(argc, argv);

  auto add_dims = [&](CLI::App* c) {
    c->add_option("--dims", o.dims, "grid size nx,ny,nz")->expected(3)->delimiter(',');
  };

  CLI::App* phantom = app.add_subcommand("phantom", "synthesize a tube phantom volume");
  add_dims(phantom);
  phantom->add_option("--spacing", o.spacing, "voxel spacing (mm)")->expected(3)->delimiter(',');
  phantom->add_option("--preset", o.preset, "phantom preset (crossing)");
  phantom->add_option("--tube", o.tubes,
                      "explicit tube px,py,pz,dx,dy,dz,radius,intensity (repeatable)")
      ->delimiter(',');
  phantom->add_option("--out", o.out, "output volume file")->required();

  CLI::App* noise = app.add_subcommand("noise", "add seeded Gaussian noise to a volume");
  noise->add_option("--in", o.in, "input volume")->required();
  noise->add_option("--out", o.out, "output volume")->required();
  noise->add_option("--sigma", o.sigma, "noise standard deviation");
  noise->add_option("--seed", o.seed, "RNG seed");

  CLI::App* mkw = app.add_subcommand("make-wavelets", "build a cake-wavelet filter bank");
  add_dims(mkw);
  mkw->add_option("--order", o.order, "icosphere subdivision order");
  mkw->add_option("--L", o.wp.lmax, "spherical-harmonic band limit");
  mkw->add_option("--stheta", o.wp.s_theta, "angular window scale (rad)");
  mkw->add_option("--k", o.wp.k, "B-spline order");
  mkw->add_option("--N", o.wp.big_n, "radial Taylor order");
  mkw->add_option("--gamma", o.wp.gamma, "radial inflection fraction of Nyquist");
  mkw->add_option("--dc-policy", o.dc_policy, "DC bin policy: split_real_mean | zero");
  mkw->add_option("--out", o.out, "output stack file")->required();
  mkw->add_option("--dump-spectra", o.dump_spectra,
                  "prefix for angular spectra CSVs (window/re/im)");
  mkw->add_option("--orientations-csv", o.orientations_csv, "orientation table CSV");
  mkw->add_option("--patch", o.patch, "report stability-map drift of patch-windowed kernels");
  mkw->add_option("--kernel-slice", o.kernel_slice, "write a PGM slice of one spatial kernel");
  mkw->add_option("--kernel-index", o.kernel_index, "kernel orientation index");
  mkw->add_option("--kernel-axis", o.kernel_axis, "kernel slice axis: x | y | z");
  mkw->add_option("--kernel-slice-index", o.kernel_slice_index,
                  "kernel slice index (default: center)");
  mkw->add_option("--kernel-part", o.kernel_part, "kernel part: real | imag | abs");

  CLI::App* tr = app.add_subcommand("transform", "forward orientation-score transform");
  tr->add_option("--in", o.in, "input volume")->required();
  tr->add_option("--stack", o.stack_path, "wavelet stack file")->required();
  tr->add_option("--out", o.out, "output score file")->required();
  tr->add_option("--pad", o.pad, "zero-pad the volume by this many voxels per side");

  CLI::App* rc = app.add_subcommand("reconstruct", "invert an orientation score");
  rc->add_option("--in", o.in, "input score file")->required();
  rc->add_option("--stack", o.stack_path, "wavelet stack file (required for exact)");
  rc->add_option("--out", o.out, "output volume")->required();
  rc->add_option("--method", o.method, "exact | approx");
  rc->add_option("--eps", o.eps, "stability floor (default 1e-8 * max M)");
  rc->add_option("--stabilize", o.stabilize, "clamp | mask | strict");
  rc->add_option("--kind", o.out_kind, "payload: real32 | complex64");
  rc->add_option("--crop", o.crop, "crop this many voxels per side after reconstruction");

  CLI::App* mp = app.add_subcommand("mpsi-report", "radial profile CSV of the stability map");
  mp->add_option("--stack", o.stack_path, "wavelet stack file")->required();
  mp->add_option("--out", o.out, "output CSV")->required();
  mp->add_option("--bins", o.bins, "number of radial bins");
  mp->add_option("--fraction", o.fraction, "reconstruction band as a fraction of Nyquist");

  CLI::App* df = app.add_subcommand("diffuse", "left-invariant diffusion of a score");
  df->add_option("--in", o.in, "input score file")->required();
  df->add_option("--out", o.out, "output score file")->required();
  df->add_option("--D11", o.dp.d11, "lateral diffusivity");
  df->add_option("--D33", o.dp.d33, "along-orientation diffusivity");
  df->add_option("--D44", o.dp.d44, "angular diffusivity");
  df->add_option("--t", o.dp.t, "total diffusion time");
  df->add_option("--dt", o.dp.dt, "explicit step (0 = auto)");

  CLI::App* en = app.add_subcommand("enhance", "transform + diffuse + threshold + reconstruct");
  en->add_option("--in", o.in, "input volume")->required();
  en->add_option("--stack", o.stack_path, "wavelet stack file")->required();
  en->add_option("--out", o.out, "output volume")->required();
  en->add_option("--D11", o.dp.d11, "lateral diffusivity");
  en->add_option("--D33", o.dp.d33, "along-orientation diffusivity");
  en->add_option("--D44", o.dp.d44, "angular diffusivity");
  en->add_option("--t", o.dp.t, "total diffusion time");
  en->add_option("--dt", o.dp.dt, "explicit step (0 = auto)");
  en->add_option("--p", o.threshold_p, "soft-threshold exponent (0 = no threshold)");
  en->add_flag("--threshold-real", o.threshold_real, "threshold the real part instead of |U|");
  en->add_option("--recon", o.recon, "exact | approx");
  en->add_option("--eps", o.eps, "stability floor for exact reconstruction");
  en->add_option("--kind", o.out_kind, "payload: real32 | complex64");

  CLI::App* me = app.add_subcommand("metrics", "error metrics between two volumes");
  me->add_option("--a", o.path_a, "test volume")->required();
  me->add_option("--b", o.path_b, "reference volume")->required();

  CLI::App* sl = app.add_subcommand("slice", "export a 2D slice as PGM or CSV");
  sl->add_option("--in", o.in, "input volume or score file")->required();
  sl->add_option("--out", o.out, "output file")->required();
  sl->add_option("--axis", o.axis, "slice axis: x | y | z");
  sl->add_option("--index", o.index, "slice index along the axis");
  sl->add_option("--part", o.part, "real | imag | abs");
  sl->add_option("--format", o.format, "pgm | csv");
  sl->add_option("--orientation", o.orientation, "orientation index for score files");

  // allow [subcommand] sections in --config files
  for (CLI::App* sc : app.get_subcommands([](CLI::App*) { return true; })) sc->configurable();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (phantom->parsed()) return run_phantom(o);
    if (noise->parsed()) return run_noise(o);
    if (mkw->parsed()) return run_make_wavelets(o);
    if (tr->parsed()) return run_transform(o);
    if (rc->parsed()) return run_reconstruct(o);
    if (mp->parsed()) return run_mpsi_report(o);
    if (df->parsed()) return run_diffuse(o);
    if (en->parsed()) return run_enhance(o);
    if (me->parsed()) return run_metrics(o);
    if (sl->parsed()) return run_slice(o);
  } catch (const o3::ParamError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const o3::LimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const o3::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const o3::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const o3::DimError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const o3::StabilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const o3::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
