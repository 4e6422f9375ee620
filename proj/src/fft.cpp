#include "orient3d/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <map>
#include <mutex>
#include <tuple>

namespace orient3d {

namespace {

struct PlanPair {
  fftw_plan fwd = nullptr, bwd = nullptr;
};

std::mutex g_plan_mutex;
std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, PlanPair>& plan_cache() {
  static auto* cache =
      new std::map<std::tuple<std::int64_t, std::int64_t, std::int64_t>, PlanPair>();
  return *cache;
}

// Plan creation is not thread-safe in FFTW; executing a cached plan on fresh
// arrays (fftw_execute_dft) is. FFTW_ESTIMATE keeps plan selection
// deterministic, FFTW_UNALIGNED lets the same plan run on any buffer.
PlanPair plans_for(const Dims3& d) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_tuple(d.nx, d.ny, d.nz);
  auto it = plan_cache().find(key);
  if (it != plan_cache().end()) return it->second;

  std::vector<cplx> scratch(d.nvox());
  auto* p = reinterpret_cast<fftw_complex*>(scratch.data());
  // FFTW is row-major with the last index fastest; our layout is x-fastest,
  // so the FFTW dimensions are (nz, ny, nx).
  PlanPair pp;
  pp.fwd = fftw_plan_dft_3d(static_cast<int>(d.nz), static_cast<int>(d.ny),
                            static_cast<int>(d.nx), p, p, FFTW_FORWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  pp.bwd = fftw_plan_dft_3d(static_cast<int>(d.nz), static_cast<int>(d.ny),
                            static_cast<int>(d.nx), p, p, FFTW_BACKWARD,
                            FFTW_ESTIMATE | FFTW_UNALIGNED);
  plan_cache().emplace(key, pp);
  return pp;
}

}  // namespace

void fft3(const Dims3& dims, const cplx* in, cplx* out) {
  PlanPair pp = plans_for(dims);
  if (in != out) std::memcpy(out, in, dims.nvox() * sizeof(cplx));
  auto* p = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(pp.fwd, p, p);
}

void ifft3(const Dims3& dims, const cplx* in, cplx* out) {
  PlanPair pp = plans_for(dims);
  if (in != out) std::memcpy(out, in, dims.nvox() * sizeof(cplx));
  auto* p = reinterpret_cast<fftw_complex*>(out);
  fftw_execute_dft(pp.bwd, p, p);
  const double scale = 1.0 / static_cast<double>(dims.nvox());
  for (std::size_t i = 0; i < dims.nvox(); ++i) out[i] *= scale;
}

}  // namespace orient3d
