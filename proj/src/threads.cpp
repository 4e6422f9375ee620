#include "orient3d/threads.hpp"

#include <omp.h>

#include <cstdlib>
#include <string>

namespace orient3d {

namespace {

int resolve_default() {
  if (const char* env = std::getenv("ORIENT3D_THREADS")) {
    try {
      int n = std::stoi(env);
      if (n > 0) return n;
    } catch (...) {
      // ignore unparsable values, fall through to the OpenMP default
    }
  }
  return omp_get_max_threads();
}

int g_threads = 0;  // 0 = not resolved yet

}  // namespace

void set_threads(int n) { g_threads = n > 0 ? n : resolve_default(); }

int threads() {
  if (g_threads == 0) g_threads = resolve_default();
  return g_threads;
}

}  // namespace orient3d
