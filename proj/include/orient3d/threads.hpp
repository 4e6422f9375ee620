#pragma once

namespace orient3d {

// Worker-thread cap. Defaults to the OpenMP default; the ORIENT3D_THREADS
// environment variable (read once at first use) overrides it. All outputs are
// bitwise independent of the thread count; this only trades speed.
void set_threads(int n);
int threads();

}  // namespace orient3d
