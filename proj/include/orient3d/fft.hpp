#pragma once

#include "orient3d/volume.hpp"

namespace orient3d {

// 3-D complex DFT, FFTW-backed. Convention: fft3 is the unnormalized forward
// transform, ifft3 applies the 1/N factor, so ifft3(fft3(x)) == x up to
// rounding. Plans are created with FFTW_ESTIMATE (deterministic plan choice)
// and cached per grid size; both calls are safe from concurrent threads.
void fft3(const Dims3& dims, const cplx* in, cplx* out);
void ifft3(const Dims3& dims, const cplx* in, cplx* out);

}  // namespace orient3d
