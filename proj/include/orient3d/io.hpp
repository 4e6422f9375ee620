#pragma once

#include <string>

#include "orient3d/cakewavelet.hpp"
#include "orient3d/oscore.hpp"

namespace orient3d {

// Binary container, shared by all three file kinds:
//   bytes 0-7   magic: "OS3DVOL\0" | "OS3DSTK\0" | "OS3DSCR\0"
//   u32 LE      format version (currently 1)
//   u32 LE      header length in bytes
//   ...         UTF-8 JSON header (dims, grid metadata, parameters,
//               orientation table where applicable, command-line manifest)
//   ...         little-endian payload: real32 = float per sample;
//               complex64 = float64 re, float64 im per sample (lossless).
// Volumes with kind==real store real32; complex volumes, stacks and scores
// store complex64. Writes go to a temp file in the target directory and are
// renamed into place. Readers validate magic, version, header shape and
// payload size, and reject non-finite samples.

void write_volume(const Volume& v, const std::string& path, const std::string& manifest);
Volume read_volume(const std::string& path, std::string* manifest = nullptr);

void write_stack(const WaveletStack& s, const std::string& path, const std::string& manifest);
WaveletStack read_stack(const std::string& path, std::string* manifest = nullptr);

void write_score(const OrientationScore& u, const std::string& path, const std::string& manifest);
OrientationScore read_score(const std::string& path, std::string* manifest = nullptr);

// First 8 bytes of a container file, for kind dispatch ("" if unreadable).
std::string peek_magic(const std::string& path);

// Inspection exports (plain text, LF line endings, %.17g numbers).
void write_orientations_csv(const OrientationSet& set, const std::string& path);
void write_spectrum_csv(const ZonalSpectrum& s, const std::string& path);

// Banded profile of m_psi over |omega|: one row per radial bin
// (rho_lo,rho_hi,count,min,mean,max), preceded by comment lines with the
// global min/max over 0 < |omega| and the band minimum within
// |omega| <= fraction * rho_N.
void write_mpsi_csv(const WaveletStack& s, const std::string& path, int bins, double fraction);

enum class Part { real, imag, abs };

// Axis-aligned slice (axis in {x,y,z}, index within range) of one scalar part,
// written either as CSV rows or as a min-max normalized 8-bit binary PGM with
// a JSON sidecar (<path>.json) recording the normalization and slice geometry.
void write_slice_csv(const Volume& v, char axis, std::int64_t index, Part part,
                     const std::string& path);
void write_slice_pgm(const Volume& v, char axis, std::int64_t index, Part part,
                     const std::string& path);

}  // namespace orient3d
