#pragma once

#include <map>
#include <string>
#include <vector>

#include "pgvba/image.hpp"

namespace pgvba {

/// Reads a 2-D image: 8/16-bit binary PGM (P5) or grayscale PFM (Pf).
/// The format is sniffed from the magic, not the extension.
Image read_image(const std::string& path);

/// 32-bit little-endian float map ("Pf" header). Round-trips restoration
/// intermediates without quantization.
void write_pfm(const std::string& path, const Image& img);

/// 16-bit binary PGM; values are clamped to [0, 65535] and rounded.
void write_pgm16(const std::string& path, const Image& img);

/// Picks the writer from the extension (.pgm -> 16-bit PGM, else PFM).
void write_image(const std::string& path, const Image& img);

/// Flat key=value sidecar files.
using Metadata = std::map<std::string, std::string>;
Metadata read_metadata(const std::string& path);
void write_metadata(const std::string& path, const Metadata& meta);

/// NLTV weight tensor: width x height x directions, float64, bit-exact
/// round-trip.
struct WeightFile {
  int width = 0;
  int height = 0;
  int directions = 0;
  std::vector<double> weights;  // pixel-major
};
WeightFile read_weights(const std::string& path);
void write_weights(const std::string& path, const WeightFile& wf);

}  // namespace pgvba
