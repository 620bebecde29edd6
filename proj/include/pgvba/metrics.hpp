#pragma once

#include "pgvba/image.hpp"

namespace pgvba {

/// 20 log10(||reference|| / ||reference - estimate||) in dB.
/// Identical images return +infinity; a zero reference throws.
double snr_db(const Image& reference, const Image& estimate);

/// Mean local structural similarity with an 11x11 Gaussian window
/// (std 1.5) and the standard constants K1=0.01, K2=0.03.
double ssim(const Image& reference, const Image& estimate, double dynamic_range);

}  // namespace pgvba
