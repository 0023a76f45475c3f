#pragma once

#include "hspa/image.hpp"

#include <cstddef>

namespace hspa {

/// 10 log10(1 / MSE) on luma in [0, 1]; +infinity for identical inputs.
double psnr(const Image& a, const Image& b);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimK1 = 0.01;
inline constexpr double kSsimK2 = 0.03;

/// Mean SSIM over all positions where the 11x11 Gaussian window (sigma 1.5)
/// fits entirely inside the image; dynamic range 1. Images must be at least 11x11.
double ssim(const Image& a, const Image& b);

} // namespace hspa
