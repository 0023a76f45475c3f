#pragma once

#include "hspa/image.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace hspa {

// Luma-only operations: inputs' rgb is ignored and outputs carry none.

/// Mirror index into [0, n) without repeating the edge sample (…c b | a b c…).
std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n);
/// Mirror index into [0, n) repeating the edge sample (…b a | a b…).
std::ptrdiff_t symmetric_index(std::ptrdiff_t i, std::ptrdiff_t n);

/// Keys cubic convolution kernel; a = -0.5 is Catmull-Rom.
double cubic_kernel(double x, double a = -0.5);

/// 1-D Gaussian taps over [-ceil(4 sigma), ceil(4 sigma)], normalised to sum 1.
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with reflect padding.
Image gaussian_blur(const Image& img, double sigma);

/// Separable bicubic resampling with pixel-centre alignment and symmetric
/// borders. When shrinking, the kernel is stretched by the inverse scale to
/// low-pass the input (the usual antialiased "imresize" behaviour).
Image resize_bicubic(const Image& img, std::size_t out_width, std::size_t out_height);

enum class DegradationKind { bicubic, blur_bicubic };

std::string_view to_string(DegradationKind kind);
DegradationKind parse_degradation_kind(std::string_view name);

inline constexpr double kDefaultBlurSigma = 1.6;

struct DegradationSpec {
    DegradationKind kind = DegradationKind::bicubic;
    double gaussian_sigma = kDefaultBlurSigma;
    std::size_t scale = 2;
};

/// Largest top-left crop whose sides are multiples of scale.
Image crop_to_multiple(const Image& img, std::size_t scale);

/// Optional Gaussian blur followed by bicubic decimation by spec.scale.
/// Dimensions must already be multiples of the scale.
Image degrade(const Image& img, const DegradationSpec& spec);

Image upsample_bicubic(const Image& img, std::size_t scale);

} // namespace hspa
