#include "hspa/resample.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hspa {

std::ptrdiff_t reflect_index(std::ptrdiff_t i, std::ptrdiff_t n)
{
    if (n == 1) {
        return 0;
    }
    const std::ptrdiff_t period = 2 * (n - 1);
    i %= period;
    if (i < 0) {
        i += period;
    }
    return i < n ? i : period - i;
}

std::ptrdiff_t symmetric_index(std::ptrdiff_t i, std::ptrdiff_t n)
{
    const std::ptrdiff_t period = 2 * n;
    i %= period;
    if (i < 0) {
        i += period;
    }
    return i < n ? i : period - 1 - i;
}

double cubic_kernel(double x, double a)
{
    const double ax = std::abs(x);
    if (ax <= 1.0) {
        return ((a + 2.0) * ax - (a + 3.0)) * ax * ax + 1.0;
    }
    if (ax < 2.0) {
        return ((a * ax - 5.0 * a) * ax + 8.0 * a) * ax - 4.0 * a;
    }
    return 0.0;
}

std::vector<double> gaussian_kernel(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("gaussian_kernel: sigma must be positive");
    }
    const auto radius = static_cast<std::ptrdiff_t>(std::ceil(4.0 * sigma));
    std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
    double total = 0.0;
    for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
        const double w = std::exp(-static_cast<double>(t * t) / (2.0 * sigma * sigma));
        taps[static_cast<std::size_t>(t + radius)] = w;
        total += w;
    }
    for (double& w : taps) {
        w /= total;
    }
    return taps;
}

namespace {

void require_nonempty(const Image& img, const char* where)
{
    if (img.width == 0 || img.height == 0 || img.luma.size() != img.pixels()) {
        throw std::invalid_argument(std::string(where) + ": empty or malformed image");
    }
}

struct Tap {
    std::size_t index;
    double weight;
};

// Per output sample, the normalised input taps along one axis.
std::vector<std::vector<Tap>> resize_weights(std::size_t in, std::size_t out)
{
    const double factor = static_cast<double>(out) / static_cast<double>(in);
    const double kernel_scale = std::min(1.0, factor);
    const double support = 2.0 / kernel_scale;
    std::vector<std::vector<Tap>> table(out);
    for (std::size_t o = 0; o < out; ++o) {
        const double u = (static_cast<double>(o) + 0.5) / factor - 0.5;
        const auto first = static_cast<std::ptrdiff_t>(std::floor(u - support));
        const auto last = static_cast<std::ptrdiff_t>(std::ceil(u + support));
        double total = 0.0;
        std::vector<Tap>& taps = table[o];
        for (std::ptrdiff_t i = first; i <= last; ++i) {
            const double w = kernel_scale * cubic_kernel(kernel_scale * (u - static_cast<double>(i)));
            if (w == 0.0) {
                continue;
            }
            taps.push_back({static_cast<std::size_t>(symmetric_index(i, static_cast<std::ptrdiff_t>(in))), w});
            total += w;
        }
        for (Tap& t : taps) {
            t.weight /= total;
        }
    }
    return table;
}

} // namespace

Image gaussian_blur(const Image& img, double sigma)
{
    require_nonempty(img, "gaussian_blur");
    const std::vector<double> taps = gaussian_kernel(sigma);
    const auto radius = static_cast<std::ptrdiff_t>(taps.size() / 2);
    const auto w = static_cast<std::ptrdiff_t>(img.width);
    const auto h = static_cast<std::ptrdiff_t>(img.height);

    Image tmp(img.width, img.height);
    for (std::ptrdiff_t y = 0; y < h; ++y) {
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
                acc += taps[static_cast<std::size_t>(t + radius)] *
                       img.luma[static_cast<std::size_t>(y * w + reflect_index(x + t, w))];
            }
            tmp.luma[static_cast<std::size_t>(y * w + x)] = acc;
        }
    }
    Image out(img.width, img.height);
    for (std::ptrdiff_t y = 0; y < h; ++y) {
        for (std::ptrdiff_t x = 0; x < w; ++x) {
            double acc = 0.0;
            for (std::ptrdiff_t t = -radius; t <= radius; ++t) {
                acc += taps[static_cast<std::size_t>(t + radius)] *
                       tmp.luma[static_cast<std::size_t>(reflect_index(y + t, h) * w + x)];
            }
            out.luma[static_cast<std::size_t>(y * w + x)] = acc;
        }
    }
    return out;
}

Image resize_bicubic(const Image& img, std::size_t out_width, std::size_t out_height)
{
    require_nonempty(img, "resize_bicubic");
    if (out_width == 0 || out_height == 0) {
        throw std::invalid_argument("resize_bicubic: output dimensions must be >= 1");
    }
    const auto wx = resize_weights(img.width, out_width);
    const auto wy = resize_weights(img.height, out_height);

    Image horizontal(out_width, img.height);
    for (std::size_t y = 0; y < img.height; ++y) {
        for (std::size_t x = 0; x < out_width; ++x) {
            double acc = 0.0;
            for (const Tap& t : wx[x]) {
                acc += t.weight * img.luma[y * img.width + t.index];
            }
            horizontal.luma[y * out_width + x] = acc;
        }
    }
    Image out(out_width, out_height);
    for (std::size_t y = 0; y < out_height; ++y) {
        for (std::size_t x = 0; x < out_width; ++x) {
            double acc = 0.0;
            for (const Tap& t : wy[y]) {
                acc += t.weight * horizontal.luma[t.index * out_width + x];
            }
            out.luma[y * out_width + x] = acc;
        }
    }
    return out;
}

std::string_view to_string(DegradationKind kind)
{
    return kind == DegradationKind::bicubic ? "bicubic" : "blur_bicubic";
}

DegradationKind parse_degradation_kind(std::string_view name)
{
    if (name == "bicubic") {
        return DegradationKind::bicubic;
    }
    if (name == "blur_bicubic") {
        return DegradationKind::blur_bicubic;
    }
    throw std::invalid_argument("unknown degradation '" + std::string(name) +
                                "' (expected bicubic or blur_bicubic)");
}

Image crop_to_multiple(const Image& img, std::size_t scale)
{
    require_nonempty(img, "crop_to_multiple");
    if (scale == 0) {
        throw std::invalid_argument("crop_to_multiple: scale must be >= 1");
    }
    const std::size_t w = img.width - img.width % scale;
    const std::size_t h = img.height - img.height % scale;
    if (w == 0 || h == 0) {
        throw std::invalid_argument("crop_to_multiple: image smaller than the scale factor");
    }
    Image out(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            out.luma[y * w + x] = img.luma[y * img.width + x];
        }
    }
    if (img.has_rgb()) {
        out.rgb.resize(3 * w * h);
        for (std::size_t y = 0; y < h; ++y) {
            for (std::size_t x = 0; x < w; ++x) {
                for (std::size_t c = 0; c < 3; ++c) {
                    out.rgb[3 * (y * w + x) + c] = img.rgb[3 * (y * img.width + x) + c];
                }
            }
        }
    }
    return out;
}

Image degrade(const Image& img, const DegradationSpec& spec)
{
    require_nonempty(img, "degrade");
    if (spec.scale == 0) {
        throw std::invalid_argument("degrade: scale must be >= 1");
    }
    if (img.width % spec.scale != 0 || img.height % spec.scale != 0) {
        throw std::invalid_argument("degrade: dimensions " + std::to_string(img.width) + "x" +
                                    std::to_string(img.height) + " are not multiples of scale " +
                                    std::to_string(spec.scale) + "; crop first");
    }
    Image source;
    if (spec.kind == DegradationKind::blur_bicubic) {
        source = gaussian_blur(img, spec.gaussian_sigma);
    } else {
        source = Image(img.width, img.height);
        source.luma = img.luma;
    }
    if (spec.scale == 1) {
        return source;
    }
    return resize_bicubic(source, img.width / spec.scale, img.height / spec.scale);
}

Image upsample_bicubic(const Image& img, std::size_t scale)
{
    if (scale == 0) {
        throw std::invalid_argument("upsample_bicubic: scale must be >= 1");
    }
    return resize_bicubic(img, img.width * scale, img.height * scale);
}

} // namespace hspa
