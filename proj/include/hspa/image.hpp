#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace hspa {

/// Raster with samples in [0, 1]. `luma` is always populated; `rgb` is
/// interleaved R,G,B and only present for colour sources.
struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> luma;
    std::vector<double> rgb;

    Image() = default;
    Image(std::size_t w, std::size_t h, double fill = 0.0);

    bool has_rgb() const { return !rgb.empty(); }
    std::size_t pixels() const { return width * height; }

    double& at(std::size_t x, std::size_t y) { return luma[y * width + x]; }
    double at(std::size_t x, std::size_t y) const { return luma[y * width + x]; }
};

/// BT.601 luma: 0.299 R + 0.587 G + 0.114 B.
double bt601_luma(double r, double g, double b);

/// Full-range YCbCr planes of a colour image (chroma centred on 0.5).
struct YCbCrPlanes {
    Image y;
    Image cb;
    Image cr;
};
YCbCrPlanes split_ycbcr(const Image& rgb_image);
/// Inverse of split_ycbcr; the result carries clamped rgb and recomputed luma.
Image merge_ycbcr(const Image& y, const Image& cb, const Image& cr);

/// Reads PGM (P2/P5) or PPM (P3/P6) with maxval 255.
/// Throws std::runtime_error on malformed headers, truncated data or other maxvals.
Image load_image(const std::filesystem::path& path);

/// Writes P6 when the image has rgb, otherwise P5. Samples are clamped to
/// [0, 1] and rounded to 8 bits.
void save_image(const Image& img, const std::filesystem::path& path);

} // namespace hspa
