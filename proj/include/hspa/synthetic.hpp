#pragma once

#include "hspa/image.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace hspa {

/// Oblique sinusoidal stripes: 0.5 + 0.4 sin(2 pi (x cos t + y sin t) / period).
Image make_stripes(std::size_t width, std::size_t height, double period = 7.5,
                   double angle_degrees = 30.0);

/// Two-level checkerboard with square cells of `cell` pixels.
Image make_checkerboard(std::size_t width, std::size_t height, std::size_t cell = 6,
                        double low = 0.2, double high = 0.8);

/// Running-bond brick wall: bricks brick_w x brick_h with 1-pixel mortar joints,
/// alternate courses offset by half a brick.
Image make_bricks(std::size_t width, std::size_t height, std::size_t brick_w = 16,
                  std::size_t brick_h = 8);

struct CorpusImage {
    std::string name;
    Image image;
};

/// The 64x64 self-similar test corpus: stripes, checkerboard, bricks.
std::vector<CorpusImage> synthetic_corpus(std::size_t size = 64);

} // namespace hspa
