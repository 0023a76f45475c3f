#include "hspa/synthetic.hpp"

#include <cmath>
#include <numbers>

namespace hspa {

Image make_stripes(std::size_t width, std::size_t height, double period, double angle_degrees)
{
    Image img(width, height);
    const double t = angle_degrees * std::numbers::pi / 180.0;
    const double c = std::cos(t);
    const double s = std::sin(t);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            const double phase = (static_cast<double>(x) * c + static_cast<double>(y) * s) / period;
            img.at(x, y) = 0.5 + 0.4 * std::sin(2.0 * std::numbers::pi * phase);
        }
    }
    return img;
}

Image make_checkerboard(std::size_t width, std::size_t height, std::size_t cell, double low,
                        double high)
{
    Image img(width, height);
    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            img.at(x, y) = ((x / cell + y / cell) % 2 == 0) ? low : high;
        }
    }
    return img;
}

Image make_bricks(std::size_t width, std::size_t height, std::size_t brick_w, std::size_t brick_h)
{
    constexpr double mortar = 0.25;
    constexpr double brick = 0.75;
    Image img(width, height);
    for (std::size_t y = 0; y < height; ++y) {
        const std::size_t course = y / brick_h;
        const std::size_t offset = (course % 2 == 1) ? brick_w / 2 : 0;
        for (std::size_t x = 0; x < width; ++x) {
            const bool bed_joint = y % brick_h == brick_h - 1;
            const bool head_joint = (x + offset) % brick_w == brick_w - 1;
            img.at(x, y) = (bed_joint || head_joint) ? mortar : brick;
        }
    }
    return img;
}

std::vector<CorpusImage> synthetic_corpus(std::size_t size)
{
    return {
        {"stripes", make_stripes(size, size)},
        {"checkerboard", make_checkerboard(size, size)},
        {"bricks", make_bricks(size, size)},
    };
}

} // namespace hspa
