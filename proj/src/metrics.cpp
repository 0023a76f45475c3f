#include "hspa/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <stdexcept>
#include <vector>

namespace hspa {

namespace {

void require_same_shape(const Image& a, const Image& b, const char* where)
{
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a.width) + "x" + std::to_string(a.height) +
                                    " vs " + std::to_string(b.width) + "x" +
                                    std::to_string(b.height) + ")");
    }
    if (a.pixels() == 0) {
        throw std::invalid_argument(std::string(where) + ": empty image");
    }
}

std::vector<double> ssim_taps()
{
    constexpr int radius = static_cast<int>(kSsimWindow / 2);
    std::vector<double> taps(kSsimWindow);
    double total = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        taps[static_cast<std::size_t>(t + radius)] =
            std::exp(-static_cast<double>(t * t) / (2.0 * kSsimSigma * kSsimSigma));
        total += taps[static_cast<std::size_t>(t + radius)];
    }
    for (double& w : taps) {
        w /= total;
    }
    return taps;
}

// "Valid" separable filtering: output is (w - 10) x (h - 10).
std::vector<double> filter_valid(const std::vector<double>& src, std::size_t w, std::size_t h,
                                 const std::vector<double>& taps)
{
    const std::size_t n = taps.size();
    const std::size_t ow = w - n + 1;
    const std::size_t oh = h - n + 1;
    std::vector<double> rows(ow * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                acc += taps[t] * src[y * w + x + t];
            }
            rows[y * ow + x] = acc;
        }
    }
    std::vector<double> out(ow * oh);
    for (std::size_t y = 0; y < oh; ++y) {
        for (std::size_t x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (std::size_t t = 0; t < n; ++t) {
                acc += taps[t] * rows[(y + t) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    return out;
}

} // namespace

double psnr(const Image& a, const Image& b)
{
    require_same_shape(a, b, "psnr");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.pixels(); ++i) {
        const double d = a.luma[i] - b.luma[i];
        sum += d * d;
    }
    const double mse = sum / static_cast<double>(a.pixels());
    if (mse == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Image& a, const Image& b)
{
    require_same_shape(a, b, "ssim");
    if (a.width < kSsimWindow || a.height < kSsimWindow) {
        throw std::invalid_argument("ssim: images must be at least 11x11");
    }
    const std::vector<double> taps = ssim_taps();
    const std::size_t n = a.pixels();
    std::vector<double> xx(n), yy(n), xy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = a.luma[i] * a.luma[i];
        yy[i] = b.luma[i] * b.luma[i];
        xy[i] = a.luma[i] * b.luma[i];
    }
    const auto mu_x = filter_valid(a.luma, a.width, a.height, taps);
    const auto mu_y = filter_valid(b.luma, a.width, a.height, taps);
    const auto e_xx = filter_valid(xx, a.width, a.height, taps);
    const auto e_yy = filter_valid(yy, a.width, a.height, taps);
    const auto e_xy = filter_valid(xy, a.width, a.height, taps);

    const double c1 = kSsimK1 * kSsimK1;
    const double c2 = kSsimK2 * kSsimK2;
    double total = 0.0;
    for (std::size_t i = 0; i < mu_x.size(); ++i) {
        const double mx = mu_x[i];
        const double my = mu_y[i];
        const double vx = e_xx[i] - mx * mx;
        const double vy = e_yy[i] - my * my;
        const double cxy = e_xy[i] - mx * my;
        total += ((2.0 * mx * my + c1) * (2.0 * cxy + c2)) /
                 ((mx * mx + my * my + c1) * (vx + vy + c2));
    }
    return total / static_cast<double>(mu_x.size());
}

} // namespace hspa
