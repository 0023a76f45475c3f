#include "hspa/reconstruct.hpp"

#include "hspa/parallel.hpp"
#include "hspa/resample.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace hspa {

SearchSpace SearchSpace::parse(std::string_view text)
{
    if (text == "full") {
        return {SearchKind::full, 0};
    }
    constexpr std::string_view prefix = "window:";
    if (text.starts_with(prefix)) {
        const std::string_view digits = text.substr(prefix.size());
        std::size_t w = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), w);
        if (ec == std::errc() && ptr == digits.data() + digits.size() && w >= 1) {
            return {SearchKind::window, w};
        }
    }
    throw std::invalid_argument("invalid search space '" + std::string(text) +
                                "' (expected full or window:<w>)");
}

std::string SearchSpace::to_string() const
{
    return kind == SearchKind::full ? "full" : "window:" + std::to_string(window);
}

std::string_view to_string(PatchSimilarity similarity)
{
    return similarity == PatchSimilarity::distance ? "distance" : "dot";
}

PatchSimilarity parse_patch_similarity(std::string_view name)
{
    if (name == "distance") {
        return PatchSimilarity::distance;
    }
    if (name == "dot") {
        return PatchSimilarity::dot;
    }
    throw std::invalid_argument("unknown similarity '" + std::string(name) +
                                "' (expected distance or dot)");
}

void PatchConfig::validate() const
{
    if (stride < 1) {
        throw std::invalid_argument("PatchConfig: stride must be >= 1");
    }
    if (scale < 2 || scale > 4) {
        throw std::invalid_argument("PatchConfig: scale must be 2, 3 or 4");
    }
    if (search.kind == SearchKind::window && search.window < 2 * patch_radius + 1) {
        throw std::invalid_argument("PatchConfig: window must be at least 2r + 1");
    }
    if (similarity == PatchSimilarity::distance && !(bandwidth > 0.0)) {
        throw std::invalid_argument("PatchConfig: bandwidth must be positive");
    }
    mode.validate();
}

namespace {

// [first, first + span) clipped and shifted to stay inside [0, n).
std::pair<std::size_t, std::size_t> window_range(std::size_t center, std::size_t n, std::size_t w)
{
    const std::size_t span = std::min(w, n);
    const std::size_t half = w / 2;
    const std::size_t first = center > half ? center - half : 0;
    return {std::min(first, n - span), span};
}

class PaddedPlane {
public:
    PaddedPlane(const Image& img, std::size_t pad)
        : pad_(pad), stride_(img.width + 2 * pad), data_(stride_ * (img.height + 2 * pad))
    {
        const auto w = static_cast<std::ptrdiff_t>(img.width);
        const auto h = static_cast<std::ptrdiff_t>(img.height);
        const auto p = static_cast<std::ptrdiff_t>(pad);
        for (std::ptrdiff_t y = -p; y < h + p; ++y) {
            for (std::ptrdiff_t x = -p; x < w + p; ++x) {
                data_[static_cast<std::size_t>(y + p) * stride_ + static_cast<std::size_t>(x + p)] =
                    img.luma[static_cast<std::size_t>(reflect_index(y, h) * w + reflect_index(x, w))];
            }
        }
    }

    // Top-left of the patch centred on (x, y).
    const double* patch(std::size_t x, std::size_t y) const { return &data_[y * stride_ + x]; }
    std::size_t stride() const { return stride_; }

private:
    std::size_t pad_;
    std::size_t stride_;
    std::vector<double> data_;
};

void fill_similarities(const PaddedPlane& plane, std::size_t width, std::size_t x, std::size_t y,
                       const std::vector<std::size_t>& candidates, const PatchConfig& cfg,
                       std::vector<double>& out)
{
    const std::size_t side = 2 * cfg.patch_radius + 1;
    const double* q = plane.patch(x, y);
    const std::size_t stride = plane.stride();
    out.resize(candidates.size());
    const double scale = 1.0 / (2.0 * static_cast<double>(side * side) * cfg.bandwidth * cfg.bandwidth);
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double* k = plane.patch(candidates[c] % width, candidates[c] / width);
        double acc = 0.0;
        if (cfg.similarity == PatchSimilarity::distance) {
            for (std::size_t dy = 0; dy < side; ++dy) {
                for (std::size_t dx = 0; dx < side; ++dx) {
                    const double d = q[dy * stride + dx] - k[dy * stride + dx];
                    acc += d * d;
                }
            }
            out[c] = -acc * scale;
        } else {
            for (std::size_t dy = 0; dy < side; ++dy) {
                for (std::size_t dx = 0; dx < side; ++dx) {
                    acc += q[dy * stride + dx] * k[dy * stride + dx];
                }
            }
            out[c] = acc;
        }
    }
}

} // namespace

std::vector<std::size_t> search_candidates(std::size_t width, std::size_t height, std::size_t x,
                                           std::size_t y, const PatchConfig& cfg)
{
    std::size_t x0 = 0, y0 = 0, wx = width, wy = height;
    if (cfg.search.kind == SearchKind::window) {
        std::tie(x0, wx) = window_range(x, width, cfg.search.window);
        std::tie(y0, wy) = window_range(y, height, cfg.search.window);
    }
    std::vector<std::size_t> out;
    out.reserve(((wx + cfg.stride - 1) / cfg.stride) * ((wy + cfg.stride - 1) / cfg.stride));
    for (std::size_t yy = y0; yy < y0 + wy; yy += cfg.stride) {
        for (std::size_t xx = x0; xx < x0 + wx; xx += cfg.stride) {
            out.push_back(yy * width + xx);
        }
    }
    return out;
}

std::vector<double> patch_similarities(const Image& estimate, std::size_t x, std::size_t y,
                                       const std::vector<std::size_t>& candidates,
                                       const PatchConfig& cfg)
{
    cfg.validate();
    const PaddedPlane plane(estimate, cfg.patch_radius);
    std::vector<double> out;
    fill_similarities(plane, estimate.width, x, y, candidates, cfg, out);
    return out;
}

ReconstructionResult refine_estimate(const Image& estimate, const PatchConfig& cfg, unsigned threads)
{
    cfg.validate();
    if (estimate.pixels() == 0 || estimate.luma.size() != estimate.pixels()) {
        throw std::invalid_argument("refine_estimate: empty or malformed image");
    }
    const std::size_t width = estimate.width;
    const std::size_t pixels = estimate.pixels();
    const PaddedPlane plane(estimate, cfg.patch_radius);

    ReconstructionResult result;
    result.image = Image(width, estimate.height);
    std::vector<std::size_t> support(pixels, 0);
    std::vector<std::size_t> searched(pixels, 0);

    parallel_for(pixels, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<double> sims;
        for (std::size_t p = begin; p < end; ++p) {
            const std::size_t x = p % width;
            const std::size_t y = p / width;
            const std::vector<std::size_t> candidates = search_candidates(width, estimate.height, x, y, cfg);
            if (candidates.size() < 2) {
                throw std::invalid_argument("refine_estimate: search space has fewer than 2 candidates");
            }
            fill_similarities(plane, width, x, y, candidates, cfg, sims);
            const RowWeights row = weight_row(sims, cfg.mode, p);
            double acc = 0.0;
            std::size_t positive = 0;
            for (std::size_t i = 0; i < row.index.size(); ++i) {
                acc += row.weight[i] * estimate.luma[candidates[row.index[i]]];
                positive += row.weight[i] > 0.0 ? 1 : 0;
            }
            result.image.luma[p] = acc;
            support[p] = positive;
            searched[p] = candidates.size();
        }
    });

    double support_total = 0.0;
    double searched_total = 0.0;
    for (std::size_t p = 0; p < pixels; ++p) {
        support_total += static_cast<double>(support[p]);
        searched_total += static_cast<double>(searched[p]);
    }
    result.mean_support_size = support_total / static_cast<double>(pixels);
    result.mean_candidates = searched_total / static_cast<double>(pixels);
    return result;
}

ReconstructionResult reconstruct(const Image& lr, const PatchConfig& cfg, unsigned threads)
{
    cfg.validate();
    return refine_estimate(upsample_bicubic(lr, cfg.scale), cfg, threads);
}

} // namespace hspa
