#include "doctest.h"
#include "oracles.hpp"

#include "hspa/image.hpp"
#include "hspa/metrics.hpp"
#include "hspa/resample.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace hspa;

namespace {

std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / "hspa_image_test";
    std::filesystem::create_directories(dir);
    return dir / name;
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes)
{
    std::ofstream out(p, std::ios::binary);
    out << bytes;
}

Image random_image(std::size_t w, std::size_t h, std::uint64_t seed)
{
    oracle::SplitMix rng(seed, 0);
    Image img(w, h);
    for (auto& v : img.luma) {
        v = rng.uniform();
    }
    return img;
}

} // namespace

TEST_CASE("netpbm: 8-bit round trip is lossless")
{
    Image gray(5, 3);
    for (std::size_t i = 0; i < gray.pixels(); ++i) {
        gray.luma[i] = static_cast<double>((i * 37) % 256) / 255.0;
    }
    save_image(gray, scratch("g.pgm"));
    const Image g2 = load_image(scratch("g.pgm"));
    CHECK(g2.width == 5);
    CHECK(g2.height == 3);
    CHECK_FALSE(g2.has_rgb());
    CHECK(g2.luma == gray.luma);

    Image color(4, 2);
    color.rgb.resize(24);
    for (std::size_t i = 0; i < 24; ++i) {
        color.rgb[i] = static_cast<double>((i * 53 + 7) % 256) / 255.0;
    }
    save_image(color, scratch("c.ppm"));
    const Image c2 = load_image(scratch("c.ppm"));
    REQUIRE(c2.has_rgb());
    CHECK(c2.rgb == color.rgb);
    save_image(c2, scratch("c2.ppm"));
    CHECK(load_image(scratch("c2.ppm")).rgb == c2.rgb);
}

TEST_CASE("netpbm: ASCII variants and BT.601 luma")
{
    write_bytes(scratch("white.ppm"), "P3\n# comment\n2 1\n255\n255 255 255 255 255 255\n");
    const Image white = load_image(scratch("white.ppm"));
    CHECK(white.luma[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(white.luma[1] == doctest::Approx(1.0).epsilon(1e-15));

    write_bytes(scratch("red.ppm"), std::string("P6\n1 1\n255\n") + '\xff' + '\0' + '\0');
    CHECK(load_image(scratch("red.ppm")).luma[0] == doctest::Approx(0.299).epsilon(1e-15));

    write_bytes(scratch("a.pgm"), "P2 3 1 255 0 51 255");
    const Image a = load_image(scratch("a.pgm"));
    CHECK(a.luma == std::vector<double>{0.0, 0.2, 1.0});
}

TEST_CASE("netpbm: malformed inputs are rejected")
{
    write_bytes(scratch("bad_magic.pgm"), "P7\n1 1\n255\n\0");
    CHECK_THROWS_AS(load_image(scratch("bad_magic.pgm")), std::runtime_error);
    write_bytes(scratch("trunc.pgm"), "P5\n4 4\n255\n\x01\x02");
    CHECK_THROWS_AS(load_image(scratch("trunc.pgm")), std::runtime_error);
    write_bytes(scratch("deep.pgm"), "P2\n1 1\n65535\n1000\n");
    CHECK_THROWS_AS(load_image(scratch("deep.pgm")), std::runtime_error);
    write_bytes(scratch("header.pgm"), "P5\n4 x\n255\n");
    CHECK_THROWS_AS(load_image(scratch("header.pgm")), std::runtime_error);
    write_bytes(scratch("range.pgm"), "P2\n1 1\n255\n300\n");
    CHECK_THROWS_AS(load_image(scratch("range.pgm")), std::runtime_error);
    CHECK_THROWS_AS(load_image(scratch("missing.pgm")), std::runtime_error);
}

TEST_CASE("YCbCr split and merge invert each other")
{
    Image color(3, 3);
    oracle::SplitMix rng(2, 0);
    color.rgb.resize(27);
    for (auto& v : color.rgb) {
        v = rng.uniform();
    }
    const auto planes = split_ycbcr(color);
    const Image back = merge_ycbcr(planes.y, planes.cb, planes.cr);
    for (std::size_t i = 0; i < 27; ++i) {
        CHECK(back.rgb[i] == doctest::Approx(color.rgb[i]).epsilon(2e-3));
    }
    CHECK_THROWS_AS(split_ycbcr(Image(2, 2)), std::invalid_argument);
}

TEST_CASE("degrade: constants survive, scale 1 is identity")
{
    const Image flat(24, 18, 0.37);
    for (const auto kind : {DegradationKind::bicubic, DegradationKind::blur_bicubic}) {
        for (const std::size_t scale : {1u, 2u, 3u}) {
            const Image out = degrade(flat, DegradationSpec{kind, 1.6, scale});
            CHECK(out.width == 24 / scale);
            CHECK(out.height == 18 / scale);
            for (const double v : out.luma) {
                CHECK(v == doctest::Approx(0.37).epsilon(1e-14));
            }
        }
    }
    const Image img = random_image(9, 7, 3);
    CHECK(degrade(img, DegradationSpec{DegradationKind::bicubic, 1.6, 1}).luma == img.luma);
    CHECK_THROWS_AS(degrade(img, DegradationSpec{DegradationKind::bicubic, 1.6, 2}), std::invalid_argument);
    CHECK_THROWS_AS(degrade(crop_to_multiple(img, 2), DegradationSpec{DegradationKind::blur_bicubic, 0.0, 2}),
                    std::invalid_argument);
    CHECK(crop_to_multiple(img, 2).width == 8);
    CHECK(crop_to_multiple(img, 2).height == 6);
}

TEST_CASE("gaussian_blur: a delta reproduces the normalised kernel")
{
    const double sigma = 1.6;
    const std::size_t size = 31;
    Image delta(size, size, 0.0);
    delta.at(15, 15) = 1.0;
    const Image out = gaussian_blur(delta, sigma);

    const int radius = static_cast<int>(std::ceil(4.0 * sigma));
    double norm = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        norm += std::exp(-0.5 * i * i / (sigma * sigma));
    }
    const auto g = [&](int i) { return std::exp(-0.5 * i * i / (sigma * sigma)) / norm; };
    CHECK(out.at(15, 15) == doctest::Approx(g(0) * g(0)).epsilon(1e-12));
    CHECK(out.at(17, 14) == doctest::Approx(g(2) * g(1)).epsilon(1e-12));
    CHECK(out.at(15 + radius, 15) == doctest::Approx(g(radius) * g(0)).epsilon(1e-10));
    CHECK(out.at(15 + radius + 1, 15) == 0.0);
    double total = 0.0;
    for (const double v : out.luma) {
        total += v;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(gaussian_kernel(sigma).size() == static_cast<std::size_t>(2 * radius + 1));
}

TEST_CASE("upsample_bicubic: checkerboard against a direct 2-D kernel sum")
{
    Image checker(2, 2);
    checker.luma = {0.0, 1.0, 1.0, 0.0};
    for (const std::size_t scale : {2u, 3u, 4u}) {
        const Image up = upsample_bicubic(checker, scale);
        const auto want = oracle::upsample_kernel_sum(checker.luma, 2, 2, static_cast<long>(scale));
        REQUIRE(up.luma.size() == want.size());
        for (std::size_t i = 0; i < want.size(); ++i) {
            CHECK(std::abs(up.luma[i] - want[i]) <= 1e-12);
        }
    }
    const Image img = random_image(7, 5, 11);
    const Image up = upsample_bicubic(img, 3);
    const auto want = oracle::upsample_kernel_sum(img.luma, 7, 5, 3);
    for (std::size_t i = 0; i < want.size(); ++i) {
        CHECK(std::abs(up.luma[i] - want[i]) <= 1e-12);
    }
    CHECK(upsample_bicubic(img, 1).luma == img.luma);
    for (const double v : upsample_bicubic(Image(5, 4, 0.61), 4).luma) {
        CHECK(v == doctest::Approx(0.61).epsilon(1e-14));
    }
}

TEST_CASE("cubic kernel and border indexing")
{
    CHECK(cubic_kernel(0.0) == 1.0);
    CHECK(cubic_kernel(1.0) == 0.0);
    CHECK(cubic_kernel(2.0) == 0.0);
    CHECK(cubic_kernel(0.5) == doctest::Approx(oracle::keys_cubic(0.5)));
    CHECK(cubic_kernel(-1.5) == doctest::Approx(oracle::keys_cubic(-1.5)));
    CHECK(reflect_index(-1, 5) == 1);
    CHECK(reflect_index(5, 5) == 3);
    CHECK(symmetric_index(-1, 5) == 0);
    CHECK(symmetric_index(5, 5) == 4);
    CHECK(reflect_index(-7, 1) == 0);
}

TEST_CASE("psnr and ssim: analytic cases")
{
    const Image a = random_image(16, 16, 1);
    CHECK(psnr(a, a) == std::numeric_limits<double>::infinity());
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-15));

    Image lo(16, 16, 0.3);
    Image hi(16, 16, 0.4);
    CHECK(psnr(lo, hi) == doctest::Approx(20.0).epsilon(1e-12));

    CHECK_THROWS_AS(psnr(a, Image(16, 15)), std::invalid_argument);
    CHECK_THROWS_AS(ssim(Image(10, 10), Image(10, 10)), std::invalid_argument);
}

TEST_CASE("psnr and ssim: random pairs against scalar-loop implementations")
{
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t w = 11 + seed * 3;
        const std::size_t h = 11 + seed * 2;
        const Image a = random_image(w, h, 100 + seed);
        Image b = a;
        oracle::SplitMix rng(200 + seed, 0);
        for (auto& v : b.luma) {
            v = std::clamp(v + 0.2 * (rng.uniform() - 0.5), 0.0, 1.0);
        }
        CHECK(std::abs(psnr(a, b) - oracle::psnr_loop(a.luma, b.luma)) <= 1e-9);
        CHECK(std::abs(ssim(a, b) - oracle::ssim_loop(a.luma, b.luma, static_cast<long>(w),
                                                     static_cast<long>(h))) <= 1e-9);
    }
}
