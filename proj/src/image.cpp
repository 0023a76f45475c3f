#include "hspa/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>

namespace hspa {

Image::Image(std::size_t w, std::size_t h, double fill) : width(w), height(h), luma(w * h, fill)
{
}

double bt601_luma(double r, double g, double b)
{
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

YCbCrPlanes split_ycbcr(const Image& src)
{
    if (!src.has_rgb()) {
        throw std::invalid_argument("split_ycbcr: image has no colour data");
    }
    YCbCrPlanes p{Image(src.width, src.height), Image(src.width, src.height),
                  Image(src.width, src.height)};
    for (std::size_t i = 0; i < src.pixels(); ++i) {
        const double r = src.rgb[3 * i];
        const double g = src.rgb[3 * i + 1];
        const double b = src.rgb[3 * i + 2];
        const double y = bt601_luma(r, g, b);
        p.y.luma[i] = y;
        p.cb.luma[i] = 0.5 + 0.564 * (b - y);
        p.cr.luma[i] = 0.5 + 0.713 * (r - y);
    }
    return p;
}

Image merge_ycbcr(const Image& y, const Image& cb, const Image& cr)
{
    if (y.width != cb.width || y.width != cr.width || y.height != cb.height ||
        y.height != cr.height) {
        throw std::invalid_argument("merge_ycbcr: plane dimensions differ");
    }
    Image out(y.width, y.height);
    out.rgb.resize(3 * y.pixels());
    const auto clamp01 = [](double v) { return std::clamp(v, 0.0, 1.0); };
    for (std::size_t i = 0; i < y.pixels(); ++i) {
        const double cbv = cb.luma[i] - 0.5;
        const double crv = cr.luma[i] - 0.5;
        const double r = clamp01(y.luma[i] + 1.402 * crv);
        const double g = clamp01(y.luma[i] - 0.344136 * cbv - 0.714136 * crv);
        const double b = clamp01(y.luma[i] + 1.772 * cbv);
        out.rgb[3 * i] = r;
        out.rgb[3 * i + 1] = g;
        out.rgb[3 * i + 2] = b;
        out.luma[i] = bt601_luma(r, g, b);
    }
    return out;
}

namespace {

class PnmReader {
public:
    PnmReader(std::string bytes, std::string origin) : bytes_(std::move(bytes)), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& what) const
    {
        throw std::runtime_error(origin_ + ": " + what);
    }

    void skip_space_and_comments()
    {
        while (pos_ < bytes_.size()) {
            const auto c = static_cast<unsigned char>(bytes_[pos_]);
            if (c == '#') {
                while (pos_ < bytes_.size() && bytes_[pos_] != '\n') {
                    ++pos_;
                }
            } else if (std::isspace(c)) {
                ++pos_;
            } else {
                break;
            }
        }
    }

    std::size_t read_number(const char* what)
    {
        skip_space_and_comments();
        const std::size_t start = pos_;
        std::size_t value = 0;
        while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) {
            value = value * 10 + static_cast<std::size_t>(bytes_[pos_] - '0');
            if (value > 1'000'000'000) {
                fail(std::string("value too large for ") + what);
            }
            ++pos_;
        }
        if (pos_ == start) {
            fail(pos_ >= bytes_.size() ? std::string("truncated data while reading ") + what
                                       : std::string("malformed ") + what);
        }
        return value;
    }

    std::string magic()
    {
        if (bytes_.size() < 2 || bytes_[0] != 'P') {
            fail("not a netpbm file");
        }
        pos_ = 2;
        return bytes_.substr(0, 2);
    }

    // Exactly one whitespace byte separates the header from binary data.
    void end_header()
    {
        if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
            fail("missing whitespace after header");
        }
        ++pos_;
    }

    unsigned char read_byte()
    {
        if (pos_ >= bytes_.size()) {
            fail("truncated binary payload");
        }
        return static_cast<unsigned char>(bytes_[pos_++]);
    }

private:
    std::string bytes_;
    std::string origin_;
    std::size_t pos_ = 0;
};

} // namespace

Image load_image(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error(path.string() + ": cannot open for reading");
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    PnmReader reader(std::move(bytes), path.string());

    const std::string magic = reader.magic();
    const bool ascii = magic == "P2" || magic == "P3";
    const bool colour = magic == "P3" || magic == "P6";
    if (magic != "P2" && magic != "P3" && magic != "P5" && magic != "P6") {
        reader.fail("unsupported format " + magic + " (expected P2, P3, P5 or P6)");
    }
    const std::size_t width = reader.read_number("width");
    const std::size_t height = reader.read_number("height");
    const std::size_t maxval = reader.read_number("maxval");
    if (width == 0 || height == 0) {
        reader.fail("image dimensions must be >= 1");
    }
    if (maxval != 255) {
        reader.fail("unsupported maxval " + std::to_string(maxval) + " (only 255 is supported)");
    }
    if (!ascii) {
        reader.end_header();
    }

    const std::size_t channels = colour ? 3 : 1;
    std::vector<double> samples(width * height * channels);
    for (auto& v : samples) {
        std::size_t raw = 0;
        if (ascii) {
            raw = reader.read_number("sample");
            if (raw > maxval) {
                reader.fail("sample exceeds maxval");
            }
        } else {
            raw = reader.read_byte();
        }
        v = static_cast<double>(raw) / 255.0;
    }

    Image img(width, height);
    if (colour) {
        img.rgb = std::move(samples);
        for (std::size_t i = 0; i < img.pixels(); ++i) {
            img.luma[i] = bt601_luma(img.rgb[3 * i], img.rgb[3 * i + 1], img.rgb[3 * i + 2]);
        }
    } else {
        img.luma = std::move(samples);
    }
    return img;
}

void save_image(const Image& img, const std::filesystem::path& path)
{
    if (img.width == 0 || img.height == 0 || img.luma.size() != img.pixels()) {
        throw std::invalid_argument("save_image: malformed image");
    }
    const bool colour = img.has_rgb();
    const std::vector<double>& src = colour ? img.rgb : img.luma;
    std::string payload;
    payload.reserve(src.size());
    for (const double v : src) {
        const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
        payload.push_back(static_cast<char>(static_cast<unsigned char>(q)));
    }

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error(path.string() + ": cannot open for writing");
    }
    out << (colour ? "P6" : "P5") << '\n' << img.width << ' ' << img.height << "\n255\n";
    out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
    out.flush();
    if (!out) {
        throw std::runtime_error(path.string() + ": write failed");
    }
}

} // namespace hspa
