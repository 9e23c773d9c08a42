#include "uavcov/image.hpp"

#include "uavcov/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavcov::img {

GrayImage quantize(const GrayImage& image, int bits) {
    if (bits < 1 || bits > 8) throw std::invalid_argument("quantize: bits out of range [1,8]");
    if (bits == 8) return image;
    const int shift = 8 - bits;
    const int half = 1 << (shift - 1);
    GrayImage out = image;
    for (auto& p : out.pixels) {
        const int v = ((p >> shift) << shift) + half;
        p = static_cast<std::uint8_t>(std::min(v, 255));
    }
    return out;
}

double psnr(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("psnr: dimension mismatch");
    double se = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = static_cast<double>(a.pixels[i]) - static_cast<double>(b.pixels[i]);
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = se / static_cast<double>(a.pixels.size());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

struct BlockStats {
    double mean_a;
    double mean_b;
    double var_a;
    double var_b;
    double cov;
};

BlockStats block_stats(const GrayImage& a, const GrayImage& b, std::size_t x0, std::size_t y0) {
    constexpr std::size_t kBlock = 8;
    constexpr double kInvN = 1.0 / (kBlock * kBlock);
    double sa = 0.0, sb = 0.0;
    for (std::size_t y = y0; y < y0 + kBlock; ++y) {
        for (std::size_t x = x0; x < x0 + kBlock; ++x) {
            sa += a.at(x, y);
            sb += b.at(x, y);
        }
    }
    BlockStats st{};
    st.mean_a = sa * kInvN;
    st.mean_b = sb * kInvN;
    double va = 0.0, vb = 0.0, cab = 0.0;
    for (std::size_t y = y0; y < y0 + kBlock; ++y) {
        for (std::size_t x = x0; x < x0 + kBlock; ++x) {
            const double da = a.at(x, y) - st.mean_a;
            const double db = b.at(x, y) - st.mean_b;
            va += da * da;
            vb += db * db;
            cab += da * db;
        }
    }
    st.var_a = va * kInvN;
    st.var_b = vb * kInvN;
    st.cov = cab * kInvN;
    return st;
}

} // namespace

double ssim(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height)
        throw std::invalid_argument("ssim: dimension mismatch");
    if (a.width < 8 || a.height < 8)
        throw std::invalid_argument("ssim: images smaller than 8x8");
    constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
    constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
    double total = 0.0;
    std::size_t blocks = 0;
    for (std::size_t y0 = 0; y0 + 8 <= a.height; y0 += 8) {
        for (std::size_t x0 = 0; x0 + 8 <= a.width; x0 += 8) {
            const BlockStats st = block_stats(a, b, x0, y0);
            const double num = (2.0 * st.mean_a * st.mean_b + kC1) * (2.0 * st.cov + kC2);
            const double den = (st.mean_a * st.mean_a + st.mean_b * st.mean_b + kC1) *
                               (st.var_a + st.var_b + kC2);
            total += num / den;
            ++blocks;
        }
    }
    return total / static_cast<double>(blocks);
}

const std::vector<std::string>& builtin_image_names() {
    static const std::vector<std::string> names = {
        "gradient", "radial", "checker", "stripes", "noise", "rings"};
    return names;
}

GrayImage make_builtin_image(const std::string& name) {
    constexpr std::size_t kSide = 256;
    GrayImage im;
    im.width = kSide;
    im.height = kSide;
    im.pixels.resize(kSide * kSide);
    auto fill = [&](auto&& fn) {
        for (std::size_t y = 0; y < kSide; ++y)
            for (std::size_t x = 0; x < kSide; ++x)
                im.pixels[y * kSide + x] = static_cast<std::uint8_t>(
                    std::clamp<long>(std::lround(fn(x, y)), 0, 255));
    };
    const double cx = (kSide - 1) / 2.0;
    const double cy = (kSide - 1) / 2.0;
    constexpr double kPi = 3.14159265358979323846;
    if (name == "gradient") {
        // Diagonal ramp with a fine weave; the texture keeps per-block
        // variance well above the SSIM stabilizers so coarse quantization
        // degrades structure monotonically.
        fill([&](std::size_t x, std::size_t y) {
            const double ramp = 0.8 * (double(x) + double(y)) / 2.0;
            const double weave = 25.0 * std::sin(2.0 * kPi * x / 8.0) * std::sin(2.0 * kPi * y / 8.0);
            return 26.0 + ramp + weave;
        });
    } else if (name == "radial") {
        const double dmax = std::hypot(cx, cy);
        fill([&](std::size_t x, std::size_t y) {
            const double r = std::hypot(x - cx, y - cy);
            const double cone = 0.8 * (r / dmax) * 255.0;
            const double ripple = 25.0 * std::cos(2.0 * kPi * r / 8.0);
            return 26.0 + cone + ripple;
        });
    } else if (name == "checker") {
        fill([](std::size_t x, std::size_t y) {
            const bool dark = ((x / 32) + (y / 32)) % 2 == 0;
            return (dark ? 32.0 : 160.0) + double((x + y) % 64);
        });
    } else if (name == "stripes") {
        fill([&](std::size_t x, std::size_t) {
            return 127.5 + 127.5 * std::sin(2.0 * kPi * double(x) / 32.0);
        });
    } else if (name == "noise") {
        RngStream rng(0x5eedULL, "builtin/noise");
        for (auto& p : im.pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
    } else if (name == "rings") {
        fill([&](std::size_t x, std::size_t y) {
            return 127.5 + 127.5 * std::cos(std::hypot(x - cx, y - cy) / 6.0);
        });
    } else {
        throw std::invalid_argument("unknown builtin image: " + name);
    }
    return im;
}

} // namespace uavcov::img
