#ifndef UAVCOV_IMAGE_HPP
#define UAVCOV_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace uavcov::img {

struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> pixels; // row-major

    std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

// Mid-rise truncation quantizer at the given bit depth: for bits < 8 each
// pixel maps to its bin's midpoint ((x >> s) << s) + 2^(s-1) with s = 8-bits,
// clamped to 255; bits = 8 is the identity.  Idempotent at fixed depth.
GrayImage quantize(const GrayImage& image, int bits);

// 10*log10(255^2 / MSE); returns +infinity when the images are identical.
double psnr(const GrayImage& a, const GrayImage& b);

// Mean over non-overlapping 8x8 blocks (partial edge blocks ignored) of the
// standard SSIM formula with C1 = (0.01*255)^2, C2 = (0.03*255)^2 and
// population block statistics.  Requires both dimensions >= 8.
double ssim(const GrayImage& a, const GrayImage& b);

// Six deterministic built-in 256x256 test images.
const std::vector<std::string>& builtin_image_names();
GrayImage make_builtin_image(const std::string& name);

} // namespace uavcov::img

#endif
