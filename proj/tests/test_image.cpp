#include "uavcov/image.hpp"
#include "uavcov/pgm.hpp"
#include "uavcov/rng.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

using namespace uavcov;
using namespace uavcov::img;

namespace {

GrayImage constant_image(std::size_t w, std::size_t h, std::uint8_t v) {
    GrayImage im;
    im.width = w;
    im.height = h;
    im.pixels.assign(w * h, v);
    return im;
}

GrayImage random_image(std::size_t w, std::size_t h, RngStream& rng) {
    GrayImage im;
    im.width = w;
    im.height = h;
    im.pixels.resize(w * h);
    for (auto& p : im.pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
    return im;
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& label) {
        path = std::filesystem::temp_directory_path() / ("uavcov_test_image_" + label);
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_bytes(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

} // namespace

TEST_CASE("quantize at full depth is the identity") {
    RngStream rng(8, "image/q8");
    const GrayImage im = random_image(16, 16, rng);
    CHECK(quantize(im, 8).pixels == im.pixels);
}

TEST_CASE("quantize maps values to bin midpoints") {
    const GrayImage mid = quantize(constant_image(4, 4, 128), 1);
    for (auto p : mid.pixels) CHECK(p == 192);

    for (int bits = 1; bits < 8; ++bits) {
        const GrayImage zero = quantize(constant_image(4, 4, 0), bits);
        for (auto p : zero.pixels) CHECK(p == (1 << (8 - bits - 1)));
    }
}

TEST_CASE("quantize stays within range at the top") {
    const GrayImage top = quantize(constant_image(4, 4, 255), 1);
    for (auto p : top.pixels) CHECK(p == 192);
    for (int bits = 1; bits <= 8; ++bits)
        for (auto p : quantize(constant_image(4, 4, 255), bits).pixels) CHECK(p <= 255);
}

TEST_CASE("quantize is idempotent at every depth") {
    RngStream rng(12, "image/idem");
    const GrayImage im = random_image(32, 32, rng);
    for (int bits = 1; bits <= 8; ++bits) {
        const GrayImage once = quantize(im, bits);
        CHECK(quantize(once, bits).pixels == once.pixels);
    }
}

TEST_CASE("quantize rejects out-of-range depths") {
    const GrayImage im = constant_image(4, 4, 0);
    CHECK_THROWS_WITH_AS(quantize(im, 0), "quantize: bits out of range [1,8]",
                         std::invalid_argument);
    CHECK_THROWS_WITH_AS(quantize(im, 9), "quantize: bits out of range [1,8]",
                         std::invalid_argument);
}

TEST_CASE("psnr of identical images is infinite") {
    const GrayImage im = constant_image(8, 8, 100);
    CHECK(std::isinf(psnr(im, im)));
    CHECK(psnr(im, im) > 0);
}

TEST_CASE("psnr matches direct arithmetic on constant images") {
    const GrayImage a = constant_image(8, 8, 128);
    const GrayImage b = constant_image(8, 8, 192);
    const double expected = 10.0 * std::log10(65025.0 / 4096.0);
    CHECK(psnr(a, b) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(psnr(a, b) == doctest::Approx(12.008).epsilon(1e-4));
    CHECK(psnr(a, b) == psnr(b, a));
}

TEST_CASE("psnr rejects mismatched dimensions") {
    CHECK_THROWS_WITH_AS(psnr(constant_image(8, 8, 0), constant_image(8, 9, 0)),
                         "psnr: dimension mismatch", std::invalid_argument);
}

TEST_CASE("ssim of an image with itself is exactly one") {
    RngStream rng(5, "image/ssim1");
    const GrayImage im = random_image(24, 24, rng);
    CHECK(ssim(im, im) == 1.0);
}

TEST_CASE("ssim of opposite constants matches the closed form") {
    const GrayImage black = constant_image(16, 16, 0);
    const GrayImage white = constant_image(16, 16, 255);
    constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double expected = kC1 / (255.0 * 255.0 + kC1);
    CHECK(ssim(black, white) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(ssim(black, white) == ssim(white, black));
}

TEST_CASE("ssim is symmetric on random images") {
    RngStream rng(6, "image/ssim-sym");
    const GrayImage a = random_image(32, 32, rng);
    const GrayImage b = random_image(32, 32, rng);
    CHECK(ssim(a, b) == doctest::Approx(ssim(b, a)).epsilon(1e-15));
}

TEST_CASE("ssim input validation") {
    CHECK_THROWS_WITH_AS(ssim(constant_image(16, 16, 0), constant_image(16, 8, 0)),
                         "ssim: dimension mismatch", std::invalid_argument);
    CHECK_THROWS_WITH_AS(ssim(constant_image(4, 4, 0), constant_image(4, 4, 0)),
                         "ssim: images smaller than 8x8", std::invalid_argument);
}

TEST_CASE("ssim ignores partial edge blocks") {
    // 20x20: only the 2x2 grid of full 8x8 blocks counts, so padding junk
    // into the last 4 rows/cols must not change the score.
    RngStream rng(7, "image/ssim-edge");
    GrayImage a = random_image(20, 20, rng);
    GrayImage b = a;
    for (std::size_t y = 0; y < 20; ++y)
        for (std::size_t x = 0; x < 20; ++x)
            if (x >= 16 || y >= 16) b.pixels[y * 20 + x] = 255 - b.pixels[y * 20 + x];
    CHECK(ssim(a, b) == 1.0);
}

TEST_CASE("builtin images are deterministic and well-formed") {
    const auto& names = builtin_image_names();
    REQUIRE(names.size() == 6);
    for (const auto& name : names) {
        const GrayImage a = make_builtin_image(name);
        const GrayImage b = make_builtin_image(name);
        CHECK(a.width == 256);
        CHECK(a.height == 256);
        CHECK(a.pixels.size() == 256u * 256u);
        CHECK(a.pixels == b.pixels);
    }
    CHECK_THROWS_WITH_AS(make_builtin_image("swirl"), "unknown builtin image: swirl",
                         std::invalid_argument);
}

TEST_CASE("pgm round-trips bit-exactly") {
    TempDir dir("case");
    RngStream rng(9, "image/pgm");
    const GrayImage im = random_image(37, 23, rng);
    const std::string path = dir.file("roundtrip.pgm");
    save_pgm(im, path);
    const GrayImage back = load_pgm(path);
    CHECK(back.width == im.width);
    CHECK(back.height == im.height);
    CHECK(back.pixels == im.pixels);
}

TEST_CASE("pgm parses a minimal hand-written file") {
    TempDir dir("case");
    const std::string path = dir.file("tiny.pgm");
    write_bytes(path, std::string("P5\n2 2\n255\n") + '\0' + '\x80' + '\xff' + '\x40');
    const GrayImage im = load_pgm(path);
    REQUIRE(im.width == 2);
    REQUIRE(im.height == 2);
    CHECK(im.pixels == std::vector<std::uint8_t>({0, 128, 255, 64}));
}

TEST_CASE("pgm accepts header comments") {
    TempDir dir("case");
    const std::string path = dir.file("comment.pgm");
    write_bytes(path, std::string("P5\n# made by hand\n2 1\n# another\n255\n") + '\x01' + '\x02');
    const GrayImage im = load_pgm(path);
    CHECK(im.pixels == std::vector<std::uint8_t>({1, 2}));
}

TEST_CASE("pgm rejects foreign formats distinctly") {
    TempDir dir("case");

    const std::string ascii = dir.file("ascii.pgm");
    write_bytes(ascii, "P2\n2 2\n255\n0 1 2 3\n");
    CHECK_THROWS_WITH_AS(load_pgm(ascii), "unsupported magic: expected P5, got \"P2\"",
                         std::runtime_error);

    const std::string wide = dir.file("wide.pgm");
    write_bytes(wide, std::string("P5\n2 2\n65535\n") + std::string(8, '\x00'));
    CHECK_THROWS_WITH_AS(load_pgm(wide), "unsupported maxval: 65535", std::runtime_error);

    const std::string cut = dir.file("cut.pgm");
    write_bytes(cut, std::string("P5\n4 4\n255\n") + std::string(7, '\x01'));
    CHECK_THROWS_WITH_AS(load_pgm(cut), "truncated payload: expected 16 bytes, got 7",
                         std::runtime_error);

    const std::string garbled = dir.file("garbled.pgm");
    write_bytes(garbled, "P5\nabc def\n255\n");
    CHECK_THROWS_AS(load_pgm(garbled), std::runtime_error);

    CHECK_THROWS_AS(load_pgm(dir.file("missing.pgm")), std::runtime_error);
    try {
        load_pgm(dir.file("missing.pgm"));
    } catch (const std::exception& e) {
        CHECK(std::string(e.what()).find("missing.pgm") != std::string::npos);
    }
}

TEST_CASE("image references resolve builtins then files") {
    const GrayImage builtin = load_image_ref("noise");
    CHECK(builtin.pixels == make_builtin_image("noise").pixels);

    TempDir dir("case");
    const std::string path = dir.file("custom.pgm");
    save_pgm(constant_image(9, 9, 42), path);
    const GrayImage file = load_image_ref(path);
    CHECK(file.width == 9);
    CHECK(file.pixels[0] == 42);
}
