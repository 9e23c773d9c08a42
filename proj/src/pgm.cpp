#include "uavcov/pgm.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

namespace uavcov::img {

namespace {

// Reads one whitespace/comment-separated header token.
std::string next_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c) && c != '#') {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    if (c == '#') in.unget();
    return tok;
}

long parse_header_number(const std::string& tok, const char* what) {
    if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
        throw std::runtime_error(std::string("malformed header: bad ") + what);
    return std::stol(tok);
}

} // namespace

GrayImage load_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open image file: " + path);

    const std::string magic = next_token(in);
    if (magic != "P5") throw std::runtime_error("unsupported magic: expected P5, got \"" + magic + "\"");

    const long width = parse_header_number(next_token(in), "width");
    const long height = parse_header_number(next_token(in), "height");
    const long maxval = parse_header_number(next_token(in), "maxval");
    if (width <= 0 || height <= 0) throw std::runtime_error("malformed header: nonpositive dimensions");
    if (maxval != 255) throw std::runtime_error("unsupported maxval: " + std::to_string(maxval));

    // Exactly one whitespace byte separates the header from the payload; the
    // token reader has already consumed it.
    GrayImage im;
    im.width = static_cast<std::size_t>(width);
    im.height = static_cast<std::size_t>(height);
    im.pixels.resize(im.width * im.height);
    in.read(reinterpret_cast<char*>(im.pixels.data()), static_cast<std::streamsize>(im.pixels.size()));
    if (static_cast<std::size_t>(in.gcount()) != im.pixels.size())
        throw std::runtime_error("truncated payload: expected " + std::to_string(im.pixels.size()) +
                                 " bytes, got " + std::to_string(in.gcount()));
    return im;
}

void save_pgm(const GrayImage& image, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << "P5\n" << image.width << " " << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw std::runtime_error("write failure: " + path);
}

GrayImage load_image_ref(const std::string& ref) {
    const auto& names = builtin_image_names();
    if (std::find(names.begin(), names.end(), ref) != names.end()) return make_builtin_image(ref);
    return load_pgm(ref);
}

} // namespace uavcov::img
