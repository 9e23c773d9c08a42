#ifndef UAVCOV_PGM_HPP
#define UAVCOV_PGM_HPP

#include "uavcov/image.hpp"

#include <string>

namespace uavcov::img {

// Binary 8-bit grayscale PGM (magic P5, maxval 255).  Header comments are
// accepted.  Throws with distinct messages for unsupported magic, unsupported
// maxval, malformed header, and truncated payload.
GrayImage load_pgm(const std::string& path);

void save_pgm(const GrayImage& image, const std::string& path);

// Resolves an image reference: a builtin name or a path to a PGM file.
GrayImage load_image_ref(const std::string& ref);

} // namespace uavcov::img

#endif
