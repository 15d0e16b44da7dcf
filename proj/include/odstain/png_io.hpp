#pragma once

#include <filesystem>

#include "odstain/image.hpp"

namespace odstain {

// Decodes an 8-bit PNG. Grayscale is replicated onto three channels,
// palette images are expanded, an alpha channel is dropped. Any bit depth
// other than 8 is rejected as MalformedImage.
RgbImage load_png(const std::filesystem::path& path);

// Writes an 8-bit RGB PNG, overwriting any existing file.
void save_png(const RgbImage& img, const std::filesystem::path& path);

}  // namespace odstain
