#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "morphline/image.hpp"

namespace morphline {

/// Decodes PNG or JPEG into RGB. Throws DecodeFailure.
ImageRaster read_image(const std::filesystem::path& path);

/// Lossless PNG with fixed compression settings, so identical rasters give identical bytes.
std::vector<std::uint8_t> encode_png(const ImageRaster& img);

/// Throws IoFailure.
void write_png(const ImageRaster& img, const std::filesystem::path& path);

bool is_image_file(const std::filesystem::path& path);

}  // namespace morphline
