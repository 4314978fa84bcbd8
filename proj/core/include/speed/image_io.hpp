#pragma once

#include <filesystem>

#include "speed/raster.hpp"

namespace speed::io {

// Lossless 8-bit raster I/O. PNG and uncompressed TIFF are supported, with
// 1 (gray) or 3 (RGB) channels; an alpha channel is dropped on load. Values
// are divided by 255 on load and rounded half-up from v*255 on save.

// Gray inputs load as three identical planes.
ColorRaster load_color(const std::filesystem::path& path);
GrayRaster load_gray(const std::filesystem::path& path);

// Format is chosen from the extension (.png, .tif, .tiff).
void save(const std::filesystem::path& path, const ColorRaster& img);
void save(const std::filesystem::path& path, const GrayRaster& img);
// Edge pixels are written as 255, background as 0.
void save(const std::filesystem::path& path, const EdgeMap& map);

bool is_supported_image(const std::filesystem::path& path);

std::uint8_t to_byte(double v) noexcept;

}  // namespace speed::io
