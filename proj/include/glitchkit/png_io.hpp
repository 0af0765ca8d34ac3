#pragma once

#include <filesystem>

#include "glitchkit/image.hpp"

namespace glitchkit {

/// Reads an 8-bit RGB image from a PNG file. Palette and grayscale inputs
/// are expanded, 16-bit channels are narrowed, alpha is dropped.
Image read_png(const std::filesystem::path& path);

/// Writes an 8-bit RGB PNG. Output bytes depend only on pixel content,
/// so identical images round to identical files.
void write_png(const Image& img, const std::filesystem::path& path);

}  // namespace glitchkit
