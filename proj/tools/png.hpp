#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "cmr/array.hpp"

namespace cmr::png {

// 8-bit grayscale, row-major, width * height bytes.
void write_gray(const std::filesystem::path& path, const std::vector<std::uint8_t>& pixels,
                std::size_t width, std::size_t height);

// Magnitude frames side by side, each min-max normalized on its own.
void write_magnitude_strip(const std::filesystem::path& path, const DynamicImage& x);

}  // namespace cmr::png
