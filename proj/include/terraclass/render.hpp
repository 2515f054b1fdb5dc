#pragma once

#include "terraclass/raster_io.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace terraclass {

struct RgbImage {
    std::size_t width = 0;
    std::size_t height = 0;
    /// Row-major RGB triplets.
    std::vector<std::uint8_t> pixels;
};

/// 8-bit RGB PNG, zlib level 9, no filtering, no timestamp chunk.
void write_png(const RgbImage& image, const std::filesystem::path& path);
RgbImage read_png(const std::filesystem::path& path);

/// `map.png` -> `map.legend.png`.
std::filesystem::path legend_strip_path(const std::filesystem::path& png);

/// One pixel per cell, legend colors, unclassified as black. Also writes a
/// legend strip of 16x16 swatches in ascending class order. The palette must
/// be bijective over the classes present, otherwise ValidationError.
void render_map(const ClassRaster& cr, const ClassLegend& legend,
                const std::filesystem::path& path);

/// Inverse of render_map: maps colors back to class ids through the legend.
ClassRaster decode_map(const std::filesystem::path& path, const ClassLegend& legend);

} // namespace terraclass
