#pragma once

#include "terraclass/raster_io.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace terraclass {

enum class Connectivity { Four = 4, Eight = 8 };

struct Patch {
    std::uint32_t patch_id = 0;
    ClassId class_id = 0;
    std::size_t area = 0;
    /// Pixel faces bordering another class, unclassified, or the frame edge.
    std::size_t perimeter = 0;
};

/// Connected components of equal-class pixels. Patch ids run 1..P in
/// row-major order of each patch's first pixel.
struct PatchLabeling {
    std::size_t rows = 0;
    std::size_t cols = 0;
    /// 0 where the pixel is not part of any patch.
    std::vector<std::uint32_t> labels;
    std::vector<Patch> patches;
};

/// Unclassified pixels get label 0 unless `include_unclassified` is set, in
/// which case they form class-0 patches like any other value.
PatchLabeling label_patches(const ClassRaster& cr, Connectivity connectivity,
                            bool include_unclassified = false);

struct ClassMetrics {
    ClassId class_id = 0;
    std::size_t pixels = 0;
    double area_pct = 0.0;
    std::size_t patch_count = 0;
    /// Patches per 1000 pixels of the full frame.
    double patch_density = 0.0;
    double mean_patch_size = 0.0;
    double largest_patch_index = 0.0;
    std::size_t total_edge = 0;
    /// Edge faces per pixel of the full frame.
    double edge_density = 0.0;
};

struct MetricsReport {
    std::vector<ClassMetrics> classes;
    std::size_t n_total = 0;
    std::size_t n_classified = 0;
    double shannon_diversity = 0.0;
    double evenness = 0.0;
    std::size_t richness = 0;
};

MetricsReport compute_metrics(const ClassRaster& cr, const PatchLabeling& labeling);

/// One CSV row per class and a LANDSCAPE row. `pixel_size` scales areas by
/// s^2 and edges by s; percentages and H/E are unitless.
std::string format_metrics(const MetricsReport& report, double pixel_size = 1.0);
void write_metrics(const MetricsReport& report, const std::filesystem::path& path,
                   double pixel_size = 1.0);

} // namespace terraclass
