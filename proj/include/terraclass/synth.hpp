#pragma once

#include "terraclass/raster_io.hpp"
#include "terraclass/training.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace terraclass {

struct Rect {
    std::size_t row = 0;
    std::size_t col = 0;
    std::size_t height = 0;
    std::size_t width = 0;
};

struct SceneClass {
    ClassId class_id = 0;
    std::string name;
    Rgb color;
    std::vector<double> mean;
    std::vector<double> stddev;
    std::vector<Rect> rects;
};

/// Synthetic scene: Gaussian classes laid out on non-overlapping rectangles
/// that tile the frame.
struct SynthSceneSpec {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t bands = 0;
    std::uint64_t seed = 0;
    std::vector<SceneClass> classes;

    /// Throws OverlappingLayout / IncompleteLayout / InvalidConfig.
    void validate() const;
};

/// Parses the `key = value` scene format:
///
///     rows = 64
///     cols = 64
///     bands = 3
///     seed = 42
///     class 1 name = urban
///     class 1 color = 200 0 0
///     class 1 mean = 10 20 30
///     class 1 stddev = 2 2 2
///     ; rect = row col height width; may repeat
///     class 1 rect = 0 0 32 64
///
/// Lines starting with `;` or `#` are comments.
SynthSceneSpec parse_scene_spec(const std::string& text);
SynthSceneSpec read_scene_spec(const std::filesystem::path& path);

struct SyntheticScene {
    MultibandRaster image;
    ClassRaster truth;
    ClassLegend legend;
};

/// Pixels are drawn in row-major order, bands innermost, each as
/// mean + stddev * N(0,1) from one xoshiro256** stream seeded by `seed`.
SyntheticScene generate_scene(const SynthSceneSpec& spec);

/// Every ground-truth pixel with row % stride == offset and col % stride == offset.
RoiSet sample_roi(const ClassRaster& truth, std::size_t stride, std::size_t offset = 0);

} // namespace terraclass
