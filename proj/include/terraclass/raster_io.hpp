#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace terraclass {

enum class DataType { U8, I16, U16, F32 };
enum class Interleave { BSQ, BIL, BIP };
enum class ByteOrder { Little, Big };

std::size_t bytes_per_sample(DataType type);
int envi_code(DataType type);

/// ENVI flat-raster header. Keys other than the six required ones are kept
/// verbatim (lowercased key, raw value) so a re-written header carries them.
struct RasterHeader {
    std::size_t samples = 0;
    std::size_t lines = 0;
    std::size_t bands = 0;
    DataType data_type = DataType::U8;
    Interleave interleave = Interleave::BSQ;
    ByteOrder byte_order = ByteOrder::Little;
    std::vector<std::pair<std::string, std::string>> extra;

    [[nodiscard]] std::size_t payload_bytes() const {
        return samples * lines * bands * bytes_per_sample(data_type);
    }

    bool operator==(const RasterHeader&) const = default;
};

/// Band-sequential cube of 64-bit samples.
class MultibandRaster {
public:
    MultibandRaster() = default;
    MultibandRaster(std::size_t bands, std::size_t rows, std::size_t cols);
    MultibandRaster(std::size_t bands, std::size_t rows, std::size_t cols,
                    std::vector<double> values);

    [[nodiscard]] std::size_t bands() const noexcept { return bands_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t pixel_count() const noexcept { return rows_ * cols_; }

    [[nodiscard]] double at(std::size_t band, std::size_t row, std::size_t col) const {
        return values_[(band * rows_ + row) * cols_ + col];
    }
    double& at(std::size_t band, std::size_t row, std::size_t col) {
        return values_[(band * rows_ + row) * cols_ + col];
    }

    /// Sample of `band` at flat pixel index `pixel` (row * cols + col).
    [[nodiscard]] double sample(std::size_t band, std::size_t pixel) const {
        return values_[band * rows_ * cols_ + pixel];
    }

    [[nodiscard]] std::span<const double> band(std::size_t b) const {
        return {values_.data() + b * rows_ * cols_, rows_ * cols_};
    }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    bool operator==(const MultibandRaster&) const = default;

private:
    std::size_t bands_ = 0;
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

using ClassId = std::uint8_t;
inline constexpr ClassId kUnclassified = 0;

/// Single-band map of class ids; 0 means unclassified.
class ClassRaster {
public:
    ClassRaster() = default;
    ClassRaster(std::size_t rows, std::size_t cols, ClassId fill = kUnclassified);
    ClassRaster(std::size_t rows, std::size_t cols, std::vector<ClassId> values);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

    [[nodiscard]] ClassId at(std::size_t row, std::size_t col) const {
        return values_[row * cols_ + col];
    }
    ClassId& at(std::size_t row, std::size_t col) { return values_[row * cols_ + col]; }

    [[nodiscard]] ClassId operator[](std::size_t i) const { return values_[i]; }
    ClassId& operator[](std::size_t i) { return values_[i]; }

    [[nodiscard]] std::span<const ClassId> values() const noexcept { return values_; }
    [[nodiscard]] std::span<ClassId> values() noexcept { return values_; }

    /// Pixel count per class id (index = id).
    [[nodiscard]] std::array<std::size_t, 256> histogram() const;

    [[nodiscard]] bool same_shape(const ClassRaster& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }

    bool operator==(const ClassRaster&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<ClassId> values_;
};

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;
    bool operator==(const Rgb&) const = default;
};

struct LegendEntry {
    ClassId class_id = 0;
    std::string name;
    Rgb color;
    bool operator==(const LegendEntry&) const = default;
};

/// Class names and display colors, kept sorted by class id.
class ClassLegend {
public:
    ClassLegend() = default;
    /// Validates ids (nonzero, unique) and names (non-empty, unique).
    explicit ClassLegend(std::vector<LegendEntry> entries);

    [[nodiscard]] const std::vector<LegendEntry>& entries() const noexcept { return entries_; }
    [[nodiscard]] const LegendEntry* find(ClassId id) const;
    [[nodiscard]] bool contains(ClassId id) const { return find(id) != nullptr; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }

    /// Legend with generated names (`<prefix>_<id>`) and distinct colors.
    static ClassLegend generated(const std::vector<ClassId>& ids, const std::string& prefix);

    bool operator==(const ClassLegend&) const = default;

private:
    std::vector<LegendEntry> entries_;
};

/// Throws ValidationError if `cr` holds a nonzero id the legend lacks.
void validate_against_legend(const ClassRaster& cr, const ClassLegend& legend);

RasterHeader read_header(const std::filesystem::path& path);
void write_header(const RasterHeader& header, const std::filesystem::path& path);

MultibandRaster read_raster(const RasterHeader& header, const std::filesystem::path& path);

/// Encodes `raster` using the layout fields of `layout` (data type,
/// interleave, byte order); dimensions come from the raster.
void write_raster(const MultibandRaster& raster, const RasterHeader& layout,
                  const std::filesystem::path& header_path,
                  const std::filesystem::path& data_path);

/// `<prefix>.hdr`, `<prefix>.dat`, `<prefix>.legend.csv`.
struct ClassRasterFiles {
    std::filesystem::path header;
    std::filesystem::path data;
    std::filesystem::path legend;

    static ClassRasterFiles from_prefix(const std::filesystem::path& prefix);
    /// Accepts `x.hdr` or a bare prefix.
    static ClassRasterFiles from_header(const std::filesystem::path& header);
};

/// Payload path paired with an ENVI header path (`x.hdr` -> `x.dat`).
std::filesystem::path data_path_for(const std::filesystem::path& header_path);

void write_class_raster(const ClassRaster& cr, const ClassLegend& legend,
                        const std::filesystem::path& prefix);

/// Reads a single-band integer raster with values 0..255.
ClassRaster read_class_map(const std::filesystem::path& header_path);

/// Reads the map and its sidecar legend, validating one against the other.
std::pair<ClassRaster, ClassLegend> read_class_raster(const std::filesystem::path& header_path);

ClassLegend read_legend(const std::filesystem::path& path);
void write_legend(const ClassLegend& legend, const std::filesystem::path& path);

} // namespace terraclass
