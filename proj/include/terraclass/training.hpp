#pragma once

#include "terraclass/raster_io.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <vector>

namespace terraclass {

struct RoiPixel {
    ClassId class_id = 0;
    std::size_t row = 0;
    std::size_t col = 0;
    bool operator==(const RoiPixel&) const = default;
};

/// Analyst-labelled pixels, validated against the raster bounds they refer to.
class RoiSet {
public:
    RoiSet(std::vector<RoiPixel> entries, std::size_t rows, std::size_t cols);

    [[nodiscard]] const std::vector<RoiPixel>& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    /// Distinct class ids, ascending.
    [[nodiscard]] std::vector<ClassId> class_ids() const;

private:
    std::vector<RoiPixel> entries_;
    std::size_t rows_;
    std::size_t cols_;
};

/// CSV with header `class,row,col`.
RoiSet load_roi(const std::filesystem::path& path, std::size_t rows, std::size_t cols);
void write_roi(const RoiSet& roi, const std::filesystem::path& path);

struct ClassStat {
    ClassId class_id = 0;
    std::size_t count = 0;
    Eigen::VectorXd mean;
    /// Sample covariance (divisor n - 1); zero matrix when count < 2.
    Eigen::MatrixXd covariance;

    /// Enough samples for an invertible covariance estimate (n >= B + 1).
    [[nodiscard]] bool covariance_usable() const {
        return count >= static_cast<std::size_t>(mean.size()) + 1;
    }
};

/// Per-class statistics ordered by ascending class id.
struct ClassStats {
    std::size_t bands = 0;
    std::vector<ClassStat> classes;

    [[nodiscard]] const ClassStat* find(ClassId id) const;
};

ClassStats compute_class_stats(const MultibandRaster& raster, const RoiSet& roi);

/// Sum of (n_c - 1) * cov_c divided by sum of (n_c - 1).
Eigen::MatrixXd pooled_covariance(const ClassStats& stats);

} // namespace terraclass
