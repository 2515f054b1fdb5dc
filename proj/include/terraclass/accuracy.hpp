#pragma once

#include "terraclass/raster_io.hpp"
#include "terraclass/training.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace terraclass {

/// Error matrix with rows = predicted, columns = reference. Reference pixels
/// predicted as unclassified are tallied in a separate row so N counts every
/// reference sample.
class ConfusionMatrix {
public:
    /// Square matrix without an unclassified row; `counts` is row-major m x m.
    ConfusionMatrix(std::vector<ClassId> class_ids, std::vector<std::int64_t> counts);
    ConfusionMatrix(std::vector<ClassId> class_ids, std::vector<std::int64_t> counts,
                    std::vector<std::int64_t> unclassified);

    [[nodiscard]] const std::vector<ClassId>& class_ids() const noexcept { return ids_; }
    [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
    [[nodiscard]] std::int64_t at(std::size_t predicted, std::size_t reference) const {
        return counts_[predicted * ids_.size() + reference];
    }
    /// Reference samples of column `reference` predicted as 0.
    [[nodiscard]] std::int64_t unclassified(std::size_t reference) const {
        return unclassified_[reference];
    }
    [[nodiscard]] bool has_unclassified() const;

    [[nodiscard]] std::int64_t total() const;
    [[nodiscard]] std::int64_t row_total(std::size_t predicted) const;
    /// Includes the unclassified row.
    [[nodiscard]] std::int64_t column_total(std::size_t reference) const;
    [[nodiscard]] std::int64_t diagonal_total() const;

    bool operator==(const ConfusionMatrix&) const = default;

private:
    std::vector<ClassId> ids_;
    std::vector<std::int64_t> counts_;
    std::vector<std::int64_t> unclassified_;
};

ConfusionMatrix build_confusion(const ClassRaster& predicted, const RoiSet& reference);

double overall_accuracy(const ConfusionMatrix& cm);

/// Cohen's kappa from integer marginals.
double kappa(const ConfusionMatrix& cm);

struct ClassAccuracy {
    ClassId class_id = 0;
    /// Absent when the class has no reference (producer) or prediction (user) samples.
    std::optional<double> producer;
    std::optional<double> user;
};

std::vector<ClassAccuracy> per_class_accuracy(const ConfusionMatrix& cm);

/// CSV with MATRIX, OVERALL and PER_CLASS sections, reals at full precision.
std::string format_accuracy_report(const ConfusionMatrix& cm);
void write_accuracy_report(const ConfusionMatrix& cm, const std::filesystem::path& path);

} // namespace terraclass
