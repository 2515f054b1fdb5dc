#pragma once

#include "terraclass/raster_io.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace terraclass {

/// From/to pixel counts between two dates. Row = date-1 class, column =
/// date-2 class; id 0 is always present.
struct CrossTab {
    std::vector<ClassId> class_ids;
    std::vector<std::int64_t> counts;

    [[nodiscard]] std::int64_t at(std::size_t from, std::size_t to) const {
        return counts[from * class_ids.size() + to];
    }
};

CrossTab cross_tabulate(const ClassRaster& date1, const ClassRaster& date2);
std::string format_crosstab(const CrossTab& tab);

struct ReportCell {
    std::string date;
    std::string region;
    std::string cls;
    std::optional<std::int64_t> pixels;
    double pct = 0.0;
};

struct ReportDelta {
    std::string region;
    std::string cls;
    double pct_from = 0.0;
    double pct_to = 0.0;
    /// Percentage points, later date minus earlier date.
    double delta = 0.0;
};

/// Per-date, per-region class percentages, plus a delta block when exactly
/// two dates are present.
struct RegionReport {
    std::vector<ReportCell> cells;
    std::vector<ReportDelta> deltas;
    std::vector<std::string> warnings;

    /// Date labels in order of first appearance.
    [[nodiscard]] std::vector<std::string> dates() const;
    [[nodiscard]] const ReportCell* find(const std::string& date, const std::string& region,
                                         const std::string& cls) const;
    [[nodiscard]] const ReportDelta* find_delta(const std::string& region,
                                                const std::string& cls) const;
};

/// Fills `report.deltas` if the report holds exactly two dates; missing
/// cells count as 0 %.
void compute_deltas(RegionReport& report);

enum class PercentMode {
    /// Denominator: all classified pixels of the region.
    AllClasses,
    /// Denominator: pixels of the chosen classes only.
    SelectedClasses,
};

struct RegionReportOptions {
    PercentMode mode = PercentMode::AllClasses;
    std::vector<ClassId> selected;
    /// Class names for the report; ids are used when absent.
    std::optional<ClassLegend> legend;
};

/// `mask` holds region ids (0 = outside); without a mask the whole frame is
/// one region labelled "all".
RegionReport region_report(const std::vector<std::pair<std::string, ClassRaster>>& maps,
                           const std::optional<ClassRaster>& mask,
                           const RegionReportOptions& options = {});

/// CSV `year,region,class,pct`. Decimal commas are normalized; the value
/// is kept verbatim. Regions whose percentages exceed 100 are warned about.
RegionReport import_table(const std::filesystem::path& path);

/// CELLS and DELTA sections at full precision.
std::string format_region_report(const RegionReport& report);
void write_region_report(const RegionReport& report, const std::filesystem::path& path);

/// Human-readable summary rounded for display.
std::string format_region_summary(const RegionReport& report);

} // namespace terraclass
