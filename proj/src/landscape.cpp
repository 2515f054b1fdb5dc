#include "terraclass/landscape.hpp"

#include "terraclass/errors.hpp"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <map>

namespace terraclass {

PatchLabeling label_patches(const ClassRaster& cr, Connectivity connectivity,
                            bool include_unclassified) {
    const std::size_t rows = cr.rows();
    const std::size_t cols = cr.cols();
    PatchLabeling out;
    out.rows = rows;
    out.cols = cols;
    out.labels.assign(rows * cols, 0);

    const bool eight = connectivity == Connectivity::Eight;
    std::vector<std::size_t> stack;
    for (std::size_t start = 0; start < rows * cols; ++start) {
        const ClassId cls = cr[start];
        if (out.labels[start] != 0 || (cls == kUnclassified && !include_unclassified)) {
            continue;
        }
        Patch patch;
        patch.patch_id = static_cast<std::uint32_t>(out.patches.size() + 1);
        patch.class_id = cls;
        out.labels[start] = patch.patch_id;
        stack.assign(1, start);
        while (!stack.empty()) {
            const std::size_t p = stack.back();
            stack.pop_back();
            ++patch.area;
            const auto r = static_cast<std::ptrdiff_t>(p / cols);
            const auto c = static_cast<std::ptrdiff_t>(p % cols);
            for (std::ptrdiff_t dr = -1; dr <= 1; ++dr) {
                for (std::ptrdiff_t dc = -1; dc <= 1; ++dc) {
                    if (dr == 0 && dc == 0) {
                        continue;
                    }
                    const bool face = dr == 0 || dc == 0;
                    if (!face && !eight) {
                        continue;
                    }
                    const auto nr = r + dr;
                    const auto nc = c + dc;
                    const bool inside = nr >= 0 && nc >= 0 &&
                                        nr < static_cast<std::ptrdiff_t>(rows) &&
                                        nc < static_cast<std::ptrdiff_t>(cols);
                    const std::size_t q = inside ? static_cast<std::size_t>(nr) * cols +
                                                       static_cast<std::size_t>(nc)
                                                 : 0;
                    if (!inside || cr[q] != cls) {
                        if (face) {
                            ++patch.perimeter;
                        }
                        continue;
                    }
                    if (out.labels[q] == 0) {
                        out.labels[q] = patch.patch_id;
                        stack.push_back(q);
                    }
                }
            }
        }
        out.patches.push_back(patch);
    }
    return out;
}

MetricsReport compute_metrics(const ClassRaster& cr, const PatchLabeling& labeling) {
    if (labeling.rows != cr.rows() || labeling.cols != cr.cols()) {
        throw ValidationError(ErrorCode::DimensionMismatch, "labeling does not match map");
    }
    const auto hist = cr.histogram();
    MetricsReport report;
    report.n_total = cr.size();
    report.n_classified = cr.size() - hist[kUnclassified];
    if (report.n_classified == 0) {
        throw ValidationError(ErrorCode::NoClassifiedPixels, "map has no classified pixels");
    }

    struct Acc {
        std::size_t patches = 0;
        std::size_t largest = 0;
        std::size_t edge = 0;
    };
    std::map<ClassId, Acc> acc;
    for (const auto& p : labeling.patches) {
        if (p.class_id == kUnclassified) {
            continue;
        }
        auto& a = acc[p.class_id];
        ++a.patches;
        a.largest = std::max(a.largest, p.area);
        a.edge += p.perimeter;
    }

    const auto n_cls = static_cast<double>(report.n_classified);
    const auto n_all = static_cast<double>(report.n_total);
    for (std::size_t id = 1; id < hist.size(); ++id) {
        if (hist[id] == 0) {
            continue;
        }
        const auto it = acc.find(static_cast<ClassId>(id));
        if (it == acc.end()) {
            throw ValidationError(ErrorCode::Validation, "labeling lacks patches for class " +
                                                             std::to_string(id));
        }
        const Acc& a = it->second;
        ClassMetrics m;
        m.class_id = static_cast<ClassId>(id);
        m.pixels = hist[id];
        m.area_pct = 100.0 * static_cast<double>(m.pixels) / n_cls;
        m.patch_count = a.patches;
        m.patch_density = 1000.0 * static_cast<double>(a.patches) / n_all;
        m.mean_patch_size = static_cast<double>(m.pixels) / static_cast<double>(a.patches);
        m.largest_patch_index = 100.0 * static_cast<double>(a.largest) / n_cls;
        m.total_edge = a.edge;
        m.edge_density = static_cast<double>(a.edge) / n_all;
        report.classes.push_back(m);

        const double p = static_cast<double>(m.pixels) / n_cls;
        report.shannon_diversity -= p * std::log(p);
    }
    report.richness = report.classes.size();
    report.evenness = report.richness == 1
                          ? 1.0
                          : report.shannon_diversity / std::log(static_cast<double>(report.richness));
    return report;
}

std::string format_metrics(const MetricsReport& report, double s) {
    if (!(s > 0.0) || !std::isfinite(s)) {
        throw ValidationError(ErrorCode::InvalidConfig, "pixel size must be > 0");
    }
    const double cell = s * s;
    const double frame = static_cast<double>(report.n_total) * cell;
    std::string out =
        "level,class_id,pixels,area,area_pct,patch_count,patch_density,mean_patch_size,"
        "largest_patch_index,total_edge,edge_density,shannon_diversity,evenness,richness,"
        "n_total,n_classified\n";
    std::size_t patches = 0;
    for (const auto& m : report.classes) {
        patches += m.patch_count;
        out += fmt::format("CLASS,{},{},{},{},{},{},{},{},{},{},,,,,\n", m.class_id, m.pixels,
                           static_cast<double>(m.pixels) * cell, m.area_pct, m.patch_count,
                           1000.0 * static_cast<double>(m.patch_count) / frame,
                           static_cast<double>(m.pixels) * cell /
                               static_cast<double>(m.patch_count),
                           m.largest_patch_index, static_cast<double>(m.total_edge) * s,
                           static_cast<double>(m.total_edge) * s / frame);
    }
    out += fmt::format("LANDSCAPE,,{},{},100,{},{},{},,,,{},{},{},{},{}\n", report.n_classified,
                       static_cast<double>(report.n_classified) * cell, patches,
                       1000.0 * static_cast<double>(patches) / frame,
                       static_cast<double>(report.n_classified) * cell /
                           static_cast<double>(patches),
                       report.shannon_diversity, report.evenness, report.richness, report.n_total,
                       report.n_classified);
    return out;
}

void write_metrics(const MetricsReport& report, const std::filesystem::path& path,
                   double pixel_size) {
    const std::string text = format_metrics(report, pixel_size);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

} // namespace terraclass
