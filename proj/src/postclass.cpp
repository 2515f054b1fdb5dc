#include "terraclass/postclass.hpp"

#include "terraclass/csv.hpp"
#include "terraclass/errors.hpp"

#include <algorithm>
#include <array>
#include <set>

namespace terraclass {

Recode read_recode(const std::filesystem::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) {
        throw ValidationError(ErrorCode::MalformedRow, path.string() + ": empty recode file");
    }
    csv::expect_header(rows.front(), {"old_id", "new_id"}, path);

    Recode recode;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto& f = row.fields;
        const bool declares = f.size() == 6 && !f[2].empty();
        if (f.size() != 2 && f.size() != 6) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  path.string() + " line " + std::to_string(row.line_no) +
                                      ": expected 2 or 6 fields");
        }
        const long long from = csv::parse_int(f[0], "old_id", row.line_no);
        const long long to = csv::parse_int(f[1], "new_id", row.line_no);
        if (from < 0 || from > 255 || to < 0 || to > 255) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  "line " + std::to_string(row.line_no) + ": id outside 0..255");
        }
        if (!recode.mapping.emplace(static_cast<ClassId>(from), static_cast<ClassId>(to)).second) {
            throw ValidationError(ErrorCode::DuplicateClassId,
                                  "recode source " + std::to_string(from) + " listed twice");
        }
        if (declares) {
            std::array<std::uint8_t, 3> rgb{};
            for (std::size_t k = 0; k < 3; ++k) {
                const long long v = csv::parse_int(f[3 + k], "color", row.line_no);
                if (v < 0 || v > 255) {
                    throw ValidationError(ErrorCode::ColorOutOfRange,
                                          "line " + std::to_string(row.line_no));
                }
                rgb[k] = static_cast<std::uint8_t>(v);
            }
            LegendEntry entry{static_cast<ClassId>(to), f[2], {rgb[0], rgb[1], rgb[2]}};
            auto same_id = [&](const LegendEntry& e) { return e.class_id == entry.class_id; };
            auto it = std::find_if(recode.fresh_targets.begin(), recode.fresh_targets.end(), same_id);
            if (it == recode.fresh_targets.end()) {
                recode.fresh_targets.push_back(entry);
            } else if (!(*it == entry)) {
                throw ValidationError(ErrorCode::TargetUndeclared,
                                      "conflicting declarations for target " + std::to_string(to));
            }
        }
    }
    return recode;
}

std::pair<ClassRaster, ClassLegend> merge_classes(const ClassRaster& cr, const ClassLegend& legend,
                                                  const Recode& recode) {
    validate_against_legend(cr, legend);

    std::array<ClassId, 256> lut{};
    for (std::size_t i = 0; i < lut.size(); ++i) {
        lut[i] = static_cast<ClassId>(i);
    }
    std::set<ClassId> targets;
    for (const auto& [from, to] : recode.mapping) {
        if (from == kUnclassified || !legend.contains(from)) {
            throw ValidationError(ErrorCode::UnknownSource, "class " + std::to_string(from));
        }
        const bool declared =
            std::any_of(recode.fresh_targets.begin(), recode.fresh_targets.end(),
                        [&](const LegendEntry& e) { return e.class_id == to; });
        if (to == kUnclassified || (!legend.contains(to) && !declared)) {
            throw ValidationError(ErrorCode::TargetUndeclared, "class " + std::to_string(to));
        }
        lut[from] = to;
        targets.insert(to);
    }

    ClassRaster out = cr;
    for (auto& v : out.values()) {
        v = lut[v];
    }

    std::vector<LegendEntry> entries;
    for (const auto& e : legend.entries()) {
        const auto it = recode.mapping.find(e.class_id);
        const bool recoded_away = it != recode.mapping.end() && it->second != e.class_id;
        if (!recoded_away || targets.count(e.class_id) != 0) {
            entries.push_back(e);
        }
    }
    for (const auto& e : recode.fresh_targets) {
        if (targets.count(e.class_id) != 0 && !legend.contains(e.class_id)) {
            entries.push_back(e);
        }
    }
    return {std::move(out), ClassLegend(std::move(entries))};
}

ClassRaster majority_filter(const ClassRaster& cr, int window) {
    if (window < 3 || window % 2 == 0) {
        throw ValidationError(ErrorCode::BadWindow,
                              "window must be an odd integer >= 3, got " + std::to_string(window));
    }
    const auto half = static_cast<std::ptrdiff_t>(window / 2);
    const auto rows = static_cast<std::ptrdiff_t>(cr.rows());
    const auto cols = static_cast<std::ptrdiff_t>(cr.cols());
    ClassRaster out(cr.rows(), cr.cols());
    std::array<int, 256> counts{};
    for (std::ptrdiff_t r = 0; r < rows; ++r) {
        const auto r0 = std::max<std::ptrdiff_t>(0, r - half);
        const auto r1 = std::min(rows - 1, r + half);
        for (std::ptrdiff_t c = 0; c < cols; ++c) {
            const auto c0 = std::max<std::ptrdiff_t>(0, c - half);
            const auto c1 = std::min(cols - 1, c + half);
            counts.fill(0);
            for (auto rr = r0; rr <= r1; ++rr) {
                for (auto cc = c0; cc <= c1; ++cc) {
                    ++counts[cr.at(static_cast<std::size_t>(rr), static_cast<std::size_t>(cc))];
                }
            }
            const ClassId center = cr.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
            int best = -1;
            int best_count = -1;
            bool tied = false;
            for (int id = 0; id < 256; ++id) {
                if (counts[id] > best_count) {
                    best_count = counts[id];
                    best = id;
                    tied = false;
                } else if (counts[id] == best_count && best_count > 0) {
                    tied = true;
                }
            }
            out.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
                tied ? center : static_cast<ClassId>(best);
        }
    }
    return out;
}

} // namespace terraclass
