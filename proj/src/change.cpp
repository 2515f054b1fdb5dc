#include "terraclass/change.hpp"

#include "terraclass/csv.hpp"
#include "terraclass/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace terraclass {

namespace {

void require_same_shape(const ClassRaster& a, const ClassRaster& b, const std::string& what) {
    if (!a.same_shape(b)) {
        throw ValidationError(ErrorCode::DimensionMismatch,
                              what + ": " + std::to_string(a.rows()) + "x" +
                                  std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
                                  "x" + std::to_string(b.cols()));
    }
}

template <typename T>
void push_unique(std::vector<T>& v, const T& value) {
    if (std::find(v.begin(), v.end(), value) == v.end()) {
        v.push_back(value);
    }
}

} // namespace

CrossTab cross_tabulate(const ClassRaster& date1, const ClassRaster& date2) {
    require_same_shape(date1, date2, "cross tabulation");
    std::vector<std::int64_t> dense(256 * 256, 0);
    for (std::size_t i = 0; i < date1.size(); ++i) {
        ++dense[static_cast<std::size_t>(date1[i]) * 256 + date2[i]];
    }
    const auto h1 = date1.histogram();
    const auto h2 = date2.histogram();
    CrossTab tab;
    for (std::size_t id = 0; id < 256; ++id) {
        if (id == 0 || h1[id] > 0 || h2[id] > 0) {
            tab.class_ids.push_back(static_cast<ClassId>(id));
        }
    }
    const std::size_t m = tab.class_ids.size();
    tab.counts.resize(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            tab.counts[i * m + j] =
                dense[static_cast<std::size_t>(tab.class_ids[i]) * 256 + tab.class_ids[j]];
        }
    }
    return tab;
}

std::string format_crosstab(const CrossTab& tab) {
    std::string out = "# rows = date 1 class, columns = date 2 class\nfrom\\to";
    for (ClassId id : tab.class_ids) {
        out += fmt::format(",{}", id);
    }
    out += "\n";
    for (std::size_t i = 0; i < tab.class_ids.size(); ++i) {
        out += fmt::format("{}", tab.class_ids[i]);
        for (std::size_t j = 0; j < tab.class_ids.size(); ++j) {
            out += fmt::format(",{}", tab.at(i, j));
        }
        out += "\n";
    }
    return out;
}

std::vector<std::string> RegionReport::dates() const {
    std::vector<std::string> out;
    for (const auto& c : cells) {
        push_unique(out, c.date);
    }
    return out;
}

const ReportCell* RegionReport::find(const std::string& date, const std::string& region,
                                     const std::string& cls) const {
    for (const auto& c : cells) {
        if (c.date == date && c.region == region && c.cls == cls) {
            return &c;
        }
    }
    return nullptr;
}

const ReportDelta* RegionReport::find_delta(const std::string& region,
                                            const std::string& cls) const {
    for (const auto& d : deltas) {
        if (d.region == region && d.cls == cls) {
            return &d;
        }
    }
    return nullptr;
}

void compute_deltas(RegionReport& report) {
    report.deltas.clear();
    const auto dates = report.dates();
    if (dates.size() != 2) {
        return;
    }
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& c : report.cells) {
        push_unique(keys, std::make_pair(c.region, c.cls));
    }
    for (const auto& [region, cls] : keys) {
        const ReportCell* a = report.find(dates[0], region, cls);
        const ReportCell* b = report.find(dates[1], region, cls);
        ReportDelta d;
        d.region = region;
        d.cls = cls;
        d.pct_from = a ? a->pct : 0.0;
        d.pct_to = b ? b->pct : 0.0;
        d.delta = d.pct_to - d.pct_from;
        report.deltas.push_back(d);
    }
}

RegionReport region_report(const std::vector<std::pair<std::string, ClassRaster>>& maps,
                           const std::optional<ClassRaster>& mask,
                           const RegionReportOptions& options) {
    if (maps.empty()) {
        throw ValidationError(ErrorCode::Validation, "region report needs at least one map");
    }
    for (std::size_t i = 1; i < maps.size(); ++i) {
        require_same_shape(maps[0].second, maps[i].second, "date " + maps[i].first);
    }
    if (mask) {
        require_same_shape(maps[0].second, *mask, "region mask");
    }
    std::set<std::string> labels;
    for (const auto& [label, map] : maps) {
        if (!labels.insert(label).second) {
            throw ValidationError(ErrorCode::Validation, "duplicate date label '" + label + "'");
        }
    }
    const bool selected_mode = options.mode == PercentMode::SelectedClasses;
    if (selected_mode && options.selected.empty()) {
        throw ValidationError(ErrorCode::InvalidConfig, "selected mode needs a class list");
    }
    std::array<bool, 256> selected{};
    for (ClassId id : options.selected) {
        if (id == kUnclassified) {
            throw ValidationError(ErrorCode::InvalidConfig, "class 0 cannot be selected");
        }
        selected[id] = true;
    }

    // counts[date][region][class]
    const std::size_t n = maps[0].second.size();
    std::vector<std::map<ClassId, std::array<std::int64_t, 256>>> counts(maps.size());
    std::set<ClassId> regions;
    for (std::size_t p = 0; p < n; ++p) {
        const ClassId region = mask ? (*mask)[p] : ClassId{1};
        if (region != 0) {
            regions.insert(region);
        }
    }
    for (std::size_t d = 0; d < maps.size(); ++d) {
        for (ClassId r : regions) {
            counts[d][r].fill(0);
        }
        const ClassRaster& map = maps[d].second;
        for (std::size_t p = 0; p < n; ++p) {
            const ClassId region = mask ? (*mask)[p] : ClassId{1};
            if (region != 0) {
                ++counts[d][region][map[p]];
            }
        }
    }

    auto class_name = [&](ClassId id) {
        if (options.legend) {
            if (const auto* e = options.legend->find(id)) {
                return e->name;
            }
        }
        return std::to_string(id);
    };
    auto region_name = [&](ClassId id) { return mask ? std::to_string(id) : std::string("all"); };

    RegionReport report;
    for (ClassId r : regions) {
        // Same class rows for every date in a region.
        std::vector<ClassId> classes;
        for (std::size_t id = 1; id < 256; ++id) {
            const bool wanted = selected_mode ? selected[id] : false;
            bool present = false;
            for (std::size_t d = 0; d < maps.size(); ++d) {
                present = present || counts[d][r][id] > 0;
            }
            if (wanted || (!selected_mode && present)) {
                classes.push_back(static_cast<ClassId>(id));
            }
        }
        for (std::size_t d = 0; d < maps.size(); ++d) {
            std::int64_t denom = 0;
            for (std::size_t id = 1; id < 256; ++id) {
                if (!selected_mode || selected[id]) {
                    denom += counts[d][r][id];
                }
            }
            if (denom == 0) {
                report.warnings.push_back("date " + maps[d].first + ", region " + region_name(r) +
                                          ": no pixels in the percentage base; skipped");
                continue;
            }
            for (ClassId id : classes) {
                ReportCell cell;
                cell.date = maps[d].first;
                cell.region = region_name(r);
                cell.cls = class_name(id);
                cell.pixels = counts[d][r][id];
                cell.pct = 100.0 * static_cast<double>(*cell.pixels) / static_cast<double>(denom);
                report.cells.push_back(std::move(cell));
            }
        }
    }
    compute_deltas(report);
    return report;
}

RegionReport import_table(const std::filesystem::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) {
        throw ValidationError(ErrorCode::MalformedRow, path.string() + ": empty table");
    }
    csv::expect_header(rows.front(), {"year", "region", "class", "pct"}, path);

    RegionReport report;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        const auto& f = row.fields;
        std::string pct_text;
        if (f.size() == 4) {
            pct_text = f[3];
        } else if (f.size() == 5) {
            // Unquoted decimal comma, e.g. `1990,I,city areas,17,1`.
            pct_text = f[3] + "," + f[4];
        } else {
            throw ValidationError(ErrorCode::MalformedRow,
                                  path.string() + " line " + std::to_string(row.line_no) +
                                      ": expected year,region,class,pct");
        }
        if (f[0].empty() || f[1].empty() || f[2].empty()) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  path.string() + " line " + std::to_string(row.line_no) +
                                      ": empty field");
        }
        const double pct = csv::parse_real(pct_text, "pct", row.line_no);
        if (pct < 0.0) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  "line " + std::to_string(row.line_no) + ": negative percentage");
        }
        if (report.find(f[0], f[1], f[2]) != nullptr) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  "line " + std::to_string(row.line_no) + ": duplicate cell");
        }
        report.cells.push_back({f[0], f[1], f[2], std::nullopt, pct});
    }

    std::vector<std::pair<std::string, std::string>> groups;
    for (const auto& c : report.cells) {
        push_unique(groups, std::make_pair(c.date, c.region));
    }
    for (const auto& [date, region] : groups) {
        double sum = 0.0;
        for (const auto& c : report.cells) {
            if (c.date == date && c.region == region) {
                sum += c.pct;
            }
        }
        if (sum > 100.0 + 1e-9) {
            report.warnings.push_back(fmt::format(
                "{} region {}: percentages sum to {:.1f} (> 100)", date, region, sum));
        }
    }
    compute_deltas(report);
    return report;
}

std::string format_region_report(const RegionReport& report) {
    std::string out = "CELLS\ndate,region,class,pixels,pct\n";
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"") == std::string::npos) {
            return s;
        }
        std::string q = "\"";
        for (char ch : s) {
            q += ch;
            if (ch == '"') {
                q += '"';
            }
        }
        return q + "\"";
    };
    for (const auto& c : report.cells) {
        out += fmt::format("{},{},{},{},{}\n", quote(c.date), quote(c.region), quote(c.cls),
                           c.pixels ? fmt::format("{}", *c.pixels) : "", c.pct);
    }
    if (!report.deltas.empty()) {
        const auto dates = report.dates();
        out += fmt::format("DELTA\nregion,class,pct_{},pct_{},delta_pp\n", quote(dates[0]),
                           quote(dates[1]));
        for (const auto& d : report.deltas) {
            out += fmt::format("{},{},{},{},{}\n", quote(d.region), quote(d.cls), d.pct_from,
                               d.pct_to, d.delta);
        }
    }
    return out;
}

void write_region_report(const RegionReport& report, const std::filesystem::path& path) {
    const std::string text = format_region_report(report);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

std::string format_region_summary(const RegionReport& report) {
    std::size_t wr = 6;
    std::size_t wc = 5;
    for (const auto& c : report.cells) {
        wr = std::max(wr, c.region.size());
        wc = std::max(wc, c.cls.size());
    }
    std::string out;
    const auto dates = report.dates();
    out += fmt::format("{:<{}}  {:<{}}", "region", wr, "class", wc);
    for (const auto& d : dates) {
        out += fmt::format("  {:>8}", d);
    }
    out += "\n";
    std::vector<std::pair<std::string, std::string>> keys;
    for (const auto& c : report.cells) {
        push_unique(keys, std::make_pair(c.region, c.cls));
    }
    for (const auto& [region, cls] : keys) {
        out += fmt::format("{:<{}}  {:<{}}", region, wr, cls, wc);
        for (const auto& d : dates) {
            const ReportCell* c = report.find(d, region, cls);
            out += c ? fmt::format("  {:>8.2f}", c->pct) : fmt::format("  {:>8}", "-");
        }
        out += "\n";
    }
    if (!report.deltas.empty()) {
        out += fmt::format("\nDELTA (percentage points, {} -> {})\n", dates[0], dates[1]);
        for (const auto& d : report.deltas) {
            out += fmt::format("{:<{}}  {:<{}}  {:>+8.2f}\n", d.region, wr, d.cls, wc, d.delta);
        }
    }
    return out;
}

} // namespace terraclass
