#include "terraclass/training.hpp"

#include "terraclass/csv.hpp"
#include "terraclass/errors.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

namespace terraclass {

RoiSet::RoiSet(std::vector<RoiPixel> entries, std::size_t rows, std::size_t cols)
    : entries_(std::move(entries)), rows_(rows), cols_(cols) {
    if (entries_.empty()) {
        throw ValidationError(ErrorCode::EmptyRoi, "no labelled pixels");
    }
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : entries_) {
        if (e.class_id == kUnclassified) {
            throw ValidationError(ErrorCode::Validation, "ROI class id 0 is reserved");
        }
        if (e.row >= rows_ || e.col >= cols_) {
            throw ValidationError(ErrorCode::OutOfBounds,
                                  "(" + std::to_string(e.row) + "," + std::to_string(e.col) +
                                      ") outside " + std::to_string(rows_) + "x" +
                                      std::to_string(cols_));
        }
        if (!seen.emplace(e.row, e.col).second) {
            throw ValidationError(ErrorCode::DuplicatePixel,
                                  "(" + std::to_string(e.row) + "," + std::to_string(e.col) + ")");
        }
    }
}

std::vector<ClassId> RoiSet::class_ids() const {
    std::set<ClassId> ids;
    for (const auto& e : entries_) {
        ids.insert(e.class_id);
    }
    return {ids.begin(), ids.end()};
}

RoiSet load_roi(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
    const auto lines = csv::read_file(path);
    if (lines.empty()) {
        throw ValidationError(ErrorCode::EmptyRoi, path.string() + ": empty file");
    }
    csv::expect_header(lines.front(), {"class", "row", "col"}, path);

    std::vector<RoiPixel> entries;
    entries.reserve(lines.size() - 1);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (line.fields.size() != 3) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  path.string() + " line " + std::to_string(line.line_no) +
                                      ": expected 3 fields");
        }
        const long long id = csv::parse_int(line.fields[0], "class", line.line_no);
        const long long row = csv::parse_int(line.fields[1], "row", line.line_no);
        const long long col = csv::parse_int(line.fields[2], "col", line.line_no);
        if (id < 1 || id > 255) {
            throw ValidationError(ErrorCode::Validation, "line " + std::to_string(line.line_no) +
                                                             ": class " + std::to_string(id) +
                                                             " outside 1..255");
        }
        if (row < 0 || col < 0) {
            throw ValidationError(ErrorCode::OutOfBounds,
                                  "(" + std::to_string(row) + "," + std::to_string(col) + ")");
        }
        entries.push_back({static_cast<ClassId>(id), static_cast<std::size_t>(row),
                           static_cast<std::size_t>(col)});
    }
    return RoiSet(std::move(entries), rows, cols);
}

void write_roi(const RoiSet& roi, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out << "class,row,col\n";
    for (const auto& e : roi.entries()) {
        out << static_cast<int>(e.class_id) << ',' << e.row << ',' << e.col << '\n';
    }
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

const ClassStat* ClassStats::find(ClassId id) const {
    for (const auto& c : classes) {
        if (c.class_id == id) {
            return &c;
        }
    }
    return nullptr;
}

ClassStats compute_class_stats(const MultibandRaster& raster, const RoiSet& roi) {
    if (roi.rows() != raster.rows() || roi.cols() != raster.cols()) {
        throw ValidationError(ErrorCode::DimensionMismatch, "ROI bounds do not match raster");
    }
    const auto nb = static_cast<Eigen::Index>(raster.bands());

    std::map<ClassId, std::vector<std::size_t>> members;
    for (const auto& e : roi.entries()) {
        members[e.class_id].push_back(e.row * raster.cols() + e.col);
    }

    ClassStats stats;
    stats.bands = raster.bands();
    for (auto& [id, pixels] : members) {
        // Summation order must not depend on ROI file order.
        std::sort(pixels.begin(), pixels.end());

        ClassStat cs;
        cs.class_id = id;
        cs.count = pixels.size();
        cs.mean = Eigen::VectorXd::Zero(nb);
        for (std::size_t p : pixels) {
            for (Eigen::Index b = 0; b < nb; ++b) {
                cs.mean[b] += raster.sample(static_cast<std::size_t>(b), p);
            }
        }
        cs.mean /= static_cast<double>(cs.count);

        cs.covariance = Eigen::MatrixXd::Zero(nb, nb);
        if (cs.count >= 2) {
            Eigen::VectorXd d(nb);
            for (std::size_t p : pixels) {
                for (Eigen::Index b = 0; b < nb; ++b) {
                    d[b] = raster.sample(static_cast<std::size_t>(b), p) - cs.mean[b];
                }
                for (Eigen::Index i = 0; i < nb; ++i) {
                    for (Eigen::Index j = i; j < nb; ++j) {
                        cs.covariance(i, j) += d[i] * d[j];
                    }
                }
            }
            cs.covariance /= static_cast<double>(cs.count - 1);
            for (Eigen::Index i = 0; i < nb; ++i) {
                for (Eigen::Index j = 0; j < i; ++j) {
                    cs.covariance(i, j) = cs.covariance(j, i);
                }
            }
        }
        stats.classes.push_back(std::move(cs));
    }
    return stats;
}

Eigen::MatrixXd pooled_covariance(const ClassStats& stats) {
    if (stats.classes.empty()) {
        throw ValidationError(ErrorCode::InsufficientSamples, "no classes");
    }
    const auto nb = static_cast<Eigen::Index>(stats.bands);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(nb, nb);
    double dof = 0.0;
    for (const auto& c : stats.classes) {
        if (c.count < 2) {
            throw ValidationError(ErrorCode::InsufficientSamples,
                                  "class " + std::to_string(c.class_id) + " has " +
                                      std::to_string(c.count) + " sample(s), need >= 2");
        }
        const double w = static_cast<double>(c.count - 1);
        sum += w * c.covariance;
        dof += w;
    }
    Eigen::MatrixXd pooled = sum / dof;
    return (pooled + pooled.transpose()) / 2.0;
}

} // namespace terraclass
