#include "terraclass/accuracy.hpp"

#include "terraclass/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <set>

namespace terraclass {

ConfusionMatrix::ConfusionMatrix(std::vector<ClassId> class_ids, std::vector<std::int64_t> counts)
    : ConfusionMatrix(class_ids, std::move(counts), std::vector<std::int64_t>(class_ids.size(), 0)) {}

ConfusionMatrix::ConfusionMatrix(std::vector<ClassId> class_ids, std::vector<std::int64_t> counts,
                                 std::vector<std::int64_t> unclassified)
    : ids_(std::move(class_ids)), counts_(std::move(counts)), unclassified_(std::move(unclassified)) {
    const std::size_t m = ids_.size();
    if (m == 0) {
        throw ValidationError(ErrorCode::EmptyMatrix, "confusion matrix needs at least one class");
    }
    if (counts_.size() != m * m || unclassified_.size() != m) {
        throw ValidationError(ErrorCode::DimensionMismatch, "confusion matrix shape");
    }
    if (!std::is_sorted(ids_.begin(), ids_.end()) ||
        std::adjacent_find(ids_.begin(), ids_.end()) != ids_.end()) {
        throw ValidationError(ErrorCode::Validation, "class ids must be strictly ascending");
    }
    auto negative = [](std::int64_t v) { return v < 0; };
    if (std::any_of(counts_.begin(), counts_.end(), negative) ||
        std::any_of(unclassified_.begin(), unclassified_.end(), negative)) {
        throw ValidationError(ErrorCode::Validation, "negative count");
    }
}

bool ConfusionMatrix::has_unclassified() const {
    return std::any_of(unclassified_.begin(), unclassified_.end(),
                       [](std::int64_t v) { return v > 0; });
}

std::int64_t ConfusionMatrix::total() const {
    std::int64_t n = 0;
    for (auto v : counts_) {
        n += v;
    }
    for (auto v : unclassified_) {
        n += v;
    }
    return n;
}

std::int64_t ConfusionMatrix::row_total(std::size_t predicted) const {
    std::int64_t s = 0;
    for (std::size_t j = 0; j < ids_.size(); ++j) {
        s += at(predicted, j);
    }
    return s;
}

std::int64_t ConfusionMatrix::column_total(std::size_t reference) const {
    std::int64_t s = unclassified_[reference];
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        s += at(i, reference);
    }
    return s;
}

std::int64_t ConfusionMatrix::diagonal_total() const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        s += at(i, i);
    }
    return s;
}

ConfusionMatrix build_confusion(const ClassRaster& predicted, const RoiSet& reference) {
    if (reference.rows() != predicted.rows() || reference.cols() != predicted.cols()) {
        throw ValidationError(ErrorCode::OutOfBounds, "reference bounds differ from map");
    }
    std::set<ClassId> id_set;
    for (const auto& e : reference.entries()) {
        if (e.row >= predicted.rows() || e.col >= predicted.cols()) {
            throw ValidationError(ErrorCode::OutOfBounds,
                                  "(" + std::to_string(e.row) + "," + std::to_string(e.col) + ")");
        }
        id_set.insert(e.class_id);
        const ClassId p = predicted.at(e.row, e.col);
        if (p != kUnclassified) {
            id_set.insert(p);
        }
    }
    std::vector<ClassId> ids(id_set.begin(), id_set.end());
    std::array<std::size_t, 256> index{};
    for (std::size_t i = 0; i < ids.size(); ++i) {
        index[ids[i]] = i;
    }
    const std::size_t m = ids.size();
    std::vector<std::int64_t> counts(m * m, 0);
    std::vector<std::int64_t> unclassified(m, 0);
    for (const auto& e : reference.entries()) {
        const ClassId p = predicted.at(e.row, e.col);
        const std::size_t col = index[e.class_id];
        if (p == kUnclassified) {
            ++unclassified[col];
        } else {
            ++counts[index[p] * m + col];
        }
    }
    return ConfusionMatrix(std::move(ids), std::move(counts), std::move(unclassified));
}

double overall_accuracy(const ConfusionMatrix& cm) {
    const std::int64_t n = cm.total();
    if (n == 0) {
        throw ValidationError(ErrorCode::EmptyMatrix, "no samples");
    }
    return static_cast<double>(cm.diagonal_total()) / static_cast<double>(n);
}

double kappa(const ConfusionMatrix& cm) {
    const std::int64_t n = cm.total();
    if (n == 0) {
        throw ValidationError(ErrorCode::EmptyMatrix, "no samples");
    }
    // Exact integer numerator and denominator: N*sum(x_ii) - sum(x_i+ x_+i) over
    // N^2 - sum(x_i+ x_+i). N^2 must fit in 64 bits.
    if (n > 3'000'000'000LL) {
        throw ValidationError(ErrorCode::Validation, "too many samples for exact kappa");
    }
    std::int64_t chance = 0;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        chance += cm.row_total(i) * cm.column_total(i);
    }
    const std::int64_t num = n * cm.diagonal_total() - chance;
    const std::int64_t den = n * n - chance;
    if (den == 0) {
        throw ValidationError(ErrorCode::DegenerateChance, "chance agreement is 1");
    }
    return static_cast<double>(num) / static_cast<double>(den);
}

std::vector<ClassAccuracy> per_class_accuracy(const ConfusionMatrix& cm) {
    if (cm.total() == 0) {
        throw ValidationError(ErrorCode::EmptyMatrix, "no samples");
    }
    std::vector<ClassAccuracy> out;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        ClassAccuracy a;
        a.class_id = cm.class_ids()[i];
        const auto diag = static_cast<double>(cm.at(i, i));
        if (const auto col = cm.column_total(i); col > 0) {
            a.producer = diag / static_cast<double>(col);
        }
        if (const auto row = cm.row_total(i); row > 0) {
            a.user = diag / static_cast<double>(row);
        }
        out.push_back(a);
    }
    return out;
}

std::string format_accuracy_report(const ConfusionMatrix& cm) {
    std::string out = "# rows = predicted, columns = reference\n";
    out += "MATRIX\n";
    out += "predicted\\reference";
    for (ClassId id : cm.class_ids()) {
        out += fmt::format(",{}", id);
    }
    out += "\n";
    for (std::size_t i = 0; i < cm.size(); ++i) {
        out += fmt::format("{}", cm.class_ids()[i]);
        for (std::size_t j = 0; j < cm.size(); ++j) {
            out += fmt::format(",{}", cm.at(i, j));
        }
        out += "\n";
    }
    out += "unclassified";
    for (std::size_t j = 0; j < cm.size(); ++j) {
        out += fmt::format(",{}", cm.unclassified(j));
    }
    out += "\n";

    out += "OVERALL\n";
    out += fmt::format("accuracy,{}\n", overall_accuracy(cm));
    try {
        out += fmt::format("kappa,{}\n", kappa(cm));
    } catch (const ValidationError& e) {
        if (e.code() != ErrorCode::DegenerateChance) {
            throw;
        }
        out += "kappa,NA\n";
    }
    out += fmt::format("N,{}\n", cm.total());

    out += "PER_CLASS\n";
    out += "class_id,producer,user\n";
    auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{}", *v) : ""; };
    for (const auto& a : per_class_accuracy(cm)) {
        out += fmt::format("{},{},{}\n", a.class_id, opt(a.producer), opt(a.user));
    }
    return out;
}

void write_accuracy_report(const ConfusionMatrix& cm, const std::filesystem::path& path) {
    const std::string text = format_accuracy_report(cm);
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
