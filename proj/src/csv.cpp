#include "terraclass/csv.hpp"

#include "terraclass/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

namespace terraclass::csv {

std::vector<std::string> split_line(std::string_view line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(ch);
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(ch);
        }
    }
    out.push_back(std::move(field));
    return out;
}

std::string trim(std::string_view s) {
    auto is_space = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && is_space(static_cast<unsigned char>(s.front()))) {
        s.remove_prefix(1);
    }
    while (!s.empty() && is_space(static_cast<unsigned char>(s.back()))) {
        s.remove_suffix(1);
    }
    return std::string(s);
}

std::vector<Row> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<Row> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) {
            line.erase(0, 3);
        }
        if (trim(line).empty()) {
            continue;
        }
        Row row{line_no, split_line(line)};
        for (auto& f : row.fields) {
            f = trim(f);
        }
        rows.push_back(std::move(row));
    }
    if (in.bad()) {
        throw IoError("read failure on " + path.string());
    }
    return rows;
}

long long parse_int(std::string_view s, std::string_view what, std::size_t line_no) {
    const std::string t = trim(s);
    long long value = 0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (t.empty() || ec != std::errc() || ptr != last) {
        throw ValidationError(ErrorCode::MalformedRow, "line " + std::to_string(line_no) +
                                                           ": bad " + std::string(what) +
                                                           " '" + t + "'");
    }
    return value;
}

double parse_real(std::string_view s, std::string_view what, std::size_t line_no) {
    std::string t = trim(s);
    if (std::count(t.begin(), t.end(), ',') == 1 && t.find('.') == std::string::npos) {
        std::replace(t.begin(), t.end(), ',', '.');
    }
    double value = 0.0;
    const auto* first = t.data();
    const auto* last = t.data() + t.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
        throw ValidationError(ErrorCode::MalformedRow, "line " + std::to_string(line_no) +
                                                           ": bad " + std::string(what) +
                                                           " '" + t + "'");
    }
    return value;
}

void expect_header(const Row& header, const std::vector<std::string_view>& expected,
                   const std::filesystem::path& path) {
    auto lower = [](std::string s) {
        std::transform(s.begin(), s.end(), s.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        return s;
    };
    bool ok = header.fields.size() >= expected.size();
    for (std::size_t i = 0; ok && i < expected.size(); ++i) {
        ok = lower(header.fields[i]) == expected[i];
    }
    if (!ok) {
        std::string want;
        for (auto e : expected) {
            want += (want.empty() ? "" : ",") + std::string(e);
        }
        throw ValidationError(ErrorCode::MalformedRow,
                              path.string() + ": expected header '" + want + "'");
    }
}

} // namespace terraclass::csv
