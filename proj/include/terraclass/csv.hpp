#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace terraclass::csv {

struct Row {
    std::size_t line_no = 0;
    std::vector<std::string> fields;
};

/// Splits one line on commas. Double-quoted fields may contain commas;
/// a doubled quote inside a quoted field is a literal quote.
std::vector<std::string> split_line(std::string_view line);

/// Reads every non-blank line of a CSV file. The first row is the header.
std::vector<Row> read_file(const std::filesystem::path& path);

/// Trims ASCII whitespace from both ends.
std::string trim(std::string_view s);

/// Strict integer parse; throws ValidationError(MalformedRow) naming `what`.
long long parse_int(std::string_view s, std::string_view what, std::size_t line_no);

/// Strict real parse. Accepts a single decimal comma ("17,1").
double parse_real(std::string_view s, std::string_view what, std::size_t line_no);

/// Verifies the header row matches `expected` (case-insensitive, trimmed).
void expect_header(const Row& header, const std::vector<std::string_view>& expected,
                   const std::filesystem::path& path);

} // namespace terraclass::csv
