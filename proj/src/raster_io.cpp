#include "terraclass/raster_io.hpp"

#include "terraclass/csv.hpp"
#include "terraclass/errors.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <limits>
#include <set>

namespace fs = std::filesystem;

namespace terraclass {

std::size_t bytes_per_sample(DataType type) {
    switch (type) {
    case DataType::U8: return 1;
    case DataType::I16:
    case DataType::U16: return 2;
    case DataType::F32: return 4;
    }
    return 0;
}

int envi_code(DataType type) {
    switch (type) {
    case DataType::U8: return 1;
    case DataType::I16: return 2;
    case DataType::F32: return 4;
    case DataType::U16: return 12;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// Containers

MultibandRaster::MultibandRaster(std::size_t bands, std::size_t rows, std::size_t cols)
    : bands_(bands), rows_(rows), cols_(cols), values_(bands * rows * cols, 0.0) {}

MultibandRaster::MultibandRaster(std::size_t bands, std::size_t rows, std::size_t cols,
                                 std::vector<double> values)
    : bands_(bands), rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != bands * rows * cols) {
        throw ValidationError(ErrorCode::SizeMismatch,
                              "expected " + std::to_string(bands * rows * cols) +
                                  " samples, got " + std::to_string(values_.size()));
    }
}

ClassRaster::ClassRaster(std::size_t rows, std::size_t cols, ClassId fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

ClassRaster::ClassRaster(std::size_t rows, std::size_t cols, std::vector<ClassId> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows * cols) {
        throw ValidationError(ErrorCode::SizeMismatch,
                              "expected " + std::to_string(rows * cols) + " cells, got " +
                                  std::to_string(values_.size()));
    }
}

std::array<std::size_t, 256> ClassRaster::histogram() const {
    std::array<std::size_t, 256> counts{};
    for (ClassId v : values_) {
        ++counts[v];
    }
    return counts;
}

ClassLegend::ClassLegend(std::vector<LegendEntry> entries) : entries_(std::move(entries)) {
    std::sort(entries_.begin(), entries_.end(),
              [](const LegendEntry& a, const LegendEntry& b) { return a.class_id < b.class_id; });
    std::set<std::string> names;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.class_id == kUnclassified) {
            throw ValidationError(ErrorCode::Validation, "class id 0 is reserved for unclassified");
        }
        if (i > 0 && entries_[i - 1].class_id == e.class_id) {
            throw ValidationError(ErrorCode::DuplicateClassId,
                                  "class id " + std::to_string(e.class_id));
        }
        if (e.name.empty()) {
            throw ValidationError(ErrorCode::Validation,
                                  "empty name for class " + std::to_string(e.class_id));
        }
        if (!names.insert(e.name).second) {
            throw ValidationError(ErrorCode::DuplicateName, "class name '" + e.name + "'");
        }
    }
}

const LegendEntry* ClassLegend::find(ClassId id) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                               [](const LegendEntry& e, ClassId v) { return e.class_id < v; });
    return (it != entries_.end() && it->class_id == id) ? &*it : nullptr;
}

ClassLegend ClassLegend::generated(const std::vector<ClassId>& ids, const std::string& prefix) {
    std::vector<LegendEntry> entries;
    entries.reserve(ids.size());
    for (ClassId id : ids) {
        // Red channel is 97*id mod 256, injective over 0..255 and nonzero for id > 0,
        // so the palette stays bijective and never collides with unclassified black.
        const unsigned v = id;
        Rgb color{static_cast<std::uint8_t>((v * 97U) % 256U),
                  static_cast<std::uint8_t>((v * 53U + 90U) % 256U),
                  static_cast<std::uint8_t>((v * 181U + 170U) % 256U)};
        entries.push_back({id, prefix + "_" + std::to_string(id), color});
    }
    return ClassLegend(std::move(entries));
}

void validate_against_legend(const ClassRaster& cr, const ClassLegend& legend) {
    const auto hist = cr.histogram();
    for (std::size_t id = 1; id < hist.size(); ++id) {
        if (hist[id] > 0 && !legend.contains(static_cast<ClassId>(id))) {
            throw ValidationError(ErrorCode::Validation,
                                  "class " + std::to_string(id) + " missing from legend");
        }
    }
}

// ---------------------------------------------------------------------------
// Header

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

[[noreturn]] void malformed(std::size_t line_no, const std::string& why) {
    throw ValidationError(ErrorCode::MalformedHeader,
                          "line " + std::to_string(line_no) + ": " + why);
}

std::size_t parse_dimension(const std::string& value, std::size_t line_no) {
    std::size_t pos = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &pos);
    } catch (const std::exception&) {
        malformed(line_no, "not an integer: '" + value + "'");
    }
    if (pos != value.size() || v < 1) {
        malformed(line_no, "expected a positive integer, got '" + value + "'");
    }
    return static_cast<std::size_t>(v);
}

std::string read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("read failure on " + path.string());
    }
    return bytes;
}

void write_all(const fs::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

constexpr bool host_is_little = std::endian::native == std::endian::little;

std::size_t payload_index(Interleave il, std::size_t bands, std::size_t rows, std::size_t cols,
                          std::size_t b, std::size_t r, std::size_t c) {
    switch (il) {
    case Interleave::BSQ: return (b * rows + r) * cols + c;
    case Interleave::BIL: return (r * bands + b) * cols + c;
    case Interleave::BIP: return (r * cols + c) * bands + b;
    }
    return 0;
}

template <typename T>
T load_sample(const char* src, bool swap) {
    std::array<char, sizeof(T)> buf{};
    std::memcpy(buf.data(), src, sizeof(T));
    if (swap) {
        std::reverse(buf.begin(), buf.end());
    }
    T value;
    std::memcpy(&value, buf.data(), sizeof(T));
    return value;
}

template <typename T>
void store_sample(char* dst, T value, bool swap) {
    std::array<char, sizeof(T)> buf{};
    std::memcpy(buf.data(), &value, sizeof(T));
    if (swap) {
        std::reverse(buf.begin(), buf.end());
    }
    std::memcpy(dst, buf.data(), sizeof(T));
}

template <typename T>
T checked_integer(double v) {
    if (std::nearbyint(v) != v || v < static_cast<double>(std::numeric_limits<T>::min()) ||
        v > static_cast<double>(std::numeric_limits<T>::max())) {
        throw ValidationError(ErrorCode::Validation,
                              "sample " + std::to_string(v) + " not representable in output type");
    }
    return static_cast<T>(v);
}

} // namespace

RasterHeader read_header(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(std::move(line));
    }
    if (in.bad()) {
        throw IoError("read failure on " + path.string());
    }
    if (lines.empty() || csv::trim(lines[0]) != "ENVI") {
        malformed(1, "first line must be 'ENVI'");
    }

    RasterHeader h;
    std::vector<std::pair<std::string, std::string>> pairs;
    std::vector<std::size_t> pair_lines;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t line_no = i + 1;
        const std::string text = csv::trim(lines[i]);
        if (text.empty()) {
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos) {
            malformed(line_no, "expected 'key = value'");
        }
        std::string key = lower(csv::trim(text.substr(0, eq)));
        std::string value = csv::trim(text.substr(eq + 1));
        if (key.empty()) {
            malformed(line_no, "empty key");
        }
        if (!value.empty() && value.front() == '{') {
            while (value.find('}') == std::string::npos) {
                if (++i >= lines.size()) {
                    malformed(line_no, "unterminated '{' value");
                }
                value += "\n" + lines[i];
            }
        }
        pairs.emplace_back(std::move(key), std::move(value));
        pair_lines.push_back(line_no);
    }

    auto find = [&](const std::string& key) -> std::ptrdiff_t {
        for (std::size_t i = pairs.size(); i-- > 0;) {
            if (pairs[i].first == key) {
                return static_cast<std::ptrdiff_t>(i);
            }
        }
        return -1;
    };
    auto require = [&](const std::string& key) -> std::size_t {
        const auto i = find(key);
        if (i < 0) {
            throw ValidationError(ErrorCode::MissingKey, key);
        }
        return static_cast<std::size_t>(i);
    };

    const auto is = require("samples");
    const auto il = require("lines");
    const auto ib = require("bands");
    const auto it = require("data type");
    const auto ii = require("interleave");
    const auto io = require("byte order");

    h.samples = parse_dimension(pairs[is].second, pair_lines[is]);
    h.lines = parse_dimension(pairs[il].second, pair_lines[il]);
    h.bands = parse_dimension(pairs[ib].second, pair_lines[ib]);

    const std::string& type_text = pairs[it].second;
    int code = 0;
    try {
        std::size_t pos = 0;
        code = std::stoi(type_text, &pos);
        if (pos != type_text.size()) {
            malformed(pair_lines[it], "bad data type '" + type_text + "'");
        }
    } catch (const std::logic_error&) {
        malformed(pair_lines[it], "bad data type '" + type_text + "'");
    }
    switch (code) {
    case 1: h.data_type = DataType::U8; break;
    case 2: h.data_type = DataType::I16; break;
    case 4: h.data_type = DataType::F32; break;
    case 12: h.data_type = DataType::U16; break;
    default:
        throw ValidationError(ErrorCode::UnsupportedDataType, "data type " + std::to_string(code));
    }

    const std::string interleave = lower(pairs[ii].second);
    if (interleave == "bsq") {
        h.interleave = Interleave::BSQ;
    } else if (interleave == "bil") {
        h.interleave = Interleave::BIL;
    } else if (interleave == "bip") {
        h.interleave = Interleave::BIP;
    } else {
        malformed(pair_lines[ii], "unknown interleave '" + pairs[ii].second + "'");
    }

    if (pairs[io].second == "0") {
        h.byte_order = ByteOrder::Little;
    } else if (pairs[io].second == "1") {
        h.byte_order = ByteOrder::Big;
    } else {
        malformed(pair_lines[io], "byte order must be 0 or 1");
    }

    static const std::set<std::string> required{"samples",    "lines",      "bands",
                                                "data type",  "interleave", "byte order"};
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (required.count(pairs[i].first) != 0) {
            continue;
        }
        // Last occurrence wins, matching the required-key lookup.
        if (find(pairs[i].first) == static_cast<std::ptrdiff_t>(i)) {
            h.extra.push_back(pairs[i]);
        }
    }
    return h;
}

void write_header(const RasterHeader& h, const fs::path& path) {
    std::string text = "ENVI\n";
    text += "samples = " + std::to_string(h.samples) + "\n";
    text += "lines = " + std::to_string(h.lines) + "\n";
    text += "bands = " + std::to_string(h.bands) + "\n";
    text += "data type = " + std::to_string(envi_code(h.data_type)) + "\n";
    switch (h.interleave) {
    case Interleave::BSQ: text += "interleave = bsq\n"; break;
    case Interleave::BIL: text += "interleave = bil\n"; break;
    case Interleave::BIP: text += "interleave = bip\n"; break;
    }
    text += std::string("byte order = ") + (h.byte_order == ByteOrder::Big ? "1" : "0") + "\n";
    for (const auto& [key, value] : h.extra) {
        text += key + " = " + value + "\n";
    }
    write_all(path, text);
}

// ---------------------------------------------------------------------------
// Payload

MultibandRaster read_raster(const RasterHeader& h, const fs::path& path) {
    std::error_code ec;
    const auto actual = fs::file_size(path, ec);
    if (ec) {
        throw IoError("cannot stat " + path.string() + ": " + ec.message());
    }
    const std::size_t expected = h.payload_bytes();
    if (actual != expected) {
        throw ValidationError(ErrorCode::SizeMismatch, path.string() + ": expected " +
                                                           std::to_string(expected) +
                                                           " bytes, found " +
                                                           std::to_string(actual));
    }
    const std::string bytes = read_all(path);
    if (bytes.size() != expected) {
        throw ValidationError(ErrorCode::SizeMismatch, path.string() + ": expected " +
                                                           std::to_string(expected) +
                                                           " bytes, read " +
                                                           std::to_string(bytes.size()));
    }

    const bool swap = (h.byte_order == ByteOrder::Little) != host_is_little;
    const std::size_t width = bytes_per_sample(h.data_type);
    MultibandRaster out(h.bands, h.lines, h.samples);
    for (std::size_t b = 0; b < h.bands; ++b) {
        for (std::size_t r = 0; r < h.lines; ++r) {
            for (std::size_t c = 0; c < h.samples; ++c) {
                const char* src =
                    bytes.data() +
                    payload_index(h.interleave, h.bands, h.lines, h.samples, b, r, c) * width;
                double v = 0.0;
                switch (h.data_type) {
                case DataType::U8: v = static_cast<unsigned char>(*src); break;
                case DataType::I16: v = load_sample<std::int16_t>(src, swap); break;
                case DataType::U16: v = load_sample<std::uint16_t>(src, swap); break;
                case DataType::F32: v = load_sample<float>(src, swap); break;
                }
                if (!std::isfinite(v)) {
                    throw ValidationError(ErrorCode::NonFiniteSample,
                                          "band " + std::to_string(b) + " row " +
                                              std::to_string(r) + " col " + std::to_string(c));
                }
                out.at(b, r, c) = v;
            }
        }
    }
    return out;
}

void write_raster(const MultibandRaster& raster, const RasterHeader& layout,
                  const fs::path& header_path, const fs::path& data_path) {
    RasterHeader h = layout;
    h.samples = raster.cols();
    h.lines = raster.rows();
    h.bands = raster.bands();

    const bool swap = (h.byte_order == ByteOrder::Little) != host_is_little;
    const std::size_t width = bytes_per_sample(h.data_type);
    std::string bytes(h.payload_bytes(), '\0');
    for (std::size_t b = 0; b < h.bands; ++b) {
        for (std::size_t r = 0; r < h.lines; ++r) {
            for (std::size_t c = 0; c < h.samples; ++c) {
                char* dst =
                    bytes.data() +
                    payload_index(h.interleave, h.bands, h.lines, h.samples, b, r, c) * width;
                const double v = raster.at(b, r, c);
                switch (h.data_type) {
                case DataType::U8:
                    *dst = static_cast<char>(checked_integer<std::uint8_t>(v));
                    break;
                case DataType::I16: store_sample(dst, checked_integer<std::int16_t>(v), swap); break;
                case DataType::U16: store_sample(dst, checked_integer<std::uint16_t>(v), swap); break;
                case DataType::F32: store_sample(dst, static_cast<float>(v), swap); break;
                }
            }
        }
    }
    write_header(h, header_path);
    write_all(data_path, bytes);
}

// ---------------------------------------------------------------------------
// Class rasters

fs::path data_path_for(const fs::path& header_path) {
    fs::path p = header_path;
    if (lower(p.extension().string()) == ".hdr") {
        p.replace_extension(".dat");
    } else {
        p += ".dat";
    }
    return p;
}

ClassRasterFiles ClassRasterFiles::from_prefix(const fs::path& prefix) {
    fs::path hdr = prefix;
    hdr += ".hdr";
    fs::path dat = prefix;
    dat += ".dat";
    fs::path leg = prefix;
    leg += ".legend.csv";
    return {hdr, dat, leg};
}

ClassRasterFiles ClassRasterFiles::from_header(const fs::path& header) {
    fs::path prefix = header;
    if (lower(prefix.extension().string()) == ".hdr") {
        prefix.replace_extension();
    }
    return from_prefix(prefix);
}

void write_class_raster(const ClassRaster& cr, const ClassLegend& legend, const fs::path& prefix) {
    validate_against_legend(cr, legend);
    const auto files = ClassRasterFiles::from_prefix(prefix);

    RasterHeader h;
    h.samples = cr.cols();
    h.lines = cr.rows();
    h.bands = 1;
    h.data_type = DataType::U8;
    h.interleave = Interleave::BSQ;
    h.byte_order = ByteOrder::Little;
    h.extra.emplace_back("file type", "ENVI Classification");
    write_header(h, files.header);

    std::string bytes(cr.values().begin(), cr.values().end());
    write_all(files.data, bytes);
    write_legend(legend, files.legend);
}

ClassRaster read_class_map(const fs::path& header_path) {
    const auto files = ClassRasterFiles::from_header(header_path);
    const RasterHeader h = read_header(files.header);
    if (h.bands != 1) {
        throw ValidationError(ErrorCode::Validation,
                              files.header.string() + ": class map must have exactly one band");
    }
    if (h.data_type == DataType::F32) {
        throw ValidationError(ErrorCode::UnsupportedDataType,
                              files.header.string() + ": class map must be integer-typed");
    }
    const MultibandRaster raw = read_raster(h, files.data);
    std::vector<ClassId> values;
    values.reserve(raw.pixel_count());
    for (double v : raw.values()) {
        if (v < 0.0 || v > 255.0) {
            throw ValidationError(ErrorCode::Validation,
                                  files.header.string() + ": class value " + std::to_string(v) +
                                      " outside 0..255");
        }
        values.push_back(static_cast<ClassId>(v));
    }
    return ClassRaster(raw.rows(), raw.cols(), std::move(values));
}

std::pair<ClassRaster, ClassLegend> read_class_raster(const fs::path& header_path) {
    const auto files = ClassRasterFiles::from_header(header_path);
    ClassRaster cr = read_class_map(files.header);
    ClassLegend legend = read_legend(files.legend);
    validate_against_legend(cr, legend);
    return {std::move(cr), std::move(legend)};
}

// ---------------------------------------------------------------------------
// Legend CSV

ClassLegend read_legend(const fs::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) {
        throw ValidationError(ErrorCode::MalformedRow, path.string() + ": empty legend file");
    }
    csv::expect_header(rows.front(), {"class_id", "name", "r", "g", "b"}, path);

    std::vector<LegendEntry> entries;
    std::set<int> seen;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != 5) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  path.string() + " line " + std::to_string(row.line_no) +
                                      ": expected 5 fields");
        }
        const long long id = csv::parse_int(row.fields[0], "class_id", row.line_no);
        if (id < 1 || id > 255) {
            throw ValidationError(ErrorCode::Validation,
                                  "line " + std::to_string(row.line_no) + ": class_id " +
                                      std::to_string(id) + " outside 1..255");
        }
        if (!seen.insert(static_cast<int>(id)).second) {
            throw ValidationError(ErrorCode::DuplicateClassId, "class id " + std::to_string(id));
        }
        std::array<std::uint8_t, 3> rgb{};
        for (std::size_t k = 0; k < 3; ++k) {
            const long long v = csv::parse_int(row.fields[2 + k], "color", row.line_no);
            if (v < 0 || v > 255) {
                throw ValidationError(ErrorCode::ColorOutOfRange,
                                      "line " + std::to_string(row.line_no) + ": " +
                                          std::to_string(v));
            }
            rgb[k] = static_cast<std::uint8_t>(v);
        }
        entries.push_back({static_cast<ClassId>(id), row.fields[1], {rgb[0], rgb[1], rgb[2]}});
    }
    return ClassLegend(std::move(entries));
}

void write_legend(const ClassLegend& legend, const fs::path& path) {
    std::string text = "class_id,name,r,g,b\n";
    for (const auto& e : legend.entries()) {
        std::string name = e.name;
        if (name.find_first_of(",\"") != std::string::npos) {
            std::string quoted = "\"";
            for (char ch : name) {
                quoted += ch;
                if (ch == '"') {
                    quoted += '"';
                }
            }
            name = quoted + "\"";
        }
        text += std::to_string(e.class_id) + "," + name + "," + std::to_string(e.color.r) + "," +
                std::to_string(e.color.g) + "," + std::to_string(e.color.b) + "\n";
    }
    write_all(path, text);
}

} // namespace terraclass
