#include "terraclass/synth.hpp"

#include "terraclass/csv.hpp"
#include "terraclass/errors.hpp"
#include "terraclass/rng.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace terraclass {

namespace {

[[noreturn]] void bad_spec(std::size_t line_no, const std::string& why) {
    throw ValidationError(ErrorCode::InvalidConfig,
                          "scene spec line " + std::to_string(line_no) + ": " + why);
}

std::vector<double> parse_numbers(std::string value, std::size_t line_no) {
    for (char& ch : value) {
        if (ch == ',' || ch == '{' || ch == '}') {
            ch = ' ';
        }
    }
    std::vector<double> out;
    std::istringstream in(value);
    for (std::string tok; in >> tok;) {
        out.push_back(csv::parse_real(tok, "number", line_no));
    }
    return out;
}

std::uint64_t parse_u64(const std::string& value, std::size_t line_no) {
    std::uint64_t v = 0;
    const auto* first = value.data();
    const auto* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (value.empty() || ec != std::errc() || ptr != last) {
        bad_spec(line_no, "expected an unsigned integer, got '" + value + "'");
    }
    return v;
}

std::size_t to_index(double v, std::size_t line_no) {
    if (v < 0 || std::nearbyint(v) != v) {
        bad_spec(line_no, "expected a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

void SynthSceneSpec::validate() const {
    if (rows == 0 || cols == 0 || bands == 0) {
        throw ValidationError(ErrorCode::InvalidConfig, "rows, cols and bands must be >= 1");
    }
    if (classes.empty()) {
        throw ValidationError(ErrorCode::InvalidConfig, "scene has no classes");
    }
    std::vector<int> owner(rows * cols, -1);
    for (const auto& c : classes) {
        const std::string tag = "class " + std::to_string(c.class_id);
        if (c.class_id == kUnclassified) {
            throw ValidationError(ErrorCode::InvalidConfig, "class id 0 is reserved");
        }
        if (c.mean.size() != bands || c.stddev.size() != bands) {
            throw ValidationError(ErrorCode::InvalidConfig,
                                  tag + ": mean and stddev need " + std::to_string(bands) +
                                      " values");
        }
        for (double s : c.stddev) {
            if (!(s >= 0.0)) {
                throw ValidationError(ErrorCode::InvalidConfig, tag + ": stddev must be >= 0");
            }
        }
        for (const auto& r : c.rects) {
            if (r.height == 0 || r.width == 0 || r.row + r.height > rows ||
                r.col + r.width > cols) {
                throw ValidationError(ErrorCode::InvalidConfig,
                                      tag + ": rectangle outside the frame");
            }
            for (std::size_t y = r.row; y < r.row + r.height; ++y) {
                for (std::size_t x = r.col; x < r.col + r.width; ++x) {
                    int& o = owner[y * cols + x];
                    if (o >= 0) {
                        throw ValidationError(ErrorCode::OverlappingLayout,
                                              tag + " overlaps class " + std::to_string(o) +
                                                  " at (" + std::to_string(y) + "," +
                                                  std::to_string(x) + ")");
                    }
                    o = c.class_id;
                }
            }
        }
    }
    const auto gap = std::find(owner.begin(), owner.end(), -1);
    if (gap != owner.end()) {
        const auto p = static_cast<std::size_t>(gap - owner.begin());
        throw ValidationError(ErrorCode::IncompleteLayout,
                              "pixel (" + std::to_string(p / cols) + "," +
                                  std::to_string(p % cols) + ") not covered by any rectangle");
    }
    // Legend construction checks id and name uniqueness.
    std::vector<LegendEntry> entries;
    for (const auto& c : classes) {
        entries.push_back({c.class_id, c.name, c.color});
    }
    ClassLegend legend(std::move(entries));
}

SynthSceneSpec parse_scene_spec(const std::string& text) {
    SynthSceneSpec spec;
    std::map<int, SceneClass> classes;
    bool have_rows = false;
    bool have_cols = false;
    bool have_bands = false;

    std::istringstream in(text);
    std::size_t line_no = 0;
    for (std::string raw; std::getline(in, raw);) {
        ++line_no;
        const std::string line = csv::trim(raw);
        if (line.empty() || line[0] == ';' || line[0] == '#' || line == "ENVI") {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            bad_spec(line_no, "expected 'key = value'");
        }
        std::string key = csv::trim(line.substr(0, eq));
        std::transform(key.begin(), key.end(), key.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        const std::string value = csv::trim(line.substr(eq + 1));

        if (key == "rows") {
            spec.rows = parse_u64(value, line_no);
            have_rows = true;
        } else if (key == "cols") {
            spec.cols = parse_u64(value, line_no);
            have_cols = true;
        } else if (key == "bands") {
            spec.bands = parse_u64(value, line_no);
            have_bands = true;
        } else if (key == "seed") {
            spec.seed = parse_u64(value, line_no);
        } else if (key.rfind("class ", 0) == 0) {
            std::istringstream ks(key.substr(6));
            long long id = -1;
            std::string field;
            if (!(ks >> id >> field) || id < 1 || id > 255) {
                bad_spec(line_no, "expected 'class <id 1..255> <field>'");
            }
            SceneClass& c = classes[static_cast<int>(id)];
            c.class_id = static_cast<ClassId>(id);
            if (field == "name") {
                c.name = value;
            } else if (field == "color") {
                const auto rgb = parse_numbers(value, line_no);
                if (rgb.size() != 3) {
                    bad_spec(line_no, "color needs 3 values");
                }
                std::array<std::uint8_t, 3> ch{};
                for (std::size_t k = 0; k < 3; ++k) {
                    if (rgb[k] < 0 || rgb[k] > 255 || std::nearbyint(rgb[k]) != rgb[k]) {
                        throw ValidationError(ErrorCode::ColorOutOfRange,
                                              "scene spec line " + std::to_string(line_no));
                    }
                    ch[k] = static_cast<std::uint8_t>(rgb[k]);
                }
                c.color = {ch[0], ch[1], ch[2]};
            } else if (field == "mean") {
                c.mean = parse_numbers(value, line_no);
            } else if (field == "stddev") {
                c.stddev = parse_numbers(value, line_no);
            } else if (field == "rect") {
                std::string list = value;
                std::replace(list.begin(), list.end(), ';', '\n');
                std::istringstream rs(list);
                for (std::string one; std::getline(rs, one);) {
                    if (csv::trim(one).empty()) {
                        continue;
                    }
                    const auto v = parse_numbers(one, line_no);
                    if (v.size() != 4) {
                        bad_spec(line_no, "rect needs 'row col height width'");
                    }
                    c.rects.push_back({to_index(v[0], line_no), to_index(v[1], line_no),
                                       to_index(v[2], line_no), to_index(v[3], line_no)});
                }
            } else {
                bad_spec(line_no, "unknown class field '" + field + "'");
            }
        } else {
            bad_spec(line_no, "unknown key '" + key + "'");
        }
    }
    if (!have_rows || !have_cols || !have_bands) {
        throw ValidationError(ErrorCode::MissingKey,
                              !have_rows ? "rows" : (!have_cols ? "cols" : "bands"));
    }
    const ClassLegend defaults = [&] {
        std::vector<ClassId> ids;
        for (const auto& [id, c] : classes) {
            ids.push_back(static_cast<ClassId>(id));
        }
        return ClassLegend::generated(ids, "class");
    }();
    for (auto& [id, c] : classes) {
        const auto* d = defaults.find(static_cast<ClassId>(id));
        if (c.name.empty()) {
            c.name = d->name;
        }
        if (c.color == Rgb{}) {
            c.color = d->color;
        }
        spec.classes.push_back(std::move(c));
    }
    spec.validate();
    return spec;
}

SynthSceneSpec read_scene_spec(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_scene_spec(text.str());
}

SyntheticScene generate_scene(const SynthSceneSpec& spec) {
    spec.validate();
    const std::size_t rows = spec.rows;
    const std::size_t cols = spec.cols;
    const std::size_t nb = spec.bands;

    SyntheticScene scene;
    scene.truth = ClassRaster(rows, cols);
    std::vector<const SceneClass*> by_id(256, nullptr);
    std::vector<LegendEntry> entries;
    for (const auto& c : spec.classes) {
        by_id[c.class_id] = &c;
        entries.push_back({c.class_id, c.name, c.color});
        for (const auto& r : c.rects) {
            for (std::size_t y = r.row; y < r.row + r.height; ++y) {
                for (std::size_t x = r.col; x < r.col + r.width; ++x) {
                    scene.truth.at(y, x) = c.class_id;
                }
            }
        }
    }
    scene.legend = ClassLegend(std::move(entries));

    scene.image = MultibandRaster(nb, rows, cols);
    Xoshiro256 rng(spec.seed);
    for (std::size_t y = 0; y < rows; ++y) {
        for (std::size_t x = 0; x < cols; ++x) {
            const SceneClass& c = *by_id[scene.truth.at(y, x)];
            for (std::size_t b = 0; b < nb; ++b) {
                scene.image.at(b, y, x) = c.mean[b] + c.stddev[b] * rng.normal();
            }
        }
    }
    return scene;
}

RoiSet sample_roi(const ClassRaster& truth, std::size_t stride, std::size_t offset) {
    if (stride == 0 || offset >= stride) {
        throw ValidationError(ErrorCode::InvalidConfig, "ROI stride must be >= 1 and > offset");
    }
    std::vector<RoiPixel> entries;
    for (std::size_t r = offset; r < truth.rows(); r += stride) {
        for (std::size_t c = offset; c < truth.cols(); c += stride) {
            if (truth.at(r, c) != kUnclassified) {
                entries.push_back({truth.at(r, c), r, c});
            }
        }
    }
    return RoiSet(std::move(entries), truth.rows(), truth.cols());
}

} // namespace terraclass
