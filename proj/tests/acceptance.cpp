// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include "terraclass/accuracy.hpp"
#include "terraclass/change.hpp"
#include "terraclass/classify.hpp"
#include "terraclass/cli.hpp"
#include "terraclass/errors.hpp"
#include "terraclass/landscape.hpp"
#include "terraclass/raster_io.hpp"
#include "terraclass/render.hpp"
#include "terraclass/synth.hpp"
#include "test_support.hpp"

#include <fmt/format.h>

#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>

using namespace terraclass;
using terraclass::test::TempDir;

namespace {

/// Collects the first few failure messages of one criterion.
class Check {
public:
    void expect(bool ok, const std::string& what) {
        if (!ok) {
            ++failures_;
            if (messages_.size() < 5) {
                messages_.push_back(what);
            }
        }
    }
    [[nodiscard]] bool ok() const { return failures_ == 0; }
    [[nodiscard]] std::string summary() const {
        std::string s = fmt::format("{} failure(s)", failures_);
        for (const auto& m : messages_) {
            s += "; " + m;
        }
        return s;
    }

private:
    std::size_t failures_ = 0;
    std::vector<std::string> messages_;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

void kappa_oracle(Check& check) {
    const auto t0 = Clock::now();
    const auto ref = test::to_confusion({{35, 5}, {10, 50}});
    check.expect(std::abs(kappa(ref) - 0.6938775510) < 1e-9, "reference matrix kappa");

    std::mt19937_64 rng(1001);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto m = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
        const auto budget = std::uniform_int_distribution<long long>(1, 10000)(rng);
        // Spread `budget` samples over the m*m cells, biased toward the diagonal.
        std::vector<std::vector<long long>> counts(m, std::vector<long long>(m, 0));
        std::uniform_int_distribution<std::size_t> cell(0, m - 1);
        std::bernoulli_distribution diag(0.6);
        for (long long s = 0; s < budget; ++s) {
            const std::size_t i = cell(rng);
            counts[i][diag(rng) ? i : cell(rng)] += 1;
        }
        const auto cm = test::to_confusion(counts);
        double n = 0;
        std::vector<double> rows(m, 0.0), cols(m, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) {
                n += static_cast<double>(counts[i][j]);
                rows[i] += static_cast<double>(counts[i][j]);
                cols[j] += static_cast<double>(counts[i][j]);
            }
        double pe = 0.0;
        for (std::size_t i = 0; i < m; ++i) pe += rows[i] * cols[i] / (n * n);
        if (!(pe < 1.0 - 1e-15)) {
            bool threw = false;
            try {
                (void)kappa(cm);
            } catch (const ValidationError&) {
                threw = true;
            }
            check.expect(threw, fmt::format("trial {}: degenerate chance not reported", trial));
            continue;
        }
        const double k = kappa(cm);
        const double expect = test::kappa_oracle(counts);
        check.expect(std::abs(k - expect) <= 1e-9,
                     fmt::format("trial {}: kappa {} vs oracle {}", trial, k, expect));
        if (pe > 0.0) {
            check.expect(k <= overall_accuracy(cm) + 1e-12,
                         fmt::format("trial {}: kappa exceeds accuracy", trial));
        }
    }
    const double elapsed = seconds_since(t0);
    check.expect(elapsed < 1.0, fmt::format("runtime {:.3f}s >= 1s", elapsed));
}

void reduction_chain(Check& check) {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(2002);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rows = std::uniform_int_distribution<std::size_t>(1, 32)(rng);
        const auto cols = std::uniform_int_distribution<std::size_t>(1, 32)(rng);
        const auto bands = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        const auto classes = std::uniform_int_distribution<int>(2, 6)(rng);
        // Every other scene uses a coarse integer grid so exact ties occur.
        const bool coarse = trial % 2 == 0;
        MultibandRaster r(bands, rows, cols);
        std::uniform_real_distribution<double> fine(0.0, 255.0);
        std::uniform_int_distribution<int> grid(0, 6);
        for (std::size_t b = 0; b < bands; ++b)
            for (std::size_t y = 0; y < rows; ++y)
                for (std::size_t x = 0; x < cols; ++x) r.at(b, y, x) = coarse ? grid(rng) : fine(rng);

        ClassStats stats;
        stats.bands = bands;
        std::vector<int> ids(20);
        std::iota(ids.begin(), ids.end(), 1);
        std::shuffle(ids.begin(), ids.end(), rng);
        ids.resize(static_cast<std::size_t>(classes));
        std::sort(ids.begin(), ids.end());
        for (int id : ids) {
            ClassStat s;
            s.class_id = static_cast<ClassId>(id);
            s.count = bands + 1 + static_cast<std::size_t>(id % 5);
            s.mean.resize(static_cast<Eigen::Index>(bands));
            for (auto& v : s.mean) v = coarse ? grid(rng) : fine(rng);
            s.covariance = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(bands),
                                                     static_cast<Eigen::Index>(bands));
            stats.classes.push_back(s);
        }
        const auto md = min_distance_classify(r, stats);
        const auto mh = mahalanobis_classify(r, stats);
        const auto ml = max_likelihood_classify(r, stats);
        check.expect(md == mh, fmt::format("scene {}: Mahalanobis differs from minimum distance", trial));
        check.expect(md == ml, fmt::format("scene {}: max likelihood differs from minimum distance", trial));
    }
    const double elapsed = seconds_since(t0);
    check.expect(elapsed < 5.0, fmt::format("runtime {:.3f}s >= 5s", elapsed));
}

void kmeans_properties(Check& check) {
    std::mt19937_64 rng(3003);
    std::vector<MultibandRaster> scenes;
    for (int i = 0; i < 20; ++i) {
        const auto bands = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        scenes.push_back(test::random_raster(rng, bands, 24 + static_cast<std::size_t>(i), 30));
    }
    // Scenes with several tight groups plus noise.
    for (int i = 0; i < 10; ++i) {
        MultibandRaster r(2, 40, 40);
        std::normal_distribution<double> noise(0.0, 4.0);
        for (std::size_t p = 0; p < 1600; ++p) {
            const double c = 40.0 * static_cast<double>(p % 4);
            r.at(0, p / 40, p % 40) = c + noise(rng);
            r.at(1, p / 40, p % 40) = c * 0.5 + noise(rng);
        }
        scenes.push_back(std::move(r));
    }

    std::size_t index = 0;
    for (const auto& r : scenes) {
        for (std::size_t k = 1; k <= 6; ++k) {
            const auto res = kmeans_classify(r, {k, 50, 0.0});
            for (std::size_t i = 1; i < res.sse_trace.size(); ++i) {
                check.expect(res.sse_trace[i] <= res.sse_trace[i - 1],
                             fmt::format("scene {} k {}: SSE rose at iteration {}", index, k, i + 1));
            }
        }
        ++index;
    }

    // Two blobs: 50 pixels within 5 of (10,10), 50 within 5 of (200,200).
    MultibandRaster blobs(2, 10, 10);
    ClassRaster truth(10, 10);
    std::vector<std::size_t> order(100);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    std::uniform_real_distribution<double> jitter(-2.5, 2.5);
    for (std::size_t i = 0; i < 100; ++i) {
        const std::size_t p = order[i];
        const bool far = i < 50;
        const double c = far ? 200.0 : 10.0;
        blobs.at(0, p / 10, p % 10) = c + jitter(rng);
        blobs.at(1, p / 10, p % 10) = c + jitter(rng);
        truth[p] = far ? 2 : 1;
    }
    const auto two = kmeans_classify(blobs, {2, 20, 0.0});
    check.expect(two.map == truth, "two-blob partition not recovered");

    for (const auto& r : {blobs, scenes.front(), scenes.back()}) {
        const auto one = kmeans_classify(r, {1, 20, 0.0});
        for (std::size_t b = 0; b < r.bands(); ++b) {
            long double sum = 0.0L;
            for (double v : r.band(b)) sum += v;
            const double mean = static_cast<double>(sum / static_cast<long double>(r.pixel_count()));
            const double got = one.centroids(0, static_cast<Eigen::Index>(b));
            check.expect(std::abs(got - mean) <= 1e-9,
                         fmt::format("k=1 centroid band {}: {} vs {}", b, got, mean));
        }
    }
}

SynthSceneSpec recovery_spec() {
    SynthSceneSpec spec;
    spec.rows = 256;
    spec.cols = 256;
    spec.bands = 3;
    spec.seed = 4004;
    const double sd = 5.0;
    // Pairwise mean separation is at least 6 sd in every direction used.
    const std::vector<std::vector<double>> means = {
        {100, 100, 100}, {130, 100, 100}, {100, 130, 100}, {100, 100, 130}};
    for (int c = 0; c < 4; ++c) {
        SceneClass sc;
        sc.class_id = static_cast<ClassId>(c + 1);
        sc.name = fmt::format("class_{}", c + 1);
        sc.color = {static_cast<std::uint8_t>(60 * (c + 1)), 40, 90};
        sc.mean = means[static_cast<std::size_t>(c)];
        sc.stddev = {sd, sd, sd};
        sc.rects = {{static_cast<std::size_t>(c / 2) * 128, static_cast<std::size_t>(c % 2) * 128, 128, 128}};
        spec.classes.push_back(sc);
    }
    return spec;
}

void synthetic_recovery(Check& check) {
    const auto spec = recovery_spec();
    const auto scene = generate_scene(spec);
    for (std::size_t i = 0; i < spec.classes.size(); ++i)
        for (std::size_t j = i + 1; j < spec.classes.size(); ++j) {
            double d2 = 0.0;
            for (std::size_t b = 0; b < spec.bands; ++b) {
                d2 += std::pow((spec.classes[i].mean[b] - spec.classes[j].mean[b]) / spec.classes[i].stddev[b], 2);
            }
            check.expect(std::sqrt(d2) >= 6.0, fmt::format("classes {} and {} closer than 6 sigma", i + 1, j + 1));
        }
    const auto training = sample_roi(scene.truth, 8, 3);
    const auto stats = compute_class_stats(scene.image, training);

    const auto t0 = Clock::now();
    const auto map = max_likelihood_classify(scene.image, stats, std::nullopt, 0.0, {1});
    std::vector<RoiPixel> all;
    all.reserve(scene.truth.size());
    for (std::size_t r = 0; r < scene.truth.rows(); ++r)
        for (std::size_t c = 0; c < scene.truth.cols(); ++c) all.push_back({scene.truth.at(r, c), r, c});
    const RoiSet reference(std::move(all), scene.truth.rows(), scene.truth.cols());
    const auto cm = build_confusion(map, reference);
    const double oa = overall_accuracy(cm);
    const double elapsed = seconds_since(t0);

    std::size_t agree = 0;
    for (std::size_t p = 0; p < map.size(); ++p) agree += map[p] == scene.truth[p] ? 1 : 0;
    const double direct = static_cast<double>(agree) / static_cast<double>(map.size());
    check.expect(direct >= 0.99, fmt::format("accuracy {:.5f} < 0.99", direct));
    check.expect(oa == direct, "matrix accuracy differs from direct count");

    const auto tally = test::tally_oracle(map, reference);
    std::int64_t listed = 0;
    for (std::size_t i = 0; i < cm.size(); ++i) {
        for (std::size_t j = 0; j < cm.size(); ++j) {
            const auto it = tally.find({cm.class_ids()[i], cm.class_ids()[j]});
            check.expect(cm.at(i, j) == (it == tally.end() ? 0 : it->second),
                         fmt::format("cell ({},{}) differs from tally", i, j));
            listed += cm.at(i, j);
        }
        const auto it = tally.find({0, cm.class_ids()[i]});
        check.expect(cm.unclassified(i) == (it == tally.end() ? 0 : it->second), "unclassified row");
        listed += cm.unclassified(i);
    }
    check.expect(listed == static_cast<std::int64_t>(map.size()), "matrix total");
    check.expect(elapsed < 5.0, fmt::format("runtime {:.3f}s >= 5s", elapsed));
}

void landscape_oracle(Check& check) {
    std::mt19937_64 rng(5005);
    int done = 0;
    while (done < 200) {
        const int classes = std::uniform_int_distribution<int>(1, 4)(rng);
        const bool zeros = std::bernoulli_distribution(0.5)(rng);
        const auto cr = test::random_map(rng, 8, 8, classes, zeros);
        if (cr.histogram()[0] == cr.size()) continue;
        ++done;
        std::map<int, std::size_t> four_counts;
        for (bool eight : {false, true}) {
            const auto pl = label_patches(cr, eight ? Connectivity::Eight : Connectivity::Four);
            const auto oracle = test::patches_oracle(cr, eight);
            std::multiset<std::tuple<int, long long, long long>> got, want;
            for (const auto& p : pl.patches) got.insert({p.class_id, p.area, p.perimeter});
            for (const auto& p : oracle) want.insert({p.class_id, p.area, p.perimeter});
            check.expect(got == want, fmt::format("map {}: patch table differs", done));

            const auto m = compute_metrics(cr, pl);
            const auto o = test::metrics_oracle(cr, eight);
            for (const auto& c : m.classes) {
                const int id = c.class_id;
                check.expect(c.patch_count == static_cast<std::size_t>(o.patch_count.at(id)), "patch count");
                check.expect(c.total_edge == static_cast<std::size_t>(o.total_edge.at(id)), "edge");
                check.expect(std::abs(c.largest_patch_index - o.lpi.at(id)) <= 1e-9, "LPI");
                check.expect(std::abs(c.edge_density - o.edge_density.at(id)) <= 1e-9, "edge density");
                check.expect(std::abs(c.area_pct - o.area_pct.at(id)) <= 1e-9, "area pct");
                check.expect(std::abs(c.patch_density - o.patch_density.at(id)) <= 1e-9, "patch density");
                check.expect(std::abs(c.mean_patch_size - o.mean_patch_size.at(id)) <= 1e-9, "mean patch size");
                if (eight) {
                    check.expect(c.patch_count <= four_counts[id],
                                 fmt::format("map {}: 8-connected count exceeds 4-connected", done));
                } else {
                    four_counts[id] = c.patch_count;
                }
            }
            check.expect(m.richness == o.m, "richness");
            check.expect(std::abs(m.shannon_diversity - o.h) <= 1e-9, "H");
            check.expect(std::abs(m.evenness - o.e) <= 1e-9, "E");
        }
    }
}

struct TableCell {
    const char* year;
    const char* region;
    const char* cls;
    double pct;
};

// Transcribed from the published table (decimal commas written as points).
const std::vector<TableCell> kTable1 = {
    {"1990", "I", "city areas", 17.1},   {"1990", "I", "city parks", 5.7},
    {"1990", "I", "forest", 19.8},       {"1990", "I", "grass", 21.4},
    {"1990", "II", "city areas", 79.3},  {"1990", "II", "city parks", 4.3},
    {"1990", "II", "forest", 32.7},      {"1990", "II", "grass", 15.9},
    {"1990", "III", "city areas", 24.3}, {"1990", "III", "city parks", 3.7},
    {"1990", "III", "forest", 42.4},     {"1990", "III", "grass", 13.8},
    {"2005", "I", "city areas", 21.9},   {"2005", "I", "city parks", 4.1},
    {"2005", "I", "forest", 18.6},       {"2005", "I", "grass", 18.3},
    {"2005", "II", "city areas", 83.2},  {"2005", "II", "city parks", 5.2},
    {"2005", "II", "forest", 31.8},      {"2005", "II", "grass", 14.7},
    {"2005", "III", "city areas", 38.2}, {"2005", "III", "city parks", 4.3},
    {"2005", "III", "forest", 41.8},     {"2005", "III", "grass", 12.1},
};

void table_fidelity(Check& check) {
    TempDir dir;
    const auto csv = std::filesystem::path(TERRACLASS_DATA_DIR) / "taipei_table1.csv";
    std::ostringstream out, err;
    const int code = cli::run({"table", "import", "--csv", csv.string(), "--out",
                               (dir / "report.csv").string()},
                              out, err);
    check.expect(code == 0, "table import exit code " + std::to_string(code));
    check.expect(out.str().find("+13.90") != std::string::npos, "summary lacks +13.90 for III");

    const auto report = import_table(csv);
    check.expect(report.cells.size() == 24, fmt::format("{} cells", report.cells.size()));
    for (const auto& t : kTable1) {
        const auto* cell = report.find(t.year, t.region, t.cls);
        check.expect(cell != nullptr && cell->pct == t.pct,
                     fmt::format("cell {} {} {}", t.year, t.region, t.cls));
    }
    const auto written = test::read_file(dir / "report.csv");
    check.expect(written.find("1990,III,city areas,,24.3\n") != std::string::npos,
                 "report CSV lacks the 1990 III city areas cell");

    const auto* city = report.find_delta("III", "city areas");
    check.expect(city != nullptr && std::abs(city->delta - 13.9) < 1e-9, "delta III city areas");
    check.expect(city != nullptr && std::lround(city->pct_from) == 24 && std::lround(city->pct_to) == 38,
                 "whole-percent rounding of III city areas");
    for (const char* region : {"I", "II", "III"}) {
        for (const char* cls : {"forest", "grass"}) {
            const auto* d = report.find_delta(region, cls);
            check.expect(d != nullptr && d->delta < 0.0, fmt::format("{} {} not decreasing", region, cls));
        }
    }
}

void round_trips(Check& check) {
    TempDir dir;
    std::mt19937_64 rng(7007);
    for (int trial = 0; trial < 100; ++trial) {
        const auto rows = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        const auto cols = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
        const int max_id = std::uniform_int_distribution<int>(1, 255)(rng);
        const auto cr = test::random_map(rng, rows, cols, max_id, true);
        std::vector<ClassId> ids;
        for (int i = 1; i <= max_id; ++i) ids.push_back(static_cast<ClassId>(i));
        const auto legend = ClassLegend::generated(ids, "class");
        write_class_raster(cr, legend, dir / "map");
        const auto [back, back_legend] = read_class_raster(dir / "map.hdr");
        check.expect(back == cr && back_legend == legend, fmt::format("class raster {} round trip", trial));

        render_map(cr, legend, dir / "map.png");
        check.expect(decode_map(dir / "map.png", legend) == cr, fmt::format("PNG {} round trip", trial));
    }

    for (int trial = 0; trial < 10; ++trial) {
        const auto scene = test::random_raster(rng, 1 + static_cast<std::size_t>(trial % 5), 17, 23, -500, 500);
        for (auto type : {DataType::I16, DataType::F32}) {
            std::vector<MultibandRaster> loads;
            for (auto il : {Interleave::BSQ, Interleave::BIL, Interleave::BIP}) {
                MultibandRaster src = scene;
                if (type == DataType::I16) {
                    std::vector<double> v(src.values().begin(), src.values().end());
                    for (auto& x : v) x = std::round(x);
                    src = MultibandRaster(scene.bands(), scene.rows(), scene.cols(), v);
                }
                RasterHeader layout;
                layout.data_type = type;
                layout.interleave = il;
                layout.byte_order = trial % 2 == 0 ? ByteOrder::Little : ByteOrder::Big;
                write_raster(src, layout, dir / "cube.hdr", dir / "cube.dat");
                loads.push_back(read_raster(read_header(dir / "cube.hdr"), dir / "cube.dat"));
            }
            bool same = true;
            for (const auto& l : loads) {
                same = same && std::memcmp(l.values().data(), loads[0].values().data(),
                                           l.values().size_bytes()) == 0 &&
                       l.values().size() == loads[0].values().size();
            }
            check.expect(same, fmt::format("interleave loads differ (trial {})", trial));
        }
    }
}

constexpr const char* kPipelineScene = R"(rows = 60
cols = 80
bands = 3
seed = 8008
class 1 name = city areas
class 1 mean = 40 60 80
class 1 stddev = 6 5 4
class 1 rect = 0 0 30 40
class 2 name = city parks
class 2 mean = 90 50 30
class 2 stddev = 5 5 5
class 2 rect = 0 40 30 40
class 3 name = forest
class 3 mean = 60 120 40
class 3 stddev = 4 6 5
class 3 rect = 30 0 30 50
class 4 name = grass
class 4 mean = 120 110 90
class 4 stddev = 5 4 6
class 4 rect = 30 50 30 30
)";

/// synth -> classify -> assess -> metrics -> change; returns the produced files.
std::map<std::string, std::string> run_pipeline(const std::filesystem::path& root, Check& check) {
    std::filesystem::create_directories(root);
    test::write_file(root / "scene.txt", kPipelineScene);
    const auto p = [&](const std::string& name) { return (root / name).string(); };
    const std::vector<std::vector<std::string>> steps = {
        {"synth", "--spec", p("scene.txt"), "--out", p("scene"), "--roi-stride", "5"},
        {"stats", "dump", "--image", p("scene.hdr"), "--roi", p("scene_roi.csv"), "--out", p("stats.csv")},
        {"classify", "--image", p("scene.hdr"), "--method", "kmeans", "--k", "4", "--out", p("km")},
        {"classify", "--image", p("scene.hdr"), "--method", "maxlik", "--roi", p("scene_roi.csv"),
         "--legend", p("scene_truth.legend.csv"), "--out", p("ml")},
        {"classify", "--image", p("scene.hdr"), "--method", "mahalanobis", "--roi", p("scene_roi.csv"),
         "--out", p("mh")},
        {"assess", "--pred", p("ml.hdr"), "--ref", p("scene_roi.csv"), "--out", p("accuracy.csv")},
        {"smooth", "--map", p("ml.hdr"), "--window", "3", "--out", p("smooth")},
        {"metrics", "--map", p("smooth.hdr"), "--connectivity", "8", "--pixel-size", "30", "--out",
         p("metrics.csv")},
        {"change", "--map1", p("scene_truth.hdr"), "--map2", p("smooth.hdr"), "--out", p("change.csv"),
         "--crosstab", p("crosstab.csv")},
        {"render", "--map", p("smooth.hdr"), "--out", p("smooth.png")},
    };
    for (const auto& args : steps) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        check.expect(code == 0, fmt::format("{} exited {}: {}", args[0], code, err.str()));
    }
    std::map<std::string, std::string> files;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        files[entry.path().filename().string()] = test::read_file(entry.path());
    }
    return files;
}

void determinism(Check& check) {
    TempDir dir;
    const auto a = run_pipeline(dir / "a", check);
    const auto b = run_pipeline(dir / "b", check);
    ::setenv("TERRACLASS_WORKERS", "4", 1);
    const auto c = run_pipeline(dir / "c", check);
    ::unsetenv("TERRACLASS_WORKERS");
    check.expect(a.size() > 20, fmt::format("only {} artifacts produced", a.size()));
    for (const auto* other : {&b, &c}) {
        check.expect(a.size() == other->size(), "artifact sets differ");
        for (const auto& [name, bytes] : a) {
            const auto it = other->find(name);
            check.expect(it != other->end() && it->second == bytes, name + " differs between runs");
        }
    }
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<void(Check&)> run;
    };
    const std::vector<Criterion> criteria = {
        {"kappa oracle", kappa_oracle},
        {"classifier reduction chain", reduction_chain},
        {"k-means properties", kmeans_properties},
        {"synthetic recovery", synthetic_recovery},
        {"landscape metrics oracle", landscape_oracle},
        {"Table 1 fidelity", table_fidelity},
        {"format round-trips", round_trips},
        {"pipeline determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Check check;
        const auto t0 = Clock::now();
        try {
            criteria[i].run(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double ms = seconds_since(t0) * 1000.0;
        if (check.ok()) {
            std::cout << fmt::format("PASS  {}. {} ({:.0f} ms)\n", i + 1, criteria[i].name, ms);
        } else {
            ++failed;
            std::cout << fmt::format("FAIL  {}. {} ({:.0f} ms): {}\n", i + 1, criteria[i].name, ms,
                                     check.summary());
        }
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
                             criteria.size());
    return failed == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
