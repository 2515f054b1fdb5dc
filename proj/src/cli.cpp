#include "terraclass/cli.hpp"

#include "terraclass/accuracy.hpp"
#include "terraclass/change.hpp"
#include "terraclass/classify.hpp"
#include "terraclass/csv.hpp"
#include "terraclass/errors.hpp"
#include "terraclass/landscape.hpp"
#include "terraclass/postclass.hpp"
#include "terraclass/raster_io.hpp"
#include "terraclass/render.hpp"
#include "terraclass/synth.hpp"
#include "terraclass/training.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <fstream>
#include <functional>
#include <optional>

namespace fs = std::filesystem;

namespace terraclass::cli {

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot create " + path.string());
    }
    out << text;
    if (!out) {
        throw IoError("write failure on " + path.string());
    }
}

ExecutionConfig execution_from_env() {
    ExecutionConfig exec;
    if (const char* env = std::getenv("TERRACLASS_WORKERS"); env != nullptr && *env != '\0') {
        const long long n = csv::parse_int(env, "TERRACLASS_WORKERS", 0);
        if (n < 1 || n > 1024) {
            throw ValidationError(ErrorCode::InvalidConfig, "TERRACLASS_WORKERS must be 1..1024");
        }
        exec.workers = static_cast<std::size_t>(n);
    }
    return exec;
}

MultibandRaster load_image(const fs::path& header_path) {
    const RasterHeader header = read_header(header_path);
    return read_raster(header, data_path_for(header_path));
}

/// Map plus its sidecar legend when one exists.
std::pair<ClassRaster, std::optional<ClassLegend>> load_map(const fs::path& header_path) {
    const auto files = ClassRasterFiles::from_header(header_path);
    if (fs::exists(files.legend)) {
        auto [map, legend] = read_class_raster(header_path);
        return {std::move(map), std::move(legend)};
    }
    return {read_class_map(header_path), std::nullopt};
}

ClassLegend legend_for(const ClassRaster& map, const std::optional<ClassLegend>& legend) {
    if (legend) {
        return *legend;
    }
    std::vector<ClassId> ids;
    const auto hist = map.histogram();
    for (std::size_t id = 1; id < hist.size(); ++id) {
        if (hist[id] > 0) {
            ids.push_back(static_cast<ClassId>(id));
        }
    }
    return ClassLegend::generated(ids, "class");
}

std::map<ClassId, ClassId> read_cluster_map(const fs::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) {
        throw ValidationError(ErrorCode::MalformedRow, path.string() + ": empty file");
    }
    csv::expect_header(rows.front(), {"cluster_id", "class_id"}, path);
    std::map<ClassId, ClassId> mapping;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != 2) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  path.string() + " line " + std::to_string(row.line_no));
        }
        const long long from = csv::parse_int(row.fields[0], "cluster_id", row.line_no);
        const long long to = csv::parse_int(row.fields[1], "class_id", row.line_no);
        if (from < 1 || from > 255 || to < 0 || to > 255) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  "line " + std::to_string(row.line_no) + ": id out of range");
        }
        mapping[static_cast<ClassId>(from)] = static_cast<ClassId>(to);
    }
    return mapping;
}

std::vector<ClassId> parse_class_list(const std::string& text) {
    std::vector<ClassId> ids;
    for (const auto& f : csv::split_line(text)) {
        const long long id = csv::parse_int(f, "class id", 0);
        if (id < 1 || id > 255) {
            throw ValidationError(ErrorCode::InvalidConfig,
                                  "class id " + std::to_string(id) + " outside 1..255");
        }
        ids.push_back(static_cast<ClassId>(id));
    }
    return ids;
}

// ---------------------------------------------------------------------------

struct ClassifyArgs {
    std::string image;
    std::string method;
    std::size_t k = 5;
    std::size_t max_iter = 20;
    double change_threshold = 0.02;
    std::string roi;
    double stddev_mult = 2.0;
    double ridge = 0.0;
    std::string priors;
    std::string legend;
    std::string cluster_map;
    std::string out;
};

void run_classify(const ClassifyArgs& a, std::ostream& out) {
    const ExecutionConfig exec = execution_from_env();
    const MultibandRaster image = load_image(a.image);
    std::optional<ClassLegend> legend;
    if (!a.legend.empty()) {
        legend = read_legend(a.legend);
    }

    ClassRaster map;
    if (a.method == "kmeans") {
        KMeansConfig cfg{a.k, a.max_iter, a.change_threshold};
        KMeansResult result = kmeans_classify(image, cfg, exec);

        std::string centroids = "cluster_id";
        for (std::size_t b = 0; b < image.bands(); ++b) {
            centroids += fmt::format(",band_{}", b);
        }
        centroids += "\n";
        for (Eigen::Index i = 0; i < result.centroids.rows(); ++i) {
            centroids += fmt::format("{}", i + 1);
            for (Eigen::Index b = 0; b < result.centroids.cols(); ++b) {
                centroids += fmt::format(",{}", result.centroids(i, b));
            }
            centroids += "\n";
        }
        write_text(a.out + ".centroids.csv", centroids);
        std::string sse = "iteration,sse\n";
        for (std::size_t i = 0; i < result.sse_trace.size(); ++i) {
            sse += fmt::format("{},{}\n", i + 1, result.sse_trace[i]);
        }
        write_text(a.out + ".sse.csv", sse);
        out << fmt::format("kmeans: k={} iterations={} sse={:.4f}\n", a.k, result.iterations,
                           result.sse_trace.back());

        if (!a.cluster_map.empty()) {
            map = cluster_to_class(result.map, read_cluster_map(a.cluster_map));
        } else {
            map = std::move(result.map);
            if (!legend) {
                std::vector<ClassId> ids;
                for (std::size_t i = 1; i <= a.k; ++i) {
                    ids.push_back(static_cast<ClassId>(i));
                }
                legend = ClassLegend::generated(ids, "cluster");
            }
        }
    } else {
        if (a.roi.empty()) {
            throw ValidationError(ErrorCode::InvalidConfig,
                                  "--roi is required for method " + a.method);
        }
        const RoiSet roi = load_roi(a.roi, image.rows(), image.cols());
        const ClassStats stats = compute_class_stats(image, roi);
        if (a.method == "mindist") {
            map = min_distance_classify(image, stats, exec);
        } else if (a.method == "mahalanobis") {
            map = mahalanobis_classify(image, stats, a.ridge, exec);
        } else if (a.method == "maxlik") {
            std::optional<Priors> priors;
            if (!a.priors.empty()) {
                priors = read_priors(a.priors);
            }
            map = max_likelihood_classify(image, stats, priors, a.ridge, exec);
        } else if (a.method == "pp") {
            map = parallelepiped_classify(image, stats, ParallelepipedConfig{a.stddev_mult}, exec);
        }
        if (!legend) {
            legend = ClassLegend::generated(roi.class_ids(), "class");
        }
    }
    write_class_raster(map, legend_for(map, legend), a.out);
}

struct StatsArgs {
    std::string image;
    std::string roi;
    std::string out;
};

void run_stats_dump(const StatsArgs& a, std::ostream& out) {
    const MultibandRaster image = load_image(a.image);
    const RoiSet roi = load_roi(a.roi, image.rows(), image.cols());
    const ClassStats stats = compute_class_stats(image, roi);
    std::string text = "class_id,count,band,mean";
    for (std::size_t b = 0; b < stats.bands; ++b) {
        text += fmt::format(",cov_{}", b);
    }
    text += "\n";
    for (const auto& c : stats.classes) {
        for (Eigen::Index b = 0; b < c.mean.size(); ++b) {
            text += fmt::format("{},{},{},{}", c.class_id, c.count, b, c.mean[b]);
            for (Eigen::Index j = 0; j < c.covariance.cols(); ++j) {
                if (c.count >= 2) {
                    text += fmt::format(",{}", c.covariance(b, j));
                } else {
                    text += ",";
                }
            }
            text += "\n";
        }
    }
    if (a.out.empty()) {
        out << text;
    } else {
        write_text(a.out, text);
    }
}

struct AssessArgs {
    std::string pred;
    std::string ref;
    std::string out;
};

void run_assess(const AssessArgs& a, std::ostream& out) {
    const ClassRaster pred = read_class_map(a.pred);
    const RoiSet ref = load_roi(a.ref, pred.rows(), pred.cols());
    const ConfusionMatrix cm = build_confusion(pred, ref);
    write_accuracy_report(cm, a.out);
    out << fmt::format("overall accuracy {:.4f}\n", overall_accuracy(cm));
    try {
        out << fmt::format("kappa {:.4f}\n", kappa(cm));
    } catch (const ValidationError& e) {
        if (e.code() != ErrorCode::DegenerateChance) {
            throw;
        }
        out << "kappa NA\n";
    }
    out << fmt::format("N {}\n", cm.total());
}

struct MergeArgs {
    std::string map;
    std::string recode;
    std::string out;
};

void run_merge(const MergeArgs& a) {
    const auto [map, legend] = read_class_raster(a.map);
    const auto [merged, merged_legend] = merge_classes(map, legend, read_recode(a.recode));
    write_class_raster(merged, merged_legend, a.out);
}

struct SmoothArgs {
    std::string map;
    int window = 3;
    std::string out;
};

void run_smooth(const SmoothArgs& a) {
    const auto [map, legend] = load_map(a.map);
    const ClassRaster smoothed = majority_filter(map, a.window);
    write_class_raster(smoothed, legend_for(map, legend), a.out);
}

struct MetricsArgs {
    std::string map;
    int connectivity = 8;
    double pixel_size = 1.0;
    std::string out;
};

void run_metrics(const MetricsArgs& a) {
    const ClassRaster map = read_class_map(a.map);
    const auto conn = a.connectivity == 4 ? Connectivity::Four : Connectivity::Eight;
    const MetricsReport report = compute_metrics(map, label_patches(map, conn));
    write_metrics(report, a.out, a.pixel_size);
}

struct ChangeArgs {
    std::string map1;
    std::string map2;
    std::string regions;
    std::string mode = "all";
    std::string classes;
    std::string label1 = "date1";
    std::string label2 = "date2";
    std::string crosstab;
    std::string out;
};

void run_change(const ChangeArgs& a, std::ostream& out, std::ostream& err) {
    auto [map1, legend1] = load_map(a.map1);
    auto [map2, legend2] = load_map(a.map2);
    if (!a.crosstab.empty()) {
        write_text(a.crosstab, format_crosstab(cross_tabulate(map1, map2)));
    }
    std::optional<ClassRaster> mask;
    if (!a.regions.empty()) {
        mask = read_class_map(a.regions);
    }
    RegionReportOptions options;
    options.mode = a.mode == "selected" ? PercentMode::SelectedClasses : PercentMode::AllClasses;
    if (!a.classes.empty()) {
        options.selected = parse_class_list(a.classes);
    }
    if (legend1 && legend2 && *legend1 == *legend2) {
        options.legend = legend1;
    }
    std::vector<std::pair<std::string, ClassRaster>> maps;
    maps.emplace_back(a.label1, std::move(map1));
    maps.emplace_back(a.label2, std::move(map2));
    const RegionReport report = region_report(maps, mask, options);
    for (const auto& w : report.warnings) {
        err << "warning: " << w << "\n";
    }
    write_region_report(report, a.out);
    out << format_region_summary(report);
}

struct TableArgs {
    std::string csv;
    std::string out;
};

void run_table_import(const TableArgs& a, std::ostream& out, std::ostream& err) {
    const RegionReport report = import_table(a.csv);
    for (const auto& w : report.warnings) {
        err << "warning: " << w << "\n";
    }
    if (!a.out.empty()) {
        write_region_report(report, a.out);
    }
    out << format_region_summary(report);
}

struct SynthArgs {
    std::string spec;
    std::string out;
    std::size_t roi_stride = 4;
};

void run_synth(const SynthArgs& a) {
    const SyntheticScene scene = generate_scene(read_scene_spec(a.spec));
    RasterHeader layout;
    layout.data_type = DataType::F32;
    write_raster(scene.image, layout, a.out + ".hdr", a.out + ".dat");
    write_class_raster(scene.truth, scene.legend, a.out + "_truth");
    write_roi(sample_roi(scene.truth, a.roi_stride), a.out + "_roi.csv");
}

struct RenderArgs {
    std::string map;
    std::string out;
};

void run_render(const RenderArgs& a) {
    const auto [map, legend] = load_map(a.map);
    render_map(map, legend_for(map, legend), a.out);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"terraclass: land-cover classification, accuracy, landscape metrics and change "
                 "reports for ENVI-style rasters",
                 "terraclass"};
    app.set_version_flag("--version", fmt::format("terraclass {} (file formats v{})",
                                                  kToolkitVersion, kFormatVersion));
    app.require_subcommand(1);

    std::function<void()> action;

    ClassifyArgs classify;
    auto* c = app.add_subcommand("classify", "Classify a multiband raster");
    c->add_option("--image", classify.image, "Input raster header (.hdr)")->required();
    c->add_option("--method", classify.method, "kmeans|mindist|mahalanobis|maxlik|pp")
        ->required()
        ->check(CLI::IsMember({"kmeans", "mindist", "mahalanobis", "maxlik", "pp"}));
    c->add_option("--k", classify.k, "Number of clusters")->capture_default_str();
    c->add_option("--max-iter", classify.max_iter, "K-means iteration cap")->capture_default_str();
    c->add_option("--change-threshold", classify.change_threshold,
                  "K-means stop fraction of changed pixels")
        ->capture_default_str();
    c->add_option("--roi", classify.roi, "Training ROI CSV (class,row,col)");
    c->add_option("--stddev-mult", classify.stddev_mult, "Parallelepiped half-width in stddevs")
        ->capture_default_str();
    c->add_option("--ridge", classify.ridge, "Ridge added to covariance diagonals")
        ->capture_default_str();
    c->add_option("--priors", classify.priors, "Priors CSV (class_id,prior)");
    c->add_option("--legend", classify.legend, "Legend CSV for the output map");
    c->add_option("--cluster-map", classify.cluster_map,
                  "K-means cluster to class CSV (cluster_id,class_id)");
    c->add_option("--out", classify.out, "Output prefix")->required();
    c->callback([&] { action = [&] { run_classify(classify, out); }; });

    StatsArgs stats;
    auto* s = app.add_subcommand("stats", "Training statistics");
    s->require_subcommand(1);
    auto* dump = s->add_subcommand("dump", "Per-class mean and covariance as CSV");
    dump->add_option("--image", stats.image, "Input raster header")->required();
    dump->add_option("--roi", stats.roi, "ROI CSV")->required();
    dump->add_option("--out", stats.out, "Output CSV (default: stdout)");
    dump->callback([&] { action = [&] { run_stats_dump(stats, out); }; });

    AssessArgs assess;
    auto* as = app.add_subcommand("assess", "Error matrix, accuracy and kappa");
    as->add_option("--pred", assess.pred, "Classified map header")->required();
    as->add_option("--ref", assess.ref, "Reference ROI CSV")->required();
    as->add_option("--out", assess.out, "Report CSV")->required();
    as->callback([&] { action = [&] { run_assess(assess, out); }; });

    MergeArgs merge;
    auto* m = app.add_subcommand("merge", "Recode and combine classes");
    m->add_option("--map", merge.map, "Class map header")->required();
    m->add_option("--recode", merge.recode, "Recode CSV (old_id,new_id[,name,r,g,b])")->required();
    m->add_option("--out", merge.out, "Output prefix")->required();
    m->callback([&] { action = [&] { run_merge(merge); }; });

    SmoothArgs smooth;
    auto* sm = app.add_subcommand("smooth", "Majority filter");
    sm->add_option("--map", smooth.map, "Class map header")->required();
    sm->add_option("--window", smooth.window, "Odd window size >= 3")->capture_default_str();
    sm->add_option("--out", smooth.out, "Output prefix")->required();
    sm->callback([&] { action = [&] { run_smooth(smooth); }; });

    MetricsArgs metrics;
    auto* me = app.add_subcommand("metrics", "Landscape metrics");
    me->add_option("--map", metrics.map, "Class map header")->required();
    me->add_option("--connectivity", metrics.connectivity, "4 or 8")
        ->check(CLI::IsMember({4, 8}))
        ->capture_default_str();
    me->add_option("--pixel-size", metrics.pixel_size, "Pixel edge length")->capture_default_str();
    me->add_option("--out", metrics.out, "Metrics CSV")->required();
    me->callback([&] { action = [&] { run_metrics(metrics); }; });

    ChangeArgs change;
    auto* ch = app.add_subcommand("change", "Two-date per-region change report");
    ch->add_option("--map1", change.map1, "Earlier class map header")->required();
    ch->add_option("--map2", change.map2, "Later class map header")->required();
    ch->add_option("--regions", change.regions, "Region mask header");
    ch->add_option("--mode", change.mode, "all|selected")
        ->check(CLI::IsMember({"all", "selected"}))
        ->capture_default_str();
    ch->add_option("--classes", change.classes, "Comma-separated class ids for selected mode");
    ch->add_option("--label1", change.label1, "Date label of map1")->capture_default_str();
    ch->add_option("--label2", change.label2, "Date label of map2")->capture_default_str();
    ch->add_option("--crosstab", change.crosstab, "Also write the from/to matrix CSV");
    ch->add_option("--out", change.out, "Report CSV")->required();
    ch->callback([&] { action = [&] { run_change(change, out, err); }; });

    TableArgs table;
    auto* t = app.add_subcommand("table", "Published area tables");
    t->require_subcommand(1);
    auto* imp = t->add_subcommand("import", "Import a year,region,class,pct table");
    imp->add_option("--csv", table.csv, "Table CSV")->required();
    imp->add_option("--out", table.out, "Report CSV");
    imp->callback([&] { action = [&] { run_table_import(table, out, err); }; });

    SynthArgs synth;
    auto* sy = app.add_subcommand("synth", "Generate a synthetic scene");
    sy->add_option("--spec", synth.spec, "Scene spec file")->required();
    sy->add_option("--out", synth.out, "Output prefix")->required();
    sy->add_option("--roi-stride", synth.roi_stride, "Reference sampling stride")
        ->capture_default_str();
    sy->callback([&] { action = [&] { run_synth(synth); }; });

    RenderArgs render;
    auto* r = app.add_subcommand("render", "Render a class map to PNG");
    r->add_option("--map", render.map, "Class map header")->required();
    r->add_option("--out", render.out, "Output PNG")->required();
    r->callback([&] { action = [&] { run_render(render); }; });

    std::vector<const char*> argv{"terraclass"};
    for (const auto& arg : args) {
        argv.push_back(arg.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        const bool unknown_command = !args.empty() && args[0].rfind('-', 0) != 0 &&
                                     app.get_subcommands().empty();
        if (unknown_command) {
            err << "error: " << to_string(ErrorCode::UnknownSubcommand) << ": '" << args[0]
                << "'\n";
        } else {
            err << "error: " << e.what() << "\n";
        }
        err << app.help();
        return 1;
    }

    try {
        if (action) {
            action();
        }
        return 0;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const fs::filesystem_error& e) {
        err << "error: IoError: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace terraclass::cli
