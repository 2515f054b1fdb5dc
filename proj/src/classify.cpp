#include "terraclass/classify.hpp"

#include "terraclass/csv.hpp"
#include "terraclass/errors.hpp"
#include "terraclass/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace terraclass {

namespace {

/// Pixel-major copy of the cube: pixel p occupies [p*B, p*B + B).
std::vector<double> pixel_major(const MultibandRaster& raster) {
    const std::size_t nb = raster.bands();
    const std::size_t n = raster.pixel_count();
    std::vector<double> px(n * nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const auto band = raster.band(b);
        for (std::size_t p = 0; p < n; ++p) {
            px[p * nb + b] = band[p];
        }
    }
    return px;
}

double squared_distance(const double* x, const double* c, std::size_t nb) {
    double s = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        const double d = x[b] - c[b];
        s += d * d;
    }
    return s;
}

void require_bands(const MultibandRaster& raster, const ClassStats& stats) {
    if (stats.classes.empty()) {
        throw ValidationError(ErrorCode::InsufficientSamples, "no class statistics");
    }
    if (stats.bands != raster.bands()) {
        throw ValidationError(ErrorCode::DimensionMismatch,
                              "statistics have " + std::to_string(stats.bands) +
                                  " bands, raster has " + std::to_string(raster.bands()));
    }
}

void check_ridge(double ridge) {
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw ValidationError(ErrorCode::InvalidConfig, "ridge must be a finite value >= 0");
    }
}

/// Inverse and log-determinant of a symmetric covariance, with singularity
/// judged on the eigenvalue spread.
struct Factorized {
    Eigen::MatrixXd inverse;
    double log_det = 0.0;
};

std::optional<Factorized> factorize(const Eigen::MatrixXd& cov) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    if (!(hi > 0.0) || lo <= 1e-12 * hi) {
        return std::nullopt;
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success) {
        return std::nullopt;
    }
    Factorized f;
    f.inverse = llt.solve(Eigen::MatrixXd::Identity(cov.rows(), cov.cols()));
    f.inverse = (f.inverse + f.inverse.transpose()) / 2.0;
    const Eigen::MatrixXd l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        f.log_det += 2.0 * std::log(l(i, i));
    }
    return f;
}

/// Row-major flattening of a B x B matrix for the hot loop.
std::vector<double> flatten(const Eigen::MatrixXd& m) {
    std::vector<double> out(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
        }
    }
    return out;
}

double quadratic_form(const double* x, const double* mean, const double* inv, std::size_t nb,
                      double* scratch) {
    for (std::size_t b = 0; b < nb; ++b) {
        scratch[b] = x[b] - mean[b];
    }
    double q = 0.0;
    for (std::size_t i = 0; i < nb; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            row += inv[i * nb + j] * scratch[j];
        }
        q += scratch[i] * row;
    }
    return q;
}

/// Shared driver for argmin classifiers: score(class_index, pixel) -> lower is better.
template <typename Score>
ClassRaster argmin_classify(const MultibandRaster& raster, const ClassStats& stats,
                            const ExecutionConfig& exec, Score&& score) {
    const std::size_t nb = raster.bands();
    const std::size_t n = raster.pixel_count();
    const std::vector<double> px = pixel_major(raster);
    ClassRaster out(raster.rows(), raster.cols());
    auto values = out.values();
    for_each_block(n, exec.workers, [&](std::size_t, std::size_t begin, std::size_t end) {
        std::vector<double> scratch(nb);
        for (std::size_t p = begin; p < end; ++p) {
            const double* x = px.data() + p * nb;
            std::size_t best = 0;
            double best_score = std::numeric_limits<double>::infinity();
            for (std::size_t c = 0; c < stats.classes.size(); ++c) {
                const double s = score(c, x, scratch.data());
                // Strict comparison keeps the smallest class id on ties.
                if (s < best_score) {
                    best_score = s;
                    best = c;
                }
            }
            values[p] = stats.classes[best].class_id;
        }
    });
    return out;
}

} // namespace

// ---------------------------------------------------------------------------
// K-means

void KMeansConfig::validate() const {
    if (k < 1 || k > 255) {
        throw ValidationError(ErrorCode::InvalidConfig, "k must be in 1..255");
    }
    if (max_iterations < 1) {
        throw ValidationError(ErrorCode::InvalidConfig, "max_iterations must be >= 1");
    }
    if (!(change_threshold >= 0.0 && change_threshold < 1.0)) {
        throw ValidationError(ErrorCode::InvalidConfig, "change_threshold must be in [0, 1)");
    }
}

KMeansResult kmeans_classify(const MultibandRaster& raster, const KMeansConfig& cfg,
                             const ExecutionConfig& exec) {
    cfg.validate();
    const std::size_t nb = raster.bands();
    const std::size_t n = raster.pixel_count();
    const std::size_t k = cfg.k;
    if (n == 0 || nb == 0) {
        throw ValidationError(ErrorCode::DegenerateInput, "empty raster");
    }
    const std::vector<double> px = pixel_major(raster);

    {
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto less = [&](std::size_t a, std::size_t b) {
            return std::lexicographical_compare(px.begin() + static_cast<std::ptrdiff_t>(a * nb),
                                                px.begin() + static_cast<std::ptrdiff_t>(a * nb + nb),
                                                px.begin() + static_cast<std::ptrdiff_t>(b * nb),
                                                px.begin() + static_cast<std::ptrdiff_t>(b * nb + nb));
        };
        std::sort(order.begin(), order.end(), less);
        std::size_t distinct = 1;
        for (std::size_t i = 1; i < n && distinct < k; ++i) {
            if (less(order[i - 1], order[i])) {
                ++distinct;
            }
        }
        if (distinct < k) {
            throw ValidationError(ErrorCode::DegenerateInput,
                                  std::to_string(distinct) + " distinct pixel vector(s) for k = " +
                                      std::to_string(k));
        }
    }

    // Seed centroid j at min + (j + 0.5) * range / k in every band.
    std::vector<double> centroids(k * nb);
    for (std::size_t b = 0; b < nb; ++b) {
        const auto band = raster.band(b);
        const auto [lo, hi] = std::minmax_element(band.begin(), band.end());
        for (std::size_t j = 0; j < k; ++j) {
            centroids[j * nb + b] =
                *lo + (static_cast<double>(j) + 0.5) * (*hi - *lo) / static_cast<double>(k);
        }
    }

    constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> assign(n, kNone);
    std::vector<std::uint32_t> previous(n, kNone);
    const std::size_t blocks = block_count(n);
    std::vector<double> block_sums(blocks * k * nb);
    std::vector<std::size_t> block_counts(blocks * k);
    std::vector<double> block_sse(blocks);

    KMeansResult result;
    for (std::size_t iter = 0; iter < cfg.max_iterations; ++iter) {
        previous = assign;

        // Assignment step. A pixel keeps its cluster unless another is strictly closer.
        std::fill(block_sums.begin(), block_sums.end(), 0.0);
        std::fill(block_counts.begin(), block_counts.end(), 0);
        for_each_block(n, exec.workers, [&](std::size_t blk, std::size_t begin, std::size_t end) {
            double* sums = block_sums.data() + blk * k * nb;
            std::size_t* counts = block_counts.data() + blk * k;
            for (std::size_t p = begin; p < end; ++p) {
                const double* x = px.data() + p * nb;
                std::size_t best = 0;
                double best_d = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < k; ++j) {
                    const double d = squared_distance(x, centroids.data() + j * nb, nb);
                    if (d < best_d) {
                        best_d = d;
                        best = j;
                    }
                }
                const std::uint32_t cur = previous[p];
                if (cur != kNone && cur != best &&
                    squared_distance(x, centroids.data() + cur * nb, nb) <= best_d) {
                    best = cur;
                }
                assign[p] = static_cast<std::uint32_t>(best);
                ++counts[best];
                for (std::size_t b = 0; b < nb; ++b) {
                    sums[best * nb + b] += x[b];
                }
            }
        });

        std::vector<double> sums(k * nb, 0.0);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t blk = 0; blk < blocks; ++blk) {
            for (std::size_t i = 0; i < k * nb; ++i) {
                sums[i] += block_sums[blk * k * nb + i];
            }
            for (std::size_t j = 0; j < k; ++j) {
                counts[j] += block_counts[blk * k + j];
            }
        }
        auto refresh_mean = [&](std::size_t j) {
            for (std::size_t b = 0; b < nb; ++b) {
                centroids[j * nb + b] = sums[j * nb + b] / static_cast<double>(counts[j]);
            }
        };
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] > 0) {
                refresh_mean(j);
            }
        }

        // Empty clusters take the pixel farthest from its own centroid.
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] > 0) {
                continue;
            }
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t p = 0; p < n; ++p) {
                const double d =
                    squared_distance(px.data() + p * nb, centroids.data() + assign[p] * nb, nb);
                if (d > far_d) {
                    far_d = d;
                    far = p;
                }
            }
            const std::size_t src = assign[far];
            const double* x = px.data() + far * nb;
            for (std::size_t b = 0; b < nb; ++b) {
                sums[src * nb + b] -= x[b];
                sums[j * nb + b] = x[b];
            }
            --counts[src];
            counts[j] = 1;
            assign[far] = static_cast<std::uint32_t>(j);
            refresh_mean(src);
            refresh_mean(j);
        }

        std::fill(block_sse.begin(), block_sse.end(), 0.0);
        for_each_block(n, exec.workers, [&](std::size_t blk, std::size_t begin, std::size_t end) {
            double s = 0.0;
            for (std::size_t p = begin; p < end; ++p) {
                s += squared_distance(px.data() + p * nb, centroids.data() + assign[p] * nb, nb);
            }
            block_sse[blk] = s;
        });
        result.sse_trace.push_back(std::accumulate(block_sse.begin(), block_sse.end(), 0.0));
        result.iterations = iter + 1;

        std::size_t changed = 0;
        for (std::size_t p = 0; p < n; ++p) {
            changed += assign[p] != previous[p] ? 1 : 0;
        }
        if (static_cast<double>(changed) / static_cast<double>(n) <= cfg.change_threshold) {
            break;
        }
    }

    // Relabel 1..k by ascending first-band centroid (remaining bands break ties).
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::lexicographical_compare(
            centroids.begin() + static_cast<std::ptrdiff_t>(a * nb),
            centroids.begin() + static_cast<std::ptrdiff_t>(a * nb + nb),
            centroids.begin() + static_cast<std::ptrdiff_t>(b * nb),
            centroids.begin() + static_cast<std::ptrdiff_t>(b * nb + nb));
    });
    std::vector<ClassId> label_of(k);
    result.centroids.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(nb));
    for (std::size_t rank = 0; rank < k; ++rank) {
        label_of[order[rank]] = static_cast<ClassId>(rank + 1);
        for (std::size_t b = 0; b < nb; ++b) {
            result.centroids(static_cast<Eigen::Index>(rank), static_cast<Eigen::Index>(b)) =
                centroids[order[rank] * nb + b];
        }
    }
    result.map = ClassRaster(raster.rows(), raster.cols());
    for (std::size_t p = 0; p < n; ++p) {
        result.map[p] = label_of[assign[p]];
    }
    return result;
}

// ---------------------------------------------------------------------------
// Supervised classifiers

ClassRaster min_distance_classify(const MultibandRaster& raster, const ClassStats& stats,
                                  const ExecutionConfig& exec) {
    require_bands(raster, stats);
    const std::size_t nb = raster.bands();
    std::vector<double> means;
    for (const auto& c : stats.classes) {
        means.insert(means.end(), c.mean.data(), c.mean.data() + nb);
    }
    return argmin_classify(raster, stats, exec, [&](std::size_t c, const double* x, double*) {
        return squared_distance(x, means.data() + c * nb, nb);
    });
}

ClassRaster mahalanobis_classify(const MultibandRaster& raster, const ClassStats& stats,
                                 double ridge, const ExecutionConfig& exec) {
    require_bands(raster, stats);
    check_ridge(ridge);
    const std::size_t nb = raster.bands();
    Eigen::MatrixXd cov = pooled_covariance(stats);
    if (ridge > 0.0) {
        cov += ridge * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
    }
    const auto f = factorize(cov);
    if (!f) {
        throw ValidationError(ErrorCode::SingularCovariance,
                              "pooled covariance is singular; configure a ridge term");
    }
    const std::vector<double> inv = flatten(f->inverse);
    std::vector<double> means;
    for (const auto& c : stats.classes) {
        means.insert(means.end(), c.mean.data(), c.mean.data() + nb);
    }
    return argmin_classify(raster, stats, exec,
                           [&](std::size_t c, const double* x, double* scratch) {
                               return quadratic_form(x, means.data() + c * nb, inv.data(), nb,
                                                     scratch);
                           });
}

ClassRaster max_likelihood_classify(const MultibandRaster& raster, const ClassStats& stats,
                                    const std::optional<Priors>& priors, double ridge,
                                    const ExecutionConfig& exec) {
    require_bands(raster, stats);
    check_ridge(ridge);
    const std::size_t nb = raster.bands();
    const std::size_t m = stats.classes.size();

    std::vector<ClassId> ids;
    for (const auto& c : stats.classes) {
        ids.push_back(c.class_id);
    }
    if (priors) {
        validate_priors(*priors, ids);
    }

    std::vector<double> inverses;
    std::vector<double> means;
    std::vector<double> offsets;
    for (const auto& c : stats.classes) {
        if (!c.covariance_usable()) {
            throw ValidationError(ErrorCode::InsufficientSamples,
                                  "class " + std::to_string(c.class_id) + " has " +
                                      std::to_string(c.count) + " sample(s), need >= " +
                                      std::to_string(nb + 1));
        }
        Eigen::MatrixXd cov = c.covariance;
        if (ridge > 0.0) {
            cov += ridge * Eigen::MatrixXd::Identity(cov.rows(), cov.cols());
        }
        const auto f = factorize(cov);
        if (!f) {
            throw ValidationError(ErrorCode::SingularCovariance,
                                  "class " + std::to_string(c.class_id));
        }
        const auto flat = flatten(f->inverse);
        inverses.insert(inverses.end(), flat.begin(), flat.end());
        means.insert(means.end(), c.mean.data(), c.mean.data() + nb);
        const double prior = priors ? priors->at(c.class_id) : 1.0 / static_cast<double>(m);
        // Minimising q + ln|S| - 2 ln p is maximising the Gaussian discriminant.
        offsets.push_back(f->log_det - 2.0 * std::log(prior));
    }
    // Shift so equal offsets become exactly zero; argmin is unaffected.
    const double base = *std::min_element(offsets.begin(), offsets.end());
    for (double& o : offsets) {
        o -= base;
    }
    return argmin_classify(raster, stats, exec,
                           [&](std::size_t c, const double* x, double* scratch) {
                               return quadratic_form(x, means.data() + c * nb,
                                                     inverses.data() + c * nb * nb, nb, scratch) +
                                      offsets[c];
                           });
}

ClassRaster parallelepiped_classify(const MultibandRaster& raster, const ClassStats& stats,
                                    const ParallelepipedConfig& cfg, const ExecutionConfig& exec) {
    require_bands(raster, stats);
    if (!(cfg.stddev_multiplier > 0.0) || !std::isfinite(cfg.stddev_multiplier)) {
        throw ValidationError(ErrorCode::InvalidConfig, "stddev multiplier must be > 0");
    }
    const std::size_t nb = raster.bands();
    std::vector<double> lo;
    std::vector<double> hi;
    for (const auto& c : stats.classes) {
        if (c.count < 2) {
            throw ValidationError(ErrorCode::InsufficientSamples,
                                  "class " + std::to_string(c.class_id) +
                                      " needs >= 2 samples for a standard deviation");
        }
        for (std::size_t b = 0; b < nb; ++b) {
            const auto bi = static_cast<Eigen::Index>(b);
            const double half = cfg.stddev_multiplier * std::sqrt(c.covariance(bi, bi));
            lo.push_back(c.mean[bi] - half);
            hi.push_back(c.mean[bi] + half);
        }
    }
    const std::vector<double> px = pixel_major(raster);
    ClassRaster out(raster.rows(), raster.cols());
    auto values = out.values();
    for_each_block(raster.pixel_count(), exec.workers,
                   [&](std::size_t, std::size_t begin, std::size_t end) {
                       for (std::size_t p = begin; p < end; ++p) {
                           const double* x = px.data() + p * nb;
                           for (std::size_t c = 0; c < stats.classes.size(); ++c) {
                               bool inside = true;
                               for (std::size_t b = 0; b < nb && inside; ++b) {
                                   inside = lo[c * nb + b] <= x[b] && x[b] <= hi[c * nb + b];
                               }
                               if (inside) {
                                   values[p] = stats.classes[c].class_id;
                                   break;
                               }
                           }
                       }
                   });
    return out;
}

ClassRaster cluster_to_class(const ClassRaster& cr, const std::map<ClassId, ClassId>& mapping) {
    std::array<int, 256> lut{};
    lut.fill(-1);
    lut[kUnclassified] = kUnclassified;
    for (const auto& [from, to] : mapping) {
        if (from != kUnclassified) {
            lut[from] = to;
        }
    }
    const auto hist = cr.histogram();
    for (std::size_t id = 1; id < hist.size(); ++id) {
        if (hist[id] > 0 && lut[id] < 0) {
            throw ValidationError(ErrorCode::UnmappedCluster, "cluster " + std::to_string(id));
        }
    }
    ClassRaster out = cr;
    for (auto& v : out.values()) {
        v = static_cast<ClassId>(lut[v]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Priors

Priors read_priors(const std::filesystem::path& path) {
    const auto rows = csv::read_file(path);
    if (rows.empty()) {
        throw ValidationError(ErrorCode::InvalidPriors, path.string() + ": empty file");
    }
    csv::expect_header(rows.front(), {"class_id", "prior"}, path);
    Priors priors;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.fields.size() != 2) {
            throw ValidationError(ErrorCode::MalformedRow,
                                  path.string() + " line " + std::to_string(row.line_no));
        }
        const long long id = csv::parse_int(row.fields[0], "class_id", row.line_no);
        if (id < 1 || id > 255) {
            throw ValidationError(ErrorCode::InvalidPriors, "class id " + std::to_string(id));
        }
        const double p = csv::parse_real(row.fields[1], "prior", row.line_no);
        if (!priors.emplace(static_cast<ClassId>(id), p).second) {
            throw ValidationError(ErrorCode::DuplicateClassId, "class id " + std::to_string(id));
        }
    }
    return priors;
}

void validate_priors(const Priors& priors, const std::vector<ClassId>& ids) {
    double total = 0.0;
    for (const auto& [id, p] : priors) {
        if (!(p > 0.0)) {
            throw ValidationError(ErrorCode::InvalidPriors,
                                  "prior for class " + std::to_string(id) + " must be positive");
        }
        if (std::find(ids.begin(), ids.end(), id) == ids.end()) {
            throw ValidationError(ErrorCode::InvalidPriors,
                                  "prior given for unknown class " + std::to_string(id));
        }
        total += p;
    }
    for (ClassId id : ids) {
        if (priors.count(id) == 0) {
            throw ValidationError(ErrorCode::InvalidPriors,
                                  "no prior for class " + std::to_string(id));
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw ValidationError(ErrorCode::InvalidPriors,
                              "priors sum to " + std::to_string(total) + ", expected 1");
    }
}

} // namespace terraclass
