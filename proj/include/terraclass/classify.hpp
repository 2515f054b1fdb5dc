#pragma once

#include "terraclass/raster_io.hpp"
#include "terraclass/training.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <vector>

namespace terraclass {

/// Worker threads used by per-pixel kernels. Results are bit-identical for
/// any worker count.
struct ExecutionConfig {
    std::size_t workers = 1;
};

struct KMeansConfig {
    std::size_t k = 5;
    std::size_t max_iterations = 20;
    /// Stop once the fraction of pixels changing cluster is at or below this.
    double change_threshold = 0.02;

    void validate() const;
};

struct KMeansResult {
    /// Cluster ids 1..k, ordered by ascending first-band centroid.
    ClassRaster map;
    /// Row i holds the centroid of cluster i + 1.
    Eigen::MatrixXd centroids;
    /// Total within-cluster squared error after each iteration.
    std::vector<double> sse_trace;
    std::size_t iterations = 0;
};

/// Lloyd iteration with deterministic range-spread seeding. Empty clusters
/// are re-seeded at the pixel farthest from its own centroid.
KMeansResult kmeans_classify(const MultibandRaster& raster, const KMeansConfig& cfg,
                             const ExecutionConfig& exec = {});

ClassRaster min_distance_classify(const MultibandRaster& raster, const ClassStats& stats,
                                  const ExecutionConfig& exec = {});

/// Uses the pooled covariance of all classes. `ridge` > 0 adds ridge * I;
/// otherwise a singular pooled covariance is an error.
ClassRaster mahalanobis_classify(const MultibandRaster& raster, const ClassStats& stats,
                                 double ridge = 0.0, const ExecutionConfig& exec = {});

/// Prior probability per class id.
using Priors = std::map<ClassId, double>;

/// Gaussian maximum likelihood with per-class covariances; equal priors when
/// none are given.
ClassRaster max_likelihood_classify(const MultibandRaster& raster, const ClassStats& stats,
                                    const std::optional<Priors>& priors = std::nullopt,
                                    double ridge = 0.0, const ExecutionConfig& exec = {});

struct ParallelepipedConfig {
    double stddev_multiplier = 2.0;
};

/// Pixels outside every class box stay 0; overlaps go to the smallest id.
ClassRaster parallelepiped_classify(const MultibandRaster& raster, const ClassStats& stats,
                                    const ParallelepipedConfig& cfg = {},
                                    const ExecutionConfig& exec = {});

/// Remaps nonzero ids through `mapping`; 0 is left alone.
ClassRaster cluster_to_class(const ClassRaster& cr, const std::map<ClassId, ClassId>& mapping);

/// CSV `class_id,prior`.
Priors read_priors(const std::filesystem::path& path);

/// Checks priors cover `ids` exactly, are positive and sum to 1 within 1e-9.
void validate_priors(const Priors& priors, const std::vector<ClassId>& ids);

} // namespace terraclass
