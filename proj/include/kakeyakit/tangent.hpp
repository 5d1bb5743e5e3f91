#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/geometry.hpp"

namespace kakeyakit {

/// Rays scaled by S_k(x) = x / k (bases divided by k, directions kept).
std::vector<Ray> zoom_rays(std::span<const Ray> rays, int k);

/// Raster of S_k(K) intersected with the closed unit ball.
OccupancySet zoom_out(std::span<const Ray> rays, int k, const MeshSpec& mesh);

/// Raster of the closed unit ball on the same mesh.
OccupancySet unit_ball_raster(const MeshSpec& mesh);

struct ConvergenceRow {
    int k = 0;
    /// Hausdorff distance between cell-centre clouds; +inf for an empty zoom raster.
    double distance = 0.0;
    /// 2 (gap + base_bound / k) + 2 sqrt(d) delta.
    double bound = 0.0;
    bool holds = false;
    std::size_t cells = 0;
};

struct ConvergenceProfile {
    std::vector<ConvergenceRow> rows;
    /// Each distance is at most the previous one plus sqrt(d) delta (rows in input order).
    bool nonincreasing = false;
    bool all_hold = false;
};

ConvergenceProfile convergence_profile(std::span<const Ray> rays, std::span<const int> ks, const MeshSpec& mesh,
                                       double gap, double base_bound);

struct ScalePair {
    double delta = 0.0;
    double epsilon = 0.0;
};

/// delta = 1 and epsilon = 1/2, 1/4, ... down to 2 h.
std::vector<ScalePair> default_scale_pairs(double h);

struct TangentRow {
    Vec sample;
    double delta = 0.0;
    double epsilon = 0.0;
    /// Cells of the epsilon mesh meeting B(sample, delta) in the tangent set.
    std::uint64_t tangent_count = 0;
    /// Cells of the epsilon / (2c) mesh meeting B(S^-1(sample), 2 delta / c) in the source set.
    std::uint64_t source_count = 0;
    double constant = 0.0;
    /// C 4^s (delta / epsilon)^s.
    double bound = 0.0;
    bool pass = false;
};

struct WeakTangentReport {
    double exponent = 0.0;
    /// Hausdorff distance between S(A) cut to the closed unit ball and the tangent raster (cell centres).
    double hausdorff = 0.0;
    std::vector<TangentRow> rows;
    std::size_t failures = 0;
    bool passed = false;
};

/// Local covering check on the tangent set. For each sample and pair the
/// constant C is fixed per sample from the source counts at the pair with the
/// smallest delta / epsilon; every pair is then checked against C 4^s (delta / epsilon)^s.
/// Samples are the tangent cell nearest the origin followed by seeded random cells.
WeakTangentReport weak_tangent_covering_check(const OccupancySet& source, const OccupancySet& tangent,
                                              const SimilarityMap& map, double exponent,
                                              std::span<const ScalePair> pairs, std::size_t samples,
                                              std::uint64_t seed);

}  // namespace kakeyakit
