#include "kakeyakit/tangent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "kakeyakit/errors.hpp"
#include "kakeyakit/kakeya.hpp"
#include "kakeyakit/rng.hpp"

namespace kakeyakit {

std::vector<Ray> zoom_rays(std::span<const Ray> rays, int k) {
    if (k <= 0) throw InvalidInput("zoom factor must be a positive integer");
    std::vector<Ray> out(rays.begin(), rays.end());
    for (auto& r : out) {
        for (int i = 0; i < r.dim(); ++i)
            if (!std::isfinite(r.base[i])) throw InvalidInput("ray base is not finite");
        r.base = r.base / static_cast<double>(k);
    }
    return out;
}

OccupancySet zoom_out(std::span<const Ray> rays, int k, const MeshSpec& mesh) {
    const auto zoomed = zoom_rays(rays, k);
    std::vector<LineSpan> spans;
    for (const auto& r : zoomed) {
        LineSpan s;
        if (clip_ray_to_ball(r, Vec::zeros(r.dim()), 1.0, s)) spans.push_back(s);
    }
    return rasterize(std::span<const LineSpan>(spans), mesh);
}

OccupancySet unit_ball_raster(const MeshSpec& mesh) {
    return rasterize(Ball{Vec::zeros(mesh.dim()), 1.0, true}, mesh);
}

ConvergenceProfile convergence_profile(std::span<const Ray> rays, std::span<const int> ks, const MeshSpec& mesh,
                                       double gap, double base_bound) {
    ConvergenceProfile profile;
    const int d = mesh.dim();
    const double cell = std::sqrt(static_cast<double>(d)) * mesh.delta;
    const auto ball = unit_ball_raster(mesh).cell_centres();
    profile.nonincreasing = true;
    profile.all_hold = true;
    for (int k : ks) {
        ConvergenceRow row;
        row.k = k;
        const auto occ = zoom_out(rays, k, mesh);
        row.cells = occ.size();
        row.distance = occ.empty() ? std::numeric_limits<double>::infinity()
                                   : hausdorff_distance(occ.cell_centres(), ball);
        row.bound = 2.0 * (gap + base_bound / k) + 2.0 * cell;
        row.holds = row.distance <= row.bound;
        if (!profile.rows.empty() && row.distance > profile.rows.back().distance + cell)
            profile.nonincreasing = false;
        profile.all_hold = profile.all_hold && row.holds;
        profile.rows.push_back(row);
    }
    return profile;
}

std::vector<ScalePair> default_scale_pairs(double h) {
    if (!(h > 0.0)) throw InvalidInput("grid size must be positive");
    std::vector<ScalePair> pairs;
    for (double eps = 0.5; eps >= 2.0 * h; eps /= 2.0) pairs.push_back({1.0, eps});
    return pairs;
}

namespace {

std::uint64_t local_cover(std::span<const Vec> points, const Vec& centre, double radius, double side) {
    const auto mesh = MeshSpec::anchored(centre.dim, side);
    const double r2 = radius * radius;
    std::unordered_set<Cell, CellHash> cells;
    for (const auto& p : points)
        if (distance_sq(p, centre) <= r2) cells.insert(mesh.cell_of(p));
    return cells.size();
}

}  // namespace

WeakTangentReport weak_tangent_covering_check(const OccupancySet& source, const OccupancySet& tangent,
                                              const SimilarityMap& map, double exponent,
                                              std::span<const ScalePair> pairs, std::size_t samples,
                                              std::uint64_t seed) {
    if (source.dim() != tangent.dim()) throw InvalidInput("source and tangent dimensions differ");
    if (pairs.empty()) throw InvalidInput("no scale pairs");
    for (const auto& p : pairs)
        if (!(p.delta > 0.0 && p.epsilon > 0.0 && p.epsilon <= p.delta)) throw InvalidInput("bad scale pair");
    WeakTangentReport report;
    report.exponent = exponent;
    if (tangent.empty() || source.empty()) return report;

    const int d = tangent.dim();
    const auto a_pts = source.cell_centres();
    const auto t_pts = tangent.cell_centres();
    const double c = map.rate;
    const auto inverse = map.inverse();

    std::vector<Vec> mapped;
    const double keep = 1.0 + std::sqrt(static_cast<double>(d)) * source.mesh().delta * c / 2;
    for (const auto& p : a_pts) {
        Vec y = map(p);
        if (norm(y) <= keep) mapped.push_back(y);
    }
    report.hausdorff = mapped.empty() ? std::numeric_limits<double>::infinity() : hausdorff_distance(mapped, t_pts);

    std::vector<Vec> chosen;
    std::size_t nearest = 0;
    for (std::size_t i = 1; i < t_pts.size(); ++i)
        if (norm_sq(t_pts[i]) < norm_sq(t_pts[nearest])) nearest = i;
    chosen.push_back(t_pts[nearest]);
    Rng rng(seed, 0);
    while (chosen.size() < samples) chosen.push_back(t_pts[rng.below(t_pts.size())]);

    std::size_t calib = 0;
    for (std::size_t i = 1; i < pairs.size(); ++i)
        if (pairs[i].delta / pairs[i].epsilon < pairs[calib].delta / pairs[calib].epsilon) calib = i;

    report.passed = true;
    for (const auto& x : chosen) {
        const Vec pre = inverse(x);
        const auto& cp = pairs[calib];
        const auto calib_count = local_cover(a_pts, pre, 2.0 * cp.delta / c, cp.epsilon / (2.0 * c));
        const double constant =
            static_cast<double>(calib_count) / std::pow(4.0 * cp.delta / cp.epsilon, exponent);
        for (const auto& p : pairs) {
            TangentRow row;
            row.sample = x;
            row.delta = p.delta;
            row.epsilon = p.epsilon;
            row.tangent_count = local_cover(t_pts, x, p.delta, p.epsilon);
            row.source_count = local_cover(a_pts, pre, 2.0 * p.delta / c, p.epsilon / (2.0 * c));
            row.constant = constant;
            row.bound = constant * std::pow(4.0, exponent) * std::pow(p.delta / p.epsilon, exponent);
            row.pass = static_cast<double>(row.tangent_count) <= row.bound;
            if (!row.pass) ++report.failures;
            report.rows.push_back(row);
        }
    }
    report.passed = report.failures == 0;
    return report;
}

}  // namespace kakeyakit
