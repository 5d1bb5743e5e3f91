#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "kakeyakit/geometry.hpp"

namespace kakeyakit {

/// Integer cell index; coordinates beyond the mesh dimension are zero.
using Cell = std::array<std::int32_t, kMaxDim>;

struct CellHash {
    std::size_t operator()(const Cell& c) const noexcept {
        std::uint64_t h = 0x84222325cbf29ce4ULL;
        for (auto v : c) {
            h ^= static_cast<std::uint32_t>(v);
            h *= 0x100000001b3ULL;
            h ^= h >> 29;
        }
        return static_cast<std::size_t>(h);
    }
};

/// Axis-aligned mesh of half-open cubes prod_i [origin_i + k_i delta, origin_i + (k_i + 1) delta).
struct MeshSpec {
    double delta = 1.0;
    Vec origin;

    MeshSpec(double delta_, Vec origin_);
    /// Mesh anchored at the origin of R^d.
    static MeshSpec anchored(int d, double delta) { return MeshSpec(delta, Vec::zeros(d)); }

    int dim() const { return origin.dim; }
    Cell cell_of(const Vec& x) const;
    Vec cell_lo(const Cell& c) const;
    Vec cell_centre(const Cell& c) const;
    /// Mesh-unit coordinates (x - origin) / delta.
    Vec to_mesh_units(const Vec& x) const { return (x - origin) / delta; }
};

/// Closed ball. The open variant drops cells that meet the ball only on its boundary sphere.
struct Ball {
    Vec centre;
    double radius = 0.5;
    bool closed = true;
};

/// Axis-aligned closed box used to clip rays.
struct Box {
    Vec lo;
    Vec hi;
};

/// Closed straight span [a, b]; a == b is a single point.
struct LineSpan {
    Vec a;
    Vec b;
};

/// The cells of a mesh met by a set. Cells are sorted lexicographically and unique.
class OccupancySet {
public:
    explicit OccupancySet(MeshSpec mesh) : mesh_(std::move(mesh)) {}
    /// Sorts and deduplicates.
    OccupancySet(MeshSpec mesh, std::vector<Cell> cells);

    const MeshSpec& mesh() const { return mesh_; }
    int dim() const { return mesh_.dim(); }
    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    bool contains(const Cell& c) const;
    bool is_subset_of(const OccupancySet& other) const;
    std::vector<Vec> cell_centres() const;

    OccupancySet united(const OccupancySet& other) const;
    /// Cells present in exactly one of the two sets.
    std::size_t symmetric_difference_size(const OccupancySet& other) const;

    friend bool operator==(const OccupancySet& a, const OccupancySet& b) {
        return a.mesh_.delta == b.mesh_.delta && a.mesh_.origin == b.mesh_.origin && a.cells_ == b.cells_;
    }

private:
    MeshSpec mesh_;
    std::vector<Cell> cells_;
};

/// Supercover rasterization: every cell whose half-open cube meets the set.
OccupancySet rasterize(std::span<const Segment> segments, const MeshSpec& mesh);
OccupancySet rasterize(std::span<const LineSpan> spans, const MeshSpec& mesh);
OccupancySet rasterize(std::span<const Ray> rays, const MeshSpec& mesh, const Box& clip);
OccupancySet rasterize(const Ball& ball, const MeshSpec& mesh);

/// Appends the cells met by {c + t h : t in [-1, 1]}, with c and h in mesh units.
void rasterize_mesh_span(const Vec& c, const Vec& h, std::vector<Cell>& out);

/// Exact intersection of the closed span c + t h (|t| <= 1, mesh units) with
/// the half-open unit cube at `cell`.
bool span_meets_cell(const Vec& c, const Vec& h, const Cell& cell);

/// Clips a ray to a closed box; false when they do not meet.
bool clip_ray_to_box(const Ray& ray, const Box& box, LineSpan& out);

/// M(E, delta).
inline std::uint64_t mesh_count(const OccupancySet& occ) { return occ.size(); }

/// Cell count times delta^d: an outer-measure proxy.
double pixel_measure(const OccupancySet& occ);

struct PackingResult {
    std::size_t count = 0;
    std::vector<Vec> centres;
    /// Minimum over accepted pairs of (distance - 2 epsilon); +inf with fewer than two centres.
    double min_gap = 0.0;
};

/// Greedy maximal packing by disjoint closed epsilon-balls centred in `points`.
/// Points are scanned in lexicographic order; a point is accepted iff it is
/// farther than 2 epsilon from every accepted centre.
PackingResult disjoint_packing_count(std::span<const Vec> points, double epsilon);

struct StabilityResult {
    bool stable = false;
    /// dist_H(A, B) < min_gap / 2, the regime where stability is guaranteed.
    bool guaranteed = false;
    std::size_t reference_count = 0;
    /// Size of the packing of B obtained by moving each accepted centre of A
    /// to its nearest point of B (counted only when those balls stay disjoint).
    std::size_t transported_count = 0;
    /// Greedy packing count of B under the same scan order.
    std::size_t greedy_count = 0;
    double hausdorff = 0.0;
    double min_gap = 0.0;
};

/// Checks N_disj(B, epsilon) >= N_disj(A, epsilon) through the transported packing.
StabilityResult packing_stability(std::span<const Vec> a, double epsilon, std::span<const Vec> b);

struct ScaleCount {
    double delta = 0.0;
    double count = 0.0;
};

struct BoxDimensionEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double least_squares = 0.0;
    /// log(M_{j+1} / M_j) / log(delta_j / delta_{j+1}).
    std::vector<double> slopes;
};

/// Finite proxies for the lower and upper box dimension: the min and max of the
/// two-point slopes over the finest `window_fraction` of the slopes.
BoxDimensionEstimate estimate_box_dimensions(std::span<const ScaleCount> counts, double window_fraction = 0.5);

enum class HausdorffMethod { Auto, BruteForce, Grid };

/// sup_a inf_b |a - b|.
double directed_hausdorff(std::span<const Vec> a, std::span<const Vec> b,
                          HausdorffMethod method = HausdorffMethod::Auto);
double hausdorff_distance(std::span<const Vec> a, std::span<const Vec> b,
                          HausdorffMethod method = HausdorffMethod::Auto);

/// Nearest-neighbour index over a point cloud bucketed on a uniform grid.
class PointGrid {
public:
    explicit PointGrid(std::span<const Vec> points);
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    /// Index into the constructor's point list of a nearest point to q;
    /// `skip` excludes one index, for nearest-other queries.
    std::size_t nearest(const Vec& q, std::size_t skip = npos) const;
    double nearest_distance(const Vec& q) const;
    std::size_t size() const { return points_.size(); }

private:
    Cell key(const Vec& x) const;
    std::vector<Vec> points_;
    double h_ = 1.0;
    Vec lo_;
    Cell kmin_{}, kmax_{};
    std::vector<std::uint32_t> start_;
    std::vector<std::uint32_t> order_;
    std::array<std::int64_t, kMaxDim> stride_{};
    std::size_t flat(const Cell& k) const;
};

/// Text form: header `d delta origin...`, then one cell per line, sorted.
void write_occupancy(std::ostream& os, const OccupancySet& occ);
OccupancySet read_occupancy(std::istream& is);

}  // namespace kakeyakit
