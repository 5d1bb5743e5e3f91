#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/geometry.hpp"
#include "kakeyakit/kakeya.hpp"

namespace kakeyakit {

/// Segments grouped by the half-open cube of side bound / n that holds their midpoint.
struct Partition {
    double cube_side = 0.0;
    double bound = 0.0;
    int n = 0;
    /// Lexicographic cube order; members index the source segment list.
    std::vector<CubeGroup> groups;
};

/// max |midpoint|_inf.
double midpoint_extent(std::span<const Segment> segments);

/// Smallest power of two strictly above midpoint_extent.
double dyadic_midpoint_bound(std::span<const Segment> segments);

/// Covers (-bound, bound)^d with cubes of side bound / n and groups segments by
/// midpoint. Empty cubes are omitted.
Partition partition_by_midpoint(std::span<const Segment> segments, int n, double bound);
Partition partition_by_midpoint(std::span<const Segment> segments, int n);

/// Translates every group by its cube centre (T_a x = x - a) and concatenates
/// the groups in partition order.
std::vector<Segment> cut_and_move(std::span<const Segment> segments, const Partition& p);

/// Least n with bound / n < epsilon / sqrt(d): moved midpoints then lie within epsilon / 2 of 0.
int cut_parameter_for_radius(double bound, double epsilon, int d);

struct SandwichRow {
    double delta = 0.0;
    std::uint64_t whole = 0;
    std::uint64_t max_part = 0;
    std::uint64_t sum_parts = 0;
    std::uint64_t groups_times_whole = 0;
    bool holds = false;
};

/// For each delta: max_j M(K_j) <= M(K) <= sum_j M(K_j) <= groups * M(K).
std::vector<SandwichRow> count_sandwich_report(std::span<const Segment> segments, const Partition& p,
                                               std::span<const double> deltas);

struct NestedUnion {
    std::vector<Segment> segments;
    /// Level j in 1..J for each segment.
    std::vector<int> levels;
};

/// Union over j = 1..J of cut-and-move at epsilon = 2^-j.
NestedUnion nested_union(std::span<const Segment> segments, int levels, double bound);
NestedUnion nested_union(std::span<const Segment> segments, int levels);

struct LbdScale {
    double delta = 0.0;
    std::uint64_t kakeya_cells = 0;
    std::size_t groups = 0;
    std::uint64_t moved_cells = 0;
    std::uint64_t dilated_cells = 0;
    std::uint64_t ball_cells = 0;
    /// Largest Euclidean midpoint norm after moving.
    double midpoint_radius = 0.0;
    std::vector<Cell> uncovered;
    bool covered = false;
    /// ball_cells <= kappa * kakeya_cells^2.
    bool inequality_holds = false;
    /// log M(K, delta) / log(1 / delta).
    double exponent = 0.0;
    /// (log ball_cells - log kappa) / (2 log(1 / delta)): the lower bound on
    /// `exponent` forced by coverage.
    double implied_exponent = 0.0;
};

struct LbdReport {
    int dim = 0;
    int dilation_radius = 0;
    /// Cells in the Chebyshev dilation stencil, (2 r + 1)^d.
    std::uint64_t kappa = 0;
    std::vector<LbdScale> scales;
    bool all_covered = false;
};

/// Dilation radius in cells, ceil(2 sqrt(d)).
int lbd_dilation_radius(int d);

/// The lower-bound pipeline: count, cut-and-move at cube side delta, dilate the
/// moved raster and check it covers the raster of the closed ball B(0, 1/2).
LbdReport theorem_lbd_experiment(std::span<const Segment> segments, std::span<const double> deltas);

/// Exact dyadic rational, used to report cube sides.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    static Rational from_dyadic(double x);
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    friend bool operator==(const Rational&, const Rational&) = default;
};

struct FigurePanel {
    int level = 0;
    /// Side of the square (centred at 0) holding every midpoint.
    Rational square_side;
    std::vector<Segment> segments;
    std::vector<Vec> midpoints;
    /// Every midpoint lies in the half-open square of that side.
    bool contained = false;
    std::size_t groups = 0;
};

/// Level 0 is the input; level L >= 1 cuts (-M, M)^d into 4^L squares (partition
/// parameter 2^(L-1)) and moves each to the origin.
std::vector<FigurePanel> figure_panels(const CenterField& field, std::span<const int> levels);

}  // namespace kakeyakit
