#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/geometry.hpp"

namespace kakeyakit {

/// Finite sample of a centre field f: each sampled direction x carries the
/// centre f(x) of its unit segment.
///
/// `bound` is a midpoint bound: every centre lies in the open box (-bound, bound)^d.
/// Quantization and midpoint partitions both work on that box.
class CenterField {
public:
    struct Entry {
        Direction direction;
        Vec centre;
    };

    /// Sorts entries by direction. Throws on duplicate directions, mixed
    /// dimensions, or a centre outside (-bound, bound)^d.
    CenterField(std::vector<Entry> entries, double bound);

    /// Uses the smallest power of two strictly above every |centre|_inf.
    static CenterField with_auto_bound(std::vector<Entry> entries);

    const std::vector<Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    int dim() const { return entries_.empty() ? 0 : entries_.front().centre.dim; }
    double bound() const { return bound_; }
    /// Smallest M' with every segment of the given length inside [-M', M']^d.
    double segment_bound(double length = 1.0) const;
    std::vector<Direction> directions() const;

private:
    std::vector<Entry> entries_;
    double bound_;
};

/// Half-extended set data: a base point t_theta for each sampled sphere point theta.
struct BaseField {
    struct Entry {
        Vec direction;  // unit vector on the full sphere
        Vec base;
    };
    std::vector<Entry> entries;
    /// Radius at which rays are cut for rasterization.
    double truncation = 1.0;

    /// max |t_theta|.
    double base_bound() const;
};

/// K(f): one segment per entry, centred at f(x) with direction x.
std::vector<Segment> build_kakeya(const CenterField& f, double length = 1.0);

/// n equally spaced projective directions in the plane, angles k pi / n.
std::vector<Direction> fan_directions(int n);

/// Planar fan of n directions with centres from a seeded Halton sequence,
/// rounded to multiples of 2^-20, strictly inside the square of side 2 * half_side.
CenterField fan_field(int n, std::uint64_t seed, double half_side = 2.0);

inline constexpr std::uint64_t kFan64Seed = 20140601;

/// The 64-segment discrete Kakeya set, centres inside the side-4 square about 0.
CenterField fan64();

CenterField constant_field(std::span<const Direction> directions, const Vec& centre);

/// Uniform random centres in (-half_side, half_side)^d rounded to multiples of 2^-24.
CenterField random_field(std::span<const Direction> directions, double half_side, std::uint64_t seed);

/// Seeded random projective directions in R^d (normalized Gaussians).
std::vector<Direction> random_directions(int d, int n, std::uint64_t seed);

/// Sup over sampled directions of |f(x) - g(x)|.
double field_distance(const CenterField& f, const CenterField& g);

struct CubeGroup {
    Cell cube;
    Vec centre;
    /// Indices into the quantized field's entries.
    std::vector<std::size_t> members;
};

struct QuantizedField {
    CenterField field;
    std::vector<CubeGroup> groups;
    double cube_side = 0.0;
    int n = 0;
};

/// Snaps every centre to the centre of its half-open cube of side M / n, with
/// n the least integer giving M / n < epsilon / sqrt(d).
QuantizedField quantize_field(const CenterField& f0, double epsilon);

/// Segments of the groups, each group translated by its own cube centre.
std::vector<Segment> shifted_union(const QuantizedField& q);

struct BallCoverCheck {
    bool equal = false;
    std::size_t symmetric_difference = 0;
    std::size_t union_cells = 0;
    std::size_t ball_cells = 0;
};

/// Compares the raster of the shifted union of groups with the raster of the closed ball B(0, 1/2).
BallCoverCheck shifted_union_is_ball(const QuantizedField& q, const MeshSpec& mesh);

struct MeasureWitness {
    std::size_t index = 0;
    double group_measure = 0.0;
    double ball_measure = 0.0;
    /// ball_measure / N.
    double lower_bound = 0.0;
    /// group_cells * N >= ball_cells, checked in integers.
    bool holds = false;
};

MeasureWitness measure_witness(const QuantizedField& q, const MeshSpec& mesh);

/// Smallest fan size n (doubling from `start`) whose concentric segments rasterize to
/// exactly the closed ball B(0, 1/2) at the given delta. Returns 0 if `limit` is exceeded.
int calibrate_fan_density(double delta, int start = 4, int limit = 1 << 16);

struct SphereSample {
    std::vector<Vec> points;
    /// Max chord distance from a net point to the sample.
    double covering_radius = 0.0;
    /// Min chord distance between sample points.
    double min_separation = 0.0;
    std::size_t net_size = 0;
};

/// Deterministic candidate net on the unit sphere S^{d-1}.
std::vector<Vec> sphere_net(int d, std::size_t size);

/// Greedy farthest-point maximal 1/n-separated subset of S^{d-1} (chord metric),
/// maximal with respect to the candidate net.
SphereSample direction_sample(int d, int n, std::size_t net_size = 10000);

BaseField zero_base_field(std::span<const Vec> directions, double truncation = 1.0);
/// Bases uniform in the ball of radius max_base.
BaseField random_base_field(std::span<const Vec> directions, double max_base, std::uint64_t seed,
                            double truncation = 1.0);

std::vector<Ray> build_half_extended(const BaseField& base);

/// Rasterizes the rays cut at |x| <= truncation.
OccupancySet rasterize_half_extended(const BaseField& base, const MeshSpec& mesh);

/// Clips a ray to the closed ball; false when they do not meet.
bool clip_ray_to_ball(const Ray& ray, const Vec& centre, double radius, LineSpan& out);

/// One line per entry, `direction coords ; centre coords`, sorted by direction.
void write_center_field(std::ostream& os, const CenterField& f);
/// Rebuilds the field bit for bit; bound <= 0 selects the automatic bound.
CenterField read_center_field(std::istream& is, double bound = 0.0);

}  // namespace kakeyakit
