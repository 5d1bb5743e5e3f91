#include "kakeyakit/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

namespace kakeyakit {

namespace {

constexpr double kIndexLimit = 1 << 30;

std::int32_t to_index(double x) {
    const double f = std::floor(x);
    if (!(std::abs(f) < kIndexLimit)) throw InvalidInput("coordinate outside the representable mesh range");
    return static_cast<std::int32_t>(f);
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Visits every cell of the box [lo, hi] (inclusive) in the first d axes.
template <class F>
void for_each_cell(const Cell& lo, const Cell& hi, int d, F&& f) {
    for (int i = 0; i < d; ++i)
        if (lo[i] > hi[i]) return;
    Cell k = lo;
    for (int i = d; i < kMaxDim; ++i) k[i] = 0;
    while (true) {
        f(k);
        int i = d - 1;
        while (i >= 0) {
            if (k[i] < hi[i]) {
                ++k[i];
                break;
            }
            k[i] = lo[i];
            --i;
        }
        if (i < 0) return;
    }
}

}  // namespace

MeshSpec::MeshSpec(double delta_, Vec origin_) : delta(delta_), origin(origin_) {
    if (!(delta > 0.0) || !std::isfinite(delta)) throw InvalidInput("mesh delta must be positive");
    check_dimension(origin.dim);
}

Cell MeshSpec::cell_of(const Vec& x) const {
    Cell k{};
    for (int i = 0; i < dim(); ++i) k[i] = to_index((x[i] - origin[i]) / delta);
    return k;
}

Vec MeshSpec::cell_lo(const Cell& c) const {
    Vec v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = origin[i] + c[i] * delta;
    return v;
}

Vec MeshSpec::cell_centre(const Cell& c) const {
    Vec v(dim());
    for (int i = 0; i < dim(); ++i) v[i] = origin[i] + (c[i] + 0.5) * delta;
    return v;
}

OccupancySet::OccupancySet(MeshSpec mesh, std::vector<Cell> cells) : mesh_(std::move(mesh)), cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

bool OccupancySet::contains(const Cell& c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

bool OccupancySet::is_subset_of(const OccupancySet& other) const {
    return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end());
}

std::vector<Vec> OccupancySet::cell_centres() const {
    std::vector<Vec> out;
    out.reserve(cells_.size());
    for (const auto& c : cells_) out.push_back(mesh_.cell_centre(c));
    return out;
}

OccupancySet OccupancySet::united(const OccupancySet& other) const {
    if (!(mesh_.delta == other.mesh_.delta && mesh_.origin == other.mesh_.origin))
        throw InvalidInput("cannot unite occupancy sets on different meshes");
    OccupancySet out(mesh_);
    std::set_union(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                   std::back_inserter(out.cells_));
    return out;
}

std::size_t OccupancySet::symmetric_difference_size(const OccupancySet& other) const {
    std::vector<Cell> diff;
    std::set_symmetric_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                                  std::back_inserter(diff));
    return diff.size();
}

bool span_meets_cell(const Vec& c, const Vec& h, const Cell& cell) {
    double lo = -1.0, hi = 1.0;
    bool lo_open = false, hi_open = false;
    auto raise_lo = [&](double v, bool open) {
        if (v > lo) {
            lo = v;
            lo_open = open;
        } else if (v == lo) {
            lo_open = lo_open || open;
        }
    };
    auto drop_hi = [&](double v, bool open) {
        if (v < hi) {
            hi = v;
            hi_open = open;
        } else if (v == hi) {
            hi_open = hi_open || open;
        }
    };
    for (int i = 0; i < c.dim; ++i) {
        const double k = cell[i];
        if (h[i] == 0.0) {
            if (!(k <= c[i] && c[i] < k + 1.0)) return false;
            continue;
        }
        const double enter = (k - c[i]) / h[i];
        const double leave = (k + 1.0 - c[i]) / h[i];
        if (h[i] > 0.0) {
            raise_lo(enter, false);
            drop_hi(leave, true);
        } else {
            drop_hi(enter, false);
            raise_lo(leave, true);
        }
        if (lo > hi) return false;
    }
    return lo < hi || (lo == hi && !lo_open && !hi_open);
}

void rasterize_mesh_span(const Vec& c, const Vec& h, std::vector<Cell>& out) {
    const int d = c.dim;
    int major = 0;
    for (int i = 1; i < d; ++i)
        if (std::abs(h[i]) > std::abs(h[major])) major = i;

    if (h[major] == 0.0) {
        Cell k{};
        for (int i = 0; i < d; ++i) k[i] = to_index(c[i]);
        out.push_back(k);
        return;
    }

    // Walk the slabs of the major axis; inside each slab the other coordinates
    // sweep at most about one cell, and the exact test settles the candidates.
    const double extent = std::abs(h[major]);
    const std::int32_t k0 = to_index(c[major] - extent) - 1;
    const std::int32_t k1 = to_index(c[major] + extent) + 1;
    for (std::int32_t k = k0; k <= k1; ++k) {
        const double ta = (k - c[major]) / h[major];
        const double tb = (k + 1.0 - c[major]) / h[major];
        const double tlo = std::clamp(std::min(ta, tb), -1.0, 1.0);
        const double thi = std::clamp(std::max(ta, tb), -1.0, 1.0);
        Cell lo{}, hi{};
        for (int i = 0; i < d; ++i) {
            if (i == major) {
                lo[i] = hi[i] = k;
                continue;
            }
            const double v1 = c[i] + tlo * h[i];
            const double v2 = c[i] + thi * h[i];
            lo[i] = to_index(std::min(v1, v2)) - 1;
            hi[i] = to_index(std::max(v1, v2)) + 1;
        }
        for_each_cell(lo, hi, d, [&](const Cell& cell) {
            if (span_meets_cell(c, h, cell)) out.push_back(cell);
        });
    }
}

OccupancySet rasterize(std::span<const Segment> segments, const MeshSpec& mesh) {
    std::vector<Cell> cells;
    for (const auto& s : segments) {
        if (s.dim() != mesh.dim()) throw InvalidInput("segment and mesh dimensions differ");
        // Centre-based mesh units keep mesh-aligned translations exact.
        const Vec c = mesh.to_mesh_units(s.centre);
        const Vec h = s.direction.vec() * (s.length / 2) / mesh.delta;
        rasterize_mesh_span(c, h, cells);
    }
    return OccupancySet(mesh, std::move(cells));
}

OccupancySet rasterize(std::span<const LineSpan> spans, const MeshSpec& mesh) {
    std::vector<Cell> cells;
    for (const auto& s : spans) {
        if (s.a.dim != mesh.dim() || s.b.dim != mesh.dim()) throw InvalidInput("span and mesh dimensions differ");
        const Vec a = mesh.to_mesh_units(s.a);
        const Vec b = mesh.to_mesh_units(s.b);
        rasterize_mesh_span((a + b) / 2, (b - a) / 2, cells);
    }
    return OccupancySet(mesh, std::move(cells));
}

bool clip_ray_to_box(const Ray& ray, const Box& box, LineSpan& out) {
    double lmin = 0.0, lmax = std::numeric_limits<double>::infinity();
    for (int i = 0; i < ray.dim(); ++i) {
        const double b = ray.base[i], v = ray.direction[i];
        if (v == 0.0) {
            if (b < box.lo[i] || b > box.hi[i]) return false;
            continue;
        }
        double t1 = (box.lo[i] - b) / v, t2 = (box.hi[i] - b) / v;
        if (t1 > t2) std::swap(t1, t2);
        lmin = std::max(lmin, t1);
        lmax = std::min(lmax, t2);
        if (lmin > lmax) return false;
    }
    if (!std::isfinite(lmax)) return false;
    out = LineSpan{ray.base + ray.direction * lmin, ray.base + ray.direction * lmax};
    return true;
}

OccupancySet rasterize(std::span<const Ray> rays, const MeshSpec& mesh, const Box& clip) {
    std::vector<LineSpan> spans;
    for (const auto& r : rays) {
        LineSpan s;
        if (clip_ray_to_box(r, clip, s)) spans.push_back(s);
    }
    return rasterize(std::span<const LineSpan>(spans), mesh);
}

OccupancySet rasterize(const Ball& ball, const MeshSpec& mesh) {
    if (ball.centre.dim != mesh.dim()) throw InvalidInput("ball and mesh dimensions differ");
    if (!(ball.radius >= 0.0)) throw InvalidInput("ball radius must be nonnegative");
    const int d = mesh.dim();
    const Vec p = mesh.to_mesh_units(ball.centre);
    const double r = ball.radius / mesh.delta;
    const double r2 = r * r;
    Cell lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        lo[i] = to_index(p[i] - r);
        hi[i] = to_index(p[i] + r);
    }
    std::vector<Cell> cells;
    for_each_cell(lo, hi, d, [&](const Cell& k) {
        double dist2 = 0.0;
        bool nearest_inside = true;
        for (int i = 0; i < d; ++i) {
            const double q = std::clamp(p[i], double(k[i]), k[i] + 1.0);
            if (q == k[i] + 1.0) nearest_inside = false;
            dist2 += (q - p[i]) * (q - p[i]);
        }
        // The nearest point of the closed cube realizes the infimum; on the
        // boundary sphere it only counts when it lies in the half-open cube.
        if (dist2 < r2 || (ball.closed && dist2 == r2 && nearest_inside)) cells.push_back(k);
    });
    return OccupancySet(mesh, std::move(cells));
}

double pixel_measure(const OccupancySet& occ) {
    return static_cast<double>(occ.size()) * std::pow(occ.mesh().delta, occ.dim());
}

// ---------------------------------------------------------------------------
// Nearest neighbours

PointGrid::PointGrid(std::span<const Vec> points) : points_(points.begin(), points.end()) {
    if (points_.empty()) throw InvalidInput("point set must be nonempty");
    const int d = points_.front().dim;
    lo_ = points_.front();
    Vec hi = lo_;
    for (const auto& p : points_) {
        if (p.dim != d) throw InvalidInput("mixed point dimensions");
        for (int i = 0; i < d; ++i) {
            lo_[i] = std::min(lo_[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    double ext = 0.0;
    for (int i = 0; i < d; ++i) ext = std::max(ext, hi[i] - lo_[i]);
    const double per_axis = std::max(1.0, std::round(std::pow(double(points_.size()), 1.0 / d)));
    h_ = ext > 0.0 ? ext / per_axis : 1.0;

    std::int64_t total = 1;
    for (int i = 0; i < d; ++i) {
        kmin_[i] = 0;
        kmax_[i] = static_cast<std::int32_t>(std::floor((hi[i] - lo_[i]) / h_));
        stride_[i] = 0;
    }
    for (int i = d - 1; i >= 0; --i) {
        stride_[i] = total;
        total *= (kmax_[i] + 1);
    }
    start_.assign(static_cast<std::size_t>(total) + 1, 0);
    std::vector<std::size_t> slot(points_.size());
    for (std::size_t j = 0; j < points_.size(); ++j) {
        slot[j] = flat(key(points_[j]));
        ++start_[slot[j] + 1];
    }
    for (std::size_t s = 1; s < start_.size(); ++s) start_[s] += start_[s - 1];
    order_.resize(points_.size());
    std::vector<std::uint32_t> fill(start_.begin(), start_.end() - 1);
    for (std::size_t j = 0; j < points_.size(); ++j) order_[fill[slot[j]]++] = static_cast<std::uint32_t>(j);
}

Cell PointGrid::key(const Vec& x) const {
    Cell k{};
    for (int i = 0; i < x.dim; ++i) {
        const auto v = static_cast<std::int32_t>(std::floor((x[i] - lo_[i]) / h_));
        k[i] = std::clamp(v, kmin_[i], kmax_[i]);
    }
    return k;
}

std::size_t PointGrid::flat(const Cell& k) const {
    std::int64_t f = 0;
    for (int i = 0; i < lo_.dim; ++i) f += k[i] * stride_[i];
    return static_cast<std::size_t>(f);
}

std::size_t PointGrid::nearest(const Vec& q, std::size_t skip) const {
    const int d = lo_.dim;
    std::array<std::int64_t, kMaxDim> kq{};
    std::int64_t r0 = 0, span = 0;
    for (int i = 0; i < d; ++i) {
        const double f = std::floor((q[i] - lo_[i]) / h_);
        kq[i] = static_cast<std::int64_t>(std::clamp(f, -kIndexLimit, kIndexLimit));
        r0 = std::max({r0, -kq[i], kq[i] - kmax_[i]});
        span = std::max<std::int64_t>(span, kmax_[i] + 1);
    }
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = npos;
    for (std::int64_t r = r0; r <= r0 + span + 1; ++r) {
        Cell lo{}, hi{};
        for (int i = 0; i < d; ++i) {
            lo[i] = static_cast<std::int32_t>(std::max<std::int64_t>(0, kq[i] - r));
            hi[i] = static_cast<std::int32_t>(std::min<std::int64_t>(kmax_[i], kq[i] + r));
        }
        for_each_cell(lo, hi, d, [&](const Cell& k) {
            std::int64_t cheb = 0;
            for (int i = 0; i < d; ++i) cheb = std::max<std::int64_t>(cheb, std::abs(k[i] - kq[i]));
            if (cheb != r) return;
            const std::size_t f = flat(k);
            for (std::uint32_t s = start_[f]; s < start_[f + 1]; ++s) {
                const std::uint32_t j = order_[s];
                if (j == skip) continue;
                const double dd = distance_sq(q, points_[j]);
                if (dd < best || (dd == best && j < best_j)) {
                    best = dd;
                    best_j = j;
                }
            }
        });
        // Every point in a later ring lies at least r * h_ away from q.
        const double reach = static_cast<double>(r) * h_;
        if (best_j != npos && best <= reach * reach) break;
    }
    return best_j;
}

double PointGrid::nearest_distance(const Vec& q) const { return distance(q, points_[nearest(q)]); }

double directed_hausdorff(std::span<const Vec> a, std::span<const Vec> b, HausdorffMethod method) {
    if (a.empty() || b.empty()) throw InvalidInput("Hausdorff distance needs nonempty point sets");
    if (method == HausdorffMethod::Auto)
        method = (a.size() < 10000 && b.size() < 10000) ? HausdorffMethod::BruteForce : HausdorffMethod::Grid;
    double worst = 0.0;
    if (method == HausdorffMethod::BruteForce) {
        for (const auto& p : a) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : b) best = std::min(best, distance_sq(p, q));
            worst = std::max(worst, best);
        }
        return std::sqrt(worst);
    }
    const PointGrid grid(b);
    for (const auto& p : a) worst = std::max(worst, grid.nearest_distance(p));
    return worst;
}

double hausdorff_distance(std::span<const Vec> a, std::span<const Vec> b, HausdorffMethod method) {
    return std::max(directed_hausdorff(a, b, method), directed_hausdorff(b, a, method));
}

// ---------------------------------------------------------------------------
// Packings

namespace {

double min_pair_distance(const std::vector<Vec>& pts) {
    if (pts.size() < 2) return std::numeric_limits<double>::infinity();
    const PointGrid grid(pts);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i) best = std::min(best, distance(pts[i], pts[grid.nearest(pts[i], i)]));
    return best;
}

}  // namespace

PackingResult disjoint_packing_count(std::span<const Vec> points, double epsilon) {
    if (points.empty()) throw InvalidInput("packing needs a nonempty point set");
    if (!(epsilon > 0.0)) throw InvalidInput("packing radius must be positive");
    std::vector<Vec> order(points.begin(), points.end());
    std::stable_sort(order.begin(), order.end());

    const double reach = 2.0 * epsilon;
    const double reach2 = reach * reach;
    std::unordered_map<Cell, std::vector<std::uint32_t>, CellHash> buckets;
    auto bucket_of = [&](const Vec& x) {
        Cell k{};
        for (int i = 0; i < x.dim; ++i) k[i] = to_index(x[i] / reach);
        return k;
    };

    PackingResult out;
    for (const auto& p : order) {
        const Cell k = bucket_of(p);
        Cell lo = k, hi = k;
        for (int i = 0; i < p.dim; ++i) {
            --lo[i];
            ++hi[i];
        }
        bool clear = true;
        for_each_cell(lo, hi, p.dim, [&](const Cell& n) {
            if (!clear) return;
            auto it = buckets.find(n);
            if (it == buckets.end()) return;
            for (auto j : it->second)
                if (distance_sq(p, out.centres[j]) <= reach2) {
                    clear = false;
                    return;
                }
        });
        if (!clear) continue;
        buckets[k].push_back(static_cast<std::uint32_t>(out.centres.size()));
        out.centres.push_back(p);
    }
    out.count = out.centres.size();
    out.min_gap = min_pair_distance(out.centres) - reach;
    return out;
}

StabilityResult packing_stability(std::span<const Vec> a, double epsilon, std::span<const Vec> b) {
    if (b.empty()) throw InvalidInput("perturbed point set must be nonempty");
    const PackingResult ref = disjoint_packing_count(a, epsilon);
    StabilityResult out;
    out.reference_count = ref.count;
    out.min_gap = ref.min_gap;
    out.hausdorff = hausdorff_distance(a, b);
    out.guaranteed = out.hausdorff < ref.min_gap / 2;

    const PointGrid grid(b);
    std::vector<Vec> moved;
    moved.reserve(ref.count);
    for (const auto& c : ref.centres) moved.push_back(b[grid.nearest(c)]);
    const bool disjoint = min_pair_distance(moved) > 2.0 * epsilon;
    out.transported_count = disjoint ? moved.size() : 0;
    out.greedy_count = disjoint_packing_count(b, epsilon).count;
    out.stable = out.transported_count >= ref.count || out.greedy_count >= ref.count;
    return out;
}

// ---------------------------------------------------------------------------
// Box dimension

BoxDimensionEstimate estimate_box_dimensions(std::span<const ScaleCount> counts, double window_fraction) {
    if (counts.size() < 3) throw InvalidInput("box dimension estimate needs at least 3 scales");
    if (!(window_fraction > 0.0 && window_fraction <= 1.0)) throw InvalidInput("window fraction must be in (0, 1]");
    for (std::size_t j = 0; j < counts.size(); ++j) {
        if (!(counts[j].delta > 0.0) || !(counts[j].count > 0.0))
            throw InvalidInput("scales and counts must be positive");
        if (j > 0 && !(counts[j].delta < counts[j - 1].delta))
            throw InvalidInput("scales must be strictly decreasing");
    }
    BoxDimensionEstimate est;
    for (std::size_t j = 0; j + 1 < counts.size(); ++j)
        est.slopes.push_back(std::log(counts[j + 1].count / counts[j].count) /
                             std::log(counts[j].delta / counts[j + 1].delta));
    const auto m = est.slopes.size();
    const auto window = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(m * window_fraction)));
    const auto first = est.slopes.begin() + static_cast<std::ptrdiff_t>(m - window);
    est.lower = *std::min_element(first, est.slopes.end());
    est.upper = *std::max_element(first, est.slopes.end());

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(counts.size());
    for (const auto& c : counts) {
        const double x = -std::log(c.delta), y = std::log(c.count);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    est.least_squares = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return est;
}

// ---------------------------------------------------------------------------
// Serialization

void write_occupancy(std::ostream& os, const OccupancySet& occ) {
    const auto& mesh = occ.mesh();
    os << mesh.dim() << ' ' << format_double(mesh.delta);
    for (int i = 0; i < mesh.dim(); ++i) os << ' ' << format_double(mesh.origin[i]);
    os << '\n';
    for (const auto& c : occ.cells()) {
        for (int i = 0; i < mesh.dim(); ++i) os << (i ? " " : "") << c[i];
        os << '\n';
    }
}

OccupancySet read_occupancy(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("missing occupancy header");
    std::istringstream header(line);
    int d = 0;
    double delta = 0;
    if (!(header >> d >> delta)) throw InvalidInput("malformed occupancy header");
    check_dimension(d);
    Vec origin(d);
    for (int i = 0; i < d; ++i)
        if (!(header >> origin[i])) throw InvalidInput("malformed occupancy origin");
    MeshSpec mesh(delta, origin);
    std::vector<Cell> cells;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        Cell c{};
        for (int i = 0; i < d; ++i)
            if (!(row >> c[i])) throw InvalidInput("malformed occupancy cell: " + line);
        cells.push_back(c);
    }
    return OccupancySet(std::move(mesh), std::move(cells));
}

}  // namespace kakeyakit
