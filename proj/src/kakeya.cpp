#include "kakeyakit/kakeya.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "kakeyakit/rng.hpp"

namespace kakeyakit {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double radical_inverse(std::uint64_t i, std::uint64_t base) {
    double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % base);
        i /= base;
        f *= inv;
    }
    return r;
}

double smallest_power_of_two_above(double x) {
    double p = 1.0 / 1024;
    while (!(p > x)) p *= 2.0;
    return p;
}

}  // namespace

CenterField::CenterField(std::vector<Entry> entries, double bound) : entries_(std::move(entries)), bound_(bound) {
    if (!(bound_ > 0.0) || !std::isfinite(bound_)) throw InvalidInput("field bound must be positive");
    std::sort(entries_.begin(), entries_.end(),
              [](const Entry& a, const Entry& b) { return a.direction < b.direction; });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        if (e.centre.dim != e.direction.dim() || e.centre.dim != entries_.front().centre.dim)
            throw InvalidInput("field entries have inconsistent dimensions");
        if (i > 0 && entries_[i - 1].direction == e.direction) throw InvalidInput("duplicate direction in field");
        if (!(norm_inf(e.centre) < bound_)) throw InvalidInput("field centre outside (-bound, bound)^d");
    }
}

CenterField CenterField::with_auto_bound(std::vector<Entry> entries) {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, norm_inf(e.centre));
    return CenterField(std::move(entries), smallest_power_of_two_above(m));
}

double CenterField::segment_bound(double length) const {
    double m = 0.0;
    for (const auto& e : entries_)
        for (int i = 0; i < e.centre.dim; ++i)
            m = std::max(m, std::abs(e.centre[i]) + std::abs(e.direction[i]) * length / 2);
    return m;
}

std::vector<Direction> CenterField::directions() const {
    std::vector<Direction> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.direction);
    return out;
}

double BaseField::base_bound() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, norm(e.base));
    return m;
}

std::vector<Segment> build_kakeya(const CenterField& f, double length) {
    if (f.empty()) throw InvalidInput("centre field is empty");
    std::vector<Segment> out;
    out.reserve(f.size());
    for (const auto& e : f.entries()) out.emplace_back(e.centre, e.direction, length);
    return out;
}

std::vector<Direction> fan_directions(int n) {
    if (n < 1) throw InvalidInput("fan needs at least one direction");
    std::vector<Direction> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double a = M_PI * k / n;
        out.push_back(canonicalize_direction(Vec{std::cos(a), std::sin(a)}));
    }
    return out;
}

CenterField fan_field(int n, std::uint64_t seed, double half_side) {
    const auto dirs = fan_directions(n);
    Rng rng(seed, 0);
    const double shift[2] = {rng.uniform(), rng.uniform()};
    constexpr double kGrid = 1 << 20;
    std::vector<CenterField::Entry> entries;
    entries.reserve(n);
    for (int k = 0; k < n; ++k) {
        Vec c(2);
        const double u[2] = {radical_inverse(k + 1, 2), radical_inverse(k + 1, 3)};
        for (int i = 0; i < 2; ++i) {
            double v = u[i] + shift[i];
            v -= std::floor(v);
            v = (std::floor(v * kGrid) + 0.5) / kGrid;
            c[i] = -half_side + 2.0 * half_side * v;
        }
        entries.push_back({dirs[k], c});
    }
    return CenterField(std::move(entries), half_side);
}

CenterField fan64() { return fan_field(64, kFan64Seed); }

CenterField constant_field(std::span<const Direction> directions, const Vec& centre) {
    std::vector<CenterField::Entry> entries;
    for (const auto& d : directions) entries.push_back({d, centre});
    return CenterField::with_auto_bound(std::move(entries));
}

CenterField random_field(std::span<const Direction> directions, double half_side, std::uint64_t seed) {
    Rng rng(seed, 1);
    const double cap = half_side - std::ldexp(1.0, -24);
    std::vector<CenterField::Entry> entries;
    for (const auto& d : directions) {
        Vec c(d.dim());
        for (int i = 0; i < c.dim; ++i) c[i] = rng.uniform(-half_side, half_side);
        c = dyadic_round(c, 24);
        for (int i = 0; i < c.dim; ++i) c[i] = std::clamp(c[i], -cap, cap);
        entries.push_back({d, c});
    }
    return CenterField(std::move(entries), half_side);
}

std::vector<Direction> random_directions(int d, int n, std::uint64_t seed) {
    check_dimension(d);
    Rng rng(seed, 2);
    std::vector<Direction> out;
    while (static_cast<int>(out.size()) < n) {
        Vec v(d);
        for (int i = 0; i < d; ++i) v[i] = rng.normal();
        if (norm(v) < 1e-6) continue;
        auto dir = canonicalize_direction(v);
        if (std::find(out.begin(), out.end(), dir) == out.end()) out.push_back(dir);
    }
    return out;
}

double field_distance(const CenterField& f, const CenterField& g) {
    if (f.size() != g.size()) throw InvalidInput("fields sample different directions");
    double m = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!(f.entries()[i].direction == g.entries()[i].direction))
            throw InvalidInput("fields sample different directions");
        m = std::max(m, distance(f.entries()[i].centre, g.entries()[i].centre));
    }
    return m;
}

QuantizedField quantize_field(const CenterField& f0, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInput("quantization epsilon must be positive");
    if (f0.empty()) throw InvalidInput("centre field is empty");
    const int d = f0.dim();
    const double m = f0.bound();
    const double target = epsilon / std::sqrt(static_cast<double>(d));
    const double guess = std::floor(m / target);
    if (!(guess < 1e8)) throw InvalidInput("quantization grid too fine");
    int n = std::max(1, static_cast<int>(guess));
    while (!(m / n < target)) ++n;
    while (n > 1 && m / (n - 1) < target) --n;
    const double side = m / n;

    std::map<Cell, std::vector<std::size_t>> by_cube;
    std::vector<CenterField::Entry> snapped = f0.entries();
    for (std::size_t j = 0; j < snapped.size(); ++j) {
        Cell k{};
        for (int i = 0; i < d; ++i) {
            const double t = std::floor((snapped[j].centre[i] + m) / side);
            k[i] = static_cast<std::int32_t>(std::clamp(t, 0.0, 2.0 * n - 1));
        }
        by_cube[k].push_back(j);
    }
    QuantizedField out{CenterField({}, m), {}, side, n};
    for (auto& [cube, members] : by_cube) {
        Vec a(d);
        for (int i = 0; i < d; ++i) a[i] = -m + (cube[i] + 0.5) * side;
        for (auto j : members) snapped[j].centre = a;
        out.groups.push_back({cube, a, members});
    }
    // Sorting in the constructor is a no-op: f0's entries are already sorted.
    out.field = CenterField(std::move(snapped), m);
    return out;
}

std::vector<Segment> shifted_union(const QuantizedField& q) {
    std::vector<Segment> out;
    const auto& entries = q.field.entries();
    for (const auto& g : q.groups)
        for (auto j : g.members) out.push_back(translate(Segment(entries[j].centre, entries[j].direction), g.centre));
    return out;
}

BallCoverCheck shifted_union_is_ball(const QuantizedField& q, const MeshSpec& mesh) {
    const auto segs = shifted_union(q);
    const auto moved = rasterize(std::span<const Segment>(segs), mesh);
    const auto ball = rasterize(Ball{Vec::zeros(mesh.dim()), 0.5, true}, mesh);
    BallCoverCheck out;
    out.union_cells = moved.size();
    out.ball_cells = ball.size();
    out.symmetric_difference = moved.symmetric_difference_size(ball);
    out.equal = out.symmetric_difference == 0;
    return out;
}

MeasureWitness measure_witness(const QuantizedField& q, const MeshSpec& mesh) {
    if (q.groups.empty()) throw InvalidInput("quantized field has no groups");
    const auto ball = rasterize(Ball{Vec::zeros(mesh.dim()), 0.5, true}, mesh);
    const auto& entries = q.field.entries();
    MeasureWitness out;
    std::size_t best = 0;
    for (std::size_t g = 0; g < q.groups.size(); ++g) {
        std::vector<Segment> segs;
        for (auto j : q.groups[g].members)
            segs.push_back(translate(Segment(entries[j].centre, entries[j].direction), q.groups[g].centre));
        const auto occ = rasterize(std::span<const Segment>(segs), mesh);
        if (g == 0 || occ.size() > best) {
            best = occ.size();
            out.index = g;
            out.group_measure = pixel_measure(occ);
        }
    }
    const auto groups = q.groups.size();
    out.ball_measure = pixel_measure(ball);
    out.lower_bound = out.ball_measure / static_cast<double>(groups);
    out.holds = best * groups >= ball.size();
    return out;
}

int calibrate_fan_density(double delta, int start, int limit) {
    const auto mesh = MeshSpec::anchored(2, delta);
    const auto ball = rasterize(Ball{Vec::zeros(2), 0.5, true}, mesh);
    for (int n = std::max(1, start); n <= limit; n *= 2) {
        const auto dirs = fan_directions(n);
        std::vector<Segment> segs;
        for (const auto& d : dirs) segs.emplace_back(Vec::zeros(2), d);
        if (rasterize(std::span<const Segment>(segs), mesh) == ball) return n;
    }
    return 0;
}

std::vector<Vec> sphere_net(int d, std::size_t size) {
    if (d < kMinDim || d > kMaxDim) throw InvalidInput("sphere net supports 2 <= d <= 4");
    if (size == 0) throw InvalidInput("sphere net size must be positive");
    std::vector<Vec> out;
    out.reserve(size);
    if (d == 2) {
        for (std::size_t j = 0; j < size; ++j) {
            const double a = 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(size);
            out.push_back(Vec{std::cos(a), std::sin(a)});
        }
    } else if (d == 3) {
        const double golden = M_PI * (3.0 - std::sqrt(5.0));
        for (std::size_t j = 0; j < size; ++j) {
            const double z = 1.0 - (2.0 * j + 1.0) / static_cast<double>(size);
            const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden * static_cast<double>(j);
            out.push_back(Vec{r * std::cos(phi), r * std::sin(phi), z});
        }
    } else {
        Rng rng(0x5eedULL, 4);
        while (out.size() < size) {
            Vec v(d);
            for (int i = 0; i < d; ++i) v[i] = rng.normal();
            if (norm(v) > 1e-6) out.push_back(unit_vector(v));
        }
    }
    return out;
}

SphereSample direction_sample(int d, int n, std::size_t net_size) {
    if (n < 1) throw InvalidInput("separation parameter must be at least 1");
    const auto net = sphere_net(d, net_size);
    const double sep = 1.0 / n;
    SphereSample out;
    out.net_size = net.size();
    std::vector<double> gap(net.size(), std::numeric_limits<double>::infinity());
    std::size_t next = 0;
    while (true) {
        const Vec p = net[next];
        out.points.push_back(p);
        for (std::size_t j = 0; j < net.size(); ++j) gap[j] = std::min(gap[j], distance(net[j], p));
        next = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
        if (gap[next] < sep) break;
    }
    out.covering_radius = *std::max_element(gap.begin(), gap.end());
    out.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.points.size(); ++i)
        for (std::size_t j = i + 1; j < out.points.size(); ++j)
            out.min_separation = std::min(out.min_separation, distance(out.points[i], out.points[j]));
    return out;
}

BaseField zero_base_field(std::span<const Vec> directions, double truncation) {
    BaseField out;
    out.truncation = truncation;
    for (const auto& d : directions) out.entries.push_back({unit_vector(d), Vec::zeros(d.dim)});
    return out;
}

BaseField random_base_field(std::span<const Vec> directions, double max_base, std::uint64_t seed, double truncation) {
    BaseField out;
    out.truncation = truncation;
    Rng rng(seed, 3);
    for (const auto& d : directions) {
        Vec g(d.dim);
        for (int i = 0; i < d.dim; ++i) g[i] = rng.normal();
        const double r = max_base * std::pow(rng.uniform(), 1.0 / d.dim);
        out.entries.push_back({unit_vector(d), norm(g) > 0 ? unit_vector(g) * r : Vec::zeros(d.dim)});
    }
    return out;
}

std::vector<Ray> build_half_extended(const BaseField& base) {
    std::vector<Ray> out;
    out.reserve(base.entries.size());
    for (const auto& e : base.entries) out.emplace_back(e.base, e.direction);
    return out;
}

bool clip_ray_to_ball(const Ray& ray, const Vec& centre, double radius, LineSpan& out) {
    const Vec b = ray.base - centre;
    const double bt = dot(b, ray.direction);
    const double disc = bt * bt - (norm_sq(b) - radius * radius);
    if (disc < 0.0) return false;
    const double s = std::sqrt(disc);
    const double far = -bt + s;
    if (far < 0.0) return false;
    const double near = std::max(0.0, -bt - s);
    out = LineSpan{ray.base + ray.direction * near, ray.base + ray.direction * far};
    return true;
}

OccupancySet rasterize_half_extended(const BaseField& base, const MeshSpec& mesh) {
    std::vector<LineSpan> spans;
    for (const auto& r : build_half_extended(base)) {
        LineSpan s;
        if (clip_ray_to_ball(r, Vec::zeros(r.dim()), base.truncation, s)) spans.push_back(s);
    }
    return rasterize(std::span<const LineSpan>(spans), mesh);
}

void write_center_field(std::ostream& os, const CenterField& f) {
    for (const auto& e : f.entries()) {
        for (int i = 0; i < e.direction.dim(); ++i) os << (i ? " " : "") << fmt17(e.direction[i]);
        os << " ;";
        for (int i = 0; i < e.centre.dim; ++i) os << ' ' << fmt17(e.centre[i]);
        os << '\n';
    }
}

CenterField read_center_field(std::istream& is, double bound) {
    std::vector<CenterField::Entry> entries;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        const auto semi = line.find(';');
        if (semi == std::string::npos) throw InvalidInput("malformed field line: " + line);
        auto parse = [&](const std::string& part) {
            std::istringstream in(part);
            std::vector<double> xs;
            double x;
            while (in >> x) xs.push_back(x);
            if (!in.eof()) throw InvalidInput("malformed field line: " + line);
            return Vec::from(xs);
        };
        const Vec dir = parse(line.substr(0, semi));
        const Vec centre = parse(line.substr(semi + 1));
        entries.push_back({Direction::from_canonical(dir), centre});
    }
    if (bound > 0.0) return CenterField(std::move(entries), bound);
    return CenterField::with_auto_bound(std::move(entries));
}

}  // namespace kakeyakit
