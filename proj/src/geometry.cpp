#include "kakeyakit/geometry.hpp"

#include <algorithm>
#include <limits>

namespace kakeyakit {

double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) s += a[i] * b[i];
    return s;
}

double norm_sq(const Vec& v) { return dot(v, v); }

double norm(const Vec& v) { return std::sqrt(norm_sq(v)); }

double norm_inf(const Vec& v) {
    double m = 0.0;
    for (int i = 0; i < v.dim; ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

double distance_sq(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (int i = 0; i < a.dim; ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

double distance(const Vec& a, const Vec& b) { return std::sqrt(distance_sq(a, b)); }

void check_dimension(int d) {
    if (d < 1 || d > kMaxDim) throw InvalidInput("dimension must be between 1 and 4");
}

Vec unit_vector(const Vec& v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw InvalidInput("direction must be a finite nonzero vector");
    return v / n;
}

Direction canonicalize_direction(const Vec& v) {
    // Vectors already of unit length keep their bits, so canonicalization is idempotent.
    const double n = norm(v);
    Vec u = std::abs(n - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? v : unit_vector(v);
    for (int i = 0; i < u.dim; ++i) {
        if (u[i] > 0.0) break;
        if (u[i] < 0.0) {
            u = -u;
            break;
        }
    }
    // -0.0 would otherwise survive and break exact comparisons.
    for (int i = 0; i < u.dim; ++i)
        if (u[i] == 0.0) u[i] = 0.0;
    return Direction(u);
}

Direction Direction::from_canonical(const Vec& v) {
    check_dimension(v.dim);
    if (std::abs(norm(v) - 1.0) > 1e-12) throw InvalidInput("direction is not a unit vector");
    for (int i = 0; i < v.dim; ++i) {
        if (v[i] > 0.0) break;
        if (v[i] < 0.0 || std::signbit(v[i])) throw InvalidInput("direction is not in canonical form");
    }
    return Direction(v);
}

Segment::Segment(Vec centre_, Direction direction_, double length_)
    : centre(centre_), direction(direction_), length(length_) {
    if (centre.dim != direction.dim()) throw InvalidInput("segment centre and direction dimensions differ");
    if (!(length > 0.0) || !std::isfinite(length)) throw InvalidInput("segment length must be positive");
    for (int i = 0; i < centre.dim; ++i)
        if (!std::isfinite(centre[i])) throw InvalidInput("segment centre must be finite");
}

Ray::Ray(Vec base_, const Vec& direction_) : base(base_), direction(unit_vector(direction_)) {
    if (base.dim != direction.dim) throw InvalidInput("ray base and direction dimensions differ");
    for (int i = 0; i < base.dim; ++i)
        if (!std::isfinite(base[i])) throw InvalidInput("ray base must be finite");
}

SimilarityMap::SimilarityMap(double rate_, Vec offset_) : rate(rate_), offset(offset_) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidInput("similarity rate must be positive");
}

SimilarityMap SimilarityMap::inverse() const { return SimilarityMap(1.0 / rate, -(offset / rate)); }

Vec translate(const Vec& x, const Vec& a) { return x - a; }

Segment translate(const Segment& s, const Vec& a) { return Segment(s.centre - a, s.direction, s.length); }

Ray translate(const Ray& r, const Vec& a) {
    Ray out = r;
    out.base = r.base - a;
    return out;
}

namespace {

template <class T, class F>
std::vector<T> map_all(std::span<const T> xs, F&& f) {
    std::vector<T> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(f(x));
    return out;
}

}  // namespace

std::vector<Vec> translate(std::span<const Vec> xs, const Vec& a) {
    return map_all(xs, [&](const Vec& x) { return translate(x, a); });
}
std::vector<Segment> translate(std::span<const Segment> xs, const Vec& a) {
    return map_all(xs, [&](const Segment& x) { return translate(x, a); });
}
std::vector<Ray> translate(std::span<const Ray> xs, const Vec& a) {
    return map_all(xs, [&](const Ray& x) { return translate(x, a); });
}

Vec apply_similarity(const SimilarityMap& s, const Vec& x) { return s(x); }

Segment apply_similarity(const SimilarityMap& s, const Segment& seg) {
    return Segment(s(seg.centre), seg.direction, seg.length * s.rate);
}

Ray apply_similarity(const SimilarityMap& s, const Ray& r) {
    Ray out = r;
    out.base = s(r.base);
    return out;
}

std::vector<Vec> apply_similarity(const SimilarityMap& s, std::span<const Vec> xs) {
    return map_all(xs, [&](const Vec& x) { return apply_similarity(s, x); });
}
std::vector<Segment> apply_similarity(const SimilarityMap& s, std::span<const Segment> xs) {
    return map_all(xs, [&](const Segment& x) { return apply_similarity(s, x); });
}
std::vector<Ray> apply_similarity(const SimilarityMap& s, std::span<const Ray> xs) {
    return map_all(xs, [&](const Ray& x) { return apply_similarity(s, x); });
}

Vec dyadic_round(const Vec& v, int bits) {
    Vec out = v;
    for (int i = 0; i < v.dim; ++i) out[i] = std::ldexp(std::nearbyint(std::ldexp(v[i], bits)), -bits);
    return out;
}

}  // namespace kakeyakit
