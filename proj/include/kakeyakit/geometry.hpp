#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "kakeyakit/errors.hpp"

namespace kakeyakit {

inline constexpr int kMaxDim = 4;
inline constexpr int kMinDim = 2;

/// Absolute tolerance used by geometric comparisons unless a caller overrides it.
inline constexpr double kDefaultTolerance = 1e-9;

/// A point or displacement in R^d with 1 <= d <= kMaxDim, stored inline.
struct Vec {
    std::array<double, kMaxDim> c{};
    int dim = 0;

    Vec() = default;
    explicit Vec(int d) : dim(d) {
        if (d < 1 || d > kMaxDim) throw InvalidInput("dimension out of range");
    }
    Vec(std::initializer_list<double> values) : dim(static_cast<int>(values.size())) {
        if (dim < 1 || dim > kMaxDim) throw InvalidInput("dimension out of range");
        int i = 0;
        for (double v : values) c[i++] = v;
    }
    static Vec zeros(int d) { return Vec(d); }
    static Vec from(std::span<const double> values) {
        Vec v(static_cast<int>(values.size()));
        for (int i = 0; i < v.dim; ++i) v.c[i] = values[i];
        return v;
    }

    double& operator[](int i) { return c[i]; }
    double operator[](int i) const { return c[i]; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < dim; ++i) c[i] += o.c[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (int i = 0; i < dim; ++i) c[i] -= o.c[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < dim; ++i) c[i] *= s;
        return *this;
    }
    Vec& operator/=(double s) {
        for (int i = 0; i < dim; ++i) c[i] /= s;
        return *this;
    }

    friend Vec operator+(Vec a, const Vec& b) { return a += b; }
    friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
    friend Vec operator*(Vec a, double s) { return a *= s; }
    friend Vec operator*(double s, Vec a) { return a *= s; }
    friend Vec operator/(Vec a, double s) { return a /= s; }
    friend Vec operator-(Vec a) {
        for (int i = 0; i < a.dim; ++i) a.c[i] = -a.c[i];
        return a;
    }
    friend bool operator==(const Vec& a, const Vec& b) {
        if (a.dim != b.dim) return false;
        for (int i = 0; i < a.dim; ++i)
            if (a.c[i] != b.c[i]) return false;
        return true;
    }
    /// Lexicographic order over the coordinates.
    friend bool operator<(const Vec& a, const Vec& b) {
        for (int i = 0; i < a.dim && i < b.dim; ++i) {
            if (a.c[i] < b.c[i]) return true;
            if (b.c[i] < a.c[i]) return false;
        }
        return a.dim < b.dim;
    }
};

double dot(const Vec& a, const Vec& b);
double norm(const Vec& v);
double norm_sq(const Vec& v);
double norm_inf(const Vec& v);
double distance(const Vec& a, const Vec& b);
double distance_sq(const Vec& a, const Vec& b);

/// A point of the projective sphere: a unit vector whose first nonzero
/// coordinate is strictly positive.
class Direction {
public:
    /// Adopts already-canonical coordinates bit for bit (used when reading
    /// serialized fields). Throws if v is not a canonical unit vector.
    static Direction from_canonical(const Vec& v);

    const Vec& vec() const { return v_; }
    int dim() const { return v_.dim; }
    double operator[](int i) const { return v_[i]; }

    friend bool operator==(const Direction& a, const Direction& b) { return a.v_ == b.v_; }
    friend bool operator<(const Direction& a, const Direction& b) { return a.v_ < b.v_; }

private:
    friend Direction canonicalize_direction(const Vec& v);
    explicit Direction(const Vec& v) : v_(v) {}
    Vec v_;
};

/// Normalizes v and flips its sign so that the first nonzero coordinate is positive.
Direction canonicalize_direction(const Vec& v);

/// Normalizes v without antipodal identification (a genuine sphere point).
Vec unit_vector(const Vec& v);

/// Closed segment {centre + t * direction : |t| <= length / 2}.
struct Segment {
    Vec centre;
    Direction direction;
    double length = 1.0;

    Segment(Vec centre_, Direction direction_, double length_ = 1.0);

    int dim() const { return centre.dim; }
    Vec endpoint_lo() const { return centre - direction.vec() * (length / 2); }
    Vec endpoint_hi() const { return centre + direction.vec() * (length / 2); }
};

/// Half-infinite line {base + lambda * direction : lambda >= 0}; direction is a
/// unit vector on the full sphere.
struct Ray {
    Vec base;
    Vec direction;

    Ray(Vec base_, const Vec& direction_);
    int dim() const { return base.dim; }
};

/// x -> rate * x + offset.
struct SimilarityMap {
    double rate = 1.0;
    Vec offset;

    SimilarityMap(double rate_, Vec offset_);
    Vec operator()(const Vec& x) const { return x * rate + offset; }
    SimilarityMap inverse() const;
};

// Translation follows the convention T_a(x) = x - a.
Vec translate(const Vec& x, const Vec& a);
Segment translate(const Segment& s, const Vec& a);
Ray translate(const Ray& r, const Vec& a);
std::vector<Vec> translate(std::span<const Vec> xs, const Vec& a);
std::vector<Segment> translate(std::span<const Segment> xs, const Vec& a);
std::vector<Ray> translate(std::span<const Ray> xs, const Vec& a);

Vec apply_similarity(const SimilarityMap& s, const Vec& x);
Segment apply_similarity(const SimilarityMap& s, const Segment& seg);
Ray apply_similarity(const SimilarityMap& s, const Ray& r);
std::vector<Vec> apply_similarity(const SimilarityMap& s, std::span<const Vec> xs);
std::vector<Segment> apply_similarity(const SimilarityMap& s, std::span<const Segment> xs);
std::vector<Ray> apply_similarity(const SimilarityMap& s, std::span<const Ray> xs);

/// Rounds every coordinate to the nearest multiple of 2^-bits. Keeps later
/// translation arithmetic exact for dyadic offsets.
Vec dyadic_round(const Vec& v, int bits);

void check_dimension(int d);

}  // namespace kakeyakit
