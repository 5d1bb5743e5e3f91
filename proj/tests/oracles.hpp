#pragma once

// Brute-force reference implementations for the tests. They share no code
// with the library beyond the value types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <span>
#include <vector>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/geometry.hpp"

namespace oracle {

using kakeyakit::Cell;
using kakeyakit::Vec;

/// Does {p + t v : t in [t0, t1]} meet the half-open box prod [lo_i, lo_i + w)?
/// Per axis the parameter set is a half-open interval; their intersection is
/// tracked in long double with explicit open/closed flags.
inline bool span_meets_box(const Vec& p, const Vec& v, double t0, double t1, const Vec& lo, double w) {
    long double a = t0, b = t1;
    bool a_open = false, b_open = false;
    for (int i = 0; i < p.dim; ++i) {
        const long double l = lo[i], h = static_cast<long double>(lo[i]) + w;
        if (v[i] == 0.0) {
            if (!(p[i] >= l && p[i] < h)) return false;
            continue;
        }
        long double s = (l - p[i]) / v[i], e = (h - p[i]) / v[i];
        bool s_open = false, e_open = true;
        if (v[i] < 0) {
            std::swap(s, e);
            s_open = true;
            e_open = false;
        }
        if (s > a || (s == a && s_open)) {
            a = s;
            a_open = s_open;
        }
        if (e < b || (e == b && e_open)) {
            b = e;
            b_open = e_open;
        }
    }
    if (a > b || (a == b && (a_open || b_open))) return false;
    return true;
}

/// Every cell of the mesh met by the closed segment [a, b], by scanning the
/// bounding box of cells.
inline std::set<Cell> segment_cells(const Vec& a, const Vec& b, double delta) {
    const int d = a.dim;
    Cell lo{}, hi{};
    for (int i = 0; i < d; ++i) {
        lo[i] = static_cast<std::int32_t>(std::floor(std::min(a[i], b[i]) / delta)) - 1;
        hi[i] = static_cast<std::int32_t>(std::floor(std::max(a[i], b[i]) / delta)) + 1;
    }
    const Vec v = b - a;
    std::set<Cell> out;
    Cell k = lo;
    while (true) {
        Vec corner(d);
        for (int i = 0; i < d; ++i) corner[i] = k[i] * delta;
        if (span_meets_box(a, v, 0.0, 1.0, corner, delta)) out.insert(k);
        int i = d - 1;
        while (i >= 0 && k[i] == hi[i]) k[i] = lo[i], --i;
        if (i < 0) break;
        ++k[i];
    }
    return out;
}

/// Cells of the mesh anchored at 0 with side 2^-j met by the closed ball of
/// radius r about 0, in exact integer arithmetic: r / delta must be a multiple of 1/2.
inline std::set<Cell> ball_cells(int d, int j, double r, bool closed) {
    const std::int64_t twice_r = std::llround(2.0 * std::ldexp(r, j));
    const std::int64_t rr = twice_r * twice_r;  // (2R)^2 in mesh units
    const std::int32_t m = static_cast<std::int32_t>(twice_r / 2 + 2);
    std::set<Cell> out;
    Cell k{};
    for (int i = 0; i < d; ++i) k[i] = -m;
    while (true) {
        // Nearest point of [k, k+1] to 0, doubled: 2k, 2k+2 or 0.
        std::int64_t s = 0;
        bool inside_half_open = true;
        for (int i = 0; i < d; ++i) {
            std::int64_t q = 0;
            if (k[i] > 0) q = 2 * k[i];
            else if (k[i] + 1 <= 0) {
                q = 2 * (k[i] + 1);
                inside_half_open = false;  // the nearest point sits on the excluded upper face
            }
            s += q * q;
        }
        if (s < rr || (closed && s == rr && inside_half_open)) out.insert(k);
        int i = d - 1;
        while (i >= 0 && k[i] == m) k[i] = -m, --i;
        if (i < 0) break;
        ++k[i];
    }
    return out;
}

inline double one_sided(std::span<const Vec> a, std::span<const Vec> b) {
    double worst = 0.0;
    for (const auto& p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b) best = std::min(best, kakeyakit::distance(p, q));
        worst = std::max(worst, best);
    }
    return worst;
}

inline double hausdorff(std::span<const Vec> a, std::span<const Vec> b) {
    return std::max(one_sided(a, b), one_sided(b, a));
}

/// Greedy packing replayed with a plain double loop.
inline std::size_t greedy_packing(std::vector<Vec> pts, double eps) {
    std::stable_sort(pts.begin(), pts.end());
    std::vector<Vec> kept;
    for (const auto& p : pts) {
        bool ok = true;
        for (const auto& q : kept) ok = ok && kakeyakit::distance(p, q) > 2 * eps;
        if (ok) kept.push_back(p);
    }
    return kept.size();
}

/// Largest subset with pairwise distances > 2 eps, by exhaustive search.
inline std::size_t max_packing(std::span<const Vec> pts, double eps) {
    const std::size_t n = pts.size();
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
        if (size <= best) continue;
        bool ok = true;
        for (std::size_t i = 0; i < n && ok; ++i)
            for (std::size_t j = i + 1; j < n && ok; ++j)
                if ((mask >> i & 1) && (mask >> j & 1)) ok = kakeyakit::distance(pts[i], pts[j]) > 2 * eps;
        if (ok) best = size;
    }
    return best;
}

/// |{y - x : y in ys, x in xs}| via an ordered set.
inline std::size_t difference_pairs(std::span<const Cell> ys, std::span<const Cell> xs, int d) {
    std::set<Cell> out;
    for (const auto& y : ys)
        for (const auto& x : xs) {
            Cell v{};
            for (int i = 0; i < d; ++i) v[i] = y[i] - x[i];
            out.insert(v);
        }
    return out.size();
}

}  // namespace oracle
