#include "kakeyakit/cutmove.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <unordered_set>

namespace kakeyakit {

double midpoint_extent(std::span<const Segment> segments) {
    double m = 0.0;
    for (const auto& s : segments) m = std::max(m, norm_inf(s.centre));
    return m;
}

double dyadic_midpoint_bound(std::span<const Segment> segments) {
    const double ext = midpoint_extent(segments);
    double p = 1.0 / 1024;
    while (!(p > ext)) p *= 2.0;
    return p;
}

Partition partition_by_midpoint(std::span<const Segment> segments, int n, double bound) {
    if (n < 1) throw InvalidInput("partition parameter must be at least 1");
    if (!(bound > 0.0)) throw InvalidInput("partition bound must be positive");
    Partition p;
    p.bound = bound;
    p.n = n;
    p.cube_side = bound / n;
    std::map<Cell, std::vector<std::size_t>> by_cube;
    for (std::size_t j = 0; j < segments.size(); ++j) {
        const Vec& mid = segments[j].centre;
        if (!(norm_inf(mid) < bound))
            throw InvalidInput("segment " + std::to_string(j) + " has its midpoint outside (-M, M)^d");
        Cell k{};
        for (int i = 0; i < mid.dim; ++i) {
            auto idx = static_cast<std::int32_t>(std::clamp(std::floor((mid[i] + bound) / p.cube_side), 0.0, 2.0 * n - 1));
            // Settle rounding at cube faces against the same expression used for the cube bounds.
            if (mid[i] < -bound + idx * p.cube_side && idx > 0) --idx;
            if (mid[i] >= -bound + (idx + 1) * p.cube_side && idx < 2 * n - 1) ++idx;
            k[i] = idx;
        }
        by_cube[k].push_back(j);
    }
    for (auto& [cube, members] : by_cube) {
        Vec a(segments[members.front()].dim());
        for (int i = 0; i < a.dim; ++i) a[i] = -bound + (cube[i] + 0.5) * p.cube_side;
        p.groups.push_back({cube, a, std::move(members)});
    }
    return p;
}

Partition partition_by_midpoint(std::span<const Segment> segments, int n) {
    return partition_by_midpoint(segments, n, dyadic_midpoint_bound(segments));
}

std::vector<Segment> cut_and_move(std::span<const Segment> segments, const Partition& p) {
    std::vector<Segment> out;
    out.reserve(segments.size());
    for (const auto& g : p.groups)
        for (auto j : g.members) out.push_back(translate(segments[j], g.centre));
    return out;
}

int cut_parameter_for_radius(double bound, double epsilon, int d) {
    if (!(epsilon > 0.0)) throw InvalidInput("cut radius must be positive");
    const double target = epsilon / std::sqrt(static_cast<double>(d));
    int n = std::max(1, static_cast<int>(std::floor(bound / target)));
    while (!(bound / n < target)) ++n;
    while (n > 1 && bound / (n - 1) < target) --n;
    return n;
}

std::vector<SandwichRow> count_sandwich_report(std::span<const Segment> segments, const Partition& p,
                                               std::span<const double> deltas) {
    std::vector<SandwichRow> rows;
    if (segments.empty()) return rows;
    const int d = segments.front().dim();
    for (double delta : deltas) {
        const auto mesh = MeshSpec::anchored(d, delta);
        SandwichRow row;
        row.delta = delta;
        row.whole = rasterize(segments, mesh).size();
        for (const auto& g : p.groups) {
            std::vector<Segment> part;
            for (auto j : g.members) part.push_back(segments[j]);
            const auto c = rasterize(std::span<const Segment>(part), mesh).size();
            row.sum_parts += c;
            row.max_part = std::max<std::uint64_t>(row.max_part, c);
        }
        row.groups_times_whole = p.groups.size() * row.whole;
        row.holds = row.max_part <= row.whole && row.whole <= row.sum_parts && row.sum_parts <= row.groups_times_whole;
        rows.push_back(row);
    }
    return rows;
}

NestedUnion nested_union(std::span<const Segment> segments, int levels, double bound) {
    if (levels < 1) throw InvalidInput("nested union needs at least one level");
    NestedUnion out;
    if (segments.empty()) return out;
    const int d = segments.front().dim();
    for (int j = 1; j <= levels; ++j) {
        const double eps = std::ldexp(1.0, -j);
        const auto p = partition_by_midpoint(segments, cut_parameter_for_radius(bound, eps, d), bound);
        for (auto& s : cut_and_move(segments, p)) {
            out.segments.push_back(s);
            out.levels.push_back(j);
        }
    }
    return out;
}

NestedUnion nested_union(std::span<const Segment> segments, int levels) {
    return nested_union(segments, levels, dyadic_midpoint_bound(segments));
}

int lbd_dilation_radius(int d) { return static_cast<int>(std::ceil(2.0 * std::sqrt(static_cast<double>(d)))); }

LbdReport theorem_lbd_experiment(std::span<const Segment> segments, std::span<const double> deltas) {
    if (segments.empty()) throw InvalidInput("lower-bound experiment needs a nonempty segment set");
    LbdReport report;
    const int d = segments.front().dim();
    report.dim = d;
    report.dilation_radius = lbd_dilation_radius(d);
    const int r = report.dilation_radius;
    report.kappa = 1;
    for (int i = 0; i < d; ++i) report.kappa *= static_cast<std::uint64_t>(2 * r + 1);
    report.all_covered = true;

    const double ext = midpoint_extent(segments);
    for (double delta : deltas) {
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("scales must lie in (0, 1)");
        LbdScale row;
        row.delta = delta;
        const auto mesh = MeshSpec::anchored(d, delta);
        row.kakeya_cells = rasterize(segments, mesh).size();

        // Cube side delta on a grid anchored at -M = -n delta, which is the mesh itself.
        const int n = static_cast<int>(std::floor(ext / delta)) + 1;
        const auto part = partition_by_midpoint(segments, n, n * delta);
        row.groups = part.groups.size();
        const auto moved = cut_and_move(segments, part);
        for (const auto& s : moved) row.midpoint_radius = std::max(row.midpoint_radius, norm(s.centre));
        const auto moved_occ = rasterize(std::span<const Segment>(moved), mesh);
        row.moved_cells = moved_occ.size();

        std::unordered_set<Cell, CellHash> moved_set(moved_occ.cells().begin(), moved_occ.cells().end());
        std::unordered_set<Cell, CellHash> dilated;
        Cell stencil_lo{}, stencil_hi{};
        for (int i = 0; i < d; ++i) {
            stencil_lo[i] = -r;
            stencil_hi[i] = r;
        }
        auto for_stencil = [&](const Cell& base, auto&& f) {
            Cell off = stencil_lo;
            while (true) {
                Cell c = base;
                for (int i = 0; i < d; ++i) c[i] += off[i];
                if (f(c)) return;
                int i = d - 1;
                while (i >= 0) {
                    if (off[i] < stencil_hi[i]) {
                        ++off[i];
                        break;
                    }
                    off[i] = stencil_lo[i];
                    --i;
                }
                if (i < 0) return;
            }
        };
        for (const auto& c : moved_occ.cells())
            for_stencil(c, [&](const Cell& x) {
                dilated.insert(x);
                return false;
            });
        row.dilated_cells = dilated.size();

        const auto ball = rasterize(Ball{Vec::zeros(d), 0.5, true}, mesh);
        row.ball_cells = ball.size();
        for (const auto& c : ball.cells())
            if (!dilated.count(c)) row.uncovered.push_back(c);
        row.covered = row.uncovered.empty();
        report.all_covered = report.all_covered && row.covered;

        const double c = static_cast<double>(row.kakeya_cells);
        const double log_inv = std::log(1.0 / delta);
        row.inequality_holds = static_cast<double>(row.ball_cells) <= static_cast<double>(report.kappa) * c * c;
        row.exponent = std::log(c) / log_inv;
        row.implied_exponent =
            (std::log(static_cast<double>(row.ball_cells)) - std::log(static_cast<double>(report.kappa))) /
            (2.0 * log_inv);
        report.scales.push_back(std::move(row));
    }
    return report;
}

Rational Rational::from_dyadic(double x) {
    if (!std::isfinite(x)) throw InvalidInput("not a finite number");
    std::int64_t den = 1;
    double num = x;
    while (num != std::floor(num)) {
        if (den > (std::int64_t{1} << 52)) throw InvalidInput("not a dyadic rational");
        num *= 2.0;
        den *= 2;
    }
    if (std::abs(num) > 9.0e15) throw InvalidInput("rational numerator out of range");
    return Rational{static_cast<std::int64_t>(num), den};
}

std::vector<FigurePanel> figure_panels(const CenterField& field, std::span<const int> levels) {
    const auto segments = build_kakeya(field);
    const double bound = field.bound();
    std::vector<FigurePanel> panels;
    for (int level : levels) {
        if (level < 0 || level > 30) throw InvalidInput("figure level out of range");
        FigurePanel panel;
        panel.level = level;
        double side = 2.0 * bound;
        if (level == 0) {
            panel.segments = segments;
            panel.groups = 1;
        } else {
            const auto part = partition_by_midpoint(segments, 1 << (level - 1), bound);
            side = part.cube_side;
            panel.segments = cut_and_move(segments, part);
            panel.groups = part.groups.size();
        }
        panel.square_side = Rational::from_dyadic(side);
        panel.contained = true;
        for (const auto& s : panel.segments) {
            panel.midpoints.push_back(s.centre);
            for (int i = 0; i < s.dim(); ++i)
                if (!(s.centre[i] >= -side / 2 && s.centre[i] < side / 2)) panel.contained = false;
        }
        panels.push_back(std::move(panel));
    }
    return panels;
}

}  // namespace kakeyakit
