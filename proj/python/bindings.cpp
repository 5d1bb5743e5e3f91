#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/cutmove.hpp"
#include "kakeyakit/errors.hpp"
#include "kakeyakit/kakeya.hpp"
#include "kakeyakit/lattice.hpp"
#include "kakeyakit/runner.hpp"
#include "kakeyakit/tangent.hpp"

namespace py = pybind11;
using namespace kakeyakit;

namespace {

using Point = std::vector<double>;
using Index = std::vector<std::int32_t>;

Vec to_vec(const Point& p) {
    return Vec::from(p);
}

Point to_point(const Vec& v) { return Point(v.c.begin(), v.c.begin() + v.dim); }

std::vector<Vec> to_vecs(const std::vector<Point>& ps) {
    std::vector<Vec> out;
    out.reserve(ps.size());
    for (const auto& p : ps) out.push_back(to_vec(p));
    return out;
}

std::vector<Index> to_indices(const OccupancySet& occ) {
    std::vector<Index> out;
    for (const auto& c : occ.cells()) out.emplace_back(c.begin(), c.begin() + occ.dim());
    return out;
}

LatticeSet to_lattice(const std::vector<Index>& cells, int n, int d) {
    std::vector<Cell> out;
    for (const auto& c : cells) {
        if (static_cast<int>(c.size()) != d) throw InvalidInput("lattice point has the wrong dimension");
        Cell k{};
        for (int i = 0; i < d; ++i) k[i] = c[static_cast<std::size_t>(i)];
        out.push_back(k);
    }
    return LatticeSet(n, d, std::move(out));
}

// Segments given as (centre, direction, length) triples.
std::vector<Segment> to_segments(const std::vector<std::tuple<Point, Point, double>>& segs) {
    std::vector<Segment> out;
    for (const auto& [c, v, len] : segs) out.emplace_back(to_vec(c), canonicalize_direction(to_vec(v)), len);
    return out;
}

py::list segment_endpoints(const std::vector<Segment>& segs) {
    py::list out;
    for (const auto& s : segs) out.append(py::make_tuple(to_point(s.endpoint_lo()), to_point(s.endpoint_hi())));
    return out;
}

}  // namespace

PYBIND11_MODULE(_kakeyakit, m) {
    m.doc() = "Discrete Kakeya sets: rasterization, cut-and-move, difference sets and zoom-outs.";
    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);

    m.def("canonicalize_direction", [](const Point& v) { return to_point(canonicalize_direction(to_vec(v)).vec()); },
          py::arg("v"), "Unit vector with the sign fixed so v and -v agree.");

    m.def("fan64_endpoints", [] { return segment_endpoints(build_kakeya(fan64())); },
          "Endpoints of the built-in 64-segment fan.");

    m.def(
        "rasterize_segments",
        [](const std::vector<std::tuple<Point, Point, double>>& segs, double delta) {
            const auto s = to_segments(segs);
            if (s.empty()) throw InvalidInput("no segments");
            return to_indices(rasterize(std::span<const Segment>(s), MeshSpec::anchored(s.front().centre.dim, delta)));
        },
        py::arg("segments"), py::arg("delta"), "Cells met by (centre, direction, length) segments.");

    m.def(
        "ball_cells",
        [](int d, double radius, double delta, bool closed) {
            return to_indices(rasterize(Ball{Vec::zeros(d), radius, closed}, MeshSpec::anchored(d, delta)));
        },
        py::arg("d"), py::arg("radius"), py::arg("delta"), py::arg("closed") = true);

    m.def(
        "box_dimensions",
        [](const std::vector<std::pair<double, double>>& counts) {
            std::vector<ScaleCount> sc;
            for (const auto& [delta, c] : counts) sc.push_back({delta, c});
            const auto e = estimate_box_dimensions(sc);
            py::dict out;
            out["lower"] = e.lower;
            out["upper"] = e.upper;
            out["least_squares"] = e.least_squares;
            out["slopes"] = e.slopes;
            return out;
        },
        py::arg("counts"), "Lower and upper estimates from (delta, count) pairs.");

    m.def(
        "hausdorff",
        [](const std::vector<Point>& a, const std::vector<Point>& b) {
            const auto va = to_vecs(a), vb = to_vecs(b);
            return hausdorff_distance(va, vb);
        },
        py::arg("a"), py::arg("b"));

    m.def(
        "packing_count",
        [](const std::vector<Point>& pts, double epsilon) {
            const auto v = to_vecs(pts);
            const auto r = disjoint_packing_count(v, epsilon);
            return py::make_tuple(r.count, r.min_gap);
        },
        py::arg("points"), py::arg("epsilon"), "Greedy packing count and its minimum gap.");

    m.def(
        "figure_sides",
        [](const std::vector<int>& levels) {
            std::vector<std::pair<std::int64_t, std::int64_t>> out;
            for (const auto& p : figure_panels(fan64(), levels)) out.emplace_back(p.square_side.num, p.square_side.den);
            return out;
        },
        py::arg("levels") = std::vector<int>{0, 1, 2, 4}, "Midpoint square sides of the fan panels as fractions.");

    m.def(
        "lbd_experiment",
        [](int directions, const std::vector<double>& deltas, std::uint64_t seed) {
            const auto segs = build_kakeya(random_field(fan_directions(directions), 2.0, seed));
            const auto r = theorem_lbd_experiment(segs, deltas);
            py::list rows;
            for (const auto& s : r.scales) {
                py::dict row;
                row["delta"] = s.delta;
                row["kakeya_cells"] = s.kakeya_cells;
                row["ball_cells"] = s.ball_cells;
                row["uncovered"] = s.uncovered.size();
                row["covered"] = s.covered;
                row["exponent"] = s.exponent;
                row["implied_exponent"] = s.implied_exponent;
                rows.append(row);
            }
            return rows;
        },
        py::arg("directions"), py::arg("deltas"), py::arg("seed"));

    m.def(
        "quantize_distance",
        [](int directions, double epsilon, std::uint64_t seed) {
            const auto f0 = random_field(fan_directions(directions), 2.0, seed);
            return field_distance(quantize_field(f0, epsilon).field, f0);
        },
        py::arg("directions"), py::arg("epsilon"), py::arg("seed"));

    m.def(
        "difference_count",
        [](const std::vector<Index>& cells, int n, int d) { return difference_count(to_lattice(cells, n, d)); },
        py::arg("cells"), py::arg("n"), py::arg("d"));
    m.def("trivial_bound", &trivial_bound, py::arg("size"), py::arg("n"), py::arg("d"));
    m.def(
        "translated_union_count",
        [](const std::vector<Index>& c, const std::vector<Index>& c0, int n, int d) {
            return translated_union_count(to_lattice(c, n, d), to_lattice(c0, n, d));
        },
        py::arg("c"), py::arg("c0"), py::arg("n"), py::arg("d"));
    m.def(
        "salem_probe",
        [](int n, int d, std::size_t size, std::size_t trials, std::uint64_t seed) {
            const auto r = salem_probe(n, d, size, trials, seed);
            py::dict out;
            out["best_ratio"] = r.best_ratio;
            out["best_difference"] = r.best_difference;
            out["bound"] = r.bound;
            out["family"] = r.best_family;
            out["trial"] = r.best_trial;
            return out;
        },
        py::arg("n"), py::arg("d"), py::arg("size"), py::arg("trials"), py::arg("seed"));

    m.def(
        "zoom_profile",
        [](int d, int n, double base_bound, const std::vector<int>& ks, double delta, std::uint64_t seed) {
            const auto sample = direction_sample(d, n);
            const auto rays = build_half_extended(random_base_field(sample.points, base_bound, seed));
            const auto p = convergence_profile(rays, ks, MeshSpec::anchored(d, delta), sample.covering_radius, base_bound);
            py::list rows;
            for (const auto& r : p.rows) rows.append(py::make_tuple(r.k, r.distance, r.bound));
            return py::make_tuple(sample.covering_radius, rows);
        },
        py::arg("d"), py::arg("n"), py::arg("base_bound"), py::arg("ks"), py::arg("delta"), py::arg("seed"),
        "Sample gap and (k, distance, bound) rows.");

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "kakeyakit");
            std::vector<char*> argv;
            for (auto& a : args) argv.push_back(a.data());
            return cli::run(static_cast<int>(argv.size()), argv.data());
        },
        py::arg("args"), "Runs the command-line tool in process and returns its exit code.");
}
