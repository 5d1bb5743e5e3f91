#include "kakeyakit/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/cutmove.hpp"
#include "kakeyakit/errors.hpp"
#include "kakeyakit/io.hpp"
#include "kakeyakit/kakeya.hpp"
#include "kakeyakit/lattice.hpp"
#include "kakeyakit/rng.hpp"
#include "kakeyakit/tangent.hpp"

namespace kakeyakit::cli {

namespace {

// Stream ids handed to derive_seed; one per experiment so runs stay independent.
enum Stream : std::uint64_t {
    kLbdField = 1,
    kDenseField = 2,
    kDenseTrials = 3,
    kDiffsetRandom = 4,
    kTangentBases = 5,
    kTangentSamples = 6,
    kSalem = 7,
    kSuiteUnion = 10,
    kSuiteTranslate = 11,
    kSuiteSandwich = 12,
    kSuiteLipschitz = 13,
    kSuitePacking = 14,
    kSuiteLattice = 15,
    kSuiteZoom = 16,
    kSuiteCutMove = 17,
};

std::string num(double x) { return format_number(x); }
std::string num(std::uint64_t x) { return std::to_string(x); }
std::string num(int x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "true" : "false"; }

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const auto slash = s.find('/');
        if (slash != std::string::npos) {
            const double a = std::stod(s.substr(0, slash), &pos);
            if (pos != slash) throw std::invalid_argument(s);
            const std::string rest = s.substr(slash + 1);
            const double b = std::stod(rest, &pos);
            if (pos != rest.size() || b == 0.0) throw std::invalid_argument(s);
            return a / b;
        }
        const auto caret = s.find('^');
        if (caret != std::string::npos) {
            const double a = std::stod(s.substr(0, caret), &pos);
            if (pos != caret) throw std::invalid_argument(s);
            const std::string rest = s.substr(caret + 1);
            const int e = std::stoi(rest, &pos);
            if (pos != rest.size()) throw std::invalid_argument(s);
            return std::pow(a, e);
        }
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("bad number for " + key + ": '" + s + "'");
    }
}

long long parse_int(const std::string& key, const std::string& s) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw UsageError("bad integer for " + key + ": '" + s + "'");
    }
}

bool is_dyadic_scale(double x) {
    if (!(x > 0.0 && x <= 1.0)) return false;
    int e = 0;
    return std::frexp(x, &e) == 0.5;
}

std::vector<double> dyadic_range(int from, int to) {
    std::vector<double> out;
    for (int j = from; j <= to; ++j) out.push_back(std::ldexp(1.0, -j));
    return out;
}

void expect(RunResult& r, bool ok, const std::string& check, const std::string& detail) {
    if (!ok) r.failures.push_back({check, detail});
}

void merge(RunResult& into, RunResult from, const std::string& prefix) {
    for (auto& [name, body] : from.artifacts) into.artifacts[name] = std::move(body);
    for (auto& f : from.failures) into.failures.push_back({prefix + "." + f.check, f.detail});
    for (auto& l : from.log) into.log.push_back(std::move(l));
}

std::vector<Segment> random_segments(Rng& rng, int d, std::size_t count, double half_side) {
    std::vector<Segment> out;
    for (std::size_t i = 0; i < count; ++i) {
        Vec c(d), v(d);
        for (int k = 0; k < d; ++k) {
            c[k] = std::ldexp(std::floor(rng.uniform(-half_side, half_side) * 0x1.0p24), -24);
            v[k] = rng.normal();
        }
        if (norm(v) == 0.0) v[0] = 1.0;
        out.emplace_back(c, canonicalize_direction(v));
    }
    return out;
}

std::vector<Cell> random_lattice_cells(Rng& rng, int n, int d, std::size_t count) {
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < count; ++i) {
        Cell c{};
        for (int k = 0; k < d; ++k) c[k] = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(n)));
        cells.push_back(c);
    }
    return cells;
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{"d",      "deltas",    "density", "seed",       "out",
                                               "levels", "lattice_n", "zoom_k",  "generator",  "epsilons",
                                               "base_bound", "trials", "samples", "field"};
    return keys;
}

void apply_config_entry(ExperimentConfig& cfg, const std::string& key, const std::string& raw) {
    const std::string value = trim(raw);
    auto ints = [&]() {
        std::vector<int> out;
        for (const auto& s : split_list(value)) out.push_back(static_cast<int>(parse_int(key, s)));
        if (out.empty()) throw UsageError("empty list for " + key);
        return out;
    };
    auto doubles = [&]() {
        std::vector<double> out;
        for (const auto& s : split_list(value)) out.push_back(parse_double(key, s));
        if (out.empty()) throw UsageError("empty list for " + key);
        return out;
    };
    if (key == "d") {
        cfg.dim = static_cast<int>(parse_int(key, value));
        if (cfg.dim < kMinDim || cfg.dim > kMaxDim) throw UsageError("d must lie in 2..4");
    } else if (key == "deltas") {
        cfg.deltas = doubles();
        for (double x : cfg.deltas)
            if (!is_dyadic_scale(x)) throw UsageError("scales must be powers of two in (0, 1]: " + num(x));
    } else if (key == "density") {
        const auto v = parse_int(key, value);
        if (v < 0 || v > (1 << 20)) throw UsageError("density out of range");
        cfg.density = static_cast<int>(v);
    } else if (key == "seed") {
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
            throw UsageError("seed must be a non-negative integer");
        try {
            cfg.seed = std::stoull(value);
        } catch (const std::logic_error&) {
            throw UsageError("seed out of range");
        }
    } else if (key == "out") {
        if (value.empty()) throw UsageError("empty output directory");
        cfg.out_dir = value;
    } else if (key == "levels") {
        cfg.levels = ints();
        for (int l : cfg.levels)
            if (l < 0 || l > 12) throw UsageError("levels must lie in 0..12");
    } else if (key == "lattice_n") {
        cfg.lattice_n = ints();
        for (int n : cfg.lattice_n)
            if (n < 2 || n > 256) throw UsageError("lattice sizes must lie in 2..256");
    } else if (key == "zoom_k") {
        cfg.zoom_k = ints();
        for (int k : cfg.zoom_k)
            if (k < 1) throw UsageError("zoom factors must be positive");
    } else if (key == "generator") {
        if (value != "ball" && value != "segment" && value != "fan")
            throw UsageError("generator must be ball, segment or fan");
        cfg.generator = value;
    } else if (key == "epsilons") {
        cfg.epsilons = doubles();
        for (double e : cfg.epsilons)
            if (!(e > 0.0)) throw UsageError("epsilons must be positive");
    } else if (key == "base_bound") {
        cfg.base_bound = parse_double(key, value);
        if (!(cfg.base_bound >= 0.0)) throw UsageError("base_bound must be non-negative");
    } else if (key == "trials") {
        const auto v = parse_int(key, value);
        if (v < 1) throw UsageError("trials must be positive");
        cfg.trials = static_cast<std::size_t>(v);
    } else if (key == "samples") {
        const auto v = parse_int(key, value);
        if (v < 1) throw UsageError("samples must be positive");
        cfg.samples = static_cast<std::size_t>(v);
    } else if (key == "field") {
        cfg.field_path = value;
    } else {
        throw UsageError("unknown config key '" + key + "'");
    }
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

RunResult run_figure1(const ExperimentConfig& cfg) {
    RunResult r;
    CenterField field = fan64();
    const bool builtin = cfg.field_path.empty();
    if (!builtin) {
        std::ifstream in(cfg.field_path);
        if (!in) throw UsageError("cannot open field file " + cfg.field_path);
        field = read_center_field(in);
    }
    const auto panels = figure_panels(field, cfg.levels);
    CsvTable table({"level", "groups", "segments", "side_num", "side_den", "side", "contained"});
    for (const auto& p : panels) {
        table.row({num(p.level), num(static_cast<std::uint64_t>(p.groups)),
                   num(static_cast<std::uint64_t>(p.segments.size())), std::to_string(p.square_side.num),
                   std::to_string(p.square_side.den), num(p.square_side.value()), flag(p.contained)});
        expect(r, p.contained, "contained", "level " + num(p.level) + ": a midpoint lies outside its square");
        if (field.dim() == 2) r.artifacts["figure1_level" + num(p.level) + ".svg"] = figure_panel_svg(p);
    }
    if (builtin && cfg.levels == std::vector<int>{0, 1, 2, 4}) {
        const Rational want[] = {{4, 1}, {2, 1}, {1, 1}, {1, 4}};
        for (std::size_t i = 0; i < panels.size(); ++i)
            expect(r, panels[i].square_side == want[i], "square_sides",
                   "level " + num(panels[i].level) + " has side " + std::to_string(panels[i].square_side.num) +
                       "/" + std::to_string(panels[i].square_side.den));
    }
    r.artifacts["figure1.csv"] = table.str();
    return r;
}

namespace {

std::vector<Direction> kakeya_directions(int d, int n, std::uint64_t seed) {
    return d == 2 ? fan_directions(n) : random_directions(d, n, seed);
}

}  // namespace

RunResult run_lbd(const ExperimentConfig& cfg) {
    RunResult r;
    const int d = cfg.dim;
    const int n = cfg.density > 0 ? cfg.density : 512;
    const auto deltas = cfg.deltas.empty() ? dyadic_range(4, 6) : cfg.deltas;
    for (double x : deltas)
        if (!(x < 1.0)) throw UsageError("lbd scales must be below 1");
    const auto dirs = kakeya_directions(d, n, derive_seed(cfg.seed, kLbdField));
    const auto field = random_field(dirs, 2.0, derive_seed(cfg.seed, kLbdField));
    const auto segs = build_kakeya(field);
    const auto report = theorem_lbd_experiment(segs, deltas);
    CsvTable table({"delta", "kakeya_cells", "groups", "moved_cells", "dilated_cells", "ball_cells", "uncovered",
                    "midpoint_radius", "dilation_radius", "kappa", "exponent", "implied_exponent", "covered",
                    "inequality"});
    for (const auto& s : report.scales) {
        table.row({num(s.delta), num(s.kakeya_cells), num(static_cast<std::uint64_t>(s.groups)), num(s.moved_cells),
                   num(s.dilated_cells), num(s.ball_cells), num(static_cast<std::uint64_t>(s.uncovered.size())),
                   num(s.midpoint_radius), num(report.dilation_radius), num(report.kappa), num(s.exponent),
                   num(s.implied_exponent), flag(s.covered), flag(s.inequality_holds)});
        expect(r, s.covered, "coverage",
               "delta " + num(s.delta) + ": " + num(static_cast<std::uint64_t>(s.uncovered.size())) +
                   " ball cells uncovered");
        expect(r, s.inequality_holds, "count_inequality", "delta " + num(s.delta) + ": ball > kappa M^2");
    }
    r.artifacts["lbd.csv"] = table.str();
    return r;
}

RunResult run_dimension(const ExperimentConfig& cfg) {
    RunResult r;
    const int d = cfg.dim;
    const int finest = d == 2 ? 10 : d == 3 ? 7 : 5;
    const auto deltas = cfg.deltas.empty() ? dyadic_range(3, finest) : cfg.deltas;
    std::vector<ScaleCount> counts;
    CsvTable table({"generator", "d", "delta", "count", "log_inv_delta", "log_count"});
    double expected = -1.0, tol = 0.0;
    for (double delta : deltas) {
        const auto mesh = MeshSpec::anchored(d, delta);
        std::uint64_t count = 0;
        if (cfg.generator == "ball") {
            count = rasterize(Ball{Vec::zeros(d), 0.5, true}, mesh).size();
            expected = d;
            tol = 0.05;
        } else if (cfg.generator == "segment") {
            Vec c = Vec::zeros(d);
            c[0] = 0.5;
            Vec e = Vec::zeros(d);
            e[0] = 1.0;
            const std::vector<Segment> seg{Segment(c, canonicalize_direction(e))};
            count = rasterize(std::span<const Segment>(seg), mesh).size();
            expected = 1.0;
            tol = 0.02;
            const double inv = 1.0 / delta;
            expect(r, static_cast<double>(count) == inv + 1.0, "segment_count",
                   "delta " + num(delta) + ": " + num(count) + " cells, expected " + num(inv + 1.0));
        } else {
            if (d != 2) throw UsageError("the fan generator is planar");
            const auto segs = build_kakeya(fan64());
            count = rasterize(std::span<const Segment>(segs), mesh).size();
        }
        counts.push_back({delta, static_cast<double>(count)});
        table.row({cfg.generator, num(d), num(delta), num(count), num(std::log(1.0 / delta)),
                   num(std::log(static_cast<double>(count)))});
    }
    std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) { return a.delta > b.delta; });
    const auto est = estimate_box_dimensions(counts);
    CsvTable summary({"generator", "d", "scales", "lower", "upper", "least_squares"});
    summary.row({cfg.generator, num(d), num(static_cast<std::uint64_t>(counts.size())), num(est.lower),
                 num(est.upper), num(est.least_squares)});
    if (expected >= 0.0) {
        expect(r, std::abs(est.lower - expected) <= tol, "lower_dimension",
               num(est.lower) + " not within " + num(tol) + " of " + num(expected));
        expect(r, std::abs(est.upper - expected) <= tol, "upper_dimension",
               num(est.upper) + " not within " + num(tol) + " of " + num(expected));
    }
    r.artifacts["dimension_" + cfg.generator + ".csv"] = table.str();
    r.artifacts["dimension_" + cfg.generator + "_summary.csv"] = summary.str();
    return r;
}

RunResult run_dense(const ExperimentConfig& cfg) {
    RunResult r;
    const double delta = cfg.deltas.empty() ? 1.0 / 32 : cfg.deltas.front();
    const int n = cfg.density > 0 ? cfg.density : calibrate_fan_density(delta);
    if (n == 0) {
        r.failures.push_back({"calibration", "no fan density up to the limit fills the ball raster"});
        return r;
    }
    const auto mesh = MeshSpec::anchored(2, delta);
    const auto field = random_field(fan_directions(n), 2.0, derive_seed(cfg.seed, kDenseField));
    const double coarsest = *std::max_element(cfg.epsilons.begin(), cfg.epsilons.end());

    CsvTable table({"epsilon", "delta", "directions", "cube_side", "groups", "field_distance", "within_epsilon",
                    "union_cells", "ball_cells", "symmetric_difference", "ball_equal", "witness_group",
                    "group_measure", "witness_bound", "witness_holds", "negative_symmetric_difference",
                    "negative_equal"});
    for (double eps : cfg.epsilons) {
        const auto q = quantize_field(field, eps);
        const double dist = field_distance(q.field, field);
        const auto check = shifted_union_is_ball(q, mesh);
        const auto witness = measure_witness(q, mesh);
        std::size_t big = 0;
        for (std::size_t g = 1; g < q.groups.size(); ++g)
            if (q.groups[g].members.size() > q.groups[big].members.size()) big = g;
        auto reduced = q;
        reduced.groups.erase(reduced.groups.begin() + static_cast<std::ptrdiff_t>(big));
        const auto negative = shifted_union_is_ball(reduced, mesh);
        table.row({num(eps), num(delta), num(n), num(q.cube_side), num(static_cast<std::uint64_t>(q.groups.size())),
                   num(dist), flag(dist < eps), num(static_cast<std::uint64_t>(check.union_cells)),
                   num(static_cast<std::uint64_t>(check.ball_cells)),
                   num(static_cast<std::uint64_t>(check.symmetric_difference)), flag(check.equal),
                   num(static_cast<std::uint64_t>(witness.index)), num(witness.group_measure),
                   num(witness.lower_bound), flag(witness.holds),
                   num(static_cast<std::uint64_t>(negative.symmetric_difference)), flag(negative.equal)});
        expect(r, dist < eps, "quantize_distance", "epsilon " + num(eps) + ": distance " + num(dist));
        expect(r, check.equal, "shifted_union_ball",
               "epsilon " + num(eps) + ": " + num(static_cast<std::uint64_t>(check.symmetric_difference)) +
                   " cells differ");
        expect(r, witness.holds, "measure_witness", "epsilon " + num(eps));
        // A single group is only visible at the raster scale when it is a large share of the directions.
        if (eps == coarsest && q.groups.size() > 1)
            expect(r, !negative.equal, "negative_control", "epsilon " + num(eps) + ": deleting a group went unnoticed");
    }
    r.artifacts["dense.csv"] = table.str();

    CsvTable trials({"trial", "epsilon", "n", "groups", "field_distance", "within_epsilon"});
    Rng rng(cfg.seed, kDenseTrials);
    std::size_t bad = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const double eps = rng.uniform(0.02, 3.0);
        const auto f = random_field(fan_directions(16 + static_cast<int>(rng.below(64))), 2.0, rng.next());
        const auto q = quantize_field(f, eps);
        const double dist = field_distance(q.field, f);
        if (!(dist < eps)) ++bad;
        trials.row({num(static_cast<std::uint64_t>(t)), num(eps), num(q.n),
                    num(static_cast<std::uint64_t>(q.groups.size())), num(dist), flag(dist < eps)});
    }
    expect(r, bad == 0, "quantize_trials", num(static_cast<std::uint64_t>(bad)) + " trials out of tolerance");
    r.artifacts["dense_trials.csv"] = trials.str();
    return r;
}

RunResult run_diffset(const ExperimentConfig& cfg) {
    RunResult r;
    CsvTable table({"family", "n", "d", "size", "difference", "trivial_bound", "ratio"});
    auto add = [&](const std::string& family, const LatticeSet& c, std::uint64_t diff) {
        const auto bound = trivial_bound(c.size(), c.n(), c.dim());
        table.row({family, num(c.n()), num(c.dim()), num(static_cast<std::uint64_t>(c.size())), num(diff),
                   num(bound), num(static_cast<double>(diff) / static_cast<double>(bound))});
        expect(r, diff <= bound, "trivial_bound", family + " n=" + num(c.n()) + " exceeds the trivial bound");
    };
    std::vector<LatticeInstance> family;
    for (int n : cfg.lattice_n) {
        const auto ap = LatticeSet::progression(n, n);
        const auto ap_diff = difference_count(ap);
        add("progression", ap, ap_diff);
        expect(r, ap_diff == static_cast<std::uint64_t>(2 * n - 1), "progression", "n=" + num(n));
        const auto full = LatticeSet::full(n, cfg.dim > 2 && n > 32 ? 2 : cfg.dim);
        const auto full_diff = difference_count(full);
        add("full", full, full_diff);
        std::uint64_t want = 1;
        for (int i = 0; i < full.dim(); ++i) want *= static_cast<std::uint64_t>(2 * n - 1);
        expect(r, full_diff == want, "full_lattice", "n=" + num(n));
        family.push_back({n, full, full});
    }

    // Lattice sets read off the planar fan.
    const auto segs = build_kakeya(fan64());
    for (int n : cfg.lattice_n) {
        if (n > 64) continue;
        const auto ex = extract_lattice_sets(segs, n);
        add("kakeya", ex.cells, difference_count(ex.cells));
        family.push_back({ex.cells.n(), ex.cells, ex.midpoints});
    }
    const auto rows = theta_profile(family);
    CsvTable theta({"n", "d", "size", "size0", "difference", "translated_union", "t_hat", "theta_hat", "ratio"});
    for (const auto& row : rows)
        theta.row({num(row.n), num(row.d), num(row.size), num(row.size0), num(row.difference),
                   num(row.translated_union), num(row.t_hat), num(row.theta_hat), num(row.ratio)});

    Rng rng(cfg.seed, kDiffsetRandom);
    std::size_t violations = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const int n = 2 + static_cast<int>(rng.below(15));
        const int d = 1 + static_cast<int>(rng.below(3));
        std::uint64_t cap = 1;
        for (int i = 0; i < d; ++i) cap *= static_cast<std::uint64_t>(n);
        const auto size = 1 + rng.below(std::min<std::uint64_t>(cap, 40));
        const LatticeSet c(n, d, random_lattice_cells(rng, n, d, size));
        if (difference_count(c) > trivial_bound(c.size(), n, d)) ++violations;
    }
    expect(r, violations == 0, "random_trivial_bound", num(static_cast<std::uint64_t>(violations)) + " violations");

    CsvTable salem({"n", "d", "size", "trials", "best_family", "best_trial", "best_difference", "trivial_bound",
                    "best_ratio"});
    for (int n : cfg.lattice_n) {
        if (n > 64) continue;
        const int d = 2;
        const auto size = static_cast<std::size_t>(std::max(2.0, std::floor(std::sqrt(static_cast<double>(n) * n))));
        const auto res = salem_probe(n, d, size, 8, derive_seed(cfg.seed, kSalem));
        salem.row({num(n), num(d), num(static_cast<std::uint64_t>(size)), num(8), res.best_family,
                   num(static_cast<std::uint64_t>(res.best_trial)), num(res.best_difference), num(res.bound),
                   num(res.best_ratio)});
    }
    r.artifacts["diffset.csv"] = table.str();
    r.artifacts["diffset_theta.csv"] = theta.str();
    r.artifacts["diffset_salem.csv"] = salem.str();
    return r;
}

RunResult run_tangent(const ExperimentConfig& cfg) {
    RunResult r;
    const int d = cfg.dim;
    const double delta = cfg.deltas.empty() ? 1.0 / 64 : cfg.deltas.front();
    const int n = cfg.density > 0 ? cfg.density : 64;
    const auto sample = direction_sample(d, n);
    const double gap = sample.covering_radius;
    const auto base = random_base_field(sample.points, cfg.base_bound, derive_seed(cfg.seed, kTangentBases));
    const auto rays = build_half_extended(base);
    const auto mesh = MeshSpec::anchored(d, delta);
    const double cell = std::sqrt(static_cast<double>(d)) * delta;

    const auto profile = convergence_profile(rays, cfg.zoom_k, mesh, gap, cfg.base_bound);
    CsvTable table({"k", "distance", "bound", "holds", "cells"});
    for (const auto& row : profile.rows) {
        table.row({num(row.k), num(row.distance), num(row.bound), flag(row.holds),
                   num(static_cast<std::uint64_t>(row.cells))});
        expect(r, row.holds, "distance_bound", "k=" + num(row.k) + ": " + num(row.distance) + " > " + num(row.bound));
    }
    expect(r, profile.nonincreasing, "monotone", "distance grew by more than one cell");
    const auto& last = profile.rows.back();
    // The final-scale bound applies once the base term is below the sample gap.
    if (cfg.base_bound / last.k <= gap)
        expect(r, last.distance <= gap + 3.0 * cell, "final_distance",
               "k=" + num(last.k) + ": " + num(last.distance) + " > " + num(gap + 3.0 * cell));

    const auto zero = build_half_extended(zero_base_field(sample.points));
    const auto reference = zoom_out(zero, cfg.zoom_k.front(), mesh);
    bool invariant = true;
    for (int k : cfg.zoom_k) invariant = invariant && zoom_out(zero, k, mesh) == reference;
    expect(r, invariant, "cone_invariance", "zero-base rasters differ across k");

    CsvTable summary({"d", "delta", "directions", "gap", "min_separation", "base_bound", "cone_invariant"});
    summary.row({num(d), num(delta), num(static_cast<std::uint64_t>(sample.points.size())), num(gap),
                 num(sample.min_separation), num(cfg.base_bound), flag(invariant)});

    if (d == 2)
        for (int k : cfg.zoom_k)
            r.artifacts["tangent_k" + num(k) + ".svg"] = raster_svg(zoom_out(rays, k, mesh), "zoom k = " + num(k));

    // Covering check against the ball tangent, with a negative control at s = d - 1/2.
    const double h = d == 2 ? 1.0 / 256 : 1.0 / 32;
    const auto fine = MeshSpec::anchored(d, h);
    const auto source = zoom_out(rays, *std::max_element(cfg.zoom_k.begin(), cfg.zoom_k.end()), fine);
    const auto ball = unit_ball_raster(fine);
    const SimilarityMap identity(1.0, Vec::zeros(d));
    const auto pairs = default_scale_pairs(h);
    CsvTable weak({"exponent", "sample", "delta", "epsilon", "tangent_count", "source_count", "constant", "bound",
                   "pass"});
    const double exps[] = {static_cast<double>(d), d - 0.5};
    for (double s : exps) {
        const auto rep = weak_tangent_covering_check(source, ball, identity, s, pairs, cfg.samples,
                                                     derive_seed(cfg.seed, kTangentSamples));
        std::size_t idx = 0;
        for (const auto& row : rep.rows) {
            weak.row({num(s), num(static_cast<std::uint64_t>(idx++ / pairs.size())), num(row.delta),
                      num(row.epsilon), num(row.tangent_count), num(row.source_count), num(row.constant),
                      num(row.bound), flag(row.pass)});
        }
        if (s == d)
            expect(r, rep.passed, "weak_tangent",
                   num(static_cast<std::uint64_t>(rep.failures)) + " rows above the bound at s = d");
        else
            expect(r, !rep.passed, "weak_tangent_control", "s = d - 1/2 passed every row");
    }
    r.artifacts["tangent.csv"] = table.str();
    r.artifacts["tangent_summary.csv"] = summary.str();
    r.artifacts["tangent_weak.csv"] = weak.str();
    return r;
}

namespace {

struct SuiteRow {
    std::string check;
    std::size_t instances = 0;
    std::size_t violations = 0;
};

SuiteRow suite_raster_union(std::uint64_t seed) {
    SuiteRow row{"raster_union"};
    Rng rng(seed, kSuiteUnion);
    for (int t = 0; t < 20; ++t) {
        const int d = 2 + static_cast<int>(rng.below(2));
        const auto segs = random_segments(rng, d, 6, 1.5);
        const auto mesh = MeshSpec::anchored(d, 1.0 / 16);
        OccupancySet acc(mesh);
        for (const auto& s : segs) acc = acc.united(rasterize(std::span<const Segment>(&s, 1), mesh));
        ++row.instances;
        if (!(acc == rasterize(std::span<const Segment>(segs), mesh))) ++row.violations;
    }
    return row;
}

SuiteRow suite_translation(std::uint64_t seed) {
    SuiteRow row{"mesh_translation"};
    Rng rng(seed, kSuiteTranslate);
    for (int t = 0; t < 20; ++t) {
        const auto segs = random_segments(rng, 2, 8, 2.0);
        const double delta = 1.0 / 32;
        const auto mesh = MeshSpec::anchored(2, delta);
        Cell shift{};
        Vec a(2);
        for (int i = 0; i < 2; ++i) {
            shift[i] = static_cast<std::int32_t>(rng.below(41)) - 20;
            a[i] = shift[i] * delta;
        }
        const auto before = rasterize(std::span<const Segment>(segs), mesh);
        const auto moved = translate(std::span<const Segment>(segs), a);
        std::vector<Cell> expected;
        for (auto c : before.cells()) {
            for (int i = 0; i < 2; ++i) c[i] -= shift[i];
            expected.push_back(c);
        }
        ++row.instances;
        if (!(rasterize(std::span<const Segment>(moved), mesh) == OccupancySet(mesh, expected))) ++row.violations;
    }
    return row;
}

SuiteRow suite_sandwich(std::uint64_t seed) {
    SuiteRow row{"count_sandwich"};
    Rng rng(seed, kSuiteSandwich);
    const std::vector<double> deltas = dyadic_range(3, 6);
    for (int t = 0; t < 50; ++t) {
        const auto segs = random_segments(rng, 2, 10 + rng.below(30), 2.0);
        const auto p = partition_by_midpoint(segs, 1 + static_cast<int>(rng.below(6)));
        for (const auto& s : count_sandwich_report(segs, p, deltas)) {
            ++row.instances;
            if (!s.holds) ++row.violations;
        }
    }
    return row;
}

SuiteRow suite_lipschitz(std::uint64_t seed) {
    SuiteRow row{"field_lipschitz"};
    Rng rng(seed, kSuiteLipschitz);
    const double delta = 1.0 / 64;
    const auto mesh = MeshSpec::anchored(2, delta);
    const auto dirs = fan_directions(32);
    for (int t = 0; t < 100; ++t) {
        const auto f = random_field(dirs, 2.0, rng.next());
        std::vector<CenterField::Entry> moved = f.entries();
        const double scale = rng.uniform(0.0, 0.5);
        for (auto& e : moved)
            for (int i = 0; i < 2; ++i)
                e.centre[i] = std::ldexp(std::round((e.centre[i] + scale * rng.uniform(-1.0, 1.0)) * 0x1.0p24), -24);
        const auto g = CenterField::with_auto_bound(std::move(moved));
        const auto a = rasterize(std::span<const Segment>(build_kakeya(f)), mesh).cell_centres();
        const auto b = rasterize(std::span<const Segment>(build_kakeya(g)), mesh).cell_centres();
        ++row.instances;
        if (!(hausdorff_distance(a, b) <= field_distance(f, g) + 2.0 * std::sqrt(2.0) * delta)) ++row.violations;
    }
    return row;
}

SuiteRow suite_packing(std::uint64_t seed) {
    SuiteRow row{"packing_stability"};
    Rng rng(seed, kSuitePacking);
    for (int t = 0; t < 100; ++t) {
        std::vector<Vec> a;
        for (int i = 0; i < 60; ++i) a.push_back(Vec{rng.uniform(), rng.uniform()});
        const double eps = 0.05;
        const auto base = disjoint_packing_count(a, eps);
        if (!std::isfinite(base.min_gap)) continue;
        std::vector<Vec> b;
        const double reach = 0.999 * base.min_gap / 2;
        for (const auto& p : a) {
            const double ang = rng.uniform(0.0, 2.0 * M_PI);
            const double len = reach * rng.uniform();
            b.push_back(p + Vec{len * std::cos(ang), len * std::sin(ang)});
        }
        const auto st = packing_stability(a, eps, b);
        ++row.instances;
        if (!st.stable) ++row.violations;
    }
    return row;
}

SuiteRow suite_lattice(std::uint64_t seed) {
    SuiteRow row{"lattice_translated_union"};
    Rng rng(seed, kSuiteLattice);
    for (int t = 0; t < 100; ++t) {
        const int n = 2 + static_cast<int>(rng.below(10));
        const int d = 1 + static_cast<int>(rng.below(2));
        const LatticeSet c(n, d, random_lattice_cells(rng, n, d, 1 + rng.below(12)));
        const LatticeSet c0(n, d, random_lattice_cells(rng, n, d, 1 + rng.below(6)));
        std::set<Cell> pairs;
        for (const auto& y : c.cells())
            for (const auto& x : c0.cells()) {
                Cell v{};
                for (int i = 0; i < d; ++i) v[i] = y[i] - x[i];
                pairs.insert(v);
            }
        ++row.instances;
        if (translated_union_count(c, c0) != pairs.size()) ++row.violations;
    }
    return row;
}

SuiteRow suite_zoom_union(std::uint64_t seed) {
    SuiteRow row{"zoom_union"};
    const auto sample = direction_sample(2, 8);
    const auto rays = build_half_extended(random_base_field(sample.points, 5.0, derive_seed(seed, kSuiteZoom)));
    const auto mesh = MeshSpec::anchored(2, 1.0 / 32);
    for (int k : {1, 2, 5, 10, 100}) {
        OccupancySet acc(mesh);
        for (const auto& ray : rays) acc = acc.united(zoom_out(std::span<const Ray>(&ray, 1), k, mesh));
        ++row.instances;
        if (!(acc == zoom_out(rays, k, mesh))) ++row.violations;
    }
    return row;
}

SuiteRow suite_cut_move(std::uint64_t seed) {
    SuiteRow row{"cut_move_directions"};
    Rng rng(seed, kSuiteCutMove);
    for (int t = 0; t < 20; ++t) {
        const auto segs = random_segments(rng, 2, 30, 2.0);
        const auto p = partition_by_midpoint(segs, 1 + static_cast<int>(rng.below(8)));
        const auto moved = cut_and_move(segs, p);
        std::vector<Direction> a, b;
        for (const auto& s : segs) a.push_back(s.direction);
        for (const auto& s : moved) b.push_back(s.direction);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        bool ok = a == b;
        for (const auto& s : moved) ok = ok && norm_inf(s.centre) <= p.cube_side / 2;
        ++row.instances;
        if (!ok) ++row.violations;
    }
    return row;
}

}  // namespace

RunResult run_selftest(const ExperimentConfig& cfg) {
    RunResult r;
    ExperimentConfig base;
    base.seed = cfg.seed;
    base.out_dir = cfg.out_dir;
    merge(r, run_figure1(base), "figure1");
    merge(r, run_lbd(base), "lbd");
    for (const char* gen : {"ball", "segment", "fan"}) {
        ExperimentConfig c = base;
        c.generator = gen;
        merge(r, run_dimension(c), "dimension");
    }
    merge(r, run_dense(base), "dense");
    merge(r, run_diffset(base), "diffset");
    merge(r, run_tangent(base), "tangent");

    CsvTable table({"check", "instances", "violations"});
    for (const auto& row : {suite_raster_union(cfg.seed), suite_translation(cfg.seed), suite_sandwich(cfg.seed),
                            suite_lipschitz(cfg.seed), suite_packing(cfg.seed), suite_lattice(cfg.seed),
                            suite_zoom_union(cfg.seed), suite_cut_move(cfg.seed)}) {
        table.row({row.check, num(static_cast<std::uint64_t>(row.instances)),
                   num(static_cast<std::uint64_t>(row.violations))});
        expect(r, row.violations == 0, "suite." + row.check,
               num(static_cast<std::uint64_t>(row.violations)) + " of " +
                   num(static_cast<std::uint64_t>(row.instances)) + " instances violate the invariant");
    }
    r.artifacts["selftest.csv"] = table.str();
    return r;
}

std::string failure_report(const std::string& subcommand, const ExperimentConfig& cfg, const RunResult& result) {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["seed"] = cfg.seed;
    j["status"] = result.failures.empty() ? "pass" : "fail";
    j["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : result.failures) j["failures"].push_back({{"check", f.check}, {"detail", f.detail}});
    return j.dump(2) + "\n";
}

void write_artifacts(const std::string& subcommand, const ExperimentConfig& cfg, const RunResult& result) {
    namespace fs = std::filesystem;
    const fs::path dir(cfg.out_dir);
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream out(dir / name, std::ios::binary);
        out << body;
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
    };
    for (const auto& [name, body] : result.artifacts) put(name, body);
    if (!result.failures.empty()) put("failure_report.json", failure_report(subcommand, cfg, result));
}

int run(int argc, char** argv) {
    CLI::App app{"Kakeya cut-and-move toolkit: experiments, tables and figures"};
    app.require_subcommand(1);
    std::string config_path;
    std::map<std::string, std::string> flags;
    app.add_option("--config", config_path, "Flat key = value config file; flags override its keys");
    const std::map<std::string, std::string> help{
        {"d", "Ambient dimension d (2..4)"},
        {"deltas", "Comma-separated dyadic scales, e.g. 1/16,1/32 or 2^-5"},
        {"density", "Direction count (0 = per-experiment default)"},
        {"seed", "Master seed for every random stream"},
        {"out", "Output directory"},
        {"levels", "figure1 cut levels"},
        {"lattice_n", "diffset lattice sizes"},
        {"zoom_k", "tangent zoom factors"},
        {"generator", "dimension generator: ball, segment or fan"},
        {"epsilons", "dense quantization radii"},
        {"base_bound", "tangent bound T on |t_theta|"},
        {"trials", "Random trials for dense and diffset"},
        {"samples", "tangent covering-check samples"},
        {"field", "figure1 centre-field file (default: built-in 64-direction fan)"},
    };
    for (const auto& key : config_keys()) {
        std::string name = key;
        std::replace(name.begin(), name.end(), '_', '-');
        app.add_option("--" + name, flags[key], help.at(key));
    }
    const std::vector<std::pair<std::string, std::string>> commands{
        {"figure1", "Cut-and-move panels of the 64-direction fan"},
        {"lbd", "Count, cut, move and dilate: coverage of the ball at each scale"},
        {"dimension", "Box-dimension table for a named generator"},
        {"dense", "Quantized centre fields, shifted union and measure witness"},
        {"diffset", "Difference-set tables on integer lattices"},
        {"tangent", "Zoom-out convergence and weak-tangent covering check"},
        {"selftest", "Every experiment with defaults plus the invariant suite"},
    };
    for (const auto& [name, desc] : commands) app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const std::string sub = app.get_subcommands().front()->get_name();
    ExperimentConfig cfg;
    RunResult result;
    try {
        if (!config_path.empty())
            for (const auto& [k, v] : read_config_file(config_path)) apply_config_entry(cfg, k, v);
        for (const auto& key : config_keys()) {
            std::string name = key;
            std::replace(name.begin(), name.end(), '_', '-');
            if (app.count("--" + name) > 0) apply_config_entry(cfg, key, flags[key]);
        }
        if (sub == "figure1") result = run_figure1(cfg);
        else if (sub == "lbd") result = run_lbd(cfg);
        else if (sub == "dimension") result = run_dimension(cfg);
        else if (sub == "dense") result = run_dense(cfg);
        else if (sub == "diffset") result = run_diffset(cfg);
        else if (sub == "tangent") result = run_tangent(cfg);
        else result = run_selftest(cfg);
        write_artifacts(sub, cfg, result);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        // Unwritable output directory and similar environment problems.
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    for (const auto& [name, body] : result.artifacts) std::cout << "wrote " << cfg.out_dir << '/' << name << '\n';
    if (!result.failures.empty()) {
        std::cerr << failure_report(sub, cfg, result);
        return 1;
    }
    std::cout << sub << ": ok\n";
    return 0;
}

}  // namespace kakeyakit::cli
