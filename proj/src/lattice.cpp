#include "kakeyakit/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>

#include "kakeyakit/rng.hpp"

namespace kakeyakit {

namespace {

std::uint64_t ipow(std::uint64_t base, int e) {
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base)
            return std::numeric_limits<std::uint64_t>::max();
        r *= base;
    }
    return r;
}

Cell decode(std::uint64_t idx, int n, int d) {
    Cell c{};
    for (int i = d - 1; i >= 0; --i) {
        c[i] = static_cast<std::int32_t>(idx % n);
        idx /= n;
    }
    return c;
}

}  // namespace

LatticeSet::LatticeSet(int n, int d, std::vector<Cell> cells) : n_(n), d_(d), cells_(std::move(cells)) {
    if (n_ < 1) throw InvalidInput("lattice size must be positive");
    check_dimension(d_);
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    for (const auto& c : cells_)
        for (int i = 0; i < kMaxDim; ++i) {
            const bool ok = i < d_ ? (c[i] >= 0 && c[i] < n_) : c[i] == 0;
            if (!ok) throw InvalidInput("lattice point out of bounds");
        }
}

bool LatticeSet::contains(const Cell& c) const { return std::binary_search(cells_.begin(), cells_.end(), c); }

bool LatticeSet::is_subset_of(const LatticeSet& other) const {
    return std::includes(other.cells_.begin(), other.cells_.end(), cells_.begin(), cells_.end());
}

LatticeSet LatticeSet::full(int n, int d) {
    check_dimension(d);
    const auto total = ipow(static_cast<std::uint64_t>(n), d);
    if (total > (std::uint64_t{1} << 26)) throw InvalidInput("full lattice too large");
    std::vector<Cell> cells;
    cells.reserve(total);
    for (std::uint64_t i = 0; i < total; ++i) cells.push_back(decode(i, n, d));
    return LatticeSet(n, d, std::move(cells));
}

LatticeSet LatticeSet::progression(int n, int m) {
    if (m > n) throw InvalidInput("progression longer than the lattice");
    std::vector<Cell> cells;
    for (int i = 0; i < m; ++i) cells.push_back(Cell{i, 0, 0, 0});
    return LatticeSet(n, 1, std::move(cells));
}

BitGrid::BitGrid(int side, int d) : side_(side), d_(d) {
    if (side < 1) throw InvalidInput("bit grid side must be positive");
    check_dimension(d);
    const auto bits = ipow(static_cast<std::uint64_t>(side), d);
    if (bits > (std::uint64_t{1} << 33)) throw InvalidInput("bit grid too large for desk scale");
    words_.assign((bits + 63) / 64, 0);
}

std::uint64_t BitGrid::index(const Cell& c) const {
    std::uint64_t idx = 0;
    for (int i = 0; i < d_; ++i) idx = idx * static_cast<std::uint64_t>(side_) + static_cast<std::uint64_t>(c[i]);
    return idx;
}

bool BitGrid::test_and_set(const Cell& c) {
    const auto idx = index(c);
    auto& w = words_[idx >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (idx & 63);
    if (w & mask) return true;
    w |= mask;
    ++count_;
    return false;
}

bool BitGrid::test(const Cell& c) const {
    const auto idx = index(c);
    return (words_[idx >> 6] >> (idx & 63)) & 1;
}

void BitGrid::reset(const Cell& c) {
    const auto idx = index(c);
    auto& w = words_[idx >> 6];
    const std::uint64_t mask = std::uint64_t{1} << (idx & 63);
    if (w & mask) --count_;
    w &= ~mask;
}

void BitGrid::clear() {
    std::fill(words_.begin(), words_.end(), 0);
    count_ = 0;
}

namespace {

// Marks y - x + (n - 1) for all y in ys, x in xs.
BitGrid shifted_differences(const LatticeSet& ys, const LatticeSet& xs) {
    const int n = ys.n(), d = ys.dim();
    BitGrid grid(2 * n - 1, d);
    for (const auto& y : ys.cells())
        for (const auto& x : xs.cells()) {
            Cell v{};
            for (int i = 0; i < d; ++i) v[i] = y[i] - x[i] + (n - 1);
            grid.test_and_set(v);
        }
    return grid;
}

}  // namespace

LatticeSet difference_set(const LatticeSet& c) {
    if (c.empty()) throw InvalidInput("difference set of an empty set");
    const int n = c.n(), d = c.dim();
    const auto grid = shifted_differences(c, c);
    std::vector<Cell> cells;
    cells.reserve(grid.count());
    const auto total = ipow(static_cast<std::uint64_t>(2 * n - 1), d);
    for (std::uint64_t i = 0; i < total; ++i) {
        const Cell v = decode(i, 2 * n - 1, d);
        if (grid.test(v)) cells.push_back(v);
    }
    return LatticeSet(2 * n - 1, d, std::move(cells));
}

std::uint64_t difference_count(const LatticeSet& c) {
    if (c.empty()) throw InvalidInput("difference set of an empty set");
    return shifted_differences(c, c).count();
}

std::uint64_t trivial_bound(std::uint64_t size, int n, int d) {
    if (size < 1) throw InvalidInput("trivial bound needs a nonempty set");
    const std::uint64_t sq = size > 0xffffffffULL ? std::numeric_limits<std::uint64_t>::max() : size * size;
    return std::min(sq, ipow(static_cast<std::uint64_t>(2 * n - 1), d));
}

LatticeExtraction extract_lattice_sets(std::span<const Segment> segments, int n) {
    if (n < 1) throw InvalidInput("lattice resolution must be positive");
    if (segments.empty()) throw InvalidInput("no segments to extract from");
    const int d = segments.front().dim();
    const auto mesh = MeshSpec::anchored(d, 1.0 / n);
    const auto occ = rasterize(segments, mesh);
    std::vector<Cell> mids;
    for (const auto& s : segments) mids.push_back(mesh.cell_of(s.centre));

    Cell lo = occ.cells().front(), hi = lo;
    for (const auto& c : occ.cells())
        for (int i = 0; i < d; ++i) {
            lo[i] = std::min(lo[i], c[i]);
            hi[i] = std::max(hi[i], c[i]);
        }
    int span = 1;
    for (int i = 0; i < d; ++i) span = std::max(span, hi[i] - lo[i] + 1);
    auto shift = [&](std::vector<Cell> cells) {
        for (auto& c : cells)
            for (int i = 0; i < d; ++i) c[i] -= lo[i];
        return cells;
    };
    return LatticeExtraction{LatticeSet(span, d, shift(occ.cells())), LatticeSet(span, d, shift(std::move(mids)))};
}

std::uint64_t translated_union_count(const LatticeSet& c, const LatticeSet& c0) {
    if (c.n() != c0.n() || c.dim() != c0.dim()) throw InvalidInput("lattice sets live on different lattices");
    if (c.empty() || c0.empty()) return 0;
    return shifted_differences(c, c0).count();
}

std::vector<ThetaRow> theta_profile(std::span<const LatticeInstance> family) {
    std::vector<ThetaRow> rows;
    for (const auto& inst : family) {
        if (inst.c.size() < 2 || inst.n < 2) throw InvalidInput("theta profile needs |C| >= 2 and n >= 2");
        ThetaRow row;
        row.n = inst.n;
        row.d = inst.c.dim();
        row.size = inst.c.size();
        row.size0 = inst.c0.size();
        row.difference = difference_count(inst.c);
        row.translated_union = translated_union_count(inst.c, inst.c0);
        const double ln = std::log(static_cast<double>(inst.n));
        row.t_hat = std::log(static_cast<double>(row.size)) / ln;
        row.theta_hat = std::log(static_cast<double>(row.translated_union)) / ln;
        row.ratio = row.theta_hat / row.t_hat;
        rows.push_back(row);
    }
    return rows;
}

namespace {

std::vector<Cell> uniform_subset(Rng& rng, int n, int d, std::size_t size) {
    const auto total = ipow(static_cast<std::uint64_t>(n), d);
    std::vector<std::uint64_t> idx;
    if (total <= (std::uint64_t{1} << 22)) {
        idx.resize(total);
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < size; ++i) std::swap(idx[i], idx[i + rng.below(total - i)]);
        idx.resize(size);
    } else {
        while (idx.size() < size) {
            const auto v = rng.below(total);
            if (std::find(idx.begin(), idx.end(), v) == idx.end()) idx.push_back(v);
        }
    }
    std::vector<Cell> cells;
    for (auto v : idx) cells.push_back(decode(v, n, d));
    return cells;
}

// Adds random points whose differences with the current set are all new,
// falling back to plain uniform points when the attempts run out.
std::vector<Cell> generic_subset(Rng& rng, int n, int d, std::size_t size) {
    const auto total = ipow(static_cast<std::uint64_t>(n), d);
    BitGrid diffs(2 * n - 1, d), fresh(2 * n - 1, d);
    std::vector<Cell> cells, touched;
    auto key = [&](const Cell& a, const Cell& b) {
        Cell v{};
        for (int i = 0; i < d; ++i) v[i] = a[i] - b[i] + (n - 1);
        return v;
    };
    std::size_t attempts = 0;
    const std::size_t max_attempts = 64 * size + 256;
    while (cells.size() < size) {
        const Cell p = decode(rng.below(total), n, d);
        if (std::find(cells.begin(), cells.end(), p) != cells.end()) continue;
        bool generic = ++attempts <= max_attempts;
        if (generic) {
            for (const auto& q : cells) {
                for (const Cell& v : {key(p, q), key(q, p)}) {
                    if (diffs.test(v) || fresh.test_and_set(v)) {
                        generic = false;
                        break;
                    }
                    touched.push_back(v);
                }
                if (!generic) break;
            }
            for (const auto& v : touched) fresh.reset(v);
            touched.clear();
            if (!generic) continue;
        }
        for (const auto& q : cells) {
            diffs.test_and_set(key(p, q));
            diffs.test_and_set(key(q, p));
        }
        cells.push_back(p);
    }
    return cells;
}

}  // namespace

SalemProbeResult salem_probe(int n, int d, std::size_t size, std::size_t trials, std::uint64_t seed) {
    check_dimension(d);
    if (n < 1 || size < 1) throw InvalidInput("salem probe needs n >= 1 and size >= 1");
    if (size > ipow(static_cast<std::uint64_t>(n), d)) throw InvalidInput("size exceeds the lattice");
    SalemProbeResult best;
    best.bound = trivial_bound(size, n, d);
    best.best_ratio = -1.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng(seed, t);
        const bool generic = (t % 2) == 1;
        LatticeSet set(n, d, generic ? generic_subset(rng, n, d, size) : uniform_subset(rng, n, d, size));
        const auto diff = difference_count(set);
        const double ratio = static_cast<double>(diff) / static_cast<double>(best.bound);
        if (ratio > best.best_ratio) {
            best.best_ratio = ratio;
            best.best_difference = diff;
            best.best_family = generic ? "generic" : "uniform";
            best.best_trial = t;
            best.best_set = std::move(set);
        }
    }
    return best;
}

void write_lattice_set(std::ostream& os, const LatticeSet& c) {
    os << c.n() << ' ' << c.dim() << '\n';
    for (const auto& cell : c.cells()) {
        for (int i = 0; i < c.dim(); ++i) os << (i ? " " : "") << cell[i];
        os << '\n';
    }
}

LatticeSet read_lattice_set(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw InvalidInput("missing lattice header");
    std::istringstream header(line);
    int n = 0, d = 0;
    if (!(header >> n >> d)) throw InvalidInput("malformed lattice header");
    check_dimension(d);
    std::vector<Cell> cells;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        Cell c{};
        for (int i = 0; i < d; ++i)
            if (!(row >> c[i])) throw InvalidInput("malformed lattice point: " + line);
        cells.push_back(c);
    }
    return LatticeSet(n, d, std::move(cells));
}

}  // namespace kakeyakit
