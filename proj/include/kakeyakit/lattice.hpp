#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "kakeyakit/counting.hpp"
#include "kakeyakit/geometry.hpp"

namespace kakeyakit {

/// Finite subset of the bounded lattice {0, ..., n-1}^d; cells sorted and unique.
class LatticeSet {
public:
    LatticeSet(int n, int d, std::vector<Cell> cells);

    int n() const { return n_; }
    int dim() const { return d_; }
    const std::vector<Cell>& cells() const { return cells_; }
    std::size_t size() const { return cells_.size(); }
    bool empty() const { return cells_.empty(); }
    bool contains(const Cell& c) const;
    bool is_subset_of(const LatticeSet& other) const;

    static LatticeSet full(int n, int d);
    /// {0, ..., m-1} embedded in {0, ..., n-1}.
    static LatticeSet progression(int n, int m);

    friend bool operator==(const LatticeSet&, const LatticeSet&) = default;

private:
    int n_;
    int d_;
    std::vector<Cell> cells_;
};

/// One bit per point of {0, ..., side-1}^d.
class BitGrid {
public:
    BitGrid(int side, int d);
    bool test_and_set(const Cell& c);
    bool test(const Cell& c) const;
    void reset(const Cell& c);
    std::uint64_t count() const { return count_; }
    void clear();

private:
    std::uint64_t index(const Cell& c) const;
    int side_;
    int d_;
    std::vector<std::uint64_t> words_;
    std::uint64_t count_ = 0;
};

/// {x - y : x, y in C}, stored shifted by n-1 per axis as a set in {0, ..., 2n-2}^d.
LatticeSet difference_set(const LatticeSet& c);
/// |C - C| without materializing the set.
std::uint64_t difference_count(const LatticeSet& c);

/// min(|C|^2, (2n - 1)^d).
std::uint64_t trivial_bound(std::uint64_t size, int n, int d);

struct LatticeExtraction {
    LatticeSet cells;      // C: cells of the 1/n mesh meeting K
    LatticeSet midpoints;  // C0: cells holding a segment midpoint
};

/// Rasterizes K on the mesh of side 1/n anchored at 0 and re-indexes so that
/// the smallest occupied index on each axis becomes 0.
LatticeExtraction extract_lattice_sets(std::span<const Segment> segments, int n);

/// #{y - x : y in C, x in C0}.
std::uint64_t translated_union_count(const LatticeSet& c, const LatticeSet& c0);

struct LatticeInstance {
    int n = 0;
    LatticeSet c;
    LatticeSet c0;
};

struct ThetaRow {
    int n = 0;
    int d = 0;
    std::uint64_t size = 0;
    std::uint64_t size0 = 0;
    std::uint64_t difference = 0;
    std::uint64_t translated_union = 0;
    double t_hat = 0.0;      // log|C| / log n
    double theta_hat = 0.0;  // log(translated union) / log n
    double ratio = 0.0;
};

std::vector<ThetaRow> theta_profile(std::span<const LatticeInstance> family);

struct SalemProbeResult {
    double best_ratio = 0.0;
    std::uint64_t best_difference = 0;
    std::uint64_t bound = 0;
    std::string best_family;
    std::size_t best_trial = 0;
    LatticeSet best_set{1, 1, {}};
};

/// Samples uniform random sets and greedy generic-position sets of the given
/// size, reporting the largest |C - C| / trivial_bound. Trial t draws from the
/// stream derive_seed(seed, t).
SalemProbeResult salem_probe(int n, int d, std::size_t size, std::size_t trials, std::uint64_t seed);

/// Header `n d`, then one tuple per line, sorted.
void write_lattice_set(std::ostream& os, const LatticeSet& c);
LatticeSet read_lattice_set(std::istream& is);

}  // namespace kakeyakit
