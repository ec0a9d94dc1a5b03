#pragma once

#include <set>
#include <vector>

#include "andlab/common.hpp"

namespace andlab {

/// Axis-aligned cube of odd side L centered at a lattice point:
/// center + {-L/2, ..., L/2}^d.
struct Box {
    Site center{0, 0, 0};
    int side = 1;
    int dim = 1;

    Box() = default;
    Box(Site center_, int side_, int dim_);

    /// Box of scale L: center + {-floor(L/2), ..., floor(L/2)}^d, which has
    /// odd side 2*floor(L/2)+1 for any L >= 1 (= L when L is odd).
    static Box of_scale(Site center, int scale, int dim);

    int radius() const { return side / 2; }
    long long volume() const;

    /// All sites in lexicographic order. This order defines the matrix
    /// index map used by every other module.
    std::vector<Site> sites() const;

    /// Sites at l1-distance 1 from the complement.
    std::vector<Site> inner_boundary() const;

    bool contains(const Site& s) const;
};

/// Integer interval {lo, ..., hi}, inclusive.
struct IntInterval {
    int lo = 0;
    int hi = 0;

    IntInterval() = default;
    IntInterval(int lo_, int hi_) : lo(lo_), hi(hi_) {
        if (lo > hi) throw std::invalid_argument("IntInterval: lo must be <= hi");
    }
    int length() const { return hi - lo + 1; }
    bool contains(int k) const { return k >= lo && k <= hi; }
    bool contains(const IntInterval& other) const { return lo <= other.lo && other.hi <= hi; }
    bool operator==(const IntInterval& other) const = default;
};

/// 45-degree rectangle in Z^2: points with x+y in s_interval and
/// x-y in t_interval. A lattice point exists at (s,t) only when s and t
/// have equal parity.
struct TiltedRegion {
    IntInterval s_interval;
    IntInterval t_interval;

    TiltedRegion() = default;
    TiltedRegion(IntInterval s, IntInterval t) : s_interval(s), t_interval(t) {}

    bool is_square() const { return s_interval.length() == t_interval.length(); }
    /// Side length l of a tilted square (requires |I| == |J|).
    int side() const;

    bool contains(const Site& p) const {
        return s_interval.contains(p[0] + p[1]) && t_interval.contains(p[0] - p[1]);
    }
    bool contains(const TiltedRegion& other) const {
        return s_interval.contains(other.s_interval) && t_interval.contains(other.t_interval);
    }

    /// All member lattice points, lexicographic order.
    std::vector<Site> sites() const;
    long long site_count() const;

    /// Concentric tilted square of side ceil(l/2); the s/t intervals are
    /// centered on the midpoints of I and J with ties broken toward the
    /// lower endpoint.
    TiltedRegion half_square() const;

    bool operator==(const TiltedRegion& other) const = default;
};

struct SparsityVerdict {
    bool plus_sparse = false;
    bool minus_sparse = false;
    bool sparse() const { return plus_sparse && minus_sparse; }
};

/// Per-diagonal density test: F is (delta,+)-sparse in R when
/// |D_k^+ ∩ F ∩ R| <= delta * |D_k^+ ∩ R| on every diagonal that meets R,
/// and likewise for the minus diagonals. Diagonals with empty intersection
/// are skipped.
SparsityVerdict diagonal_sparsity(const std::set<Site>& frozen, const TiltedRegion& region,
                                  double delta);

/// F is delta-regular in `region` relative to a pairwise disjoint family of
/// tilted squares: the squares where F fails delta-sparsity must carry total
/// cardinality at most delta * |region|. Overlapping squares are rejected.
bool delta_regularity(const std::set<Site>& frozen, const TiltedRegion& region, double delta,
                      const std::vector<TiltedRegion>& candidate_squares);

/// The dyadic witness family used by the UCP trials: the grid of disjoint
/// tilted squares of side floor(l/4) tiling `square` from its lower corner.
std::vector<TiltedRegion> dyadic_square_family(const TiltedRegion& square);

}  // namespace andlab
