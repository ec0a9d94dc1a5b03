#include "andlab/lattice.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

namespace andlab {

Box::Box(Site center_, int side_, int dim_) : center(center_), side(side_), dim(dim_) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Box: dim must be 1, 2, or 3");
    if (side < 1 || side % 2 == 0)
        throw std::invalid_argument("Box: side must be a positive odd integer");
    for (int i = dim; i < 3; ++i)
        if (center[i] != 0)
            throw std::invalid_argument("Box: center coordinates beyond dim must be zero");
}

Box Box::of_scale(Site center, int scale, int dim) {
    if (scale < 1) throw std::invalid_argument("Box: positive scale required");
    return Box(center, 2 * (scale / 2) + 1, dim);
}

long long Box::volume() const {
    long long v = 1;
    for (int i = 0; i < dim; ++i) v *= side;
    return v;
}

std::vector<Site> Box::sites() const {
    const int r = radius();
    std::vector<Site> out;
    out.reserve(static_cast<size_t>(volume()));
    Site lo = center, hi = center;
    for (int i = 0; i < dim; ++i) {
        lo[i] -= r;
        hi[i] += r;
    }
    Site s = lo;
    while (true) {
        out.push_back(s);
        int i = dim - 1;
        while (i >= 0 && s[i] == hi[i]) {
            s[i] = lo[i];
            --i;
        }
        if (i < 0) break;
        ++s[i];
    }
    return out;
}

bool Box::contains(const Site& s) const {
    const int r = radius();
    for (int i = 0; i < dim; ++i)
        if (s[i] < center[i] - r || s[i] > center[i] + r) return false;
    for (int i = dim; i < 3; ++i)
        if (s[i] != 0) return false;
    return true;
}

std::vector<Site> Box::inner_boundary() const {
    const int r = radius();
    std::vector<Site> out;
    for (const Site& s : sites()) {
        bool on_edge = false;
        for (int i = 0; i < dim && !on_edge; ++i)
            on_edge = (s[i] == center[i] - r) || (s[i] == center[i] + r);
        if (on_edge) out.push_back(s);
    }
    return out;
}

int TiltedRegion::side() const {
    if (!is_square())
        throw std::invalid_argument("TiltedRegion: side() requires |I| == |J|");
    return s_interval.length();
}

namespace {

// Number of integers in [lo, hi] congruent to parity (0 or 1) mod 2.
int count_with_parity(int lo, int hi, int parity) {
    if (lo > hi) return 0;
    auto norm = [](int k) { return ((k % 2) + 2) % 2; };
    int first = lo + (norm(lo) == parity ? 0 : 1);
    if (first > hi) return 0;
    return (hi - first) / 2 + 1;
}

}  // namespace

std::vector<Site> TiltedRegion::sites() const {
    std::vector<Site> out;
    for (int s = s_interval.lo; s <= s_interval.hi; ++s)
        for (int t = t_interval.lo; t <= t_interval.hi; ++t) {
            if (((s + t) & 1) != 0) continue;
            out.push_back(site((s + t) / 2, (s - t) / 2));
        }
    std::sort(out.begin(), out.end());
    return out;
}

long long TiltedRegion::site_count() const {
    long long n = 0;
    for (int s = s_interval.lo; s <= s_interval.hi; ++s)
        n += count_with_parity(t_interval.lo, t_interval.hi, ((s % 2) + 2) % 2);
    return n;
}

TiltedRegion TiltedRegion::half_square() const {
    const int l = side();
    const int h = (l + 1) / 2;
    const int off = (l - h) / 2;
    return TiltedRegion(IntInterval(s_interval.lo + off, s_interval.lo + off + h - 1),
                        IntInterval(t_interval.lo + off, t_interval.lo + off + h - 1));
}

SparsityVerdict diagonal_sparsity(const std::set<Site>& frozen, const TiltedRegion& region,
                                  double delta) {
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("diagonal_sparsity: delta must lie in [0, 1]");
    std::map<int, long long> f_plus, f_minus;
    for (const Site& p : frozen) {
        if (!region.contains(p)) continue;
        ++f_plus[p[0] + p[1]];
        ++f_minus[p[0] - p[1]];
    }
    const double tol = 1e-9;
    SparsityVerdict v{true, true};
    for (int s = region.s_interval.lo; s <= region.s_interval.hi; ++s) {
        long long on_diag =
            count_with_parity(region.t_interval.lo, region.t_interval.hi, ((s % 2) + 2) % 2);
        if (on_diag == 0) continue;
        auto it = f_plus.find(s);
        long long hit = (it == f_plus.end()) ? 0 : it->second;
        if (static_cast<double>(hit) > delta * static_cast<double>(on_diag) + tol)
            v.plus_sparse = false;
    }
    for (int t = region.t_interval.lo; t <= region.t_interval.hi; ++t) {
        long long on_diag =
            count_with_parity(region.s_interval.lo, region.s_interval.hi, ((t % 2) + 2) % 2);
        if (on_diag == 0) continue;
        auto it = f_minus.find(t);
        long long hit = (it == f_minus.end()) ? 0 : it->second;
        if (static_cast<double>(hit) > delta * static_cast<double>(on_diag) + tol)
            v.minus_sparse = false;
    }
    return v;
}

bool delta_regularity(const std::set<Site>& frozen, const TiltedRegion& region, double delta,
                      const std::vector<TiltedRegion>& candidate_squares) {
    if (delta < 0.0 || delta > 1.0)
        throw std::invalid_argument("delta_regularity: delta must lie in [0, 1]");
    std::set<Site> seen;
    for (const TiltedRegion& q : candidate_squares) {
        if (!q.is_square())
            throw std::invalid_argument("delta_regularity: family members must be tilted squares");
        if (!region.contains(q))
            throw std::invalid_argument(
                "delta_regularity: family members must lie inside the region");
        for (const Site& p : q.sites())
            if (!seen.insert(p).second)
                throw std::invalid_argument("delta_regularity: family members must be disjoint");
    }
    long long bad_mass = 0;
    for (const TiltedRegion& q : candidate_squares)
        if (!diagonal_sparsity(frozen, q, delta).sparse()) bad_mass += q.site_count();
    return static_cast<double>(bad_mass) <=
           delta * static_cast<double>(region.site_count()) + 1e-9;
}

std::vector<TiltedRegion> dyadic_square_family(const TiltedRegion& square) {
    const int l = square.side();
    const int q = l / 4;
    std::vector<TiltedRegion> out;
    if (q < 1) return out;
    const int m = l / q;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
            int s_lo = square.s_interval.lo + i * q;
            int t_lo = square.t_interval.lo + j * q;
            out.emplace_back(IntInterval(s_lo, s_lo + q - 1), IntInterval(t_lo, t_lo + q - 1));
        }
    return out;
}

}  // namespace andlab
