#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace andlab {

/// Version stamp carried by every persistent output row, bumped whenever a
/// column or field changes meaning.
inline constexpr int kSchemaVersion = 1;

/// Library version reported in run manifests and over the C interface.
inline constexpr const char* kVersion = "0.1.0";

/// Lattice point in Z^d, d <= 3. Unused coordinates are zero, so the
/// lexicographic order of the array is the canonical site order in any
/// dimension.
using Site = std::array<int, 3>;

inline Site site(int x) { return {x, 0, 0}; }
inline Site site(int x, int y) { return {x, y, 0}; }
inline Site site(int x, int y, int z) { return {x, y, z}; }

inline int l1_dist(const Site& a, const Site& b) {
    return std::abs(a[0] - b[0]) + std::abs(a[1] - b[1]) + std::abs(a[2] - b[2]);
}

/// Closed energy interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo <= hi)) throw std::invalid_argument("Interval: lo must be <= hi");
    }
    static Interval centered(double center, double half_width) {
        if (!(half_width >= 0)) throw std::invalid_argument("Interval: negative half width");
        return Interval(center - half_width, center + half_width);
    }

    double center() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
    double half_width() const { return 0.5 * (hi - lo); }

    /// Membership with the conservative endpoint convention: values within
    /// `tol` of an endpoint count as inside.
    bool contains(double x, double tol = kEndpointTol) const {
        return x >= lo - tol && x <= hi + tol;
    }

    bool operator==(const Interval& other) const = default;

    static constexpr double kEndpointTol = 1e-12;
};

/// Count of values inside a closed interval (conservative endpoints).
inline int count_in_interval(const std::vector<double>& values, const Interval& I) {
    int n = 0;
    for (double v : values)
        if (I.contains(v)) ++n;
    return n;
}

/// Raised when a numerical routine cannot produce a trustworthy result
/// (resonant solve, failed decomposition, degenerate fit).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Doubles are printed with 17 significant digits everywhere so that text
/// output round-trips to the exact binary value.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace andlab
