#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "andlab/common.hpp"
#include "andlab/lattice.hpp"

namespace andlab {

enum class LawKind { Bernoulli, HolderPower, Uniform };

/// Single-site distribution on [0,1]. HolderPower(alpha) has CDF t^alpha;
/// Uniform is HolderPower(1); Bernoulli(p) puts mass p on 1.
struct SiteLaw {
    LawKind kind = LawKind::Uniform;
    double param = 0.0;  // p for Bernoulli, alpha for HolderPower

    static SiteLaw bernoulli(double p);
    static SiteLaw holder(double alpha);
    static SiteLaw uniform();

    /// Accepts "bernoulli:p=<v>", "holder:alpha=<v>", "uniform".
    static SiteLaw parse(const std::string& text);
    std::string to_string() const;

    /// Push one uniform draw u in [0,1) through the inverse CDF.
    double sample(double u) const;
    bool in_support(double v) const;

    bool operator==(const SiteLaw& other) const = default;
};

/// Levy concentration s(mu, eps) = sup_E mu([E-eps, E+eps]), in closed form.
double concentration(const SiteLaw& law, double eps);

/// Ordered collection of lattice sites; the order is the matrix index map.
/// Sites are kept lexicographically sorted so lookup is a binary search.
class SiteSet {
  public:
    SiteSet() = default;

    static SiteSet from_box(const Box& box);
    static SiteSet from_tilted(const TiltedRegion& region);
    /// 1d path x0, x0+1, ..., x0+n-1 (any length, unlike odd-side boxes).
    static SiteSet path(int n, int x0 = 0);
    static SiteSet from_sites(int dim, std::vector<Site> sites);

    int dim() const { return dim_; }
    size_t size() const { return sites_.size(); }
    const std::vector<Site>& sites() const { return sites_; }
    const Site& operator[](size_t i) const { return sites_[i]; }

    std::optional<size_t> index_of(const Site& s) const;
    bool contains(const Site& s) const { return index_of(s).has_value(); }

    /// Indices of the l1-neighbors of sites_[i] that lie in the set.
    std::vector<size_t> neighbors(size_t i) const;

    bool operator==(const SiteSet& other) const = default;

  private:
    int dim_ = 1;
    std::vector<Site> sites_;
};

/// Realized potential over a site set: frozen sites carry pinned values,
/// free sites are drawn i.i.d. from the law. The draw at a site depends only
/// on (seed, site index), so refreezing or flipping elsewhere never shifts it.
class DisorderField {
  public:
    DisorderField(SiteLaw law, SiteSet sites, double coupling, uint64_t seed,
                  const std::map<Site, double>& frozen_assignment = {});

    const SiteLaw& law() const { return law_; }
    const SiteSet& site_set() const { return set_; }
    double coupling() const { return coupling_; }
    uint64_t seed() const { return seed_; }

    size_t size() const { return values_.size(); }
    double value(size_t i) const { return values_[i]; }
    double value_at(const Site& s) const;
    const std::vector<double>& values() const { return values_; }

    bool is_frozen(size_t i) const { return frozen_[i] != 0; }
    bool is_frozen_at(const Site& s) const;
    std::vector<size_t> free_indices() const;
    size_t frozen_count() const;

    /// Copy with the Bernoulli value at free site x toggled 0 <-> 1.
    DisorderField flipped(const Site& x) const;
    /// Copy with the value at free site x replaced (must stay in support).
    DisorderField with_value(const Site& x, double v) const;

  private:
    SiteLaw law_;
    SiteSet set_;
    double coupling_ = 1.0;
    uint64_t seed_ = 0;
    std::vector<double> values_;
    std::vector<char> frozen_;
};

}  // namespace andlab
