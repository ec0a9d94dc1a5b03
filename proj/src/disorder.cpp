#include "andlab/disorder.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "andlab/rng.hpp"

namespace andlab {

SiteLaw SiteLaw::bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("SiteLaw: bernoulli p must lie in (0, 1)");
    return SiteLaw{LawKind::Bernoulli, p};
}

SiteLaw SiteLaw::holder(double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw std::invalid_argument("SiteLaw: holder alpha must lie in (0, 1]");
    return SiteLaw{LawKind::HolderPower, alpha};
}

SiteLaw SiteLaw::uniform() { return SiteLaw{LawKind::Uniform, 0.0}; }

namespace {

double parse_param(const std::string& text, const std::string& prefix, const std::string& what) {
    std::string rest = text.substr(prefix.size());
    size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(rest, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("SiteLaw: cannot parse " + what + " in '" + text + "'");
    }
    if (used != rest.size())
        throw std::invalid_argument("SiteLaw: trailing characters in '" + text + "'");
    return v;
}

}  // namespace

SiteLaw SiteLaw::parse(const std::string& text) {
    if (text == "uniform") return uniform();
    if (text.rfind("bernoulli:p=", 0) == 0)
        return bernoulli(parse_param(text, "bernoulli:p=", "p"));
    if (text.rfind("holder:alpha=", 0) == 0)
        return holder(parse_param(text, "holder:alpha=", "alpha"));
    throw std::invalid_argument(
        "SiteLaw: expected 'bernoulli:p=<v>', 'holder:alpha=<v>', or 'uniform', got '" + text +
        "'");
}

std::string SiteLaw::to_string() const {
    switch (kind) {
        case LawKind::Bernoulli: return "bernoulli:p=" + fmt_double(param);
        case LawKind::HolderPower: return "holder:alpha=" + fmt_double(param);
        case LawKind::Uniform: return "uniform";
    }
    throw std::logic_error("SiteLaw: unknown kind");
}

double SiteLaw::sample(double u) const {
    switch (kind) {
        case LawKind::Bernoulli: return u < param ? 1.0 : 0.0;
        case LawKind::HolderPower: return std::pow(u, 1.0 / param);
        case LawKind::Uniform: return u;
    }
    throw std::logic_error("SiteLaw: unknown kind");
}

bool SiteLaw::in_support(double v) const {
    if (kind == LawKind::Bernoulli) return v == 0.0 || v == 1.0;
    return v >= 0.0 && v <= 1.0;
}

double concentration(const SiteLaw& law, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("concentration: eps must be positive");
    switch (law.kind) {
        case LawKind::Bernoulli:
            return eps < 0.5 ? std::max(law.param, 1.0 - law.param) : 1.0;
        case LawKind::HolderPower:
            return std::min(1.0, std::pow(2.0 * eps, law.param));
        case LawKind::Uniform:
            return std::min(1.0, 2.0 * eps);
    }
    throw std::logic_error("concentration: unknown kind");
}

SiteSet SiteSet::from_box(const Box& box) {
    SiteSet s;
    s.dim_ = box.dim;
    s.sites_ = box.sites();
    return s;
}

SiteSet SiteSet::from_tilted(const TiltedRegion& region) {
    SiteSet s;
    s.dim_ = 2;
    s.sites_ = region.sites();
    if (s.sites_.empty()) throw std::invalid_argument("SiteSet: tilted region has no sites");
    return s;
}

SiteSet SiteSet::path(int n, int x0) {
    if (n < 1) throw std::invalid_argument("SiteSet: path length must be positive");
    SiteSet s;
    s.dim_ = 1;
    s.sites_.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) s.sites_.push_back(site(x0 + i));
    return s;
}

SiteSet SiteSet::from_sites(int dim, std::vector<Site> sites) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("SiteSet: dim must be 1, 2, or 3");
    if (sites.empty()) throw std::invalid_argument("SiteSet: site list must be nonempty");
    std::sort(sites.begin(), sites.end());
    if (std::adjacent_find(sites.begin(), sites.end()) != sites.end())
        throw std::invalid_argument("SiteSet: duplicate site");
    for (const Site& p : sites)
        for (int i = dim; i < 3; ++i)
            if (p[i] != 0)
                throw std::invalid_argument("SiteSet: site coordinate beyond dim must be zero");
    SiteSet s;
    s.dim_ = dim;
    s.sites_ = std::move(sites);
    return s;
}

std::optional<size_t> SiteSet::index_of(const Site& s) const {
    auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
    if (it == sites_.end() || *it != s) return std::nullopt;
    return static_cast<size_t>(it - sites_.begin());
}

std::vector<size_t> SiteSet::neighbors(size_t i) const {
    std::vector<size_t> out;
    for (int axis = 0; axis < dim_; ++axis)
        for (int step : {-1, 1}) {
            Site q = sites_[i];
            q[axis] += step;
            if (auto j = index_of(q)) out.push_back(*j);
        }
    return out;
}

DisorderField::DisorderField(SiteLaw law, SiteSet sites, double coupling, uint64_t seed,
                             const std::map<Site, double>& frozen_assignment)
    : law_(law), set_(std::move(sites)), coupling_(coupling), seed_(seed) {
    if (!(coupling >= 0.0) || !std::isfinite(coupling))
        throw std::invalid_argument("DisorderField: coupling must be a finite value >= 0");
    if (set_.size() == 0) throw std::invalid_argument("DisorderField: empty site set");
    values_.resize(set_.size());
    frozen_.assign(set_.size(), 0);
    for (const auto& [s, v] : frozen_assignment) {
        auto idx = set_.index_of(s);
        if (!idx) throw std::invalid_argument("DisorderField: frozen site outside the site set");
        if (!law_.in_support(v))
            throw std::invalid_argument("DisorderField: frozen value outside the law's support");
        frozen_[*idx] = 1;
        values_[*idx] = v;
    }
    for (size_t i = 0; i < set_.size(); ++i)
        if (!frozen_[i]) values_[i] = law_.sample(unit_draw(seed_, i));
}

double DisorderField::value_at(const Site& s) const {
    auto idx = set_.index_of(s);
    if (!idx) throw std::invalid_argument("DisorderField: site outside the site set");
    return values_[*idx];
}

bool DisorderField::is_frozen_at(const Site& s) const {
    auto idx = set_.index_of(s);
    if (!idx) throw std::invalid_argument("DisorderField: site outside the site set");
    return frozen_[*idx] != 0;
}

std::vector<size_t> DisorderField::free_indices() const {
    std::vector<size_t> out;
    for (size_t i = 0; i < frozen_.size(); ++i)
        if (!frozen_[i]) out.push_back(i);
    return out;
}

size_t DisorderField::frozen_count() const {
    return static_cast<size_t>(std::count(frozen_.begin(), frozen_.end(), 1));
}

DisorderField DisorderField::flipped(const Site& x) const {
    if (law_.kind != LawKind::Bernoulli)
        throw std::invalid_argument("DisorderField: flip requires a Bernoulli law");
    auto idx = set_.index_of(x);
    if (!idx) throw std::invalid_argument("DisorderField: flip site outside the site set");
    if (frozen_[*idx]) throw std::invalid_argument("DisorderField: cannot flip a frozen site");
    DisorderField out = *this;
    out.values_[*idx] = 1.0 - out.values_[*idx];
    return out;
}

DisorderField DisorderField::with_value(const Site& x, double v) const {
    auto idx = set_.index_of(x);
    if (!idx) throw std::invalid_argument("DisorderField: site outside the site set");
    if (frozen_[*idx])
        throw std::invalid_argument("DisorderField: cannot override a frozen site");
    if (!law_.in_support(v))
        throw std::invalid_argument("DisorderField: value outside the law's support");
    DisorderField out = *this;
    out.values_[*idx] = v;
    return out;
}

}  // namespace andlab
