#include "andlab/box_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "andlab/parallel.hpp"
#include "andlab/rng.hpp"

namespace andlab {

namespace {

int scale_length_of(const SiteSet& set) {
    int best = 1;
    for (int axis = 0; axis < set.dim(); ++axis) {
        int lo = set[0][axis], hi = set[0][axis];
        for (const Site& s : set.sites()) {
            lo = std::min(lo, s[axis]);
            hi = std::max(hi, s[axis]);
        }
        best = std::max(best, hi - lo + 1);
    }
    return best;
}

size_t source_index(const SiteSet& set) {
    double cx[3] = {0.0, 0.0, 0.0};
    for (const Site& s : set.sites())
        for (int a = 0; a < 3; ++a) cx[a] += s[a];
    for (int a = 0; a < 3; ++a) cx[a] /= static_cast<double>(set.size());
    size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < set.size(); ++i) {
        double d = 0.0;
        for (int a = 0; a < 3; ++a) {
            double diff = set[i][a] - cx[a];
            d += diff * diff;
        }
        // ties resolve to the lexicographically smallest site, which is the
        // first one visited in the canonical order
        if (d < best_d - 1e-12) {
            best_d = d;
            best = i;
        }
    }
    return best;
}

}  // namespace

ClassificationRecord classify_box(const FiniteVolumeOperator& op, const SpectralData& spectral,
                                  double E, double m, double zeta) {
    if (!(m > 0.0 && m < 1.0))
        throw std::invalid_argument("classify_box: m must lie in (0, 1)");
    if (!(zeta > 0.0 && zeta < 1.0))
        throw std::invalid_argument("classify_box: zeta must lie in (0, 1)");

    const SiteSet& set = op.field.site_set();
    ClassificationRecord rec;
    rec.energy = E;
    rec.m = m;
    rec.zeta = zeta;
    rec.scale_length = scale_length_of(set);
    rec.gap = spectral.gap(E);
    rec.boundary_green_max = std::numeric_limits<double>::quiet_NaN();

    const double L = rec.scale_length;
    rec.nonresonant = rec.gap >= std::exp(-std::pow(L, zeta));
    if (!rec.nonresonant) return rec;

    Eigen::VectorXd col = green_column(op, spectral, E, source_index(set));
    double bmax = 0.0;
    const size_t full_degree = 2 * static_cast<size_t>(set.dim());
    for (size_t i = 0; i < set.size(); ++i) {
        if (set.neighbors(i).size() == full_degree) continue;  // interior site
        bmax = std::max(bmax, std::abs(col[static_cast<Eigen::Index>(i)]));
    }
    rec.boundary_green_max = bmax;
    rec.good = bmax <= std::exp(-m * L);
    return rec;
}

ClassificationRecord classify_box(const FiniteVolumeOperator& op, double E, double m,
                                  double zeta) {
    return classify_box(op, spectrum(op), E, m, zeta);
}

WegnerEstimate wegner_mc(const SiteLaw& law, const Box& box, double coupling, const Interval& I,
                         int realizations, uint64_t master_seed, int workers) {
    if (realizations < 100)
        throw std::invalid_argument("wegner_mc: needs at least 100 realizations");
    SiteSet set = SiteSet::from_box(box);

    WegnerEstimate est;
    est.law = law;
    est.side = box.side;
    est.volume = box.volume();
    est.coupling = coupling;
    est.window = I;
    est.realizations = realizations;
    est.bound = static_cast<double>(est.volume) * concentration(law, I.half_width());
    est.counts.assign(static_cast<size_t>(realizations), 0);

    parallel_for(static_cast<size_t>(realizations), workers, [&](size_t i) {
        DisorderField field(law, set, coupling, child_seed(master_seed, i));
        Eigen::VectorXd evs = eigenvalues_only(assemble(field));
        int c = 0;
        for (Eigen::Index j = 0; j < evs.size(); ++j)
            if (I.contains(evs[j])) ++c;
        est.counts[i] = c;
    });

    double sum = 0.0;
    for (int c : est.counts) sum += c;
    est.mean = sum / realizations;
    double ss = 0.0;
    for (int c : est.counts) ss += (c - est.mean) * (c - est.mean);
    est.std_error = realizations > 1 ? std::sqrt(ss / (realizations - 1)) /
                                           std::sqrt(static_cast<double>(realizations))
                                     : 0.0;
    est.bound_violated = est.mean > est.bound + 3.0 * est.std_error;
    return est;
}

ScalingFit wegner_scaling_fit(const std::vector<WegnerEstimate>& estimates) {
    if (estimates.size() < 3)
        throw std::invalid_argument("wegner_scaling_fit: needs at least 3 window widths");
    const WegnerEstimate& ref = estimates.front();
    double center0 = ref.window.center();
    std::vector<double> widths;
    for (const WegnerEstimate& e : estimates) {
        if (!(e.law == ref.law) || e.volume != ref.volume || e.side != ref.side ||
            e.coupling != ref.coupling)
            throw std::invalid_argument(
                "wegner_scaling_fit: estimates must share law, box, and coupling");
        if (std::abs(e.window.center() - center0) > 1e-9 * std::max(1.0, std::abs(center0)))
            throw std::invalid_argument("wegner_scaling_fit: estimates must share the center");
        widths.push_back(e.window.width());
    }
    std::sort(widths.begin(), widths.end());
    if (widths.front() <= 0.0)
        throw std::invalid_argument("wegner_scaling_fit: window widths must be positive");
    for (size_t i = 1; i < widths.size(); ++i)
        if (widths[i] - widths[i - 1] <= 1e-12 * widths[i])
            throw std::invalid_argument("wegner_scaling_fit: window widths must be distinct");
    if (widths.back() / widths.front() < 10.0 * (1.0 - 1e-9))
        throw std::invalid_argument(
            "wegner_scaling_fit: widths must span at least one decade");

    ScalingFit fit;
    double S = 0, Sx = 0, Sy = 0, Sxx = 0, Sxy = 0;
    int used = 0;
    for (const WegnerEstimate& e : estimates) {
        if (e.mean <= 0.0) {
            fit.lower_bound_only = true;
            continue;
        }
        double x = std::log(e.window.width());
        double y = std::log(e.mean);
        double sigma = std::max(e.std_error / e.mean, 1e-12);
        double w = 1.0 / (sigma * sigma);
        S += w;
        Sx += w * x;
        Sy += w * y;
        Sxx += w * x * x;
        Sxy += w * x * y;
        ++used;
    }
    if (used < 2) {
        fit.alpha = std::numeric_limits<double>::quiet_NaN();
        fit.std_error = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    double delta = S * Sxx - Sx * Sx;
    fit.alpha = (S * Sxy - Sx * Sy) / delta;
    fit.std_error = std::sqrt(S / delta);
    return fit;
}

}  // namespace andlab
