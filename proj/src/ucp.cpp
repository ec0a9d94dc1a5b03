#include "andlab/ucp.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "andlab/common.hpp"
#include "andlab/hamiltonian.hpp"
#include "andlab/parallel.hpp"
#include "andlab/rng.hpp"

namespace andlab {

namespace {

void validate_trial_inputs(const TiltedRegion& square, const std::map<Site, double>& pattern,
                           double epsilon, double alpha) {
    if (!square.is_square()) throw std::invalid_argument("run_ucp_trial: region is not a square");
    if (square.side() < 8) throw std::invalid_argument("run_ucp_trial: side must be >= 8");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw std::invalid_argument("run_ucp_trial: epsilon must be positive");
    if (!(alpha > 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("run_ucp_trial: alpha must be positive");
    for (const auto& [s, v] : pattern) {
        (void)v;
        if (!square.contains(s))
            throw std::invalid_argument("run_ucp_trial: frozen site outside the square");
    }
}

}  // namespace

UcpTrialRecord run_ucp_trial(const TiltedRegion& square, const std::map<Site, double>& pattern,
                             double g, double epsilon, double alpha, std::uint64_t seed,
                             const SiteLaw& law) {
    validate_trial_inputs(square, pattern, epsilon, alpha);

    UcpTrialRecord rec;
    rec.square = square;
    rec.ell = square.side();
    rec.frozen_count = pattern.size();
    rec.epsilon = epsilon;
    rec.alpha = alpha;
    rec.coupling = g;
    rec.seed = seed;

    std::set<Site> frozen_sites;
    for (const auto& [s, v] : pattern) {
        (void)v;
        frozen_sites.insert(s);
    }
    if (!delta_regularity(frozen_sites, square, epsilon, dyadic_square_family(square))) {
        rec.rejected = true;
        return rec;
    }

    DisorderField field(law, SiteSet::from_tilted(square), g, seed, pattern);
    auto op = assemble(field);
    auto spec = spectrum(op);

    const auto& sites = field.site_set();
    std::vector<size_t> free_region;
    free_region.reserve(sites.size());
    for (size_t i = 0; i < sites.size(); ++i)
        if (!field.is_frozen(i)) free_region.push_back(i);

    TiltedRegion half = square.half_square();
    std::vector<size_t> inner;
    for (size_t i = 0; i < sites.size(); ++i)
        if (half.contains(sites[i])) inner.push_back(i);

    const double l = static_cast<double>(rec.ell);
    // Allowed exceptional share of the free region in the normalization
    // clause; with sup-normalization over the whole free region the realized
    // fraction at amplitude <= 1 is 1, which always meets it.
    const double needed_fraction = 1.0 - epsilon / std::sqrt(l * std::log(l));
    const double log_threshold = alpha * l * std::log(l);

    rec.total = static_cast<size_t>(spec.eigenvalues.size());
    for (Eigen::Index j = 0; j < spec.eigenvalues.size(); ++j) {
        double scale = 0.0;
        for (size_t i : free_region) scale = std::max(scale, std::abs(spec.eigenvectors(i, j)));
        // An eigenvector vanishing identically on the free region admits no
        // normalization, so the clause never holds for it.
        if (scale <= 0.0) continue;

        size_t at_most_one = 0;
        for (size_t i : free_region)
            if (std::abs(spec.eigenvectors(i, j)) <= scale * (1.0 + 1e-12)) ++at_most_one;
        double fraction = static_cast<double>(at_most_one) / static_cast<double>(free_region.size());
        if (fraction + 1e-12 < needed_fraction) continue;

        double peak = 0.0;
        for (size_t i : inner) peak = std::max(peak, std::abs(spec.eigenvectors(i, j)) / scale);
        double statistic = peak > 0.0 ? std::exp(std::log(peak) - log_threshold) : 0.0;

        ++rec.tested;
        if (statistic > rec.growth_statistic || rec.worst_eigenpair < 0) {
            rec.growth_statistic = statistic;
            rec.worst_eigenpair = static_cast<int>(j);
            rec.mass_fraction = fraction;
        }
    }
    rec.event = rec.growth_statistic <= 1.0;
    return rec;
}

std::vector<UcpTrialRecord> run_ucp_trials(const TiltedRegion& square,
                                           const std::map<Site, double>& pattern, double g,
                                           double epsilon, double alpha,
                                           std::uint64_t master_seed, size_t n_trials,
                                           int workers, const SiteLaw& law) {
    validate_trial_inputs(square, pattern, epsilon, alpha);
    std::vector<UcpTrialRecord> out(n_trials);
    parallel_for(n_trials, workers, [&](size_t k) {
        out[k] = run_ucp_trial(square, pattern, g, epsilon, alpha, child_seed(master_seed, k), law);
    });
    return out;
}

UcpFrequencyReport ucp_frequency(const std::vector<UcpTrialRecord>& trials) {
    if (trials.empty()) throw std::invalid_argument("ucp_frequency: empty trial list");

    const auto& first = trials.front();
    UcpFrequencyReport rep;
    rep.ell = first.ell;
    rep.epsilon = first.epsilon;
    rep.alpha = first.alpha;
    for (const auto& t : trials) {
        if (t.ell != first.ell || t.epsilon != first.epsilon || t.alpha != first.alpha ||
            t.frozen_count != first.frozen_count || t.coupling != first.coupling)
            throw std::invalid_argument("ucp_frequency: trials mix parameter points");
        if (t.rejected) {
            ++rep.rejected;
            continue;
        }
        ++rep.accepted;
        if (t.event) ++rep.events;
    }
    if (rep.accepted < 100)
        throw std::invalid_argument("ucp_frequency: needs at least 100 accepted trials");

    rep.frequency = static_cast<double>(rep.events) / static_cast<double>(rep.accepted);
    rep.ci = clopper_pearson(static_cast<long long>(rep.events),
                             static_cast<long long>(rep.accepted), 0.95);
    rep.reference_rate =
        1.0 - std::exp(-rep.epsilon * std::pow(static_cast<double>(rep.ell), 0.25));
    rep.pass = rep.frequency >= 0.95;
    return rep;
}

void write_trials_jsonl(std::ostream& out, const std::vector<UcpTrialRecord>& trials) {
    for (const auto& t : trials) {
        out << "{\"schema\":" << kSchemaVersion << ",\"ell\":" << t.ell
            << ",\"epsilon\":" << fmt_double(t.epsilon)
            << ",\"alpha\":" << fmt_double(t.alpha) << ",\"coupling\":" << fmt_double(t.coupling)
            << ",\"seed\":" << t.seed << ",\"frozen\":" << t.frozen_count
            << ",\"rejected\":" << (t.rejected ? "true" : "false");
        if (!t.rejected) {
            out << ",\"tested\":" << t.tested << ",\"total\":" << t.total
                << ",\"worst_eigenpair\":" << t.worst_eigenpair
                << ",\"mass_fraction\":" << fmt_double(t.mass_fraction)
                << ",\"growth_statistic\":" << fmt_double(t.growth_statistic)
                << ",\"event\":" << (t.event ? "true" : "false");
        }
        out << "}\n";
    }
}

}  // namespace andlab
