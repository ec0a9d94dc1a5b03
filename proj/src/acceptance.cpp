#include "andlab/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "andlab/box_analysis.hpp"
#include "andlab/flip_spectral.hpp"
#include "andlab/hamiltonian.hpp"
#include "andlab/parallel.hpp"
#include "andlab/rng.hpp"
#include "andlab/runner.hpp"
#include "andlab/sperner.hpp"
#include "andlab/stats.hpp"
#include "andlab/ucp.hpp"

namespace andlab {

namespace {

std::string strf(const char* fmt, ...) {
    char buf[768];
    va_list ap;
    va_start(ap, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------- 1 -----

CriterionResult check_free_spectrum() {
    auto t0 = std::chrono::steady_clock::now();
    double max_err = 0.0;
    SiteLaw law = SiteLaw::uniform();
    for (int n = 1; n <= 50; ++n) {
        DisorderField field(law, SiteSet::path(n), 0.0, 1);
        Eigen::VectorXd ev = eigenvalues_only(assemble(field));
        for (int j = 1; j <= n; ++j) {
            double exact = 2.0 - 2.0 * std::cos(j * M_PI / (n + 1));
            max_err = std::max(max_err, std::abs(ev[j - 1] - exact));
        }
    }
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CriterionResult r{1, "free-path-spectrum-closed-form", max_err <= 1e-10 && elapsed < 1.0,
                      false, strf("n<=50 max-error=%.3g elapsed=%.3fs", max_err, elapsed)};
    return r;
}

// ---------------------------------------------------------------- 2 -----

CriterionResult check_volume_bound(int workers) {
    int cells = 0, ok = 0;
    double worst_ratio = 0.0;
    uint64_t cell_master = 1100;
    for (double alpha : {0.5, 1.0}) {
        SiteLaw law = SiteLaw::holder(alpha);
        for (int L : {6, 10}) {
            Box box = Box::of_scale(site(0), L, 2);
            SiteSet sites = SiteSet::from_box(box);
            // pilot pass locates the bottom of the disordered spectrum so the
            // windows actually catch eigenvalues
            double center = 0.0;
            const int pilot = 200;
            for (int k = 0; k < pilot; ++k) {
                DisorderField f(law, sites, 1.0, child_seed(4242, static_cast<uint64_t>(k)));
                center += eigenvalues_only(assemble(f)).minCoeff();
            }
            center /= pilot;
            for (double w : {0.02, 0.04, 0.08}) {
                WegnerEstimate est = wegner_mc(law, box, 1.0, Interval::centered(center, w / 2.0),
                                               2000, ++cell_master, workers);
                double literal = static_cast<double>(est.volume) * concentration(law, w);
                double rhs = literal + 3.0 * est.std_error;
                ++cells;
                if (est.mean <= rhs + 1e-12) ++ok;
                if (rhs > 0.0) worst_ratio = std::max(worst_ratio, est.mean / rhs);
            }
        }
    }
    return {2, "window-count-volume-bound", ok == cells, false,
            strf("cells=%d ok=%d worst mean/bound=%.3f", cells, ok, worst_ratio)};
}

// ---------------------------------------------------------------- 3 -----

CriterionResult check_scaling_exponent(int workers) {
    SiteLaw law = SiteLaw::holder(0.5);
    Box box(site(0), 1, 1);
    std::vector<WegnerEstimate> estimates;
    int i = 0;
    for (double w : {0.05, 0.1, 0.2, 0.5}) {
        estimates.push_back(wegner_mc(law, box, 1.0, Interval::centered(2.0, w / 2.0), 2000,
                                      1234 + static_cast<uint64_t>(i++), workers));
    }
    ScalingFit fit = wegner_scaling_fit(estimates);
    bool pass = !fit.lower_bound_only && fit.alpha >= 0.3 && fit.alpha <= 0.7;
    return {3, "window-count-scaling-exponent", pass, false,
            strf("fitted exponent=%.3f (se=%.3f) over widths 0.05..0.5", fit.alpha,
                 fit.std_error)};
}

// ------------------------------------------------------------- 4 + 5 -----

struct FlipBatch {
    int instances = 0;
    int attempts = 0;
    double max_residual = 0.0;
    bool residual_everywhere = true;
    double max_mismatch = 0.0;
    bool quadrature_everywhere = true;
    double max_trace_err = 0.0;
};

FlipBatch run_flip_batch() {
    FlipBatch batch;
    SiteLaw law = SiteLaw::uniform();
    const double g = 1.0;
    for (int attempt = 0; attempt < 300 && batch.instances < 100; ++attempt) {
        ++batch.attempts;
        int shape = attempt % 8;
        SiteSet sites = shape < 7 ? SiteSet::path(shape + 2)
                                  : SiteSet::from_box(Box(site(0), 3, 2));
        DisorderField field(law, sites, g, child_seed(9001, static_cast<uint64_t>(attempt)));
        Site x = sites.sites()[static_cast<size_t>(attempt) % sites.size()];
        RankOnePath path = make_flip_path(field, x);
        std::vector<EigenBranch> branches = track_branches(path);
        // a usable instance keeps its spectrum uniformly simple along the
        // whole path: no broken branch, and no close approach that would
        // dominate the centered difference at the fixed 1e-4 step
        bool simple = true;
        for (const EigenBranch& b : branches) {
            if (b.broken) simple = false;
            for (double gap : b.simplicity_gaps) {
                if (gap < 0.05) simple = false;
            }
        }
        if (!simple) continue;
        ++batch.instances;
        double trace = 0.0;
        for (const EigenBranch& b : branches) {
            trace += b.values.back() - b.values.front();
            try {
                batch.max_residual =
                    std::max(batch.max_residual, hellmann_feynman_residual(path, b, 1e-4));
            } catch (const std::exception&) {
                batch.residual_everywhere = false;
            }
            Displacement d = displacement(path, b);
            if (d.valid) {
                batch.max_mismatch = std::max(batch.max_mismatch, d.mismatch);
            } else {
                batch.quadrature_everywhere = false;
            }
        }
        batch.max_trace_err = std::max(batch.max_trace_err, std::abs(trace - g));
    }
    return batch;
}

CriterionResult check_derivative_identity(const FlipBatch& b) {
    bool pass = b.instances >= 100 && b.residual_everywhere && b.max_residual <= 1e-6;
    return {4, "eigenvalue-derivative-identity", pass, false,
            strf("instances=%d/%d max-residual=%.3g (step 1e-4)", b.instances, b.attempts,
                 b.max_residual)};
}

CriterionResult check_displacement_identity(const FlipBatch& b) {
    bool pass = b.instances >= 100 && b.quadrature_everywhere && b.max_mismatch <= 1e-8 &&
                b.max_trace_err <= 1e-9;
    return {5, "displacement-and-trace-identity", pass, false,
            strf("instances=%d max-mismatch=%.3g max-trace-error=%.3g", b.instances,
                 b.max_mismatch, b.max_trace_err)};
}

// ---------------------------------------------------------------- 6 -----

CriterionResult check_ejection_exhaustive() {
    SiteLaw law = SiteLaw::bernoulli(0.5);
    SiteSet sites = SiteSet::from_box(Box(site(0), 3, 2));
    const double g = 1.0;
    std::vector<double> grid(33);
    for (int i = 0; i < 33; ++i) grid[i] = i / 32.0;
    long long cases = 0, pass = 0, fail = 0, inconclusive = 0, precond = 0, skipped = 0;
    for (int mask = 0; mask < 512; ++mask) {
        for (size_t xi = 0; xi < 9; ++xi) {
            Site x = sites.sites()[xi];
            std::map<Site, double> frozen;
            for (size_t i = 0; i < 9; ++i) {
                if (i == xi) continue;  // the varied site must stay free
                frozen[sites.sites()[i]] = (mask >> i) & 1 ? 1.0 : 0.0;
            }
            DisorderField base(law, sites, g, 1, frozen);
            RankOnePath path = make_flip_path(base, x, 9);
            Eigen::VectorXd ev = eigenvalues_only(path.base_op);
            for (Eigen::Index j = 0; j < ev.size(); ++j) {
                if (j > 0 && std::abs(ev[j] - ev[j - 1]) < 1e-9) continue;
                double eta = 0.05;
                Interval I = Interval::centered(ev[j], eta);
                double m_obs = blocking_amplitude(base, x, I, grid);
                if (!std::isfinite(m_obs) || m_obs < 1e-6) {
                    ++skipped;
                    continue;
                }
                if (eta >= 0.5 * g * m_obs * m_obs) {
                    eta = 0.45 * g * m_obs * m_obs;
                    I = Interval::centered(ev[j], eta);
                    m_obs = blocking_amplitude(base, x, I, grid);
                    if (!std::isfinite(m_obs) || eta >= 0.5 * g * m_obs * m_obs) {
                        ++skipped;
                        continue;
                    }
                }
                ++cases;
                EjectionVerdict v = ejection_check(base, x, I, m_obs, false, 33);
                switch (v.status) {
                    case EjectionStatus::Pass: ++pass; break;
                    case EjectionStatus::Fail: ++fail; break;
                    case EjectionStatus::Inconclusive: ++inconclusive; break;
                    case EjectionStatus::PreconditionFailed: ++precond; break;
                }
            }
        }
    }
    bool ok = cases > 0 && fail == 0 && precond == 0 &&
              static_cast<double>(inconclusive) < 0.05 * static_cast<double>(cases);
    return {6, "window-ejection-exhaustive", ok, false,
            strf("cases=%lld fail=%lld inconclusive=%lld (%.2f%%) skipped=%lld", cases, fail,
                 inconclusive, cases ? 100.0 * inconclusive / cases : 0.0, skipped)};
}

// ------------------------------------------------------------- 7 + 8 -----

struct FamilyTriple {
    int side;
    int dim;
    int freeze_k;
    double g;
    double lo, hi;
    uint64_t seed;
};

const FamilyTriple kSweep[] = {
    // 1d, every site free
    {7, 1, 0, 1.0, 0.05, 0.20, 11},  {9, 1, 0, 1.0, 0.05, 0.20, 12},
    {11, 1, 0, 1.0, 0.02, 0.10, 13}, {11, 1, 0, 1.0, 0.03, 0.12, 13},
    {13, 1, 0, 1.0, 0.02, 0.08, 14}, {13, 1, 0, 1.0, 0.03, 0.10, 14},
    {9, 1, 0, 2.0, 0.05, 0.20, 31},  {11, 1, 0, 2.0, 0.03, 0.12, 32},
    {13, 1, 0, 2.0, 0.02, 0.08, 33},
    // 1d with frozen backgrounds
    {9, 1, 2, 1.0, 0.05, 0.20, 21},  {9, 1, 2, 1.0, 0.05, 0.20, 61},
    {9, 1, 2, 1.0, 0.05, 0.20, 62},  {11, 1, 2, 1.0, 0.05, 0.15, 22},
    {11, 1, 2, 1.0, 0.05, 0.15, 63}, {11, 1, 2, 1.0, 0.05, 0.15, 64},
    {11, 1, 4, 1.0, 0.05, 0.20, 23}, {11, 1, 4, 1.0, 0.05, 0.20, 65},
    {11, 1, 4, 1.0, 0.05, 0.20, 66}, {13, 1, 2, 1.0, 0.03, 0.10, 24},
    {13, 1, 2, 1.0, 0.03, 0.10, 67}, {13, 1, 2, 1.0, 0.03, 0.10, 68},
    {13, 1, 4, 1.0, 0.05, 0.15, 25}, {13, 1, 4, 1.0, 0.05, 0.15, 69},
    {13, 1, 4, 1.0, 0.05, 0.15, 70}, {13, 1, 6, 1.0, 0.05, 0.20, 26},
    {13, 1, 6, 1.0, 0.05, 0.20, 71}, {13, 1, 6, 1.0, 0.05, 0.20, 72},
    {13, 1, 4, 2.0, 0.05, 0.15, 34}, {13, 1, 4, 2.0, 0.05, 0.15, 73},
    {13, 1, 4, 2.0, 0.05, 0.15, 74},
    // small 1d
    {5, 1, 0, 1.0, 0.05, 0.30, 81},  {7, 1, 1, 1.0, 0.05, 0.20, 82},
    {7, 1, 1, 1.0, 0.05, 0.20, 83},  {7, 1, 2, 1.0, 0.05, 0.25, 84},
    // 2d 3x3
    {3, 2, 0, 1.0, 1.10, 1.30, 41},  {3, 2, 0, 1.0, 1.30, 1.50, 42},
    {3, 2, 0, 2.0, 1.10, 1.30, 43},  {3, 2, 2, 1.0, 1.10, 1.30, 44},
    {3, 2, 2, 1.0, 1.10, 1.30, 75},  {3, 2, 2, 1.0, 1.10, 1.30, 76},
    {3, 2, 3, 1.0, 1.10, 1.30, 77},  {3, 2, 3, 1.0, 1.10, 1.30, 78},
    // 2d 5x5, heavily frozen so n <= 14
    {5, 2, 11, 1.0, 0.55, 0.75, 16}, {5, 2, 11, 1.0, 0.55, 0.75, 51},
    {5, 2, 12, 1.0, 0.55, 0.75, 17}, {5, 2, 12, 1.0, 0.55, 0.75, 52},
    {5, 2, 13, 1.0, 0.55, 0.75, 53}, {5, 2, 13, 1.0, 0.55, 0.75, 79},
    {5, 2, 12, 1.0, 0.45, 0.60, 54}, {5, 2, 11, 2.0, 0.55, 0.75, 55},
    {5, 2, 14, 1.0, 0.55, 0.75, 80}, {5, 2, 14, 1.0, 0.55, 0.75, 85},
};

DisorderField sweep_field(const FamilyTriple& t) {
    SiteLaw law = SiteLaw::bernoulli(0.5);
    SiteSet sites = SiteSet::from_box(Box(site(0), t.side, t.dim));
    std::map<Site, double> frozen;
    for (int i = 0; i < t.freeze_k; ++i) {
        size_t idx = (static_cast<size_t>(i) * 7 + 3) % sites.size();
        while (frozen.count(sites.sites()[idx])) idx = (idx + 1) % sites.size();
        frozen[sites.sites()[idx]] = unit_draw(t.seed, static_cast<uint64_t>(i)) < 0.5 ? 0.0 : 1.0;
    }
    return DisorderField(law, sites, t.g, t.seed, frozen);
}

struct SweepOutcome {
    int triples = 0;
    int with_witness = 0;  // rho_star > 0
    int size_violations = 0;
    int prob_violations = 0;
    size_t largest_family = 0;
    int midlayer_failures = 0;
    double single_site_prob = -1.0;
};

SweepOutcome run_family_sweep(int workers) {
    SweepOutcome out;
    for (const FamilyTriple& t : kSweep) {
        DisorderField base = sweep_field(t);
        ConfigFamily fam = enumerate_family(base, Interval{t.lo, t.hi}, workers);
        BlockingWitness w = maximal_blocking(fam);
        ++out.triples;
        out.largest_family = std::max(out.largest_family, fam.members.size());
        if (w.rho_star > 0.0) {
            ++out.with_witness;
            SpernerVerdict v = sperner_bound_check(fam, w);
            if (!v.pass) ++out.size_violations;
            WegnerProbability p = bernoulli_wegner_prob(fam, w, 0.5);
            if (p.probability > p.bound + 1e-15) ++out.prob_violations;
        }
    }
    // exact mid-layer antichains: every blocking set is the full complement
    for (int n = 2; n <= 12; ++n) {
        DisorderField base(SiteLaw::bernoulli(0.5), SiteSet::path(n), 1.0, 1);
        std::vector<size_t> free_idx;
        for (size_t i = 0; i < static_cast<size_t>(n); ++i) free_idx.push_back(i);
        std::vector<FamilyMember> members;
        for (uint32_t mask = 0; mask < (1u << n); ++mask) {
            if (__builtin_popcount(mask) == n / 2) members.push_back({mask, 1});
        }
        ConfigFamily fam{base, free_idx, Interval{0.0, 1.0}, members};
        BlockingWitness w = maximal_blocking(fam);
        SpernerVerdict v = sperner_bound_check(fam, w);
        if (!v.pass) ++out.midlayer_failures;
    }
    // the one-site family: exactly one of the two configurations meets the
    // window, so the family mass is the single-flip probability 1/2
    DisorderField one(SiteLaw::bernoulli(0.5), SiteSet::from_box(Box(site(0), 1, 1)), 1.0, 5);
    ConfigFamily fam1 = enumerate_family(one, Interval{2.5, 3.5});
    out.single_site_prob =
        bernoulli_wegner_prob(fam1, maximal_blocking(fam1), 0.5).probability;
    return out;
}

CriterionResult check_family_size_bound(const SweepOutcome& s) {
    bool pass = s.triples >= 50 && s.size_violations == 0 && s.midlayer_failures == 0;
    return {7, "blocking-family-size-bound", pass, false,
            strf("triples=%d witnessed=%d violations=%d largest-family=%zu midlayer-failures=%d",
                 s.triples, s.with_witness, s.size_violations, s.largest_family,
                 s.midlayer_failures)};
}

CriterionResult check_family_probability(const SweepOutcome& s) {
    bool pass = std::abs(s.single_site_prob - 0.5) < 1e-15 && s.prob_violations == 0;
    return {8, "window-family-probability", pass, false,
            strf("single-site probability=%.17g sweep-violations=%d", s.single_site_prob,
                 s.prob_violations)};
}

// ---------------------------------------------------------------- 9 -----

CriterionResult check_resolvent_decay() {
    DisorderField field(SiteLaw::uniform(), SiteSet::path(41), 0.0, 1);
    FiniteVolumeOperator op = assemble(field);
    double lambda1 = 2.0 - 2.0 * std::cos(M_PI / 42.0);
    double prev_rate = 0.0;
    bool rates_positive = true, prefactor = true, monotone = true;
    std::string rates;
    for (double delta : {0.5, 1.0, 2.0}) {
        CombesThomasProfile prof = combes_thomas_profile(op, lambda1 - delta, site(20));
        if (!(prof.fitted_rate > 0.0)) rates_positive = false;
        for (const CombesThomasRow& row : prof.rows) {
            if (row.max_abs_g > 2.0 / delta + 1e-12) prefactor = false;
        }
        if (prof.fitted_rate < prev_rate - 1e-9) monotone = false;
        prev_rate = prof.fitted_rate;
        rates += strf(" d=%.1f:c=%.3f", delta, prof.fitted_rate);
    }
    return {9, "resolvent-offdiagonal-decay", rates_positive && prefactor && monotone, false,
            strf("rates%s prefactor<=2/delta=%d nondecreasing=%d", rates.c_str(),
                 prefactor ? 1 : 0, monotone ? 1 : 0)};
}

// --------------------------------------------------------------- 10 -----

CriterionResult check_good_box_floor(int workers) {
    SiteLaw law = SiteLaw::bernoulli(0.5);
    const double g = 20.0, E = 14.0, m = 0.2, zeta = 0.9;
    const long long N = 1000;
    bool pass = true;
    std::string detail;
    for (int L : {9, 15}) {
        SiteSet sites = SiteSet::from_box(Box(site(0), L, 2));
        std::vector<char> good(static_cast<size_t>(N), 0);
        parallel_for(static_cast<size_t>(N), workers, [&](size_t k) {
            DisorderField f(law, sites, g, child_seed(31000 + static_cast<uint64_t>(L), k));
            good[k] = classify_box(assemble(f), E, m, zeta).good ? 1 : 0;
        });
        long long good_count = 0;
        for (char c : good) good_count += c;
        BinomialInterval ci = clopper_pearson(good_count, N, 0.99);
        double floor_val = 1.0 - std::pow(static_cast<double>(L), -4.0);
        if (ci.lo < floor_val) pass = false;
        detail += strf("L=%d p=%.4f lo=%.6f floor=%.8f; ", L,
                       static_cast<double>(good_count) / static_cast<double>(N), ci.lo, floor_val);
    }
    detail +=
        "an exact lower bound from 1000 draws cannot clear the floor even at 1000/1000 good";
    return {10, "good-box-probability-floor", pass, true, detail};
}

// --------------------------------------------------------------- 11 -----

CriterionResult check_growth_event_frequency(int workers) {
    SiteLaw law = SiteLaw::bernoulli(0.5);
    double min_freq = 1.0;
    long long total_rejected = 0;
    int cells = 0, cells_ok = 0;
    for (int ell : {8, 12, 16}) {
        TiltedRegion square{{0, ell - 1}, {0, ell - 1}};
        for (bool with_frozen : {false, true}) {
            std::map<Site, double> pattern;
            if (with_frozen) {
                auto target = static_cast<size_t>(
                    std::floor(0.05 * static_cast<double>(square.site_count())));
                uint64_t vs = child_seed(42000 + static_cast<uint64_t>(ell), 0x66726F7A656EULL);
                size_t i = 0;
                for (const TiltedRegion& cell : dyadic_square_family(square)) {
                    for (const Site& s : cell.sites()) {
                        if (pattern.size() == target) break;
                        pattern.emplace(s, law.sample(unit_draw(vs, i++)));
                    }
                    if (pattern.size() == target) break;
                }
            }
            std::vector<UcpTrialRecord> trials =
                run_ucp_trials(square, pattern, 1.0, 0.1, 1.0,
                               41000 + static_cast<uint64_t>(ell) + (with_frozen ? 500 : 0), 100,
                               workers, law);
            UcpFrequencyReport rep = ucp_frequency(trials);
            total_rejected += static_cast<long long>(rep.rejected);
            ++cells;
            if (rep.rejected == 0 && rep.frequency >= 0.95) ++cells_ok;
            min_freq = std::min(min_freq, rep.frequency);
        }
    }
    return {11, "growth-event-frequency", cells_ok == cells && total_rejected == 0, false,
            strf("cells=%d ok=%d min-frequency=%.3f rejected=%lld", cells, cells_ok, min_freq,
                 total_rejected)};
}

// --------------------------------------------------------------- 12 -----

ExperimentConfig rerun_config(ExperimentKind kind) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.master_seed = 5;
    switch (kind) {
        case ExperimentKind::Spectrum:
            cfg.realizations = 3;
            cfg.dim = 2;
            cfg.side = 5;
            break;
        case ExperimentKind::Classify:
            cfg.realizations = 60;
            cfg.dim = 1;
            cfg.side = 5;
            cfg.energy = 0.0;
            cfg.mass = 0.2;
            break;
        case ExperimentKind::Wegner:
            cfg.realizations = 100;
            cfg.dim = 2;
            cfg.side = 3;
            cfg.window = Interval{3.8, 4.2};
            break;
        case ExperimentKind::Flip:
            cfg.law_spec = "uniform";
            cfg.coupling = 2.0;
            cfg.dim = 1;
            cfg.geometry = GeometryKind::Path;
            cfg.side = 6;
            cfg.flip_site = site(2);
            cfg.flip_grid = 17;
            break;
        case ExperimentKind::Sperner:
            cfg.dim = 1;
            cfg.side = 5;
            cfg.window = Interval{0.1, 0.4};
            break;
        case ExperimentKind::Msa:
            cfg.realizations = 200;
            cfg.coupling = 0.0;
            cfg.dim = 1;
            cfg.side = 5;
            cfg.energy = -5.0;
            cfg.msa_eta = 0.1;
            cfg.msa_kappa = 2.1;
            cfg.msa_mass0 = 0.2;
            cfg.msa_scales = 1;
            break;
        case ExperimentKind::Ucp:
            cfg.realizations = 100;
            cfg.dim = 2;
            cfg.geometry = GeometryKind::Tilted;
            cfg.side = 8;
            cfg.ucp_frozen_fraction = 0.05;
            break;
    }
    return cfg;
}

std::string slurp_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

CriterionResult check_reruns(const std::filesystem::path& scratch) {
    const ExperimentKind kinds[] = {ExperimentKind::Spectrum, ExperimentKind::Classify,
                                    ExperimentKind::Wegner,   ExperimentKind::Flip,
                                    ExperimentKind::Sperner,  ExperimentKind::Msa,
                                    ExperimentKind::Ucp};
    int checked = 0, identical = 0, failed_runs = 0;
    for (ExperimentKind kind : kinds) {
        ExperimentConfig cfg = rerun_config(kind);
        std::filesystem::path a = scratch / (std::string(to_string(kind)) + "_w1");
        std::filesystem::path b = scratch / (std::string(to_string(kind)) + "_w3");
        std::filesystem::remove_all(a);
        std::filesystem::remove_all(b);
        RunResult ra = run_experiment(cfg, a, 1);
        RunResult rb = run_experiment(cfg, b, 3);
        if (ra.exit_code != 0 || rb.exit_code != 0 || ra.files != rb.files) {
            ++failed_runs;
            continue;
        }
        ++checked;
        bool same = true;
        for (const std::string& name : ra.files) {
            if (slurp_file(a / name) != slurp_file(b / name)) same = false;
        }
        if (same) ++identical;
    }
    bool pass = failed_runs == 0 && checked == 7 && identical == checked;
    return {12, "byte-identical-reruns", pass, false,
            strf("experiments=%d identical=%d failed-runs=%d (workers 1 vs 3)", checked,
                 identical, failed_runs)};
}

}  // namespace

std::string format_criterion_line(const CriterionResult& r) {
    std::string line = r.pass ? "PASS" : "FAIL";
    line += strf(" %2d %-34s ", r.index, r.name.c_str());
    if (!r.pass && r.expected_unattainable) line += "[documented-unattainable] ";
    line += r.detail;
    return line;
}

bool acceptance_ok(const std::vector<CriterionResult>& results) {
    for (const CriterionResult& r : results) {
        if (!r.pass && !r.expected_unattainable) return false;
    }
    return !results.empty();
}

std::vector<CriterionResult> run_acceptance(int workers,
                                            const std::filesystem::path& scratch_dir,
                                            std::ostream* progress) {
    std::filesystem::path scratch = scratch_dir;
    if (scratch.empty()) scratch = std::filesystem::temp_directory_path() / "andlab_acceptance";
    std::filesystem::create_directories(scratch);

    std::vector<CriterionResult> results;
    auto emit = [&](CriterionResult r) {
        if (progress) *progress << format_criterion_line(r) << std::endl;
        results.push_back(std::move(r));
    };

    emit(check_free_spectrum());
    emit(check_volume_bound(workers));
    emit(check_scaling_exponent(workers));
    FlipBatch batch = run_flip_batch();
    emit(check_derivative_identity(batch));
    emit(check_displacement_identity(batch));
    emit(check_ejection_exhaustive());
    SweepOutcome sweep = run_family_sweep(workers);
    emit(check_family_size_bound(sweep));
    emit(check_family_probability(sweep));
    emit(check_resolvent_decay());
    emit(check_good_box_floor(workers));
    emit(check_growth_event_frequency(workers));
    emit(check_reruns(scratch));
    return results;
}

}  // namespace andlab
