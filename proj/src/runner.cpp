#include "andlab/runner.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "andlab/box_analysis.hpp"
#include "andlab/flip_spectral.hpp"
#include "andlab/hamiltonian.hpp"
#include "andlab/msa.hpp"
#include "andlab/parallel.hpp"
#include "andlab/rng.hpp"
#include "andlab/sperner.hpp"
#include "andlab/stats.hpp"
#include "andlab/ucp.hpp"

namespace andlab {

namespace {

const char* geometry_name(GeometryKind g) {
    switch (g) {
        case GeometryKind::Box: return "box";
        case GeometryKind::Path: return "path";
        case GeometryKind::Tilted: return "tilted";
    }
    return "?";
}

TiltedRegion tilted_square(int side) {
    return TiltedRegion{{0, side - 1}, {0, side - 1}};
}

SiteSet site_set_for(const ExperimentConfig& cfg) {
    switch (cfg.geometry) {
        case GeometryKind::Box: return SiteSet::from_box(Box(site(0), cfg.side, cfg.dim));
        case GeometryKind::Path: return SiteSet::path(cfg.side);
        case GeometryKind::Tilted: return SiteSet::from_tilted(tilted_square(cfg.side));
    }
    throw std::logic_error("unreachable geometry");
}

std::string interval_echo(const Interval& I) {
    return fmt_double(I.lo) + ".." + fmt_double(I.hi);
}

std::string site_echo(const Site& x, int dim) {
    std::string out;
    for (int d = 0; d < dim; ++d) {
        if (d > 0) out += '_';
        out += std::to_string(x[static_cast<size_t>(d)]);
    }
    return out;
}

/// Accumulates the results table. The params column is a ;-separated echo
/// of the inputs behind the row, kept free of commas so the CSV stays flat.
class ResultsWriter {
public:
    ResultsWriter(std::string experiment, std::string params, uint64_t seed)
        : experiment_(std::move(experiment)), params_(std::move(params)), seed_(seed) {
        out_ << "schema,experiment,params,metric,value,uncertainty,seed,n\n";
    }

    void add(const std::string& metric, const std::string& extra, const std::string& value,
             const std::string& uncertainty, long long n) {
        out_ << kSchemaVersion << ',' << experiment_ << ',' << params_;
        if (!extra.empty()) out_ << ';' << extra;
        out_ << ',' << metric << ',' << value << ',' << uncertainty << ',' << seed_ << ',' << n
             << '\n';
    }

    void add(const std::string& metric, const std::string& extra, double value, long long n) {
        add(metric, extra, fmt_double(value), "", n);
    }

    void add(const std::string& metric, const std::string& extra, double value, double uncertainty,
             long long n) {
        add(metric, extra, fmt_double(value), fmt_double(uncertainty), n);
    }

    std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
    std::string experiment_;
    std::string params_;
    uint64_t seed_ = 0;
};

std::string base_params(const ExperimentConfig& cfg) {
    std::string p = "law=" + cfg.law_spec + ";g=" + fmt_double(cfg.coupling) +
                    ";d=" + std::to_string(cfg.dim) + ";geom=" + geometry_name(cfg.geometry) +
                    ";side=" + std::to_string(cfg.side);
    switch (cfg.kind) {
        case ExperimentKind::Spectrum:
            break;
        case ExperimentKind::Classify:
            p += ";E=" + fmt_double(cfg.energy) + ";m=" + fmt_double(cfg.mass) +
                 ";zeta=" + fmt_double(cfg.zeta);
            break;
        case ExperimentKind::Wegner:
        case ExperimentKind::Sperner:
            p += ";I=" + interval_echo(cfg.window);
            break;
        case ExperimentKind::Flip:
            p += ";x=" + site_echo(cfg.flip_site, cfg.dim) + ";grid=" + std::to_string(cfg.flip_grid);
            break;
        case ExperimentKind::Msa:
            p += ";E=" + fmt_double(cfg.energy) + ";eta=" + fmt_double(cfg.msa_eta) +
                 ";kappa=" + fmt_double(cfg.msa_kappa) + ";m0=" + fmt_double(cfg.msa_mass0) +
                 ";K=" + std::to_string(cfg.msa_scales) + ";zeta=" + fmt_double(cfg.zeta);
            break;
        case ExperimentKind::Ucp:
            p += ";eps=" + fmt_double(cfg.ucp_epsilon) + ";alpha=" + fmt_double(cfg.ucp_alpha) +
                 ";frozen=" + fmt_double(cfg.ucp_frozen_fraction);
            break;
    }
    return p;
}

struct Outputs {
    std::string results;
    // extra data files beyond the manifest and results table, name -> content
    std::vector<std::pair<std::string, std::string>> data;
};

Outputs run_spectrum(const ExperimentConfig& cfg, int workers) {
    ResultsWriter rw("spectrum", base_params(cfg), cfg.master_seed);
    SiteLaw law = SiteLaw::parse(cfg.law_spec);
    SiteSet sites = site_set_for(cfg);
    size_t n_real = static_cast<size_t>(cfg.realizations);
    std::vector<Eigen::VectorXd> spectra(n_real);
    parallel_for(n_real, workers, [&](size_t k) {
        DisorderField field(law, sites, cfg.coupling, child_seed(cfg.master_seed, k));
        spectra[k] = eigenvalues_only(assemble(field));
    });
    for (size_t k = 0; k < n_real; ++k) {
        for (Eigen::Index j = 0; j < spectra[k].size(); ++j) {
            rw.add("eigenvalue",
                   "r=" + std::to_string(k) + ";j=" + std::to_string(j),
                   spectra[k][j], 1);
        }
    }
    return {rw.str(), {}};
}

Outputs run_classify(const ExperimentConfig& cfg, int workers) {
    ResultsWriter rw("classify", base_params(cfg), cfg.master_seed);
    SiteLaw law = SiteLaw::parse(cfg.law_spec);
    SiteSet sites = site_set_for(cfg);
    long long n = cfg.realizations;
    std::vector<char> good(static_cast<size_t>(n), 0);
    std::vector<char> nonres(static_cast<size_t>(n), 0);
    parallel_for(static_cast<size_t>(n), workers, [&](size_t k) {
        DisorderField field(law, sites, cfg.coupling, child_seed(cfg.master_seed, k));
        ClassificationRecord rec =
            classify_box(assemble(field), cfg.energy, cfg.mass, cfg.zeta);
        good[k] = rec.good ? 1 : 0;
        nonres[k] = rec.nonresonant ? 1 : 0;
    });
    long long good_count = 0;
    long long nonres_count = 0;
    for (long long k = 0; k < n; ++k) {
        good_count += good[static_cast<size_t>(k)];
        nonres_count += nonres[static_cast<size_t>(k)];
    }
    double p_hat = static_cast<double>(good_count) / static_cast<double>(n);
    double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(n));
    BinomialInterval ci = clopper_pearson(good_count, n, 0.99);
    rw.add("good_count", "", static_cast<double>(good_count), n);
    rw.add("good_fraction", "", p_hat, se, n);
    rw.add("ci99_lo", "", ci.lo, n);
    rw.add("ci99_hi", "", ci.hi, n);
    rw.add("nonresonant_count", "", static_cast<double>(nonres_count), n);
    return {rw.str(), {}};
}

Outputs run_wegner(const ExperimentConfig& cfg, int workers) {
    ResultsWriter rw("wegner", base_params(cfg), cfg.master_seed);
    SiteLaw law = SiteLaw::parse(cfg.law_spec);
    Box box(site(0), cfg.side, cfg.dim);
    WegnerEstimate est = wegner_mc(law, box, cfg.coupling, cfg.window,
                                   static_cast<int>(cfg.realizations), cfg.master_seed, workers);
    rw.add("mean_count", "", est.mean, est.std_error, cfg.realizations);
    rw.add("volume_bound", "", est.bound, cfg.realizations);
    rw.add("bound_violated", "", est.bound_violated ? 1.0 : 0.0, cfg.realizations);
    return {rw.str(), {}};
}

Outputs run_flip(const ExperimentConfig& cfg, int /*workers*/) {
    ResultsWriter rw("flip", base_params(cfg), cfg.master_seed);
    SiteLaw law = SiteLaw::parse(cfg.law_spec);
    SiteSet sites = site_set_for(cfg);
    DisorderField field(law, sites, cfg.coupling, child_seed(cfg.master_seed, 0));
    RankOnePath path = make_flip_path(field, cfg.flip_site, cfg.flip_grid);
    std::vector<EigenBranch> branches = track_branches(path);

    std::ostringstream branch_csv;
    write_branches_csv(branch_csv, branches);

    int broken = 0;
    long long hf_evaluated = 0;
    double hf_max = 0.0;
    long long disp_valid = 0;
    double mismatch_max = 0.0;
    double trace_sum = 0.0;
    for (const EigenBranch& b : branches) {
        if (b.broken) {
            ++broken;
            continue;
        }
        trace_sum += b.values.back() - b.values.front();
        try {
            hf_max = std::max(hf_max, hellmann_feynman_residual(path, b));
            ++hf_evaluated;
        } catch (const std::exception&) {
            // branch too crowded to differentiate anywhere; leave it out
        }
        Displacement d = displacement(path, b);
        if (d.valid) {
            mismatch_max = std::max(mismatch_max, d.mismatch);
            ++disp_valid;
        }
    }
    long long n_branches = static_cast<long long>(branches.size());
    rw.add("branch_count", "", static_cast<double>(n_branches), n_branches);
    rw.add("broken_count", "", static_cast<double>(broken), n_branches);
    if (hf_evaluated > 0) rw.add("hf_residual_max", "", hf_max, hf_evaluated);
    if (disp_valid > 0) rw.add("displacement_mismatch_max", "", mismatch_max, disp_valid);
    if (broken == 0) rw.add("trace_sum", "", trace_sum, n_branches);
    return {rw.str(), {{"branches.csv", branch_csv.str()}}};
}

Outputs run_sperner(const ExperimentConfig& cfg, int workers) {
    ResultsWriter rw("sperner", base_params(cfg), cfg.master_seed);
    SiteLaw law = SiteLaw::parse(cfg.law_spec);
    SiteSet sites = site_set_for(cfg);
    DisorderField base(law, sites, cfg.coupling, child_seed(cfg.master_seed, 0));
    ConfigFamily family = enumerate_family(base, cfg.window, workers);
    BlockingWitness witness = maximal_blocking(family);
    SpernerVerdict verdict = sperner_bound_check(family, witness);
    WegnerProbability prob = bernoulli_wegner_prob(family, witness, law.param);

    std::ostringstream family_jsonl;
    write_family_jsonl(family_jsonl, family, witness);

    long long n_configs = 1LL << family.n();
    rw.add("family_size", "", static_cast<double>(family.members.size()), n_configs);
    rw.add("rho_star", "", witness.rho_star, n_configs);
    rw.add("applicable", "", verdict.applicable ? 1.0 : 0.0, n_configs);
    if (verdict.applicable) {
        rw.add("bound", "", verdict.bound, n_configs);
        rw.add("bound_pass", "", verdict.pass ? 1.0 : 0.0, n_configs);
        rw.add("slack", "", verdict.slack, n_configs);
    }
    rw.add("probability", "", prob.probability, n_configs);
    rw.add("probability_bound", "", prob.bound, n_configs);
    // brute-force witness audit is quadratic in the member list; keep it to
    // families small enough to finish promptly
    if (family.n() <= 10) {
        rw.add("witness_verified", "", verify_blocking(family, witness) ? 1.0 : 0.0, n_configs);
    }
    return {rw.str(), {{"family.jsonl", family_jsonl.str()}}};
}

Outputs run_msa(const ExperimentConfig& cfg, int workers) {
    ResultsWriter rw("msa", base_params(cfg), cfg.master_seed);
    SiteLaw law = SiteLaw::parse(cfg.law_spec);
    ScaleSchedule schedule = build_schedule(cfg.side, cfg.msa_eta, cfg.msa_kappa, cfg.msa_scales,
                                            cfg.msa_mass0, cfg.dim);
    std::vector<ScaleReport> reports;
    reports.reserve(static_cast<size_t>(schedule.count()));
    for (int k = 0; k < schedule.count(); ++k) {
        reports.push_back(estimate_good_prob(schedule, k, law, cfg.coupling, cfg.energy,
                                             schedule.masses[static_cast<size_t>(k)], cfg.zeta,
                                             cfg.realizations,
                                             child_seed(cfg.master_seed, static_cast<uint64_t>(k)),
                                             workers));
    }
    std::ostringstream report_csv;
    write_scale_reports_csv(report_csv, reports);

    for (const ScaleReport& r : reports) {
        std::string extra = "k=" + std::to_string(r.k) + ";L=" + std::to_string(r.side);
        rw.add("p_hat", extra, r.p_hat, (r.ci.hi - r.ci.lo) / 2.0, r.realizations);
        rw.add("target", extra, r.target, r.realizations);
        double verdict_value = r.verdict == ScaleVerdict::Pass    ? 1.0
                               : r.verdict == ScaleVerdict::Fail ? 0.0
                                                                 : -1.0;
        rw.add("verdict_pass", extra, verdict_value, r.realizations);
        rw.add("mass", extra, r.mass, r.realizations);
    }
    if (reports.size() >= 2) {
        InductionSummary ind = induction_monitor(reports);
        rw.add("induction_consistent", "", ind.consistent ? 1.0 : 0.0, cfg.realizations);
        rw.add("masses_decay", "", ind.masses_decay ? 1.0 : 0.0, cfg.realizations);
        rw.add("first_failing_scale", "", static_cast<double>(ind.first_failing_scale),
               cfg.realizations);
    }
    return {rw.str(), {{"scale_reports.csv", report_csv.str()}}};
}

/// Deterministic frozen pattern for the trials: fills the canonical square
/// family in order until the requested fraction of sites is frozen, with
/// values drawn from the law off a dedicated child of the master seed so
/// the pattern never collides with the per-trial field draws.
std::map<Site, double> frozen_pattern(const TiltedRegion& square, double fraction,
                                      const SiteLaw& law, uint64_t master_seed) {
    std::map<Site, double> pattern;
    auto target = static_cast<size_t>(std::floor(fraction * static_cast<double>(square.site_count())));
    if (target == 0) return pattern;
    uint64_t value_seed = child_seed(master_seed, 0x66726F7A656EULL);  // tag: "frozen"
    size_t i = 0;
    for (const TiltedRegion& cell : dyadic_square_family(square)) {
        for (const Site& s : cell.sites()) {
            if (pattern.size() == target) return pattern;
            pattern.emplace(s, law.sample(unit_draw(value_seed, i++)));
        }
    }
    return pattern;
}

Outputs run_ucp(const ExperimentConfig& cfg, int workers) {
    ResultsWriter rw("ucp", base_params(cfg), cfg.master_seed);
    SiteLaw law = SiteLaw::parse(cfg.law_spec);
    TiltedRegion square = tilted_square(cfg.side);
    std::map<Site, double> pattern =
        frozen_pattern(square, cfg.ucp_frozen_fraction, law, cfg.master_seed);
    std::vector<UcpTrialRecord> trials =
        run_ucp_trials(square, pattern, cfg.coupling, cfg.ucp_epsilon, cfg.ucp_alpha,
                       cfg.master_seed, static_cast<size_t>(cfg.realizations), workers, law);
    std::ostringstream trial_jsonl;
    write_trials_jsonl(trial_jsonl, trials);

    UcpFrequencyReport rep = ucp_frequency(trials);  // throws if too few accepted
    long long acc = static_cast<long long>(rep.accepted);
    double se = rep.accepted > 0
                    ? std::sqrt(rep.frequency * (1.0 - rep.frequency) / static_cast<double>(acc))
                    : 0.0;
    rw.add("accepted", "", static_cast<double>(rep.accepted), cfg.realizations);
    rw.add("rejected", "", static_cast<double>(rep.rejected), cfg.realizations);
    rw.add("event_count", "", static_cast<double>(rep.events), acc);
    rw.add("frequency", "", rep.frequency, se, acc);
    rw.add("ci95_lo", "", rep.ci.lo, acc);
    rw.add("ci95_hi", "", rep.ci.hi, acc);
    rw.add("reference_rate", "", rep.reference_rate, acc);
    rw.add("frequency_pass", "", rep.pass ? 1.0 : 0.0, acc);
    return {rw.str(), {{"trials.jsonl", trial_jsonl.str()}}};
}

Outputs dispatch(const ExperimentConfig& cfg, int workers) {
    switch (cfg.kind) {
        case ExperimentKind::Spectrum: return run_spectrum(cfg, workers);
        case ExperimentKind::Classify: return run_classify(cfg, workers);
        case ExperimentKind::Wegner: return run_wegner(cfg, workers);
        case ExperimentKind::Flip: return run_flip(cfg, workers);
        case ExperimentKind::Sperner: return run_sperner(cfg, workers);
        case ExperimentKind::Msa: return run_msa(cfg, workers);
        case ExperimentKind::Ucp: return run_ucp(cfg, workers);
    }
    throw std::logic_error("unreachable experiment kind");
}

std::string one_line(std::string text) {
    for (char& c : text) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

std::string manifest_text(const ExperimentConfig& cfg, bool complete, const std::string& error) {
    std::string out;
    out += "# anderson-lab ";
    out += kVersion;
    out += "\n# schema = ";
    out += std::to_string(kSchemaVersion);
    out += "\n# status = ";
    out += complete ? "complete" : "incomplete";
    out += '\n';
    if (!error.empty()) {
        out += "# error = " + one_line(error) + '\n';
    }
    out += serialize_config(cfg);
    return out;
}

void write_file(const std::filesystem::path& dir, const std::string& name,
                const std::string& content, RunResult& result) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + (dir / name).string() + " for writing");
    out << content;
    out.close();
    result.files.push_back(name);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         int workers) {
    RunResult result;
    std::filesystem::create_directories(out_dir);
    try {
        Outputs outputs = dispatch(cfg, workers);
        write_file(out_dir, "manifest.txt", manifest_text(cfg, true, ""), result);
        write_file(out_dir, "results.csv", outputs.results, result);
        for (const auto& [name, content] : outputs.data) {
            write_file(out_dir, name, content, result);
        }
    } catch (const std::exception& e) {
        result.exit_code = 2;
        result.error = std::string(to_string(cfg.kind)) + ": " + e.what();
        result.files.clear();
        write_file(out_dir, "manifest.txt", manifest_text(cfg, false, result.error), result);
    }
    return result;
}

}  // namespace andlab
