#include "andlab/msa.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "andlab/parallel.hpp"
#include "andlab/rng.hpp"

namespace andlab {

MassRule default_mass_rule(double m0) {
    const double floor = 0.5 * m0;
    return [floor](double mass, int side) {
        return std::max(floor, mass * (1.0 - 1.0 / std::log(static_cast<double>(side))));
    };
}

ScaleSchedule build_schedule(int L0, double eta, double kappa, int K, double m0, int dim,
                             const MassRule& rule) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("build_schedule: dim must be 1..3");
    if (!(eta > 0.0 && eta <= 0.1))
        throw std::invalid_argument("build_schedule: eta outside (0, 1/10]");
    if (!(kappa > 2.0 * dim))
        throw std::invalid_argument("build_schedule: kappa must exceed twice the dimension");
    if (L0 < 5 || L0 % 2 == 0) throw std::invalid_argument("build_schedule: L0 must be odd >= 5");
    if (K < 1) throw std::invalid_argument("build_schedule: K must be >= 1");
    if (!(m0 > 0.0)) throw std::invalid_argument("build_schedule: m0 must be positive");

    const MassRule& step = rule ? rule : default_mass_rule(m0);
    ScaleSchedule schedule;
    schedule.dim = dim;
    schedule.eta = eta;
    schedule.kappa = kappa;
    schedule.sides.push_back(L0);
    schedule.masses.push_back(m0);
    for (int k = 1; k < K; ++k) {
        const double grown = std::pow(static_cast<double>(schedule.sides.back()), 1.0 + eta);
        auto next = static_cast<int>(std::ceil(grown));
        if (next % 2 == 0) ++next;  // rounding is up-to-odd to keep boxes centered
        if (next <= schedule.sides.back())
            throw std::invalid_argument("build_schedule: sides failed to increase");
        const double mass = step(schedule.masses.back(), schedule.sides.back());
        if (!(mass > 0.0) || mass > schedule.masses.back() + 1e-15)
            throw std::invalid_argument("build_schedule: mass rule must stay positive and "
                                        "nonincreasing");
        schedule.sides.push_back(next);
        schedule.masses.push_back(mass);
    }
    return schedule;
}

std::string to_string(ScaleVerdict v) {
    switch (v) {
        case ScaleVerdict::Pass: return "pass";
        case ScaleVerdict::Fail: return "fail";
        case ScaleVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

ScaleVerdict verdict_of(const BinomialInterval& ci, double target) {
    if (ci.lo >= target) return ScaleVerdict::Pass;
    if (ci.hi < target) return ScaleVerdict::Fail;
    return ScaleVerdict::Inconclusive;
}

ScaleReport estimate_good_prob(const ScaleSchedule& schedule, int k, const SiteLaw& law,
                               double g, double E, double mass, double zeta, long long N,
                               uint64_t master_seed, int workers) {
    if (k < 0 || k >= schedule.count())
        throw std::invalid_argument("estimate_good_prob: scale index out of range");
    if (N < 200) throw std::invalid_argument("estimate_good_prob: needs at least 200 samples");

    const int side = schedule.sides[static_cast<size_t>(k)];
    const Box box(site(0, 0, 0), side, schedule.dim);
    const SiteSet sites = SiteSet::from_box(box);

    std::vector<char> good(static_cast<size_t>(N), 0);
    parallel_for(static_cast<size_t>(N), workers, [&](size_t i) {
        DisorderField field(law, sites, g, child_seed(master_seed, i));
        FiniteVolumeOperator op = assemble(field);
        ClassificationRecord record = classify_box(op, E, mass, zeta);
        good[i] = record.good ? 1 : 0;
    });

    ScaleReport report;
    report.k = k;
    report.side = side;
    report.energy = E;
    report.realizations = N;
    for (char flag : good) report.good_count += flag;
    report.p_hat = static_cast<double>(report.good_count) / static_cast<double>(N);
    report.ci = clopper_pearson(report.good_count, N, 0.99);
    report.target = 1.0 - std::pow(static_cast<double>(side), -schedule.kappa);
    report.mass = mass;
    report.verdict = verdict_of(report.ci, report.target);
    return report;
}

InductionSummary induction_monitor(const std::vector<ScaleReport>& reports) {
    if (reports.size() < 2)
        throw std::invalid_argument("induction_monitor: needs at least two scale reports");
    for (size_t i = 1; i < reports.size(); ++i) {
        if (reports[i].energy != reports[0].energy)
            throw std::invalid_argument("induction_monitor: reports mix energies");
        if (reports[i].side <= reports[i - 1].side)
            throw std::invalid_argument("induction_monitor: reports are not in scale order");
    }

    InductionSummary summary;
    summary.masses_decay = true;
    summary.consistent = true;
    for (size_t i = 0; i < reports.size(); ++i) {
        if (verdict_of(reports[i].ci, reports[i].target) != ScaleVerdict::Pass) {
            summary.consistent = false;
            if (summary.first_failing_scale < 0)
                summary.first_failing_scale = static_cast<int>(i);
        }
        if (i > 0 && reports[i].mass > reports[i - 1].mass + 1e-15) {
            summary.masses_decay = false;
            summary.consistent = false;
        }
    }
    return summary;
}

void write_scale_reports_csv(std::ostream& out, const std::vector<ScaleReport>& reports) {
    out << "schema,k,L,E,N,good_count,p_hat,ci_lo,ci_hi,target,verdict\n";
    for (const ScaleReport& r : reports)
        out << kSchemaVersion << ',' << r.k << ',' << r.side << ',' << fmt_double(r.energy) << ',' << r.realizations
            << ',' << r.good_count << ',' << fmt_double(r.p_hat) << ',' << fmt_double(r.ci.lo)
            << ',' << fmt_double(r.ci.hi) << ',' << fmt_double(r.target) << ','
            << to_string(r.verdict) << '\n';
}

}  // namespace andlab
