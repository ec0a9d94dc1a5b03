#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "andlab/box_analysis.hpp"
#include "andlab/stats.hpp"

namespace andlab {

/// Next mass from (current mass, current side). The default rule is
/// m * (1 - 1/log L), floored at half the initial mass.
using MassRule = std::function<double(double mass, int side)>;

MassRule default_mass_rule(double m0);

/// Growing sequence of box sides L_{k+1} = L_k^{1+eta}, rounded up to odd,
/// with the per-scale localization masses.
struct ScaleSchedule {
    int dim = 2;
    double eta = 0.0;
    double kappa = 0.0;
    std::vector<int> sides;
    std::vector<double> masses;

    int count() const { return static_cast<int>(sides.size()); }
};

/// Requires eta in (0, 1/10), kappa > 2*dim, odd L0 >= 5, K >= 1, m0 > 0.
ScaleSchedule build_schedule(int L0, double eta, double kappa, int K, double m0, int dim = 2,
                             const MassRule& rule = {});

enum class ScaleVerdict { Pass, Fail, Inconclusive };

std::string to_string(ScaleVerdict v);

struct ScaleReport {
    int k = 0;
    int side = 0;
    double energy = 0.0;
    long long realizations = 0;
    long long good_count = 0;
    double p_hat = 0.0;
    BinomialInterval ci;    // exact binomial, 99% two-sided
    double target = 0.0;    // 1 - L^{-kappa}
    double mass = 0.0;
    ScaleVerdict verdict = ScaleVerdict::Inconclusive;
};

/// Samples N boxes at scale k and tallies how many are (E, mass)-good.
/// Realization i draws its field from child seed i of the master seed, so
/// the tally is reproducible for any worker count. Requires N >= 200.
ScaleReport estimate_good_prob(const ScaleSchedule& schedule, int k, const SiteLaw& law,
                               double g, double E, double mass, double zeta, long long N,
                               uint64_t master_seed, int workers = 1);

/// Derives the verdict from the interval and the target: pass when the
/// whole interval clears the target, fail when it lies below.
ScaleVerdict verdict_of(const BinomialInterval& ci, double target);

struct InductionSummary {
    bool consistent = false;
    int first_failing_scale = -1;  // index into the report list, -1 if none
    bool masses_decay = false;
};

/// Diagnostic consistency check across consecutive scale reports at one
/// energy: all verdicts pass (recomputed from the intervals) and the masses
/// never increase. Requires >= 2 reports with the same energy.
InductionSummary induction_monitor(const std::vector<ScaleReport>& reports);

/// Rows `k,L,E,N,good_count,p_hat,ci_lo,ci_hi,target,verdict`.
void write_scale_reports_csv(std::ostream& out, const std::vector<ScaleReport>& reports);

}  // namespace andlab
