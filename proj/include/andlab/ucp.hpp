#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <vector>

#include "andlab/disorder.hpp"
#include "andlab/lattice.hpp"
#include "andlab/stats.hpp"

namespace andlab {

/// One sampled unique-continuation trial on a tilted square. Rejected
/// records mark realizations whose frozen set failed the regularity
/// precondition; they carry no spectral data.
struct UcpTrialRecord {
    TiltedRegion square;
    int ell = 0;             // side length of the square
    size_t frozen_count = 0;
    double epsilon = 0.0;
    double alpha = 0.0;
    double coupling = 1.0;
    std::uint64_t seed = 0;

    bool rejected = false;

    size_t tested = 0;  // eigenpairs admitted by the normalization clause
    size_t total = 0;   // matrix dimension
    /// Index of the eigenpair with the largest growth statistic, -1 when
    /// nothing was tested.
    int worst_eigenpair = -1;
    /// Fraction of the free region where the worst eigenvector stays at
    /// amplitude <= 1 after its sup over that region is scaled to 1.
    double mass_fraction = 0.0;
    /// max_j ||phi_j||_inf(half square) / exp(alpha * l * log l), phi scaled
    /// as above. Always >= 0; underflows to 0 when the threshold dwarfs any
    /// unit vector.
    double growth_statistic = 0.0;
    /// True iff every tested eigenpair kept its statistic <= 1.
    bool event = false;
};

/// Sample the potential on the square (frozen sites pinned by `pattern`),
/// diagonalize, sup-normalize each eigenvector over the free region, and
/// test the half-square growth threshold exp(alpha * l * log l).
///
/// The precondition on the frozen set is delta-regularity at delta = epsilon
/// against the dyadic witness family of the square; failing it yields a
/// rejected record rather than an exception.
UcpTrialRecord run_ucp_trial(const TiltedRegion& square, const std::map<Site, double>& pattern,
                             double g, double epsilon, double alpha, std::uint64_t seed,
                             const SiteLaw& law = SiteLaw::bernoulli(0.5));

/// Independent trials with child seeds; results identical for any worker
/// count.
std::vector<UcpTrialRecord> run_ucp_trials(const TiltedRegion& square,
                                           const std::map<Site, double>& pattern, double g,
                                           double epsilon, double alpha,
                                           std::uint64_t master_seed, size_t n_trials,
                                           int workers = 1,
                                           const SiteLaw& law = SiteLaw::bernoulli(0.5));

/// Empirical event probability over a batch of trials at one parameter
/// point. The rate 1 - exp(-epsilon * l^{1/4}) is reported for context
/// only; the verdict is the fixed frequency floor.
struct UcpFrequencyReport {
    int ell = 0;
    double epsilon = 0.0;
    double alpha = 0.0;
    size_t accepted = 0;
    size_t rejected = 0;
    size_t events = 0;
    double frequency = 0.0;
    BinomialInterval ci;        // exact binomial, 95% two-sided
    double reference_rate = 0.0;
    bool pass = false;  // frequency >= 0.95
};

UcpFrequencyReport ucp_frequency(const std::vector<UcpTrialRecord>& trials);

/// One JSON object per record, numbers at full precision.
void write_trials_jsonl(std::ostream& out, const std::vector<UcpTrialRecord>& trials);

}  // namespace andlab
