#pragma once

#include <cstdint>
#include <vector>

#include "andlab/hamiltonian.hpp"

namespace andlab {

/// Resonance/decay verdicts for one finite volume at one energy.
/// The scale length L is the largest bounding-box extent of the site set
/// (the side for cubes, the length for 1d paths). A volume is E-nonresonant
/// when dist(E, sigma) >= exp(-L^zeta); it is (E,m)-good when it is also
/// E-nonresonant and max |G(E; source, y)| over the inner boundary is at
/// most exp(-m L), with the source the site closest to the centroid.
struct ClassificationRecord {
    double energy = 0.0;
    double m = 0.0;
    double zeta = 0.0;
    int scale_length = 0;
    double gap = 0.0;
    double boundary_green_max = 0.0;  // NaN when resonant (solve not attempted)
    bool nonresonant = false;
    bool good = false;
};

ClassificationRecord classify_box(const FiniteVolumeOperator& op, const SpectralData& spectral,
                                  double E, double m, double zeta);
ClassificationRecord classify_box(const FiniteVolumeOperator& op, double E, double m,
                                  double zeta);

/// Monte Carlo eigenvalue counting in a window against the volume bound
/// |Lambda| * s(mu, eps), eps the window half-width.
struct WegnerEstimate {
    SiteLaw law;
    int side = 0;
    long long volume = 0;
    double coupling = 0.0;
    Interval window{0.0, 0.0};
    int realizations = 0;
    std::vector<int> counts;  // per realization, in seed-index order
    double mean = 0.0;
    double std_error = 0.0;
    double bound = 0.0;
    bool bound_violated = false;
};

WegnerEstimate wegner_mc(const SiteLaw& law, const Box& box, double coupling, const Interval& I,
                         int realizations, uint64_t master_seed, int workers = 1);

/// Least-squares exponent of mean count against window width across
/// estimates at a common center. When some window has zero mean count it is
/// dropped from the fit and the result is only a lower bound on the decay.
struct ScalingFit {
    double alpha = 0.0;
    double std_error = 0.0;
    bool lower_bound_only = false;
};

ScalingFit wegner_scaling_fit(const std::vector<WegnerEstimate>& estimates);

}  // namespace andlab
