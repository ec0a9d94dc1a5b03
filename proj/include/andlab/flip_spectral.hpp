#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "andlab/hamiltonian.hpp"

namespace andlab {

/// Rank-one family H(t) = H_base + t g Pi_x for t in [0,1]: the potential
/// value at the varied site is replaced by t, every other site stays at the
/// base field's value. H(0) carries value 0 at x.
struct RankOnePath {
    DisorderField base;  // value at x normalized to 0
    Site x{0, 0, 0};
    size_t x_index = 0;
    std::vector<double> t_grid;
    FiniteVolumeOperator base_op;

    double coupling() const { return base.coupling(); }
    size_t size() const { return base.size(); }
    FiniteVolumeOperator operator_at(double t) const;
};

RankOnePath make_flip_path(const DisorderField& field, const Site& x, int grid_points = 64);
RankOnePath make_flip_path(const DisorderField& field, const Site& x,
                           std::vector<double> t_grid);

/// One eigenvalue branch followed across the grid. If the matching is still
/// ambiguous after bisection down to step 1e-6 the branch is cut where the
/// ambiguity starts and flagged broken; reported points are always matched
/// with per-substep overlap >= 0.9.
struct EigenBranch {
    int index = 0;              // position in the ascending spectrum at t=0
    std::vector<double> t;      // covered grid points (prefix of the path grid)
    std::vector<double> values;
    std::vector<double> amplitudes2;      // |psi(t; x)|^2
    std::vector<double> simplicity_gaps;  // distance to the nearest other eigenvalue
    std::vector<double> step_overlaps;    // refined min overlap per step, size t.size()-1
    bool broken = false;

    bool covers_full_range() const { return !broken; }
};

std::vector<EigenBranch> track_branches(const RankOnePath& path);

/// Rows `t,branch,lambda,amplitude2,simplicity_gap`, one per covered grid
/// point per branch, full float precision.
void write_branches_csv(std::ostream& out, const std::vector<EigenBranch>& branches);

/// Max over evaluable interior grid points of |dlambda/dt - g |psi(x)|^2|,
/// the derivative by centered differences with local step `fd_step`. Points
/// where the branch is within 1e-6 of another eigenvalue are skipped.
double hellmann_feynman_residual(const RankOnePath& path, const EigenBranch& branch,
                                 double fd_step = 1e-4);

struct Displacement {
    double endpoint_delta = 0.0;  // lambda at last covered point minus lambda at first
    double integral = 0.0;        // adaptive quadrature of g |psi(t;x)|^2
    double mismatch = 0.0;
    bool valid = false;  // false when the branch is broken or quadrature failed to settle
};

Displacement displacement(const RankOnePath& path, const EigenBranch& branch);

/// Minimum of |psi(t; x)| over grid times t and eigenpairs with lambda(t)
/// inside I; +infinity when no eigenvalue visits I. No tracking involved.
double blocking_amplitude(const DisorderField& base, const Site& x, const Interval& I,
                          const std::vector<double>& t_grid);

enum class EjectionStatus { Pass, Fail, Inconclusive, PreconditionFailed };

struct EjectionVerdict {
    EjectionStatus status = EjectionStatus::PreconditionFailed;
    std::string reason;
    int violating_branch = -1;
    double m_obs = 0.0;
    int branches_in_window = 0;
    int broken_in_window = 0;
};

/// Checks that every branch starting inside I = [E-eta, E+eta] at t=0 ends
/// outside I at t=1, under the preconditions that x is path-blocking at
/// level m_star (m_obs >= m_star) and eta < g m_star^2 / 2. Broken branches
/// that start in the window give an inconclusive verdict rather than a
/// pass or fail. With `require_gap_filter`, window branches must also keep
/// a simplicity gap > 2 eta throughout, otherwise the preconditions fail.
EjectionVerdict ejection_check(const DisorderField& base, const Site& x, const Interval& I,
                               double m_star, bool require_gap_filter = false,
                               int grid_points = 64);

}  // namespace andlab
