#pragma once

#include <Eigen/Dense>
#include <vector>

#include "andlab/common.hpp"
#include "andlab/disorder.hpp"

namespace andlab {

/// Dirichlet finite-volume Hamiltonian H = -Lap + g V on the field's sites:
/// diagonal 2*dim + g*V(u), off-diagonal -1 exactly between l1-neighbors
/// inside the volume.
struct FiniteVolumeOperator {
    DisorderField field;
    Eigen::MatrixXd matrix;

    size_t size() const { return static_cast<size_t>(matrix.rows()); }
};

FiniteVolumeOperator assemble(const DisorderField& field);

/// Full symmetric eigendecomposition, eigenvalues ascending.
struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;  // orthonormal columns, one per eigenvalue

    /// Distance from E to the spectrum.
    double gap(double E) const;
    /// Number of eigenvalues inside I (the spectral projection trace).
    long long count_in(const Interval& I) const;
};

SpectralData spectrum(const FiniteVolumeOperator& op);
SpectralData dense_spectrum(const Eigen::MatrixXd& h);

/// Ascending eigenvalues without eigenvectors (cheaper for counting loops).
Eigen::VectorXd eigenvalues_only(const FiniteVolumeOperator& op);

/// One column of (H - E)^{-1}: entry v is G(E; v, y). Uses a direct LU
/// solve; `spectral` supplies the resonance guard dist(E, sigma).
Eigen::VectorXd green_column(const FiniteVolumeOperator& op, const SpectralData& spectral,
                             double E, size_t y_index);

/// Single Green's function entry <delta_x, (H-E)^{-1} delta_y>.
double green_function(const FiniteVolumeOperator& op, double E, const Site& x, const Site& y);

struct CombesThomasRow {
    int distance = 0;
    double max_abs_g = 0.0;
};

/// Off-diagonal decay diagnostic around a source site: per-distance maxima
/// of |G(E; u, .)|, the least-squares decay rate of -log|G| in distance, and
/// whether every fitted row obeys (2/delta) exp(-rate * r * (1 - slack))
/// with slack 0.1.
struct CombesThomasProfile {
    std::vector<CombesThomasRow> rows;
    double fitted_rate = 0.0;
    double delta = 0.0;
    bool prefactor_ok = false;
};

CombesThomasProfile combes_thomas_profile(const FiniteVolumeOperator& op, double E,
                                          const Site& u);

}  // namespace andlab
