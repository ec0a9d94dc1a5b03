#include "andlab/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace andlab {

FiniteVolumeOperator assemble(const DisorderField& field) {
    const SiteSet& set = field.site_set();
    const auto n = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const double diag0 = 2.0 * set.dim();
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i, i) = diag0 + field.coupling() * field.value(static_cast<size_t>(i));
        for (size_t j : set.neighbors(static_cast<size_t>(i)))
            m(i, static_cast<Eigen::Index>(j)) = -1.0;
    }
    return FiniteVolumeOperator{field, std::move(m)};
}

SpectralData spectrum(const FiniteVolumeOperator& op) { return dense_spectrum(op.matrix); }

SpectralData dense_spectrum(const Eigen::MatrixXd& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericError("dense_spectrum: eigendecomposition failed (matrix norm " +
                           fmt_double(h.norm()) + ", size " + std::to_string(h.rows()) + ")");
    return SpectralData{solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd eigenvalues_only(const FiniteVolumeOperator& op) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.matrix, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw NumericError("eigenvalues_only: eigendecomposition failed (size " +
                           std::to_string(op.matrix.rows()) + ")");
    return solver.eigenvalues();
}

double SpectralData::gap(double E) const {
    return (eigenvalues.array() - E).abs().minCoeff();
}

long long SpectralData::count_in(const Interval& I) const {
    long long n = 0;
    for (Eigen::Index j = 0; j < eigenvalues.size(); ++j)
        if (I.contains(eigenvalues[j])) ++n;
    return n;
}

Eigen::VectorXd green_column(const FiniteVolumeOperator& op, const SpectralData& spectral,
                             double E, size_t y_index) {
    if (y_index >= op.size()) throw std::invalid_argument("green_column: index out of range");
    const double delta = spectral.gap(E);
    if (delta < 1e-12)
        throw NumericError("green_column: E within 1e-12 of an eigenvalue (resonance), gap " +
                           fmt_double(delta));
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::MatrixXd shifted = op.matrix - E * Eigen::MatrixXd::Identity(n, n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[static_cast<Eigen::Index>(y_index)] = 1.0;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(shifted);
    Eigen::VectorXd g = lu.solve(rhs);
    double residual = (shifted * g - rhs).norm();
    if (!g.allFinite() || residual > 1e-8 * std::max(1.0, g.norm()))
        throw NumericError("green_column: solve residual " + fmt_double(residual) +
                           " too large at gap " + fmt_double(delta));
    return g;
}

double green_function(const FiniteVolumeOperator& op, double E, const Site& x, const Site& y) {
    const SiteSet& set = op.field.site_set();
    auto xi = set.index_of(x);
    auto yi = set.index_of(y);
    if (!xi || !yi) throw std::invalid_argument("green_function: site outside the volume");
    SpectralData sd = spectrum(op);
    Eigen::VectorXd col = green_column(op, sd, E, *yi);
    return col[static_cast<Eigen::Index>(*xi)];
}

CombesThomasProfile combes_thomas_profile(const FiniteVolumeOperator& op, double E,
                                          const Site& u) {
    const SiteSet& set = op.field.site_set();
    auto ui = set.index_of(u);
    if (!ui) throw std::invalid_argument("combes_thomas_profile: source site outside the volume");
    SpectralData sd = spectrum(op);
    const double delta = sd.gap(E);
    if (delta < 1e-6)
        throw NumericError("combes_thomas_profile: requires dist(E, spectrum) >= 1e-6, got " +
                           fmt_double(delta));
    Eigen::VectorXd col = green_column(op, sd, E, *ui);

    std::map<int, double> by_dist;
    for (size_t v = 0; v < set.size(); ++v) {
        int r = l1_dist(set[v], u);
        double a = std::abs(col[static_cast<Eigen::Index>(v)]);
        auto [it, fresh] = by_dist.try_emplace(r, a);
        if (!fresh) it->second = std::max(it->second, a);
    }

    CombesThomasProfile profile;
    profile.delta = delta;
    for (const auto& [r, a] : by_dist) profile.rows.push_back({r, a});

    // least-squares slope of -log|G| against distance over the resolvable rows
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (const auto& row : profile.rows) {
        if (row.max_abs_g <= 1e-12) continue;
        double x = row.distance;
        double y = -std::log(row.max_abs_g);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++used;
    }
    double denom = used * sxx - sx * sx;
    profile.fitted_rate = (used >= 2 && std::abs(denom) > 1e-15)
                              ? (used * sxy - sx * sy) / denom
                              : 0.0;

    const double slack = 0.1;
    profile.prefactor_ok = true;
    for (const auto& row : profile.rows) {
        if (row.max_abs_g <= 1e-12) continue;
        double bound = (2.0 / delta) *
                       std::exp(-profile.fitted_rate * row.distance * (1.0 - slack));
        if (row.max_abs_g > bound) profile.prefactor_ok = false;
    }
    return profile;
}

}  // namespace andlab
