#include "andlab/flip_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <tuple>

namespace andlab {

namespace {

constexpr double kOverlapThreshold = 0.9;
constexpr double kMinMatchStep = 1e-6;

std::vector<double> uniform_grid(int points) {
    if (points < 2) throw std::invalid_argument("flip path grid needs at least 2 points");
    std::vector<double> g(static_cast<size_t>(points));
    for (int k = 0; k < points; ++k)
        g[static_cast<size_t>(k)] = static_cast<double>(k) / (points - 1);
    g.back() = 1.0;
    return g;
}

void validate_grid(const std::vector<double>& grid) {
    if (grid.size() < 2) throw std::invalid_argument("flip path grid needs at least 2 points");
    for (size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0 && grid[k] <= 1.0))
            throw std::invalid_argument("flip path grid point outside [0,1]");
        if (k > 0 && !(grid[k] > grid[k - 1]))
            throw std::invalid_argument("flip path grid must be strictly ascending");
    }
}

/// Column assignment between two orthonormal bases by greedy maximal
/// overlap: perm[i] is the column of B continuing column i of A, overlap[i]
/// the achieved |<a_i, b_perm[i]>|.
struct MatchResult {
    std::vector<int> perm;
    std::vector<double> overlap;

    double min_overlap() const {
        double m = 1.0;
        for (double v : overlap) m = std::min(m, v);
        return m;
    }
};

MatchResult greedy_match(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const auto n = a.cols();
    Eigen::MatrixXd o = (a.transpose() * b).cwiseAbs();
    std::vector<std::tuple<double, int, int>> entries;
    entries.reserve(static_cast<size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            entries.emplace_back(o(i, j), static_cast<int>(i), static_cast<int>(j));
    std::sort(entries.begin(), entries.end(), [](const auto& l, const auto& r) {
        if (std::get<0>(l) != std::get<0>(r)) return std::get<0>(l) > std::get<0>(r);
        if (std::get<1>(l) != std::get<1>(r)) return std::get<1>(l) < std::get<1>(r);
        return std::get<2>(l) < std::get<2>(r);
    });
    MatchResult res;
    res.perm.assign(static_cast<size_t>(n), -1);
    res.overlap.assign(static_cast<size_t>(n), 0.0);
    std::vector<char> row_used(static_cast<size_t>(n), 0), col_used(static_cast<size_t>(n), 0);
    Eigen::Index assigned = 0;
    for (const auto& [val, i, j] : entries) {
        if (row_used[static_cast<size_t>(i)] || col_used[static_cast<size_t>(j)]) continue;
        row_used[static_cast<size_t>(i)] = col_used[static_cast<size_t>(j)] = 1;
        res.perm[static_cast<size_t>(i)] = j;
        res.overlap[static_cast<size_t>(i)] = val;
        if (++assigned == n) break;
    }
    return res;
}

/// Decompositions along the path, computed on demand and cached by t.
class PathSolver {
  public:
    explicit PathSolver(const RankOnePath& path) : path_(path) {}

    const SpectralData& at(double t) {
        auto it = cache_.find(t);
        if (it != cache_.end()) return it->second;
        Eigen::MatrixXd h = path_.base_op.matrix;
        h(static_cast<Eigen::Index>(path_.x_index), static_cast<Eigen::Index>(path_.x_index)) +=
            path_.coupling() * t;
        return cache_.emplace(t, dense_spectrum(h)).first->second;
    }

    /// Continuation map from t=a to t=b: bisect until every chain link has
    /// overlap >= 0.9 or the step reaches the minimum; composed overlaps are
    /// the weakest link per column.
    MatchResult match_interval(double a, double b) {
        MatchResult direct = greedy_match(at(a).eigenvectors, at(b).eigenvectors);
        if (direct.min_overlap() >= kOverlapThreshold || (b - a) <= kMinMatchStep) return direct;
        const double mid = 0.5 * (a + b);
        MatchResult left = match_interval(a, mid);
        MatchResult right = match_interval(mid, b);
        MatchResult composed;
        const size_t n = left.perm.size();
        composed.perm.resize(n);
        composed.overlap.resize(n);
        for (size_t i = 0; i < n; ++i) {
            int via = left.perm[i];
            composed.perm[i] = right.perm[static_cast<size_t>(via)];
            composed.overlap[i] =
                std::min(left.overlap[i], right.overlap[static_cast<size_t>(via)]);
        }
        return composed;
    }

  private:
    const RankOnePath& path_;
    std::map<double, SpectralData> cache_;
};

double simplicity_gap_of(const Eigen::VectorXd& values, Eigen::Index col) {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (i != col) gap = std::min(gap, std::abs(values[i] - values[col]));
    return gap;
}

void append_point(EigenBranch& branch, double t, const SpectralData& sd, int col,
                  size_t x_index) {
    const auto c = static_cast<Eigen::Index>(col);
    branch.t.push_back(t);
    branch.values.push_back(sd.eigenvalues[c]);
    const double amp = sd.eigenvectors(static_cast<Eigen::Index>(x_index), c);
    branch.amplitudes2.push_back(amp * amp);
    branch.simplicity_gaps.push_back(simplicity_gap_of(sd.eigenvalues, c));
}

}  // namespace

FiniteVolumeOperator RankOnePath::operator_at(double t) const {
    FiniteVolumeOperator op = base_op;
    op.matrix(static_cast<Eigen::Index>(x_index), static_cast<Eigen::Index>(x_index)) +=
        coupling() * t;
    return op;
}

RankOnePath make_flip_path(const DisorderField& field, const Site& x, int grid_points) {
    return make_flip_path(field, x, uniform_grid(grid_points));
}

RankOnePath make_flip_path(const DisorderField& field, const Site& x,
                           std::vector<double> t_grid) {
    validate_grid(t_grid);
    auto idx = field.site_set().index_of(x);
    if (!idx) throw std::invalid_argument("flip path: varied site outside the volume");
    if (field.is_frozen(*idx)) throw std::invalid_argument("flip path: varied site is frozen");
    DisorderField normalized = field.with_value(x, 0.0);
    FiniteVolumeOperator op = assemble(normalized);
    return RankOnePath{std::move(normalized), x, *idx, std::move(t_grid), std::move(op)};
}

std::vector<EigenBranch> track_branches(const RankOnePath& path) {
    validate_grid(path.t_grid);
    PathSolver solver(path);
    const SpectralData& sd0 = solver.at(path.t_grid.front());
    const auto n = static_cast<size_t>(sd0.eigenvalues.size());

    std::vector<EigenBranch> branches(n);
    std::vector<int> col(n);
    for (size_t j = 0; j < n; ++j) {
        branches[j].index = static_cast<int>(j);
        col[j] = static_cast<int>(j);
        append_point(branches[j], path.t_grid.front(), sd0, col[j], path.x_index);
    }

    for (size_t k = 0; k + 1 < path.t_grid.size(); ++k) {
        MatchResult step = solver.match_interval(path.t_grid[k], path.t_grid[k + 1]);
        const SpectralData& next = solver.at(path.t_grid[k + 1]);
        for (size_t j = 0; j < n; ++j) {
            if (branches[j].broken) continue;
            const double ov = step.overlap[static_cast<size_t>(col[j])];
            if (ov < kOverlapThreshold) {
                branches[j].broken = true;
                continue;
            }
            col[j] = step.perm[static_cast<size_t>(col[j])];
            branches[j].step_overlaps.push_back(ov);
            append_point(branches[j], path.t_grid[k + 1], next, col[j], path.x_index);
        }
    }
    return branches;
}

void write_branches_csv(std::ostream& out, const std::vector<EigenBranch>& branches) {
    out << "schema,t,branch,lambda,amplitude2,simplicity_gap\n";
    for (const EigenBranch& b : branches)
        for (size_t k = 0; k < b.t.size(); ++k)
            out << kSchemaVersion << ',' << fmt_double(b.t[k]) << ',' << b.index << ','
                << fmt_double(b.values[k]) << ',' << fmt_double(b.amplitudes2[k]) << ','
                << fmt_double(b.simplicity_gaps[k]) << '\n';
}

double hellmann_feynman_residual(const RankOnePath& path, const EigenBranch& branch,
                                 double fd_step) {
    if (branch.broken)
        throw std::invalid_argument("hellmann_feynman_residual: branch is broken");
    if (!(fd_step > 0.0)) throw std::invalid_argument("hellmann_feynman_residual: step <= 0");
    if (branch.t.size() < 3)
        throw std::invalid_argument("hellmann_feynman_residual: no interior grid points");

    PathSolver solver(path);
    const double g = path.coupling();
    double worst = -1.0;
    for (size_t k = 1; k + 1 < branch.t.size(); ++k) {
        if (branch.simplicity_gaps[k] <= 1e-6) continue;
        const double t = branch.t[k];
        if (t - fd_step < 0.0 || t + fd_step > 1.0) continue;

        const SpectralData& here = solver.at(t);
        Eigen::Index c = 0;
        (here.eigenvalues.array() - branch.values[k]).abs().minCoeff(&c);
        Eigen::VectorXd psi = here.eigenvectors.col(c);

        auto matched_value = [&](double tt) {
            const SpectralData& sd = solver.at(tt);
            Eigen::Index best = 0;
            (sd.eigenvectors.transpose() * psi).cwiseAbs().maxCoeff(&best);
            return sd.eigenvalues[best];
        };
        const double derivative =
            (matched_value(t + fd_step) - matched_value(t - fd_step)) / (2.0 * fd_step);
        const double amp = psi[static_cast<Eigen::Index>(path.x_index)];
        worst = std::max(worst, std::abs(derivative - g * amp * amp));
    }
    if (worst < 0.0)
        throw std::invalid_argument(
            "hellmann_feynman_residual: every interior point is degenerate or too close to "
            "the path ends for the requested step");
    return worst;
}

namespace {

struct QuadNode {
    double f = 0.0;
    Eigen::VectorXd vec;
};

class BranchQuadrature {
  public:
    BranchQuadrature(PathSolver& solver, const RankOnePath& path)
        : solver_(solver), g_(path.coupling()), x_(static_cast<Eigen::Index>(path.x_index)) {}

    QuadNode eval(double t, const Eigen::VectorXd& ref) {
        const SpectralData& sd = solver_.at(t);
        Eigen::Index best = 0;
        (sd.eigenvectors.transpose() * ref).cwiseAbs().maxCoeff(&best);
        const double amp = sd.eigenvectors(x_, best);
        return QuadNode{g_ * amp * amp, sd.eigenvectors.col(best)};
    }

    QuadNode node_for(double t, double value) {
        const SpectralData& sd = solver_.at(t);
        Eigen::Index c = 0;
        (sd.eigenvalues.array() - value).abs().minCoeff(&c);
        const double amp = sd.eigenvectors(x_, c);
        return QuadNode{g_ * amp * amp, sd.eigenvectors.col(c)};
    }

    double integrate(double a, const QuadNode& na, double b, const QuadNode& nb, double tol,
                     bool& ok) {
        QuadNode nm = eval(0.5 * (a + b), na.vec);
        const double whole = (b - a) / 6.0 * (na.f + 4.0 * nm.f + nb.f);
        return recurse(a, na, 0.5 * (a + b), nm, b, nb, whole, tol, 0, ok);
    }

  private:
    static double link(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
        return std::abs(u.dot(v));
    }

    double recurse(double a, const QuadNode& na, double m, const QuadNode& nm, double b,
                   const QuadNode& nb, double whole, double tol, int depth, bool& ok) {
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        QuadNode nlm = eval(lm, na.vec);
        QuadNode nrm = eval(rm, nm.vec);
        const double s_left = (m - a) / 6.0 * (na.f + 4.0 * nlm.f + nm.f);
        const double s_right = (b - m) / 6.0 * (nm.f + 4.0 * nrm.f + nb.f);
        const double err = s_left + s_right - whole;
        const bool chain_ok = link(na.vec, nlm.vec) >= kOverlapThreshold &&
                              link(nlm.vec, nm.vec) >= kOverlapThreshold &&
                              link(nm.vec, nrm.vec) >= kOverlapThreshold &&
                              link(nrm.vec, nb.vec) >= kOverlapThreshold;
        if (std::abs(err) <= 15.0 * tol && chain_ok) return s_left + s_right + err / 15.0;
        if (depth >= 48 || (b - a) <= 1e-12) {
            ok = false;
            return s_left + s_right;
        }
        return recurse(a, na, lm, nlm, m, nm, s_left, 0.5 * tol, depth + 1, ok) +
               recurse(m, nm, rm, nrm, b, nb, s_right, 0.5 * tol, depth + 1, ok);
    }

    PathSolver& solver_;
    double g_;
    Eigen::Index x_;
};

}  // namespace

Displacement displacement(const RankOnePath& path, const EigenBranch& branch) {
    if (branch.t.size() < 2)
        throw std::invalid_argument("displacement: branch covers fewer than 2 grid points");
    PathSolver solver(path);
    BranchQuadrature quad(solver, path);

    Displacement out;
    out.endpoint_delta = branch.values.back() - branch.values.front();
    bool quad_ok = true;
    double total = 0.0;
    QuadNode left = quad.node_for(branch.t.front(), branch.values.front());
    for (size_t k = 0; k + 1 < branch.t.size(); ++k) {
        QuadNode right = quad.node_for(branch.t[k + 1], branch.values[k + 1]);
        total += quad.integrate(branch.t[k], left, branch.t[k + 1], right, 1e-11, quad_ok);
        left = std::move(right);
    }
    out.integral = total;
    out.mismatch = std::abs(out.integral - out.endpoint_delta);
    out.valid = quad_ok && !branch.broken;
    return out;
}

double blocking_amplitude(const DisorderField& base, const Site& x, const Interval& I,
                          const std::vector<double>& t_grid) {
    RankOnePath path = make_flip_path(base, x, t_grid);
    PathSolver solver(path);
    double m_obs = std::numeric_limits<double>::infinity();
    for (double t : path.t_grid) {
        const SpectralData& sd = solver.at(t);
        for (Eigen::Index j = 0; j < sd.eigenvalues.size(); ++j) {
            if (!I.contains(sd.eigenvalues[j])) continue;
            m_obs = std::min(
                m_obs, std::abs(sd.eigenvectors(static_cast<Eigen::Index>(path.x_index), j)));
        }
    }
    return m_obs;
}

EjectionVerdict ejection_check(const DisorderField& base, const Site& x, const Interval& I,
                               double m_star, bool require_gap_filter, int grid_points) {
    if (!(m_star > 0.0)) throw std::invalid_argument("ejection_check: m_star must be positive");
    RankOnePath path = make_flip_path(base, x, grid_points);
    const double g = path.coupling();
    const double eta = I.half_width();

    EjectionVerdict verdict;
    verdict.m_obs = blocking_amplitude(base, x, I, path.t_grid);
    if (!(verdict.m_obs >= m_star)) {
        verdict.status = EjectionStatus::PreconditionFailed;
        verdict.reason = "site is not path-blocking at the requested level";
        return verdict;
    }
    if (!(eta < 0.5 * g * m_star * m_star)) {
        verdict.status = EjectionStatus::PreconditionFailed;
        verdict.reason = "window half-width reaches g*m_star^2/2";
        return verdict;
    }

    std::vector<EigenBranch> branches = track_branches(path);
    std::vector<const EigenBranch*> window;
    for (const EigenBranch& b : branches)
        if (I.contains(b.values.front())) window.push_back(&b);
    verdict.branches_in_window = static_cast<int>(window.size());

    if (require_gap_filter) {
        for (const EigenBranch* b : window)
            for (double gap : b->simplicity_gaps)
                if (!(gap > 2.0 * eta)) {
                    verdict.status = EjectionStatus::PreconditionFailed;
                    verdict.reason = "window branch simplicity gap fell to 2*eta";
                    return verdict;
                }
    }

    for (const EigenBranch* b : window) {
        if (b->broken) {
            ++verdict.broken_in_window;
            continue;
        }
        if (I.contains(b->values.back())) {
            verdict.status = EjectionStatus::Fail;
            verdict.reason = "branch ends inside the window";
            verdict.violating_branch = b->index;
            return verdict;
        }
    }
    if (verdict.broken_in_window > 0) {
        verdict.status = EjectionStatus::Inconclusive;
        verdict.reason = "tracking broke on a window branch";
        return verdict;
    }
    verdict.status = EjectionStatus::Pass;
    verdict.reason = window.empty() ? "no branch starts in the window" : "all window branches leave";
    return verdict;
}

}  // namespace andlab
