#include "andlab/sperner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>

#include "andlab/parallel.hpp"

namespace andlab {

namespace {

int popcount(uint32_t m) { return std::popcount(m); }

/// Dirichlet matrix with the frozen pattern in place and zeros at the free
/// sites; per-configuration diagonals are bumped on top of this.
Eigen::MatrixXd frozen_background(const DisorderField& base,
                                  const std::vector<size_t>& free_sites) {
    const SiteSet& set = base.site_set();
    const auto n = static_cast<Eigen::Index>(set.size());
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    const double diag0 = 2.0 * set.dim();
    for (Eigen::Index i = 0; i < n; ++i) {
        h(i, i) = diag0 + base.coupling() * base.value(static_cast<size_t>(i));
        for (size_t j : set.neighbors(static_cast<size_t>(i)))
            h(i, static_cast<Eigen::Index>(j)) = -1.0;
    }
    // free slots start from value 0 regardless of what the field sampled there
    for (size_t i : free_sites)
        h(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = diag0;
    return h;
}

DisorderField configured_field(const ConfigFamily& family, uint32_t mask,
                               std::optional<size_t> leave_free) {
    const DisorderField& base = family.base;
    std::map<Site, double> frozen;
    for (size_t i = 0; i < base.size(); ++i)
        if (base.is_frozen(i)) frozen[base.site_set()[i]] = base.value(i);
    for (int b = 0; b < family.n(); ++b) {
        size_t idx = family.free_sites[static_cast<size_t>(b)];
        if (leave_free && *leave_free == idx) continue;
        frozen[base.site_set()[idx]] = (mask >> b) & 1u ? 1.0 : 0.0;
    }
    return DisorderField(base.law(), base.site_set(), base.coupling(), base.seed(), frozen);
}

}  // namespace

bool ConfigFamily::is_member(uint32_t mask) const { return find(mask) != nullptr; }

const FamilyMember* ConfigFamily::find(uint32_t mask) const {
    auto it = std::lower_bound(members.begin(), members.end(), mask,
                               [](const FamilyMember& m, uint32_t v) { return m.mask < v; });
    if (it == members.end() || it->mask != mask) return nullptr;
    return &*it;
}

ConfigFamily enumerate_family(const DisorderField& base, const Interval& I, int workers) {
    if (base.law().kind != LawKind::Bernoulli)
        throw std::invalid_argument("enumerate_family: the law must be Bernoulli");
    std::vector<size_t> free_sites = base.free_indices();
    if (free_sites.size() > 20)
        throw std::invalid_argument("enumerate_family: more than 20 free sites");

    const int n = static_cast<int>(free_sites.size());
    const uint32_t total = 1u << n;
    const Eigen::MatrixXd h0 = frozen_background(base, free_sites);
    const double g = base.coupling();

    std::vector<int> counts(total, 0);
    parallel_for(total, workers, [&](size_t mask) {
        Eigen::MatrixXd h = h0;
        for (int b = 0; b < n; ++b)
            if ((mask >> b) & 1u) {
                auto i = static_cast<Eigen::Index>(free_sites[static_cast<size_t>(b)]);
                h(i, i) += g;
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
        if (solver.info() != Eigen::Success)
            throw NumericError("enumerate_family: eigensolve failed on configuration " +
                               std::to_string(mask));
        int c = 0;
        for (Eigen::Index j = 0; j < solver.eigenvalues().size(); ++j)
            if (I.contains(solver.eigenvalues()[j])) ++c;
        counts[mask] = c;
    });

    ConfigFamily family{base, std::move(free_sites), I, {}};
    for (uint32_t mask = 0; mask < total; ++mask)
        if (counts[mask] > 0) family.members.push_back(FamilyMember{mask, counts[mask]});
    return family;
}

BlockingWitness maximal_blocking(const ConfigFamily& family) {
    const int n = family.n();
    const uint32_t total = 1u << n;
    std::vector<char> has_superset_member(total, 0);
    for (const FamilyMember& m : family.members) has_superset_member[m.mask] = 1;
    for (uint32_t mask = total; mask-- > 0;) {
        if (has_superset_member[mask]) continue;
        for (int b = 0; b < n; ++b)
            if (!((mask >> b) & 1u) && has_superset_member[mask | (1u << b)]) {
                has_superset_member[mask] = 1;
                break;
            }
    }

    BlockingWitness witness;
    witness.b_max.reserve(family.members.size());
    witness.ratio.reserve(family.members.size());
    double rho = std::numeric_limits<double>::infinity();
    for (const FamilyMember& m : family.members) {
        uint32_t block = 0;
        for (int b = 0; b < n; ++b) {
            if ((m.mask >> b) & 1u) continue;
            if (!has_superset_member[m.mask | (1u << b)]) block |= 1u << b;
        }
        witness.b_max.push_back(block);
        const int size = popcount(m.mask);
        if (size == n) {
            witness.ratio.push_back(1.0);  // the condition is vacuous on the full set
        } else {
            double r = static_cast<double>(popcount(block)) / (n - size);
            witness.ratio.push_back(r);
            rho = std::min(rho, r);
        }
    }
    witness.rho_star = std::isfinite(rho) ? rho : 1.0;
    return witness;
}

bool verify_blocking(const ConfigFamily& family, const BlockingWitness& witness) {
    if (witness.b_max.size() != family.members.size()) return false;
    const int n = family.n();
    for (size_t i = 0; i < family.members.size(); ++i) {
        const uint32_t a = family.members[i].mask;
        const uint32_t block = witness.b_max[i];
        if ((a & block) != 0) return false;
        for (const FamilyMember& other : family.members)
            if ((other.mask & a) == a && (other.mask & block) != 0) return false;
        // maximality: every outside site admits a superset member
        for (int b = 0; b < n; ++b) {
            const uint32_t bit = 1u << b;
            if ((a & bit) || (block & bit)) continue;
            bool extended = false;
            for (const FamilyMember& other : family.members)
                if ((other.mask & (a | bit)) == (a | bit)) {
                    extended = true;
                    break;
                }
            if (!extended) return false;
        }
    }
    return true;
}

SpernerVerdict sperner_bound_check(const ConfigFamily& family, const BlockingWitness& witness) {
    SpernerVerdict verdict;
    const int n = family.n();
    verdict.applicable = witness.rho_star > 0.0 && n >= 1;
    if (!verdict.applicable) return verdict;
    verdict.bound = std::exp2(n) / (std::sqrt(static_cast<double>(n)) * witness.rho_star);
    const double count = static_cast<double>(family.members.size());
    verdict.pass = count <= verdict.bound * (1.0 + 1e-12);
    verdict.slack = count / verdict.bound;
    return verdict;
}

WegnerProbability bernoulli_wegner_prob(const ConfigFamily& family,
                                        const BlockingWitness& witness, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("bernoulli_wegner_prob: p outside (0,1)");
    WegnerProbability out;
    const int n = family.n();
    if (p == 0.5) {
        out.probability = std::ldexp(static_cast<double>(family.members.size()), -n);
        out.counting_comparison = true;
    } else {
        double total = 0.0;
        for (const FamilyMember& m : family.members) {
            const int k = popcount(m.mask);
            total += std::pow(p, k) * std::pow(1.0 - p, n - k);
        }
        out.probability = total;
        out.counting_comparison = false;
    }
    out.bound = (witness.rho_star > 0.0 && n >= 1)
                    ? 1.0 / (std::sqrt(static_cast<double>(n)) * witness.rho_star)
                    : std::numeric_limits<double>::infinity();
    return out;
}

BlockingComparison ucp_blocking_comparison(const ConfigFamily& family, double m_star,
                                           int grid_points) {
    if (!(m_star > 0.0))
        throw std::invalid_argument("ucp_blocking_comparison: m_star must be positive");
    const BlockingWitness witness = maximal_blocking(family);
    const double g = family.base.coupling();
    const double eta = family.window.half_width();

    BlockingComparison report;
    report.m_star = m_star;
    report.eta_guard_ok = eta < 0.5 * g * m_star * m_star;
    const int n = family.n();

    for (size_t i = 0; i < family.members.size(); ++i) {
        const FamilyMember& member = family.members[i];
        BlockingComparisonRow row;
        row.member_mask = member.mask;
        row.b_max_mask = witness.b_max[i];

        if (report.eta_guard_ok) {
            for (int b = 0; b < n; ++b) {
                if ((member.mask >> b) & 1u) continue;
                const size_t idx = family.free_sites[static_cast<size_t>(b)];
                const Site& x = family.base.site_set()[idx];
                DisorderField base_x = configured_field(family, member.mask, idx);
                RankOnePath path = make_flip_path(base_x, x, grid_points);
                if (blocking_amplitude(base_x, x, family.window, path.t_grid) >= m_star) {
                    bool window_branch_broke = false;
                    for (const EigenBranch& branch : track_branches(path))
                        if (branch.broken && family.window.contains(branch.values.front()))
                            window_branch_broke = true;
                    if (window_branch_broke) {
                        ++row.excluded_broken;
                        continue;
                    }
                    row.b_amp_mask |= 1u << b;
                    if (family.is_member(member.mask | (1u << b)))
                        ++row.single_stay;
                    else
                        ++row.single_exit;
                }
            }
        }

        row.amp_within_max = (row.b_amp_mask & ~row.b_max_mask) == 0;
        for (int b1 = 0; b1 < n; ++b1)
            for (int b2 = b1 + 1; b2 < n; ++b2) {
                const uint32_t pair = (1u << b1) | (1u << b2);
                if ((row.b_amp_mask & pair) != pair) continue;
                if (family.is_member(member.mask | pair))
                    ++row.pair_stay;
                else
                    ++row.pair_exit;
            }

        if (!row.amp_within_max) ++report.subset_violations;
        report.single_stay_total += row.single_stay;
        report.excluded_broken_total += row.excluded_broken;
        report.rows.push_back(row);
    }
    return report;
}

void write_family_jsonl(std::ostream& out, const ConfigFamily& family,
                        const BlockingWitness& witness) {
    for (size_t i = 0; i < family.members.size(); ++i) {
        out << "{\"schema\":" << kSchemaVersion << ",\"mask\":" << family.members[i].mask
            << ",\"window_count\":" << family.members[i].window_count
            << ",\"b_max\":" << witness.b_max[i]
            << ",\"ratio\":" << fmt_double(witness.ratio[i]) << "}\n";
    }
}

}  // namespace andlab
