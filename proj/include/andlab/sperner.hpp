#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "andlab/flip_spectral.hpp"
#include "andlab/hamiltonian.hpp"

namespace andlab {

/// One member A of the window family: the bit i of `mask` is the value the
/// i-th free site (ascending site order) takes, and `window_count` is how
/// many eigenvalues of that configuration fall in the window.
struct FamilyMember {
    uint32_t mask = 0;
    int window_count = 0;
};

/// The family of free-site configurations whose spectrum meets the window,
/// built by exhaustive diagonalization of all 2^n configurations over the
/// frozen background of `base`.
struct ConfigFamily {
    DisorderField base;              // frozen pattern; free sites are the n varying slots
    std::vector<size_t> free_sites;  // indices into base.site_set(), ascending
    Interval window{0.0, 0.0};
    std::vector<FamilyMember> members;  // ascending by mask

    int n() const { return static_cast<int>(free_sites.size()); }
    bool is_member(uint32_t mask) const;
    const FamilyMember* find(uint32_t mask) const;
};

/// Exhaustively classifies all 2^n free-site configurations. Requires a
/// Bernoulli law and at most 20 free sites. The sampled values at free
/// sites are ignored; only the frozen pattern matters.
ConfigFamily enumerate_family(const DisorderField& base, const Interval& I, int workers = 1);

/// Per member A, the largest set B of free sites outside A such that no
/// member contains A together with any site of B; rho_star is the smallest
/// ratio |B|/(n-|A|) over proper members (full configurations count as 1).
struct BlockingWitness {
    std::vector<uint32_t> b_max;  // aligned with family.members
    std::vector<double> ratio;
    double rho_star = 1.0;
};

BlockingWitness maximal_blocking(const ConfigFamily& family);

/// Brute-force re-verification of the witness against the member list:
/// disjointness from A, the forbidden-augmentation property for every
/// superset member, and maximality of each B.
bool verify_blocking(const ConfigFamily& family, const BlockingWitness& witness);

struct SpernerVerdict {
    bool applicable = false;  // rho_star > 0 and n >= 1
    bool pass = false;
    double bound = 0.0;  // 2^n n^{-1/2} / rho_star
    double slack = 0.0;  // |family| / bound
};

SpernerVerdict sperner_bound_check(const ConfigFamily& family, const BlockingWitness& witness);

struct WegnerProbability {
    double probability = 0.0;  // exact measure of the family under Bernoulli(p)
    double bound = 0.0;        // n^{-1/2} / rho_star
    bool counting_comparison = false;  // the bound matches counting only at p = 1/2
};

WegnerProbability bernoulli_wegner_prob(const ConfigFamily& family,
                                        const BlockingWitness& witness, double p = 0.5);

/// Comparison of amplitude-certified blocking sites against the maximal
/// blocking sets, with the single-flip ejection consequence checked through
/// exact family membership. Two-site augmentations are tabulated only.
struct BlockingComparisonRow {
    uint32_t member_mask = 0;
    uint32_t b_max_mask = 0;
    uint32_t b_amp_mask = 0;
    bool amp_within_max = true;
    int single_exit = 0;
    int single_stay = 0;
    int pair_exit = 0;
    int pair_stay = 0;
    int excluded_broken = 0;  // amplitude-certified flips whose tracking broke
};

struct BlockingComparison {
    std::vector<BlockingComparisonRow> rows;
    double m_star = 0.0;
    bool eta_guard_ok = false;  // half-width < g m_star^2 / 2
    int subset_violations = 0;  // rows where B_amp is not inside B_max
    int single_stay_total = 0;
    int excluded_broken_total = 0;
};

BlockingComparison ucp_blocking_comparison(const ConfigFamily& family, double m_star,
                                           int grid_points = 33);

/// JSON-lines dump: one record per member with subset bitmask, eigenvalue
/// count in the window, and the maximal blocking bitmask.
void write_family_jsonl(std::ostream& out, const ConfigFamily& family,
                        const BlockingWitness& witness);

}  // namespace andlab
