#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace andlab {

/// Verdict of one check in the battery. A check marked
/// `expected_unattainable` is implemented and run faithfully but its target
/// is out of reach at desk scale (the detail says why); such a failure is
/// reported yet does not count against the battery.
struct CriterionResult {
    int index = 0;
    std::string name;
    bool pass = false;
    bool expected_unattainable = false;
    std::string detail;
};

/// "PASS   7 blocking-family-size-bound  triples=54 ..." style line.
std::string format_criterion_line(const CriterionResult& r);

/// True when nothing failed unexpectedly.
bool acceptance_ok(const std::vector<CriterionResult>& results);

/// Runs the whole battery. Rerun outputs land under scratch_dir (a fresh
/// directory under the system temp path when empty). When `progress` is
/// given, each criterion line is streamed to it as soon as it finishes.
std::vector<CriterionResult> run_acceptance(int workers = 1,
                                            const std::filesystem::path& scratch_dir = {},
                                            std::ostream* progress = nullptr);

}  // namespace andlab
