#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "andlab/config.hpp"

namespace andlab {

/// Outcome of one experiment run. `files` lists every file written under
/// the output directory, manifest first. Exit code 0 on success, 2 when a
/// numeric routine gave up mid-run; in that case the manifest is still
/// written, marked incomplete, and carries the error text.
struct RunResult {
    int exit_code = 0;
    std::vector<std::string> files;
    std::string error;
};

/// Runs one validated experiment and writes its outputs under out_dir: a
/// manifest echoing the configuration (itself parseable), a results table,
/// and per-experiment data files. Every byte written is a function of the
/// configuration and its seed alone; the worker count only spreads the
/// same draws across threads. Nothing is written outside out_dir.
RunResult run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                         int workers = 1);

}  // namespace andlab
