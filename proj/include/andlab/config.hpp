#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "andlab/common.hpp"

namespace andlab {

enum class ExperimentKind { Spectrum, Classify, Wegner, Flip, Sperner, Msa, Ucp };

const char* to_string(ExperimentKind kind);
std::optional<ExperimentKind> parse_kind(const std::string& text);

enum class GeometryKind { Box, Path, Tilted };

/// One problem in a flat key-value file. Runtime choices (output directory,
/// worker count) are deliberately not part of the config: outputs are a
/// function of (config, seed) alone.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Spectrum;
    std::uint64_t master_seed = 1;
    long long realizations = 1;

    std::string law_spec = "bernoulli:p=0.5";
    double coupling = 1.0;
    int dim = 1;
    GeometryKind geometry = GeometryKind::Box;
    int side = 0;

    // experiment-specific parameters; only the owning experiment's fields
    // are read, serialized, or validated
    Interval window{0.0, 0.0};           // wegner, sperner
    double energy = 0.0;                 // classify, msa
    double mass = 0.0;                   // classify
    double zeta = 0.9;                   // classify, msa
    Site flip_site{0, 0, 0};             // flip
    int flip_grid = 64;                  // flip
    double msa_eta = 0.1;                // msa
    double msa_kappa = 0.0;              // msa
    double msa_mass0 = 0.0;              // msa
    int msa_scales = 1;                  // msa
    double ucp_epsilon = 0.1;            // ucp
    double ucp_alpha = 1.0;              // ucp
    double ucp_frozen_fraction = 0.0;    // ucp

    bool operator==(const ExperimentConfig& other) const = default;
};

struct ConfigError {
    int line = 0;  // 0 for file-level problems (missing keys)
    std::string message;
};

struct ParseOutcome {
    std::optional<ExperimentConfig> config;
    std::vector<ConfigError> errors;

    bool ok() const { return config.has_value(); }
};

/// Parse the flat `section.key = value` grammar: one assignment per line,
/// `#` starts a comment, intervals written `center +- halfwidth` (the sign
/// may be the single +- character) or `[lo, hi]`. Bare keys without a dot
/// resolve to their conventional section. All problems are collected, each
/// with its line number; a config is returned only when there are none.
ParseOutcome parse_config(const std::string& text);

/// Canonical dotted form; parse_config(serialize_config(c)) reproduces c.
std::string serialize_config(const ExperimentConfig& cfg);

}  // namespace andlab
