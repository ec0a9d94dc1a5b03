#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "andlab/config.hpp"
#include "doctest.h"

using namespace andlab;

namespace {

bool has_error(const ParseOutcome& out, const std::string& needle, int line = -1) {
    for (const auto& e : out.errors)
        if (e.message.find(needle) != std::string::npos && (line < 0 || e.line == line))
            return true;
    return false;
}

}  // namespace

TEST_CASE("a wegner config parses with bare keys and a +- interval") {
    ParseOutcome out = parse_config(
        "experiment = wegner\n"
        "law = holder:alpha=0.5\n"
        "dim = 2\n"
        "side = 7\n"
        "interval = 1.0 ± 0.05\n"
        "realizations = 500\n");
    REQUIRE(out.ok());
    const auto& cfg = *out.config;
    CHECK(cfg.kind == ExperimentKind::Wegner);
    CHECK(cfg.law_spec == "holder:alpha=0.5");
    CHECK(cfg.dim == 2);
    CHECK(cfg.side == 7);
    CHECK(cfg.window.lo == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(cfg.window.hi == doctest::Approx(1.05).epsilon(1e-15));
    CHECK(cfg.realizations == 500);
    CHECK(cfg.master_seed == 1);
}

TEST_CASE("ascii +- and bracket intervals parse identically") {
    auto a = parse_config(
        "run.experiment = sperner\nmodel.side = 3\nsperner.interval = 2.0 +- 0.5\n");
    auto b = parse_config(
        "run.experiment = sperner\nmodel.side = 3\nsperner.interval = [1.5, 2.5]\n");
    REQUIRE(a.ok());
    REQUIRE(b.ok());
    CHECK(a.config->window == b.config->window);
}

TEST_CASE("comments and blank lines are ignored") {
    ParseOutcome out = parse_config(
        "# spectral dump\n"
        "\n"
        "run.experiment = spectrum   # the kind\n"
        "model.side = 5\n");
    REQUIRE(out.ok());
    CHECK(out.config->kind == ExperimentKind::Spectrum);
    CHECK(out.config->side == 5);
}

TEST_CASE("an out-of-range msa growth exponent names the admissible range") {
    ParseOutcome out = parse_config(
        "run.experiment = msa\n"
        "model.dim = 2\n"
        "model.side = 11\n"
        "msa.energy = 0.1\n"
        "msa.kappa = 4.5\n"
        "msa.mass0 = 0.2\n"
        "eta = 0.15\n"
        "run.realizations = 200\n");
    CHECK(!out.ok());
    CHECK(has_error(out, "msa.eta: must lie in (0, 0.1]", 7));
}

TEST_CASE("an empty file lists every required key") {
    ParseOutcome out = parse_config("");
    CHECK(!out.ok());
    CHECK(has_error(out, "missing required key run.experiment", 0));
    CHECK(has_error(out, "missing required key model.side", 0));
}

TEST_CASE("all problems are reported with their line numbers") {
    ParseOutcome out = parse_config(
        "run.experiment = wegner\n"
        "model.side = six\n"
        "model.coupling = -2\n"
        "bogus.key = 1\n"
        "wegner.interval = [3, 1]\n"
        "run.realizations = 12\n");
    CHECK(!out.ok());
    CHECK(has_error(out, "model.side: `six` is not an integer", 2));
    CHECK(has_error(out, "model.coupling: must be a finite value >= 0", 3));
    CHECK(has_error(out, "unknown key `bogus.key`", 4));
    CHECK(has_error(out, "wegner.interval: expected `[lo, hi]`", 5));
    CHECK(has_error(out, "wegner needs at least 100 realizations", 6));
    CHECK(out.errors.size() == 5);
}

TEST_CASE("duplicate and malformed lines are caught") {
    ParseOutcome out = parse_config(
        "run.experiment = spectrum\n"
        "model.side = 5\n"
        "model.side = 7\n"
        "just some words\n"
        "model.dim =\n");
    CHECK(!out.ok());
    CHECK(has_error(out, "duplicate key `model.side`", 3));
    CHECK(has_error(out, "expected `key = value`", 4));
    CHECK(has_error(out, "model.dim: missing value", 5));
}

TEST_CASE("a bare key clashing with its dotted form is rejected") {
    ParseOutcome out = parse_config(
        "run.experiment = spectrum\n"
        "model.side = 5\n"
        "side = 7\n");
    CHECK(!out.ok());
    CHECK(has_error(out, "key `side` duplicates `model.side`", 3));
}

TEST_CASE("keys of other experiments are unknown keys") {
    ParseOutcome out = parse_config(
        "run.experiment = wegner\n"
        "model.side = 5\n"
        "wegner.interval = [0, 1]\n"
        "msa.kappa = 4.5\n");
    CHECK(!out.ok());
    CHECK(has_error(out, "unknown key `msa.kappa` for experiment `wegner`", 4));
}

TEST_CASE("ucp configs default to tilted geometry and validate their ranges") {
    ParseOutcome out = parse_config(
        "run.experiment = ucp\n"
        "model.dim = 2\n"
        "model.side = 8\n"
        "run.realizations = 100\n");
    REQUIRE(out.ok());
    CHECK(out.config->geometry == GeometryKind::Tilted);
    CHECK(out.config->ucp_epsilon == 0.1);
    CHECK(out.config->ucp_alpha == 1.0);

    ParseOutcome bad = parse_config(
        "run.experiment = ucp\n"
        "model.dim = 2\n"
        "model.side = 7\n"
        "ucp.alpha = 0\n"
        "run.realizations = 100\n");
    CHECK(!bad.ok());
    CHECK(has_error(bad, "tilted square side must be >= 8", 3));
    CHECK(has_error(bad, "ucp.alpha: must be positive", 4));
}

TEST_CASE("geometry constraints are experiment-aware") {
    CHECK(has_error(parse_config("run.experiment = classify\nmodel.geometry = path\n"
                                 "model.side = 5\nclassify.energy = 1\nclassify.mass = 0.5\n"),
                    "classify runs on boxes"));
    CHECK(has_error(parse_config("run.experiment = spectrum\nmodel.geometry = path\n"
                                 "model.dim = 2\nmodel.side = 5\n"),
                    "path geometry requires dim 1"));
    CHECK(has_error(parse_config("run.experiment = spectrum\nmodel.geometry = box\n"
                                 "model.side = 6\n"),
                    "box side must be a positive odd integer"));
    CHECK(has_error(parse_config("run.experiment = sperner\nmodel.law = uniform\n"
                                 "model.side = 3\nsperner.interval = [0, 1]\n"),
                    "sperner enumeration needs a Bernoulli law"));
    CHECK(has_error(parse_config("run.experiment = sperner\nmodel.dim = 2\nmodel.side = 5\n"
                                 "sperner.interval = [0, 1]\n"),
                    "caps n at 20"));
    CHECK(has_error(parse_config("run.experiment = flip\nmodel.side = 5\nflip.site = 9\n"
                                 "model.geometry = path\n"),
                    "must lie on the path"));
    CHECK(has_error(parse_config("run.experiment = flip\nmodel.dim = 2\nmodel.side = 3\n"
                                 "flip.site = 2 0\n"),
                    "must lie inside the box"));
}

TEST_CASE("serialization round-trips through the parser") {
    const char* samples[] = {
        "run.experiment = wegner\nrun.seed = 99\nmodel.law = holder:alpha=0.5\nmodel.dim = 2\n"
        "model.side = 7\nwegner.interval = [0.6174, 0.65740000000000009]\n"
        "run.realizations = 2000\n",
        "run.experiment = spectrum\nmodel.side = 5\nmodel.geometry = path\n",
        "run.experiment = classify\nmodel.side = 9\nmodel.dim = 2\nclassify.energy = -0.25\n"
        "classify.mass = 0.3\nclassify.zeta = 0.8\nrun.realizations = 400\n",
        "run.experiment = flip\nmodel.dim = 2\nmodel.side = 3\nflip.site = 1 -1\n"
        "flip.grid = 48\n",
        "run.experiment = sperner\nmodel.side = 9\nmodel.geometry = path\n"
        "sperner.interval = [0.05, 0.2]\n",
        "run.experiment = msa\nmodel.dim = 1\nmodel.side = 5\nmsa.energy = -5\n"
        "msa.kappa = 2.1\nmsa.mass0 = 0.4\nmsa.scales = 2\nrun.realizations = 200\n",
        "run.experiment = ucp\nmodel.dim = 2\nmodel.side = 12\nucp.epsilon = 0.1\n"
        "ucp.alpha = 1.5\nucp.frozen_fraction = 0.05\nrun.realizations = 150\n",
    };
    for (const char* text : samples) {
        CAPTURE(text);
        ParseOutcome first = parse_config(text);
        REQUIRE(first.ok());
        std::string canon = serialize_config(*first.config);
        ParseOutcome second = parse_config(canon);
        REQUIRE(second.ok());
        CHECK(*second.config == *first.config);
        CHECK(serialize_config(*second.config) == canon);
    }
}

TEST_CASE("seeds cover the full unsigned range") {
    ParseOutcome out = parse_config(
        "run.experiment = spectrum\nmodel.side = 5\nrun.seed = 18446744073709551615\n");
    REQUIRE(out.ok());
    CHECK(out.config->master_seed == 18446744073709551615ull);

    CHECK(has_error(parse_config("run.experiment = spectrum\nmodel.side = 5\nrun.seed = -1\n"),
                    "is not an unsigned 64-bit integer"));
}
