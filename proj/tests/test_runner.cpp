#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "andlab/runner.hpp"

using namespace andlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
    fs::path dir = fs::temp_directory_path() / ("andlab_runner_" + tag);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig parse_or_fail(const std::string& text) {
    ParseOutcome out = parse_config(text);
    for (const ConfigError& e : out.errors) {
        CAPTURE(e.line);
        CAPTURE(e.message);
    }
    REQUIRE(out.ok());
    return *out.config;
}

struct Row {
    std::string params;
    std::string metric;
    double value = 0.0;
    std::string uncertainty;
    long long n = 0;
};

std::vector<Row> read_rows(const fs::path& csv) {
    std::string text = slurp(csv);
    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    CHECK(line == "schema,experiment,params,metric,value,uncertainty,seed,n");
    std::vector<Row> rows;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::istringstream ls(line);
        std::string field;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        REQUIRE(fields.size() == 8);
        CHECK(fields[0] == "1");
        Row r;
        r.params = fields[2];
        r.metric = fields[3];
        r.value = std::strtod(fields[4].c_str(), nullptr);
        r.uncertainty = fields[5];
        r.n = std::strtoll(fields[7].c_str(), nullptr, 10);
        rows.push_back(r);
    }
    return rows;
}

std::vector<double> values_of(const std::vector<Row>& rows, const std::string& metric) {
    std::vector<double> out;
    for (const Row& r : rows) {
        if (r.metric == metric) out.push_back(r.value);
    }
    return out;
}

}  // namespace

TEST_CASE("free path of two sites yields eigenvalues 1 and 3") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = spectrum\n"
        "seed = 7\n"
        "realizations = 1\n"
        "law = bernoulli:p=0.5\n"
        "coupling = 0\n"
        "dim = 1\n"
        "geometry = path\n"
        "side = 2\n");
    fs::path dir = fresh_dir("spectrum_free");
    RunResult res = run_experiment(cfg, dir);
    CHECK(res.exit_code == 0);
    CHECK(res.error.empty());
    REQUIRE(res.files.size() == 2);
    CHECK(res.files[0] == "manifest.txt");
    CHECK(res.files[1] == "results.csv");

    std::vector<Row> rows = read_rows(dir / "results.csv");
    std::vector<double> eig = values_of(rows, "eigenvalue");
    REQUIRE(eig.size() == 2);
    CHECK(eig[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(rows[0].params == "law=bernoulli:p=0.5;g=0;d=1;geom=path;side=2;r=0;j=0");
}

TEST_CASE("single site window family carries probability one half") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = sperner\n"
        "seed = 3\n"
        "law = bernoulli:p=0.5\n"
        "coupling = 1\n"
        "dim = 1\n"
        "geometry = box\n"
        "side = 1\n"
        "interval = [2.5, 3.5]\n");
    fs::path dir = fresh_dir("sperner_single");
    RunResult res = run_experiment(cfg, dir);
    CHECK(res.exit_code == 0);
    std::vector<Row> rows = read_rows(dir / "results.csv");
    std::vector<double> prob = values_of(rows, "probability");
    REQUIRE(prob.size() == 1);
    CHECK(prob[0] == 0.5);
    CHECK(values_of(rows, "family_size") == std::vector<double>{1.0});
    CHECK(values_of(rows, "rho_star") == std::vector<double>{1.0});
    CHECK(values_of(rows, "witness_verified") == std::vector<double>{1.0});
    CHECK(slurp(dir / "family.jsonl") ==
          "{\"schema\":1,\"mask\":1,\"window_count\":1,\"b_max\":0,\"ratio\":1}\n");
}

TEST_CASE("identical config and seed reproduce every output byte") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = flip\n"
        "seed = 11\n"
        "law = uniform\n"
        "coupling = 2\n"
        "dim = 1\n"
        "geometry = path\n"
        "side = 6\n"
        "site = 2\n"
        "grid = 17\n");
    fs::path a = fresh_dir("flip_a");
    fs::path b = fresh_dir("flip_b");
    RunResult ra = run_experiment(cfg, a);
    RunResult rb = run_experiment(cfg, b);
    CHECK(ra.exit_code == 0);
    CHECK(rb.exit_code == 0);
    REQUIRE(ra.files == rb.files);
    REQUIRE(ra.files.size() == 3);
    for (const std::string& name : ra.files) {
        CHECK(slurp(a / name) == slurp(b / name));
    }
    std::vector<Row> rows = read_rows(a / "results.csv");
    CHECK(values_of(rows, "branch_count") == std::vector<double>{6.0});
    std::vector<double> hf = values_of(rows, "hf_residual_max");
    if (!hf.empty()) CHECK(hf[0] < 1e-4);
}

TEST_CASE("worker count never changes the written bytes") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = classify\n"
        "seed = 5\n"
        "realizations = 60\n"
        "law = bernoulli:p=0.5\n"
        "coupling = 1\n"
        "dim = 1\n"
        "geometry = box\n"
        "side = 5\n"
        "energy = 0\n"
        "mass = 0.2\n"
        "zeta = 0.9\n");
    fs::path a = fresh_dir("classify_w1");
    fs::path b = fresh_dir("classify_w3");
    RunResult ra = run_experiment(cfg, a, 1);
    RunResult rb = run_experiment(cfg, b, 3);
    CHECK(ra.exit_code == 0);
    CHECK(rb.exit_code == 0);
    REQUIRE(ra.files == rb.files);
    for (const std::string& name : ra.files) {
        CHECK(slurp(a / name) == slurp(b / name));
    }
    std::vector<Row> rows = read_rows(a / "results.csv");
    REQUIRE(values_of(rows, "good_count").size() == 1);
    CHECK(values_of(rows, "good_fraction")[0] >= 0.0);
    CHECK(values_of(rows, "ci99_lo")[0] <= values_of(rows, "ci99_hi")[0]);
}

TEST_CASE("manifest parses back to the exact configuration") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = wegner\n"
        "seed = 42\n"
        "realizations = 100\n"
        "law = holder:alpha=0.5\n"
        "coupling = 1\n"
        "dim = 2\n"
        "geometry = box\n"
        "side = 3\n"
        "interval = 4.0 \xC2\xB1 0.25\n");
    fs::path dir = fresh_dir("wegner_manifest");
    RunResult res = run_experiment(cfg, dir);
    CHECK(res.exit_code == 0);
    ParseOutcome back = parse_config(slurp(dir / "manifest.txt"));
    REQUIRE(back.ok());
    CHECK(*back.config == cfg);

    std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("# anderson-lab 0.1.0\n") == 0);
    CHECK(manifest.find("# schema = 1\n") != std::string::npos);
    CHECK(manifest.find("# status = complete\n") != std::string::npos);

    std::vector<Row> rows = read_rows(dir / "results.csv");
    REQUIRE(values_of(rows, "mean_count").size() == 1);
    REQUIRE(values_of(rows, "volume_bound").size() == 1);
    CHECK(values_of(rows, "bound_violated") == std::vector<double>{0.0});
}

TEST_CASE("nothing is written outside the output directory") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = msa\n"
        "seed = 9\n"
        "realizations = 200\n"
        "law = bernoulli:p=0.5\n"
        "coupling = 0\n"
        "dim = 1\n"
        "geometry = box\n"
        "side = 5\n"
        "energy = -5\n"
        "eta = 0.1\n"
        "kappa = 2.1\n"
        "mass0 = 0.2\n"
        "scales = 1\n"
        "zeta = 0.9\n");
    fs::path parent = fresh_dir("msa_parent");
    fs::create_directories(parent);
    fs::path dir = parent / "out";
    RunResult res = run_experiment(cfg, dir);
    CHECK(res.exit_code == 0);

    size_t parent_entries = 0;
    for (const auto& entry : fs::directory_iterator(parent)) {
        (void)entry;
        ++parent_entries;
    }
    CHECK(parent_entries == 1);  // only out/
    size_t out_entries = 0;
    for (const auto& entry : fs::directory_iterator(dir)) {
        CHECK(entry.is_regular_file());
        ++out_entries;
    }
    CHECK(out_entries == res.files.size());

    std::vector<Row> rows = read_rows(dir / "results.csv");
    CHECK(values_of(rows, "p_hat") == std::vector<double>{1.0});
    CHECK(values_of(rows, "verdict_pass") == std::vector<double>{1.0});
    std::string reports = slurp(dir / "scale_reports.csv");
    CHECK(reports.find("schema,k,L,E,N,good_count,p_hat,ci_lo,ci_hi,target,verdict") == 0);
}

TEST_CASE("ucp run writes trials and the frequency summary") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = ucp\n"
        "seed = 2\n"
        "realizations = 100\n"
        "law = bernoulli:p=0.5\n"
        "coupling = 1\n"
        "dim = 2\n"
        "side = 8\n"
        "epsilon = 0.1\n"
        "alpha = 1\n"
        "frozen_fraction = 0\n");
    fs::path dir = fresh_dir("ucp_clean");
    RunResult res = run_experiment(cfg, dir, 2);
    CHECK(res.exit_code == 0);
    std::vector<Row> rows = read_rows(dir / "results.csv");
    CHECK(values_of(rows, "accepted") == std::vector<double>{100.0});
    CHECK(values_of(rows, "rejected") == std::vector<double>{0.0});
    CHECK(values_of(rows, "frequency") == std::vector<double>{1.0});
    CHECK(values_of(rows, "frequency_pass") == std::vector<double>{1.0});

    std::string trials = slurp(dir / "trials.jsonl");
    size_t lines = 0;
    for (char c : trials) {
        if (c == '\n') ++lines;
    }
    CHECK(lines == 100);
    CHECK(trials.rfind("{\"schema\":1,", 0) == 0);
}

TEST_CASE("an irregular frozen pattern aborts with an incomplete manifest") {
    ExperimentConfig cfg = parse_or_fail(
        "experiment = ucp\n"
        "seed = 2\n"
        "realizations = 100\n"
        "law = bernoulli:p=0.5\n"
        "coupling = 1\n"
        "dim = 2\n"
        "side = 8\n"
        "epsilon = 0.1\n"
        "alpha = 1\n"
        "frozen_fraction = 0.25\n");
    fs::path dir = fresh_dir("ucp_rejected");
    RunResult res = run_experiment(cfg, dir);
    CHECK(res.exit_code == 2);
    CHECK(!res.error.empty());
    REQUIRE(res.files == std::vector<std::string>{"manifest.txt"});
    std::string manifest = slurp(dir / "manifest.txt");
    CHECK(manifest.find("# status = incomplete\n") != std::string::npos);
    CHECK(manifest.find("# error = ucp: ") != std::string::npos);
    CHECK(!fs::exists(dir / "results.csv"));

    ParseOutcome back = parse_config(manifest);
    REQUIRE(back.ok());
    CHECK(*back.config == cfg);
}
