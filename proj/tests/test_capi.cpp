#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "anderson_lab.h"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const char* kSpectrumConfig =
    "run.experiment = spectrum\n"
    "run.seed = 5\n"
    "run.realizations = 3\n"
    "model.law = uniform\n"
    "model.coupling = 0\n"
    "model.dim = 1\n"
    "model.geometry = path\n"
    "model.side = 2\n";

fs::path fresh_dir(const std::string& leaf) {
    fs::path dir = fs::temp_directory_path() / "andlab_capi" / leaf;
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("version string matches the manifest header") {
    CHECK(std::string(anderson_lab_version()) == "0.1.0");
}

TEST_CASE("null arguments are rejected without crashing") {
    CHECK(anderson_lab_config_parse(nullptr, nullptr) ==
          ANDERSON_LAB_INVALID_ARGUMENT);
    CHECK(anderson_lab_config_set_seed(nullptr, 1) ==
          ANDERSON_LAB_INVALID_ARGUMENT);
    CHECK(anderson_lab_config_serialize(nullptr) == nullptr);
    CHECK(anderson_lab_config_kind(nullptr) == nullptr);
    CHECK(anderson_lab_run(nullptr, "x", 1) == ANDERSON_LAB_INVALID_ARGUMENT);
    anderson_lab_config_free(nullptr);
    anderson_lab_string_free(nullptr);
}

TEST_CASE("parse failure reports every error with its line number") {
    anderson_lab_config* cfg = reinterpret_cast<anderson_lab_config*>(1);
    anderson_lab_status rc = anderson_lab_config_parse(
        "run.experiment = msa\nmsa.eta = 0.15\nbogus = 1\n", &cfg);
    CHECK(rc == ANDERSON_LAB_CONFIG_ERROR);
    CHECK(cfg == nullptr);
    std::string err = anderson_lab_last_error();
    CHECK(err.find("line 2") != std::string::npos);
    CHECK(err.find("line 3") != std::string::npos);
}

TEST_CASE("parse, inspect, serialize round-trip") {
    anderson_lab_config* cfg = nullptr;
    REQUIRE(anderson_lab_config_parse(kSpectrumConfig, &cfg) ==
            ANDERSON_LAB_OK);
    CHECK(std::string(anderson_lab_config_kind(cfg)) == "spectrum");

    char* text = anderson_lab_config_serialize(cfg);
    REQUIRE(text != nullptr);
    anderson_lab_config* again = nullptr;
    REQUIRE(anderson_lab_config_parse(text, &again) == ANDERSON_LAB_OK);
    char* text2 = anderson_lab_config_serialize(again);
    REQUIRE(text2 != nullptr);
    CHECK(std::strcmp(text, text2) == 0);
    anderson_lab_string_free(text);
    anderson_lab_string_free(text2);
    anderson_lab_config_free(again);
    anderson_lab_config_free(cfg);
}

TEST_CASE("run writes the expected files and honors the seed override") {
    anderson_lab_config* cfg = nullptr;
    REQUIRE(anderson_lab_config_parse(kSpectrumConfig, &cfg) ==
            ANDERSON_LAB_OK);
    REQUIRE(anderson_lab_config_set_seed(cfg, 77) == ANDERSON_LAB_OK);

    fs::path dir = fresh_dir("run");
    REQUIRE(anderson_lab_run(cfg, dir.string().c_str(), 1) ==
            ANDERSON_LAB_OK);
    anderson_lab_config_free(cfg);

    CHECK(fs::exists(dir / "manifest.txt"));
    CHECK(fs::exists(dir / "results.csv"));
    std::ifstream manifest(dir / "manifest.txt");
    std::string body((std::istreambuf_iterator<char>(manifest)),
                     std::istreambuf_iterator<char>());
    CHECK(body.find("run.seed = 77") != std::string::npos);
    CHECK(body.find("# status = complete") != std::string::npos);
}

TEST_CASE("numerical failures surface as a status with an explanation") {
    anderson_lab_config* cfg = nullptr;
    REQUIRE(anderson_lab_config_parse(
                "run.experiment = ucp\n"
                "run.seed = 5\n"
                "run.realizations = 100\n"
                "model.law = uniform\n"
                "model.coupling = 1\n"
                "model.dim = 2\n"
                "model.geometry = tilted\n"
                "model.side = 8\n"
                "ucp.epsilon = 0.1\n"
                "ucp.alpha = 1\n"
                "ucp.frozen_fraction = 0.25\n",
                &cfg) == ANDERSON_LAB_OK);
    fs::path dir = fresh_dir("ucp_fail");
    CHECK(anderson_lab_run(cfg, dir.string().c_str(), 1) ==
          ANDERSON_LAB_NUMERIC_ERROR);
    anderson_lab_config_free(cfg);
    std::string err = anderson_lab_last_error();
    CHECK(err.find("ucp") != std::string::npos);
    CHECK(fs::exists(dir / "manifest.txt"));
}
