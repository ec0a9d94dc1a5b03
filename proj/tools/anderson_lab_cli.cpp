// anderson-lab: command line front end over the shared C API.
//
// Usage:
//   anderson-lab <experiment> --config <path> [--seed <u64>] [--out <dir>] [--workers <n>]
//   anderson-lab verify [--workers <n>]
//
// Exit codes: 0 success, 1 config error, 2 numerical failure,
// 3 verification failure.

#include "CLI11.hpp"
#include "anderson_lab.h"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunOptions {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
};

int run_one(const std::string& kind, const RunOptions& opt) {
    std::ifstream in(opt.config_path, std::ios::binary);
    if (!in) {
        std::fprintf(stderr, "anderson-lab: cannot read config file '%s'\n",
                     opt.config_path.c_str());
        return 1;
    }
    std::ostringstream text;
    text << in.rdbuf();

    anderson_lab_config* cfg = nullptr;
    if (anderson_lab_config_parse(text.str().c_str(), &cfg) != ANDERSON_LAB_OK) {
        std::fprintf(stderr, "anderson-lab: config error in '%s'\n%s\n",
                     opt.config_path.c_str(), anderson_lab_last_error());
        return 1;
    }

    const char* declared = anderson_lab_config_kind(cfg);
    if (kind != declared) {
        std::fprintf(stderr,
                     "anderson-lab: config declares experiment '%s' but the "
                     "'%s' subcommand was invoked\n",
                     declared, kind.c_str());
        anderson_lab_config_free(cfg);
        return 1;
    }

    if (opt.seed_given) {
        anderson_lab_config_set_seed(cfg, opt.seed);
    }

    anderson_lab_status rc =
        anderson_lab_run(cfg, opt.out_dir.c_str(), opt.workers);
    anderson_lab_config_free(cfg);
    if (rc != ANDERSON_LAB_OK) {
        std::fprintf(stderr, "anderson-lab: run failed: %s\n",
                     anderson_lab_last_error());
        return 2;
    }
    std::printf("wrote %s/manifest.txt\n", opt.out_dir.c_str());
    return 0;
}

int run_verify(int workers) {
    int unexpected = 0;
    anderson_lab_status rc = anderson_lab_verify(
        [](const char* line, void*) { std::printf("%s\n", line); }, nullptr,
        workers, &unexpected);
    if (rc == ANDERSON_LAB_OK) return 0;
    if (rc == ANDERSON_LAB_CHECK_FAILURE) {
        std::fprintf(stderr, "anderson-lab: %s\n", anderson_lab_last_error());
        return 3;
    }
    std::fprintf(stderr, "anderson-lab: verify failed: %s\n",
                 anderson_lab_last_error());
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Disorder, spectra and multiscale experiments"};
    app.set_version_flag("--version", std::string(anderson_lab_version()));
    app.require_subcommand(1);

    RunOptions opt;
    std::string chosen;
    for (const char* kind : {"spectrum", "classify", "wegner", "flip",
                             "sperner", "msa", "ucp"}) {
        auto* sub = app.add_subcommand(kind, std::string("run a ") + kind +
                                                 " experiment");
        sub->add_option("--config", opt.config_path, "experiment config file")
            ->required();
        sub->add_option("--seed", opt.seed, "override master_seed");
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--workers", opt.workers, "worker thread count")
            ->check(CLI::PositiveNumber);
        sub->callback([&chosen, kind] { chosen = kind; });
    }
    int verify_workers = 1;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--workers", verify_workers, "worker thread count")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    if (verify->parsed()) return run_verify(verify_workers);
    opt.seed_given = app.get_subcommand(chosen)->count("--seed") > 0;
    return run_one(chosen, opt);
}
