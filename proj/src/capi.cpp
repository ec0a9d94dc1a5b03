#include "anderson_lab.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <ostream>
#include <streambuf>
#include <string>

#include "andlab/acceptance.hpp"
#include "andlab/common.hpp"
#include "andlab/config.hpp"
#include "andlab/runner.hpp"

struct anderson_lab_config {
    andlab::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

anderson_lab_status fail(anderson_lab_status status, std::string message) {
    g_last_error = std::move(message);
    return status;
}

anderson_lab_status ok() {
    g_last_error.clear();
    return ANDERSON_LAB_OK;
}

/// Forwards whole lines to a C callback as they are written.
class LineCallbackBuf : public std::streambuf {
public:
    LineCallbackBuf(anderson_lab_line_fn fn, void* user_data) : fn_(fn), user_data_(user_data) {}

protected:
    int overflow(int ch) override {
        if (ch == traits_type::eof()) return 0;
        if (ch == '\n') {
            if (fn_ != nullptr) fn_(line_.c_str(), user_data_);
            line_.clear();
        } else {
            line_.push_back(static_cast<char>(ch));
        }
        return ch;
    }

private:
    anderson_lab_line_fn fn_;
    void* user_data_;
    std::string line_;
};

}  // namespace

extern "C" {

const char* anderson_lab_version(void) { return andlab::kVersion; }

const char* anderson_lab_last_error(void) { return g_last_error.c_str(); }

anderson_lab_status anderson_lab_config_parse(const char* text,
                                              anderson_lab_config** out_config) {
    if (text == nullptr || out_config == nullptr)
        return fail(ANDERSON_LAB_INVALID_ARGUMENT, "null argument");
    *out_config = nullptr;
    try {
        andlab::ParseOutcome outcome = andlab::parse_config(text);
        if (!outcome.ok()) {
            std::string joined;
            for (const andlab::ConfigError& e : outcome.errors) {
                if (!joined.empty()) joined += '\n';
                if (e.line > 0) joined += "line " + std::to_string(e.line) + ": ";
                joined += e.message;
            }
            return fail(ANDERSON_LAB_CONFIG_ERROR, joined);
        }
        *out_config = new anderson_lab_config{*outcome.config};
        return ok();
    } catch (const std::exception& e) {
        return fail(ANDERSON_LAB_CONFIG_ERROR, e.what());
    }
}

void anderson_lab_config_free(anderson_lab_config* config) { delete config; }

const char* anderson_lab_config_kind(const anderson_lab_config* config) {
    if (config == nullptr) return nullptr;
    return andlab::to_string(config->cfg.kind);
}

anderson_lab_status anderson_lab_config_set_seed(anderson_lab_config* config, uint64_t seed) {
    if (config == nullptr) return fail(ANDERSON_LAB_INVALID_ARGUMENT, "null config");
    config->cfg.master_seed = seed;
    return ok();
}

char* anderson_lab_config_serialize(const anderson_lab_config* config) {
    if (config == nullptr) {
        fail(ANDERSON_LAB_INVALID_ARGUMENT, "null config");
        return nullptr;
    }
    std::string text = andlab::serialize_config(config->cfg);
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    if (out == nullptr) {
        fail(ANDERSON_LAB_NUMERIC_ERROR, "out of memory");
        return nullptr;
    }
    std::memcpy(out, text.c_str(), text.size() + 1);
    g_last_error.clear();
    return out;
}

void anderson_lab_string_free(char* text) { std::free(text); }

anderson_lab_status anderson_lab_run(const anderson_lab_config* config, const char* out_dir,
                                     int workers) {
    if (config == nullptr || out_dir == nullptr)
        return fail(ANDERSON_LAB_INVALID_ARGUMENT, "null argument");
    try {
        andlab::RunResult result = andlab::run_experiment(config->cfg, out_dir, workers);
        if (result.exit_code != 0) return fail(ANDERSON_LAB_NUMERIC_ERROR, result.error);
        return ok();
    } catch (const std::exception& e) {
        return fail(ANDERSON_LAB_NUMERIC_ERROR, e.what());
    }
}

anderson_lab_status anderson_lab_verify(anderson_lab_line_fn on_line, void* user_data,
                                        int workers, int* out_unexpected) {
    try {
        LineCallbackBuf buf(on_line, user_data);
        std::ostream progress(&buf);
        std::vector<andlab::CriterionResult> results =
            andlab::run_acceptance(workers, {}, on_line != nullptr ? &progress : nullptr);
        int unexpected = 0;
        for (const andlab::CriterionResult& r : results) {
            if (!r.pass && !r.expected_unattainable) ++unexpected;
        }
        if (out_unexpected != nullptr) *out_unexpected = unexpected;
        if (unexpected > 0)
            return fail(ANDERSON_LAB_CHECK_FAILURE,
                        std::to_string(unexpected) + " unexpected criterion failure(s)");
        return ok();
    } catch (const std::exception& e) {
        return fail(ANDERSON_LAB_CHECK_FAILURE, e.what());
    }
}

}  // extern "C"
