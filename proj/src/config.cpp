#include "andlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>

#include "andlab/disorder.hpp"

namespace andlab {

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Spectrum: return "spectrum";
        case ExperimentKind::Classify: return "classify";
        case ExperimentKind::Wegner: return "wegner";
        case ExperimentKind::Flip: return "flip";
        case ExperimentKind::Sperner: return "sperner";
        case ExperimentKind::Msa: return "msa";
        case ExperimentKind::Ucp: return "ucp";
    }
    return "?";
}

std::optional<ExperimentKind> parse_kind(const std::string& text) {
    for (auto k : {ExperimentKind::Spectrum, ExperimentKind::Classify, ExperimentKind::Wegner,
                   ExperimentKind::Flip, ExperimentKind::Sperner, ExperimentKind::Msa,
                   ExperimentKind::Ucp})
        if (text == to_string(k)) return k;
    return std::nullopt;
}

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct RawEntry {
    int line = 0;
    std::string value;
    bool used = false;
};

class Parser {
  public:
    explicit Parser(const std::string& text) { split(text); }

    ParseOutcome run() {
        resolve_kind();
        resolve_bare_keys();

        ExperimentConfig cfg;
        if (kind_) cfg.kind = *kind_;
        read_run(cfg);
        read_model(cfg);
        if (kind_) read_experiment(cfg);
        flag_unused();
        if (kind_) validate(cfg);

        std::stable_sort(errors_.begin(), errors_.end(),
                         [](const ConfigError& a, const ConfigError& b) { return a.line < b.line; });
        ParseOutcome out;
        out.errors = std::move(errors_);
        if (out.errors.empty()) out.config = cfg;
        return out;
    }

  private:
    std::map<std::string, RawEntry> entries_;
    std::vector<ConfigError> errors_;
    std::optional<ExperimentKind> kind_;
    bool side_ok_ = false;

    void fail(int line, const std::string& message) { errors_.push_back({line, message}); }

    void split(const std::string& text) {
        std::istringstream in(text);
        std::string raw;
        int line = 0;
        while (std::getline(in, raw)) {
            ++line;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            raw = trim(raw);
            if (raw.empty()) continue;
            auto eq = raw.find('=');
            if (eq == std::string::npos) {
                fail(line, "expected `key = value`");
                continue;
            }
            std::string key = trim(raw.substr(0, eq));
            std::string value = trim(raw.substr(eq + 1));
            if (key.empty()) {
                fail(line, "missing key before `=`");
                continue;
            }
            if (value.empty()) {
                fail(line, key + ": missing value");
                continue;
            }
            if (auto it = entries_.find(key); it != entries_.end()) {
                fail(line, "duplicate key `" + key + "` (first set on line " +
                               std::to_string(it->second.line) + ")");
                continue;
            }
            entries_[key] = RawEntry{line, value, false};
        }
    }

    void resolve_kind() {
        RawEntry* e = find_raw("run.experiment");
        if (!e) e = find_raw("experiment");
        if (!e) {
            fail(0, "missing required key run.experiment");
            return;
        }
        e->used = true;
        kind_ = parse_kind(e->value);
        if (!kind_)
            fail(e->line, "run.experiment: unknown experiment `" + e->value +
                              "` (expected spectrum, classify, wegner, flip, sperner, msa, ucp)");
    }

    RawEntry* find_raw(const std::string& key) {
        auto it = entries_.find(key);
        return it == entries_.end() ? nullptr : &it->second;
    }

    /// Move bare keys to their canonical dotted name, complaining when the
    /// target is already set.
    void resolve_bare_keys() {
        const std::vector<std::pair<std::string, std::string>> aliases = {
            {"experiment", "run"},  {"seed", "run"},      {"realizations", "run"},
            {"law", "model"},       {"coupling", "model"}, {"dim", "model"},
            {"geometry", "model"},  {"side", "model"},
        };
        std::vector<std::pair<std::string, std::string>> moves;
        for (auto& [key, entry] : entries_) {
            if (key.find('.') != std::string::npos) continue;
            std::string section;
            for (const auto& [bare, sec] : aliases)
                if (key == bare) section = sec;
            if (section.empty() && kind_) section = to_string(*kind_);
            if (section.empty()) {
                if (!entry.used)
                    fail(entry.line, "key `" + key +
                                         "` cannot be resolved without run.experiment");
                entry.used = true;
                continue;
            }
            moves.emplace_back(key, section + "." + key);
        }
        for (const auto& [from, to] : moves) {
            auto node = entries_.extract(from);
            if (auto clash = find_raw(to)) {
                fail(node.mapped().line, "key `" + from + "` duplicates `" + to +
                                             "` (set on line " + std::to_string(clash->line) + ")");
                continue;
            }
            node.key() = to;
            entries_.insert(std::move(node));
        }
    }

    // ---- typed readers ---------------------------------------------------

    std::optional<double> read_double(const std::string& key) {
        RawEntry* e = find_raw(key);
        if (!e) return std::nullopt;
        e->used = true;
        const char* begin = e->value.c_str();
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0' || !std::isfinite(v)) {
            fail(e->line, key + ": `" + e->value + "` is not a finite number");
            return std::nullopt;
        }
        return v;
    }

    std::optional<long long> read_integer(const std::string& key) {
        RawEntry* e = find_raw(key);
        if (!e) return std::nullopt;
        e->used = true;
        long long v = 0;
        auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (ec != std::errc{} || p != e->value.data() + e->value.size()) {
            fail(e->line, key + ": `" + e->value + "` is not an integer");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::uint64_t> read_seed(const std::string& key) {
        RawEntry* e = find_raw(key);
        if (!e) return std::nullopt;
        e->used = true;
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(e->value.data(), e->value.data() + e->value.size(), v);
        if (ec != std::errc{} || p != e->value.data() + e->value.size()) {
            fail(e->line, key + ": `" + e->value + "` is not an unsigned 64-bit integer");
            return std::nullopt;
        }
        return v;
    }

    std::optional<std::string> read_string(const std::string& key) {
        RawEntry* e = find_raw(key);
        if (!e) return std::nullopt;
        e->used = true;
        return e->value;
    }

    /// `center +- halfwidth` (also the single-character +- sign) or `[lo, hi]`.
    std::optional<Interval> read_interval(const std::string& key) {
        RawEntry* e = find_raw(key);
        if (!e) return std::nullopt;
        e->used = true;
        const std::string& v = e->value;

        auto parse_num = [&](const std::string& s, double& out) {
            std::string t = trim(s);
            const char* begin = t.c_str();
            char* end = nullptr;
            out = std::strtod(begin, &end);
            return end != begin && *end == '\0' && std::isfinite(out);
        };

        if (!v.empty() && v.front() == '[') {
            auto close = v.find(']');
            auto comma = v.find(',');
            double lo = 0.0, hi = 0.0;
            if (close != v.size() - 1 || comma == std::string::npos || comma > close ||
                !parse_num(v.substr(1, comma - 1), lo) ||
                !parse_num(v.substr(comma + 1, close - comma - 1), hi) || lo > hi) {
                fail(e->line, key + ": expected `[lo, hi]` with lo <= hi");
                return std::nullopt;
            }
            return Interval(lo, hi);
        }

        size_t mark = v.find("±");
        size_t mark_len = 2;
        if (mark == std::string::npos) {
            mark = v.find("+-");
            mark_len = 2;
        }
        double center = 0.0, half = 0.0;
        if (mark == std::string::npos || !parse_num(v.substr(0, mark), center) ||
            !parse_num(v.substr(mark + mark_len), half) || half < 0.0) {
            fail(e->line, key + ": expected `center +- halfwidth` or `[lo, hi]`");
            return std::nullopt;
        }
        return Interval::centered(center, half);
    }

    std::optional<Site> read_site(const std::string& key) {
        RawEntry* e = find_raw(key);
        if (!e) return std::nullopt;
        e->used = true;
        std::istringstream in(e->value);
        std::vector<int> coords;
        int c = 0;
        while (in >> c) coords.push_back(c);
        if (!in.eof() || coords.empty() || coords.size() > 3) {
            fail(e->line, key + ": expected 1 to 3 integer coordinates");
            return std::nullopt;
        }
        Site s{0, 0, 0};
        for (size_t i = 0; i < coords.size(); ++i) s[i] = coords[i];
        return s;
    }

    int line_of(const std::string& key) {
        RawEntry* e = find_raw(key);
        return e ? e->line : 0;
    }

    void require(bool present, const std::string& key) {
        if (!present) fail(0, "missing required key " + key);
    }

    // ---- sections ---------------------------------------------------------

    void read_run(ExperimentConfig& cfg) {
        if (auto v = read_seed("run.seed")) cfg.master_seed = *v;
        if (auto v = read_integer("run.realizations")) {
            if (*v < 1)
                fail(line_of("run.realizations"), "run.realizations: must be >= 1");
            else
                cfg.realizations = *v;
        }
    }

    void read_model(ExperimentConfig& cfg) {
        if (auto v = read_string("model.law")) cfg.law_spec = *v;
        if (auto v = read_double("model.coupling")) cfg.coupling = *v;
        if (auto v = read_integer("model.dim")) cfg.dim = static_cast<int>(*v);
        if (auto v = read_string("model.geometry")) {
            if (*v == "box")
                cfg.geometry = GeometryKind::Box;
            else if (*v == "path")
                cfg.geometry = GeometryKind::Path;
            else if (*v == "tilted")
                cfg.geometry = GeometryKind::Tilted;
            else
                fail(line_of("model.geometry"),
                     "model.geometry: `" + *v + "` is not box, path, or tilted");
        } else if (kind_ == ExperimentKind::Ucp) {
            cfg.geometry = GeometryKind::Tilted;
        }
        if (auto v = read_integer("model.side")) {
            cfg.side = static_cast<int>(*v);
            side_ok_ = true;
        }
        require(side_ok_ || find_raw("model.side"), "model.side");
    }

    void read_experiment(ExperimentConfig& cfg) {
        switch (*kind_) {
            case ExperimentKind::Spectrum: break;
            case ExperimentKind::Classify: {
                bool e = false, m = false;
                if (auto v = read_double("classify.energy")) cfg.energy = *v, e = true;
                if (auto v = read_double("classify.mass")) cfg.mass = *v, m = true;
                if (auto v = read_double("classify.zeta")) cfg.zeta = *v;
                require(e || find_raw("classify.energy"), "classify.energy");
                require(m || find_raw("classify.mass"), "classify.mass");
                break;
            }
            case ExperimentKind::Wegner: {
                bool w = false;
                if (auto v = read_interval("wegner.interval")) cfg.window = *v, w = true;
                require(w || find_raw("wegner.interval"), "wegner.interval");
                break;
            }
            case ExperimentKind::Flip: {
                if (auto v = read_site("flip.site")) cfg.flip_site = *v;
                if (auto v = read_integer("flip.grid")) cfg.flip_grid = static_cast<int>(*v);
                break;
            }
            case ExperimentKind::Sperner: {
                bool w = false;
                if (auto v = read_interval("sperner.interval")) cfg.window = *v, w = true;
                require(w || find_raw("sperner.interval"), "sperner.interval");
                break;
            }
            case ExperimentKind::Msa: {
                bool e = false, k = false, m = false;
                if (auto v = read_double("msa.energy")) cfg.energy = *v, e = true;
                if (auto v = read_double("msa.eta")) cfg.msa_eta = *v;
                if (auto v = read_double("msa.kappa")) cfg.msa_kappa = *v, k = true;
                if (auto v = read_double("msa.mass0")) cfg.msa_mass0 = *v, m = true;
                if (auto v = read_integer("msa.scales")) cfg.msa_scales = static_cast<int>(*v);
                if (auto v = read_double("msa.zeta")) cfg.zeta = *v;
                require(e || find_raw("msa.energy"), "msa.energy");
                require(k || find_raw("msa.kappa"), "msa.kappa");
                require(m || find_raw("msa.mass0"), "msa.mass0");
                break;
            }
            case ExperimentKind::Ucp: {
                if (auto v = read_double("ucp.epsilon")) cfg.ucp_epsilon = *v;
                if (auto v = read_double("ucp.alpha")) cfg.ucp_alpha = *v;
                if (auto v = read_double("ucp.frozen_fraction")) cfg.ucp_frozen_fraction = *v;
                break;
            }
        }
    }

    void flag_unused() {
        for (const auto& [key, entry] : entries_)
            if (!entry.used) {
                std::string scope = kind_ ? std::string(" for experiment `") +
                                                to_string(*kind_) + "`"
                                          : "";
                fail(entry.line, "unknown key `" + key + "`" + scope);
            }
    }

    // ---- domain checks ----------------------------------------------------

    void check(bool ok, const std::string& key, const std::string& must) {
        if (!ok) fail(line_of(key), key + ": " + must);
    }

    void validate(ExperimentConfig& cfg) {
        try {
            SiteLaw::parse(cfg.law_spec);
        } catch (const std::exception& ex) {
            fail(line_of("model.law"), std::string("model.law: ") + ex.what());
        }
        check(cfg.coupling >= 0.0 && std::isfinite(cfg.coupling), "model.coupling",
              "must be a finite value >= 0");
        check(cfg.dim >= 1 && cfg.dim <= 3, "model.dim", "must be 1, 2, or 3");
        const bool side_known = side_ok_;

        switch (cfg.geometry) {
            case GeometryKind::Box:
                if (side_known)
                    check(cfg.side >= 1 && cfg.side % 2 == 1, "model.side",
                          "box side must be a positive odd integer");
                break;
            case GeometryKind::Path:
                check(cfg.dim == 1, "model.geometry", "path geometry requires dim 1");
                if (side_known) check(cfg.side >= 1, "model.side", "path length must be >= 1");
                break;
            case GeometryKind::Tilted:
                check(cfg.kind == ExperimentKind::Ucp || cfg.kind == ExperimentKind::Spectrum,
                      "model.geometry", "tilted squares drive only spectrum and ucp runs");
                check(cfg.dim == 2, "model.dim", "tilted geometry requires dim 2");
                break;
        }

        long long sites = 1;
        for (int k = 0; k < cfg.dim && cfg.geometry == GeometryKind::Box; ++k) sites *= cfg.side;
        if (cfg.geometry == GeometryKind::Path) sites = cfg.side;

        switch (cfg.kind) {
            case ExperimentKind::Spectrum: break;
            case ExperimentKind::Classify:
                check(cfg.geometry == GeometryKind::Box, "model.geometry",
                      "classify runs on boxes");
                check(cfg.mass > 0.0 && cfg.mass < 1.0, "classify.mass", "must lie in (0, 1)");
                check(cfg.zeta > 0.0 && cfg.zeta < 1.0, "classify.zeta", "must lie in (0, 1)");
                break;
            case ExperimentKind::Wegner:
                check(cfg.geometry == GeometryKind::Box, "model.geometry", "wegner runs on boxes");
                check(cfg.realizations >= 100, "run.realizations",
                      "wegner needs at least 100 realizations");
                break;
            case ExperimentKind::Flip:
                check(cfg.geometry != GeometryKind::Tilted, "model.geometry",
                      "flip runs on boxes or paths");
                check(cfg.flip_grid >= 2, "flip.grid", "must be >= 2");
                if (!side_known) break;
                if (cfg.geometry == GeometryKind::Box) {
                    bool inside = true;
                    for (int k = 0; k < 3; ++k) {
                        int r = k < cfg.dim ? cfg.side / 2 : 0;
                        inside = inside && cfg.flip_site[k] >= -r && cfg.flip_site[k] <= r;
                    }
                    check(inside, "flip.site", "must lie inside the box around the origin");
                } else {
                    check(cfg.flip_site[0] >= 0 && cfg.flip_site[0] < cfg.side &&
                              cfg.flip_site[1] == 0 && cfg.flip_site[2] == 0,
                          "flip.site", "must lie on the path 0..side-1");
                }
                break;
            case ExperimentKind::Sperner: {
                check(cfg.geometry != GeometryKind::Tilted, "model.geometry",
                      "sperner runs on boxes or paths");
                SiteLaw law = SiteLaw::bernoulli(0.5);
                try {
                    law = SiteLaw::parse(cfg.law_spec);
                } catch (const std::exception&) {
                }
                check(law.kind == LawKind::Bernoulli, "model.law",
                      "sperner enumeration needs a Bernoulli law");
                if (side_known)
                    check(sites <= 20, "model.side",
                          "sperner enumerates 2^n configurations and caps n at 20");
                break;
            }
            case ExperimentKind::Msa:
                check(cfg.geometry == GeometryKind::Box, "model.geometry", "msa runs on boxes");
                if (side_known)
                    check(cfg.side >= 5 && cfg.side % 2 == 1, "model.side",
                          "base scale must be odd and >= 5");
                check(cfg.msa_eta > 0.0 && cfg.msa_eta <= 0.1, "msa.eta",
                      "must lie in (0, 0.1]");
                check(cfg.msa_kappa > 2.0 * cfg.dim, "msa.kappa",
                      "must exceed twice the dimension");
                check(cfg.msa_mass0 > 0.0 && cfg.msa_mass0 < 1.0, "msa.mass0",
                      "must lie in (0, 1)");
                check(cfg.msa_scales >= 1, "msa.scales", "must be >= 1");
                check(cfg.zeta > 0.0 && cfg.zeta < 1.0, "msa.zeta", "must lie in (0, 1)");
                check(cfg.realizations >= 200, "run.realizations",
                      "msa needs at least 200 realizations per scale");
                break;
            case ExperimentKind::Ucp:
                check(cfg.geometry == GeometryKind::Tilted, "model.geometry",
                      "ucp runs on tilted squares");
                if (side_known)
                    check(cfg.side >= 8, "model.side", "tilted square side must be >= 8");
                check(cfg.ucp_epsilon > 0.0 && std::isfinite(cfg.ucp_epsilon), "ucp.epsilon",
                      "must be positive");
                check(cfg.ucp_alpha > 0.0 && std::isfinite(cfg.ucp_alpha), "ucp.alpha",
                      "must be positive");
                check(cfg.ucp_frozen_fraction >= 0.0 && cfg.ucp_frozen_fraction <= 0.25,
                      "ucp.frozen_fraction", "must lie in [0, 0.25]");
                check(cfg.realizations >= 100, "run.realizations",
                      "ucp needs at least 100 trials");
                break;
        }
    }
};

}  // namespace

ParseOutcome parse_config(const std::string& text) { return Parser(text).run(); }

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "run.experiment = " << to_string(cfg.kind) << "\n";
    out << "run.seed = " << cfg.master_seed << "\n";
    out << "run.realizations = " << cfg.realizations << "\n";
    out << "model.law = " << cfg.law_spec << "\n";
    out << "model.coupling = " << fmt_double(cfg.coupling) << "\n";
    out << "model.dim = " << cfg.dim << "\n";
    const char* geom = cfg.geometry == GeometryKind::Box
                           ? "box"
                           : cfg.geometry == GeometryKind::Path ? "path" : "tilted";
    out << "model.geometry = " << geom << "\n";
    out << "model.side = " << cfg.side << "\n";

    auto interval = [&](const char* key, const Interval& I) {
        out << key << " = [" << fmt_double(I.lo) << ", " << fmt_double(I.hi) << "]\n";
    };
    switch (cfg.kind) {
        case ExperimentKind::Spectrum: break;
        case ExperimentKind::Classify:
            out << "classify.energy = " << fmt_double(cfg.energy) << "\n";
            out << "classify.mass = " << fmt_double(cfg.mass) << "\n";
            out << "classify.zeta = " << fmt_double(cfg.zeta) << "\n";
            break;
        case ExperimentKind::Wegner:
            interval("wegner.interval", cfg.window);
            break;
        case ExperimentKind::Flip:
            out << "flip.site =";
            for (int k = 0; k < cfg.dim; ++k) out << " " << cfg.flip_site[k];
            out << "\n";
            out << "flip.grid = " << cfg.flip_grid << "\n";
            break;
        case ExperimentKind::Sperner:
            interval("sperner.interval", cfg.window);
            break;
        case ExperimentKind::Msa:
            out << "msa.energy = " << fmt_double(cfg.energy) << "\n";
            out << "msa.eta = " << fmt_double(cfg.msa_eta) << "\n";
            out << "msa.kappa = " << fmt_double(cfg.msa_kappa) << "\n";
            out << "msa.mass0 = " << fmt_double(cfg.msa_mass0) << "\n";
            out << "msa.scales = " << cfg.msa_scales << "\n";
            out << "msa.zeta = " << fmt_double(cfg.zeta) << "\n";
            break;
        case ExperimentKind::Ucp:
            out << "ucp.epsilon = " << fmt_double(cfg.ucp_epsilon) << "\n";
            out << "ucp.alpha = " << fmt_double(cfg.ucp_alpha) << "\n";
            out << "ucp.frozen_fraction = " << fmt_double(cfg.ucp_frozen_fraction) << "\n";
            break;
    }
    return out.str();
}

}  // namespace andlab
