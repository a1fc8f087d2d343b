#include "actionlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "actionlab/errors.hpp"

namespace actionlab {

namespace {

// ---------------------------------------------------------------------------
// Lexical helpers
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(value);
    while (std::getline(ss, item, ',')) out.push_back(trim(item));
    if (!out.empty() && out.back().empty()) out.pop_back();  // trailing comma
    return out;
}

int edit_distance(const std::string& a, const std::string& b) {
    const std::size_t n = a.size(), m = b.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

struct FieldError {
    std::string where;  // "origin:line" or "section.key"
};

[[noreturn]] void fail(const std::string& where, const std::string& why) {
    throw ConfigError(where + ": " + why);
}

double parse_double(const std::string& where, const std::string& v) {
    if (v.empty()) fail(where, "empty value");
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end != v.c_str() + v.size()) fail(where, "'" + v + "' is not a number");
    return x;
}

long long parse_int(const std::string& where, const std::string& v) {
    if (v.empty()) fail(where, "empty value");
    char* end = nullptr;
    const long long x = std::strtoll(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size()) fail(where, "'" + v + "' is not an integer");
    return x;
}

std::uint64_t parse_u64(const std::string& where, const std::string& v) {
    if (v.empty()) fail(where, "empty value");
    if (v[0] == '-') fail(where, "'" + v + "' must be non-negative");
    char* end = nullptr;
    const unsigned long long x = std::strtoull(v.c_str(), &end, 10);
    if (end != v.c_str() + v.size()) fail(where, "'" + v + "' is not an integer");
    return x;
}

bool parse_bool(const std::string& where, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    fail(where, "'" + v + "' is not a boolean (use true or false)");
}

// ---------------------------------------------------------------------------
// Grammar: sections and keys
// ---------------------------------------------------------------------------

const std::map<std::string, std::vector<std::string>>& grammar() {
    static const std::map<std::string, std::vector<std::string>> g = {
        {"model", {"potential", "mass", "omega", "g", "hbar"}},
        {"lattice", {"n_slices", "t_total", "x_start", "x_end"}},
        {"mc",
         {"n_sweeps", "burn_in", "step_width", "thinning", "seed", "bin_size",
          "tune_step"}},
        {"checks",
         {"families", "power", "negpower", "lambda", "chain", "sigma",
          "full_site_sweep", "pull_threshold"}},
        {"run", {"backend", "flip_hbar_sign"}},
        {"output", {"dir", "formats", "basename"}},
    };
    return g;
}

std::string suggest_key(const std::string& section, const std::string& key) {
    int best = 3;
    std::string who;
    for (const std::string& k : grammar().at(section)) {
        const int d = edit_distance(key, k);
        if (d < best) {
            best = d;
            who = k;
        }
    }
    return who;
}

// ---------------------------------------------------------------------------
// Key application
// ---------------------------------------------------------------------------

void apply_key(RunConfig& c, const std::string& where, const std::string& section,
               const std::string& key, const std::string& value) {
    if (section == "model") {
        if (key == "potential") c.potential = value;
        else if (key == "mass") c.mass = parse_double(where, value);
        else if (key == "omega") c.omega = parse_double(where, value);
        else if (key == "g") c.g = parse_double(where, value);
        else if (key == "hbar") c.hbar = parse_double(where, value);
    } else if (section == "lattice") {
        if (key == "n_slices") c.n_slices = static_cast<int>(parse_int(where, value));
        else if (key == "t_total") c.t_total = parse_double(where, value);
        else if (key == "x_start") c.x_start = parse_double(where, value);
        else if (key == "x_end") c.x_end = parse_double(where, value);
    } else if (section == "mc") {
        if (key == "n_sweeps") c.mc.n_sweeps = parse_int(where, value);
        else if (key == "burn_in") c.mc.burn_in = parse_int(where, value);
        else if (key == "step_width") c.mc.step_width = parse_double(where, value);
        else if (key == "thinning") c.mc.thinning = static_cast<int>(parse_int(where, value));
        else if (key == "seed") c.mc.seed = parse_u64(where, value);
        else if (key == "bin_size") c.mc.bin_size = static_cast<int>(parse_int(where, value));
        else if (key == "tune_step") c.mc.tune_step = parse_bool(where, value);
    } else if (section == "checks") {
        if (key == "families") {
            c.families = split_list(value);
        } else if (key == "power") {
            c.power_n.clear();
            for (const std::string& v : split_list(value))
                c.power_n.push_back(static_cast<int>(parse_int(where, v)));
        } else if (key == "negpower") {
            c.negpower_n.clear();
            for (const std::string& v : split_list(value))
                c.negpower_n.push_back(static_cast<int>(parse_int(where, v)));
        } else if (key == "lambda") {
            c.exp_lambda.clear();
            for (const std::string& v : split_list(value))
                c.exp_lambda.push_back(parse_double(where, v));
        } else if (key == "chain") {
            c.chain_m.clear();
            for (const std::string& v : split_list(value))
                c.chain_m.push_back(static_cast<int>(parse_int(where, v)));
        } else if (key == "sigma") {
            c.sigmas.clear();
            for (const std::string& v : split_list(value))
                c.sigmas.push_back(static_cast<int>(parse_int(where, v)));
        } else if (key == "full_site_sweep") {
            c.full_site_sweep = parse_bool(where, value);
        } else if (key == "pull_threshold") {
            c.pull_threshold = parse_double(where, value);
        }
    } else if (section == "run") {
        if (key == "backend") c.backend = value;
        else if (key == "flip_hbar_sign") c.flip_hbar_sign = parse_bool(where, value);
    } else if (section == "output") {
        if (key == "dir") c.out_dir = value;
        else if (key == "formats") c.formats = split_list(value);
        else if (key == "basename") c.basename = value;
    }
}

// ---------------------------------------------------------------------------
// Semantic validation (field-attributed)
// ---------------------------------------------------------------------------

void validate(const RunConfig& c) {
    if (c.potential != "free" && c.potential != "harmonic" && c.potential != "quartic")
        fail("model.potential", "'" + c.potential +
                                    "' is not a potential (free, harmonic, quartic)");
    if (!(c.mass > 0.0)) fail("model.mass", "must be > 0");
    if (!(c.hbar > 0.0)) fail("model.hbar", "must be > 0");
    if (c.omega < 0.0) fail("model.omega", "must be >= 0");
    if (c.potential == "free" && (c.omega != 0.0 || c.g != 0.0))
        fail("model.potential", "free potential requires omega = 0 and g = 0");
    if (c.potential == "harmonic" && c.g != 0.0)
        fail("model.g", "harmonic potential requires g = 0 (use potential = quartic)");
    if (c.potential == "quartic" && c.g < 0.0)
        fail("model.g", "must be >= 0 (a negative quartic coupling is unbounded below)");

    if (c.n_slices < 2) fail("lattice.n_slices", "must be >= 2 (got " +
                                                      std::to_string(c.n_slices) + ")");
    if (!(c.t_total > 0.0)) fail("lattice.t_total", "must be > 0");

    try {
        validate_mc_config(c.mc);
    } catch (const ConfigError& e) {
        fail("mc", e.what());
    }

    static const std::vector<std::string> known_families = {
        "EHRENFEST", "POWER", "NEGPOWER", "EXP", "SECOND_VAR", "CHAIN"};
    if (c.families.empty()) fail("checks.families", "must not be empty");
    for (const std::string& f : c.families)
        if (std::find(known_families.begin(), known_families.end(), f) ==
            known_families.end())
            fail("checks.families", "'" + f +
                                        "' is not an identity family (EHRENFEST, POWER, "
                                        "NEGPOWER, EXP, SECOND_VAR, CHAIN)");
    for (int n : c.power_n)
        if (n < 1) fail("checks.power", "exponents must be >= 1");
    for (int n : c.negpower_n)
        if (n < 1) fail("checks.negpower", "exponents must be >= 1");
    for (double l : c.exp_lambda)
        if (l <= -0.95)
            fail("checks.lambda",
                 "lambda must be > -0.95 (the identity degenerates at lambda = -1)");
    for (int m : c.chain_m)
        if (m < 3) fail("checks.chain", "orders must be >= 3");
    for (int s : c.sigmas)
        if (s < 1 || s > c.n_slices - 1)
            fail("checks.sigma", "site " + std::to_string(s) +
                                     " is outside the interior 1.." +
                                     std::to_string(c.n_slices - 1));
    if (!(c.pull_threshold > 0.0)) fail("checks.pull_threshold", "must be > 0");

    try {
        backend_from_name(c.backend);
    } catch (const ConfigError& e) {
        fail("run.backend", e.what());
    }

    if (c.formats.empty()) fail("output.formats", "must not be empty");
    for (const std::string& f : c.formats)
        if (f != "json" && f != "csv" && f != "text")
            fail("output.formats", "'" + f + "' is not a format (json, csv, text)");
    if (c.basename.empty() || c.basename.find('/') != std::string::npos)
        fail("output.basename", "must be a non-empty name without '/'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::string section;
    std::map<std::string, bool> seen;  // "section.key" duplicates

    std::stringstream ss(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(ss, raw)) {
        ++line_no;
        const std::string where = origin + ":" + std::to_string(line_no);
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(where, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (grammar().find(section) == grammar().end())
                fail(where, "unknown section [" + section +
                                "] (model, lattice, mc, checks, run, output)");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(where, "expected 'key = value' (got '" + line + "')");
        if (section.empty())
            fail(where, "key before any [section] header");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(where, "empty key");

        const std::vector<std::string>& keys = grammar().at(section);
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            const std::string hint = suggest_key(section, key);
            std::string msg = "unknown key '" + key + "' in [" + section + "]";
            if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
            fail(where, msg);
        }
        const std::string slot = section + "." + key;
        if (seen[slot]) fail(where, "duplicate key '" + key + "' in [" + section + "]");
        seen[slot] = true;

        apply_key(config, where, section, key, value);
    }

    validate(config);
    return config;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config file not found or unreadable: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Canonical form and hash
// ---------------------------------------------------------------------------

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

template <typename T, typename F>
std::string join(const std::vector<T>& v, F render) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += render(v[i]);
    }
    return out;
}

}  // namespace

std::string canonical_config(const RunConfig& c) {
    std::string s;
    s += "model.potential=" + c.potential + "\n";
    s += "model.mass=" + fmt_double(c.mass) + "\n";
    s += "model.omega=" + fmt_double(c.omega) + "\n";
    s += "model.g=" + fmt_double(c.g) + "\n";
    s += "model.hbar=" + fmt_double(c.hbar) + "\n";
    s += "lattice.n_slices=" + std::to_string(c.n_slices) + "\n";
    s += "lattice.t_total=" + fmt_double(c.t_total) + "\n";
    s += "lattice.x_start=" + fmt_double(c.x_start) + "\n";
    s += "lattice.x_end=" + fmt_double(c.x_end) + "\n";
    s += "mc.n_sweeps=" + std::to_string(c.mc.n_sweeps) + "\n";
    s += "mc.burn_in=" + std::to_string(c.mc.burn_in) + "\n";
    s += "mc.step_width=" + fmt_double(c.mc.step_width) + "\n";
    s += "mc.thinning=" + std::to_string(c.mc.thinning) + "\n";
    s += "mc.seed=" + std::to_string(c.mc.seed) + "\n";
    s += "mc.bin_size=" + std::to_string(c.mc.bin_size) + "\n";
    s += std::string("mc.tune_step=") + (c.mc.tune_step ? "true" : "false") + "\n";
    s += "checks.families=" + join(c.families, [](const std::string& f) { return f; }) + "\n";
    s += "checks.power=" +
         join(c.power_n, [](int n) { return std::to_string(n); }) + "\n";
    s += "checks.negpower=" +
         join(c.negpower_n, [](int n) { return std::to_string(n); }) + "\n";
    s += "checks.lambda=" + join(c.exp_lambda, fmt_double) + "\n";
    s += "checks.chain=" + join(c.chain_m, [](int m) { return std::to_string(m); }) + "\n";
    s += "checks.sigma=" + join(c.sigmas, [](int v) { return std::to_string(v); }) + "\n";
    s += std::string("checks.full_site_sweep=") + (c.full_site_sweep ? "true" : "false") +
         "\n";
    s += "checks.pull_threshold=" + fmt_double(c.pull_threshold) + "\n";
    s += "run.backend=" + c.backend + "\n";
    s += std::string("run.flip_hbar_sign=") + (c.flip_hbar_sign ? "true" : "false") + "\n";
    s += "output.dir=" + c.out_dir + "\n";
    s += "output.formats=" + join(c.formats, [](const std::string& f) { return f; }) + "\n";
    s += "output.basename=" + c.basename + "\n";
    return s;
}

std::string config_hash(const RunConfig& c) {
    const std::string canon = canonical_config(c);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// ---------------------------------------------------------------------------
// Derived objects
// ---------------------------------------------------------------------------

LatticeAction action_from_config(const RunConfig& c) {
    Potential pot;
    if (c.potential == "free")
        pot = Potential::free_particle();
    else if (c.potential == "harmonic")
        pot = Potential::harmonic(c.omega);
    else
        pot = Potential::quartic(c.omega, c.g);
    return make_action({c.mass, c.hbar}, make_grid(c.t_total, c.n_slices),
                       {c.x_start, c.x_end}, pot);
}

std::vector<IdentityId> identities_from_config(const RunConfig& c) {
    auto wants = [&](const char* family) {
        return std::find(c.families.begin(), c.families.end(), family) !=
               c.families.end();
    };
    std::vector<IdentityId> ids;
    if (wants("EHRENFEST")) ids.push_back(IdentityId::ehrenfest());
    if (wants("POWER"))
        for (int n : c.power_n) ids.push_back(IdentityId::power(n));
    if (wants("NEGPOWER"))
        for (int n : c.negpower_n) ids.push_back(IdentityId::negpower(n));
    if (wants("EXP"))
        for (double l : c.exp_lambda) ids.push_back(IdentityId::exponential(l));
    if (wants("SECOND_VAR")) ids.push_back(IdentityId::second_var());
    if (wants("CHAIN"))
        for (int m : c.chain_m) ids.push_back(IdentityId::chain(m));
    if (ids.empty()) throw ConfigError("checks: no identity instances selected");
    return ids;
}

SuiteConfig suite_from_config(const RunConfig& c) {
    SuiteConfig s;
    s.identities = identities_from_config(c);
    s.sigmas = c.sigmas;
    s.full_site_sweep = c.full_site_sweep;
    s.pull_threshold = c.pull_threshold;
    s.mc = c.mc;
    s.flip_hbar_sign = c.flip_hbar_sign;
    return s;
}

Backend backend_from_config(const RunConfig& c) { return backend_from_name(c.backend); }

}  // namespace actionlab
