#pragma once

#include <string>
#include <vector>

#include "actionlab/lattice.hpp"
#include "actionlab/suite.hpp"

namespace actionlab {

inline MCConfig default_mc_config() {
    MCConfig c;
    c.n_sweeps = 200000;
    c.burn_in = 20000;
    c.step_width = 0.5;
    c.thinning = 10;
    c.seed = 12345;
    c.bin_size = 2;
    c.tune_step = true;
    return c;
}

// Fully validated run configuration; field defaults are the documented ones.
// Sections and keys (INI grammar, "#" comments, comma-separated lists):
//   [model]   potential (free|harmonic|quartic), mass, omega, g, hbar
//   [lattice] n_slices, t_total, x_start, x_end
//   [mc]      n_sweeps, burn_in, step_width, thinning, seed, bin_size, tune_step
//   [checks]  families, power, negpower, lambda, chain, sigma,
//             full_site_sweep, pull_threshold
//   [run]     backend (exact|monte-carlo|zerodim), flip_hbar_sign
//   [output]  dir, formats (json,csv,text), basename
struct RunConfig {
    // [model]
    std::string potential = "harmonic";
    double mass = 1.0;
    double omega = 1.0;
    double g = 0.0;
    double hbar = 1.0;
    // [lattice]
    int n_slices = 16;
    double t_total = 8.0;
    double x_start = 0.0;
    double x_end = 1.0;
    // [mc]
    MCConfig mc = default_mc_config();
    // [checks]
    std::vector<std::string> families = {"EHRENFEST", "POWER",      "NEGPOWER",
                                         "EXP",       "SECOND_VAR", "CHAIN"};
    std::vector<int> power_n = {1, 2, 3};
    std::vector<int> negpower_n = {1, 2};
    std::vector<double> exp_lambda = {0.5, 1.0};
    std::vector<int> chain_m = {3, 4};
    std::vector<int> sigmas;  // empty -> suite default policy
    bool full_site_sweep = false;
    double pull_threshold = 4.0;
    // [run]
    std::string backend = "exact";
    bool flip_hbar_sign = false;
    // [output]
    std::string out_dir;  // empty -> CLI default (flag, env var, then cwd)
    std::vector<std::string> formats = {"json"};
    std::string basename = "report";
};

// Parses and validates; every error is a ConfigError naming the offending
// file:line (syntax, unknown section/key) or section.field (invariant).
// Unknown keys suggest the nearest valid key in the section when the edit
// distance is <= 2.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& origin);

// Deterministic canonical rendering: every field, fixed order, one
// "section.key=value" per line, floats in %.17g.
std::string canonical_config(const RunConfig& config);

// FNV-1a 64-bit digest of canonical_config, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& config);

// Derived, validated objects.
LatticeAction action_from_config(const RunConfig& config);
std::vector<IdentityId> identities_from_config(const RunConfig& config);
SuiteConfig suite_from_config(const RunConfig& config);
Backend backend_from_config(const RunConfig& config);

}  // namespace actionlab
