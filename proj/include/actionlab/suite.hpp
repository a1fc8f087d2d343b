#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "actionlab/identity.hpp"
#include "actionlab/lattice.hpp"
#include "actionlab/mc.hpp"

namespace actionlab {

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

enum class Backend { Exact, MonteCarlo, ZeroDim };

// "exact" | "monte-carlo" | "zerodim"
std::string backend_name(Backend backend);
// Accepts the canonical names plus the aliases "mc" and "zero-dim";
// anything else -> ConfigError.
Backend backend_from_name(const std::string& name);

// ---------------------------------------------------------------------------
// Defaults
// ---------------------------------------------------------------------------

// Default instance list in catalog order: EHRENFEST, POWER(1..3),
// NEGPOWER(1,2), EXP(0.5, 1.0), SECOND_VAR, CHAIN(3,4).
std::vector<IdentityId> default_identities();

// sigma defaults {N/4, N/2, 3N/4}, clamped to the interior 1..N-1 and
// deduplicated; tau(sigma) = {sigma - N/4, sigma, sigma + N/4}, likewise.
std::vector<int> default_sigmas(const LatticeAction& action);
std::vector<int> default_taus(const LatticeAction& action, int sigma);

// ---------------------------------------------------------------------------
// Suite configuration and report
// ---------------------------------------------------------------------------

struct SuiteConfig {
    std::vector<IdentityId> identities;  // empty -> default_identities()
    std::vector<int> sigmas;             // empty -> default_sigmas(action)
    bool full_site_sweep = false;        // sigma over every interior site
    double pull_threshold = 4.0;         // stochastic pass bound on |pull|
    MCConfig mc;                         // MonteCarlo backend only
    bool flip_hbar_sign = false;         // negative control: flips every 1/hbar
};

struct SuiteSummary {
    int n_checks = 0;
    int n_pass = 0;
    int n_fail = 0;
    int n_skipped = 0;  // declared skips, error skips included
    int n_error = 0;    // skip_reason prefixed "error: " (operational failure)
    double max_abs_pull = 0.0;
    double pull_variance = 0.0;  // over rows with residual_err > 0
    int exit_status = 0;         // 0 all pass, 1 any fail, 2 any error skip
};

struct SuiteReport {
    std::string model_description;
    std::string backend;
    std::uint64_t seed = 0;
    std::string config_hash = "0";
    std::string version;
    double pull_threshold = 4.0;
    std::vector<CheckResult> checks;
    SuiteSummary summary;
};

// Version string stamped into every report.
std::string version_string();

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

// One CheckResult per (identity instance, sigma[, tau]) in a deterministic
// order (identity list order outermost). Identity/backend mismatches and
// per-row estimator failures become skip records, never silent omissions;
// estimator failures carry an "error: " reason prefix. The ZeroDim backend
// evaluates the requested instances over the fixed five-model battery in both
// signatures (sigma = tau = 0; the lattice model is not consulted beyond
// hbar). Deterministic given config.mc.seed. The returned report already
// carries its summary (pass_fail has been applied).
SuiteReport evaluate_suite(Backend backend, const LatticeAction& action,
                           const SuiteConfig& config);

// Aggregates counts, max |pull|, pull variance, and the exit-status
// recommendation (0 all pass, 1 any fail, 2 any error skip); stores the
// summary into the report and returns it. Empty report -> ConfigError.
SuiteSummary pass_fail(SuiteReport& report);

}  // namespace actionlab
