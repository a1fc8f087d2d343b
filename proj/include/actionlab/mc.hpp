#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "actionlab/gaussian.hpp"
#include "actionlab/identity.hpp"
#include "actionlab/lattice.hpp"
#include "actionlab/rng.hpp"

namespace actionlab {

// ---------------------------------------------------------------------------
// Chain configuration and sample storage
// ---------------------------------------------------------------------------

struct MCConfig {
    long long n_sweeps = 0;
    long long burn_in = 0;
    double step_width = 0.5;
    int thinning = 1;
    std::uint64_t seed = 0;
    int bin_size = 2;
    bool tune_step = true;  // multiplicative step tuning during burn-in only
};

// Throws ConfigError on any invariant violation:
// n_sweeps > burn_in >= 0, step_width > 0, thinning >= 1, bin_size >= 2,
// retained = (n_sweeps - burn_in)/thinning >= 100*bin_size.
void validate_mc_config(const MCConfig& config);

// Which per-configuration measurements a chain records.
struct SampleLayout {
    std::vector<int> sites;                    // sorted unique interior sites
    std::vector<std::pair<int, int>> pairs;    // (tau, sigma), tau <= sigma
    std::vector<int> orders;                   // local-derivative orders >= 3

    int site_index(int site) const;            // ShapeError if absent
    int pair_index(int tau, int sigma) const;  // order-insensitive lookup
    int order_index(int order) const;
};

// One retained configuration's measurements (record view).
struct SampleRecord {
    double action = 0.0;
    std::vector<double> position;  // x_j, aligned with layout.sites
    std::vector<double> gradient;  // dS/dx_j, aligned with layout.sites
    std::vector<double> hessian;   // aligned with layout.pairs
    std::vector<double> local;     // [site-major x order], layout.sites x orders
};

// Column-major storage of the full retained stream.
struct SampleSet {
    SampleLayout layout;
    std::vector<double> action;                     // length M
    std::vector<std::vector<double>> position;      // [site][M]
    std::vector<std::vector<double>> gradient;      // [site][M]
    std::vector<std::vector<double>> hessian;       // [pair][M]
    std::vector<std::vector<double>> local;         // [site*orders+o][M]
    double mean_acceptance = 0.0;                   // post-burn-in average
    double final_step_width = 0.0;
    double hbar = 1.0;                              // sampling weight's hbar

    int size() const { return static_cast<int>(action.size()); }
    SampleRecord record(int m) const;               // ShapeError if out of range
};

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

// One full sweep of sequential single-site Metropolis proposals
// x_j -> x_j + u, u uniform in [-step_width, step_width], j = 1..N-1;
// endpoints are never proposed. Acceptance uses the local (two-link +
// one-site-potential) action change with weight exp(-dS/hbar), hbar taken
// from action.params. Returns the acceptance fraction. Two uniform draws are
// consumed per site regardless of the outcome, so a fixed seed yields a
// bit-identical decision trajectory.
double metropolis_sweep(const LatticeAction& action, Path& path, double step_width,
                        SplitMix64& rng);

// Runs a chain: burn_in sweeps discarded (with optional step tuning), then
// every thinning-th configuration measured. Record count is exactly
// (n_sweeps - burn_in) / thinning (integer division).
SampleSet run_chain(const LatticeAction& action, const MCConfig& config,
                    const std::vector<int>& sites, const std::vector<int>& derivative_orders);

// ---------------------------------------------------------------------------
// Estimation
// ---------------------------------------------------------------------------

// Evaluates the identity's per-sample residual and jackknifes it directly
// over bins (LHS and RHS are correlated; they are never error-propagated
// separately). Effective bin size = max(bin_size, ceil(6 * tau_int)) with
// tau_int measured on the action series. Fewer than 20 bins -> StatisticsError.
// EXP identities are served by reweighted_estimate, not here (UnsupportedError).
// NEGPOWER with any sampled S <= 0 -> DomainError.
CheckResult estimate_identity(const SampleSet& samples, const IdentityId& id, int sigma,
                              int tau, double hbar, int bin_size,
                              bool flip_hbar_sign = false, double pull_threshold = 4.0);

// Self-normalized reweighting for the EXP family: weights w = exp(-lambda S / hbar).
// Reports the Kish effective sample size in the note and flags ESS < 100 as
// unreliable. lambda <= -0.95 -> ConfigError (guard band before the lambda = -1
// degeneracy).
CheckResult reweighted_estimate(const SampleSet& samples, double lambda, int sigma,
                                double hbar, int bin_size = 2,
                                bool flip_hbar_sign = false, double pull_threshold = 4.0);

// Kish effective sample size of the EXP reweighting weights for this sample
// set (used to decide between reweighting and a direct tilted chain).
double reweighting_ess(const SampleSet& samples, double lambda, double hbar);

// ---------------------------------------------------------------------------
// Gaussian cross-checks
// ---------------------------------------------------------------------------

struct TwoPointResult {
    int site_i = 0;
    int site_j = 0;
    double value = 0.0;  // MC estimate of <xi_i xi_j>
    double err = 0.0;
    double exact = 0.0;  // propagator entry
    double pull = 0.0;
};

// Jackknifed MC fluctuation two-point function against the exact propagator,
// for every recorded site pair. Quadratic actions only.
std::vector<TwoPointResult> two_point_check(const SampleSet& samples,
                                            const LatticeAction& action,
                                            const QuadraticDecomposition& decomp,
                                            double hbar, int bin_size);

}  // namespace actionlab
