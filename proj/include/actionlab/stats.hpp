#pragma once

#include <functional>
#include <vector>

#include "actionlab/errors.hpp"

namespace actionlab {

// ---------------------------------------------------------------------------
// Integrated autocorrelation time (self-consistent windowing)
// ---------------------------------------------------------------------------

struct AutocorrResult {
    double tau_raw = 0.5;        // windowed estimate before clamping
    double tau_int = 0.5;        // max(tau_raw, 0.5), the value consumers use
    int window = 0;              // summation window W actually used
    bool window_hit_end = false; // sum still growing at the n/4 cap
    bool clamped = false;        // tau_raw fell below the iid floor of 0.5
    bool degenerate = false;     // constant series, no correlation structure
};

// tau(W) = 1/2 + sum_{t=1..W} Gamma(t) with Gamma the normalized
// autocovariance; W is the first lag at which the running sum stops growing
// (Gamma(W) <= 0), capped at n/4. Anticorrelated series can push tau_raw
// below 0.5; tau_int clamps it. Throws StatisticsError for length < 100.
AutocorrResult autocorr_time(const std::vector<double>& series);

// ---------------------------------------------------------------------------
// Bin jackknife for (possibly nonlinear) estimators
// ---------------------------------------------------------------------------

struct JackknifeResult {
    double value = 0.0;  // statistic on the full sample
    double err = 0.0;    // jackknife standard error over leave-one-bin-out
    int n_bins = 0;
};

// bin_sums[b] holds additive accumulators for bin b (all bins the same
// length); `statistic` maps a vector of totals to the estimator value. The
// leave-one-out replicate for bin b is statistic(totals - bin_sums[b]).
// Throws StatisticsError for fewer than 2 bins, ShapeError on ragged input.
JackknifeResult jackknife_bins(
    const std::vector<std::vector<double>>& bin_sums,
    const std::function<double(const std::vector<double>&)>& statistic);

// ---------------------------------------------------------------------------
// Ordinary least squares line fit
// ---------------------------------------------------------------------------

struct LinFit {
    double intercept = 0.0;
    double slope = 0.0;
    double intercept_err = 0.0;  // standard errors from residual variance
    double slope_err = 0.0;      // (zero when the fit has no spare dof)
    int n = 0;
};

// Unweighted OLS of y on x. Requires n >= 2 distinct abscissas; standard
// errors use s^2 = SSR/(n-2) and are reported as 0 when n == 2.
LinFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys);

// ---------------------------------------------------------------------------
// Importance-sampling diagnostics
// ---------------------------------------------------------------------------

// Kish effective sample size (sum w)^2 / sum w^2 for nonnegative weights.
double effective_sample_size(const std::vector<double>& weights);

// Convenience: mean and standard error of an iid sample (n >= 2).
void mean_and_err(const std::vector<double>& xs, double& mean, double& err);

}  // namespace actionlab
