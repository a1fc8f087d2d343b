#include "actionlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace actionlab {

AutocorrResult autocorr_time(const std::vector<double>& series) {
    const int n = static_cast<int>(series.size());
    if (n < 100)
        throw StatisticsError("autocorr_time requires at least 100 samples, got " +
                              std::to_string(n));

    double mean = 0.0;
    for (double x : series) mean += x;
    mean /= n;

    double c0 = 0.0;
    for (double x : series) c0 += (x - mean) * (x - mean);
    c0 /= n;

    AutocorrResult r;
    if (c0 == 0.0) {  // constant series: no correlation structure to measure
        r.degenerate = true;
        r.tau_raw = 0.5;
        r.tau_int = 0.5;
        r.window = 0;
        return r;
    }

    // Window rule: accumulate Gamma(t) until the running sum stops growing
    // (first non-positive Gamma, included), capped at n/4.
    const int w_max = n / 4;
    double tau = 0.5;
    int w = 0;
    bool stopped = false;
    for (int t = 1; t <= w_max; ++t) {
        double ct = 0.0;
        for (int i = 0; i + t < n; ++i) ct += (series[i] - mean) * (series[i + t] - mean);
        ct /= n;
        tau += ct / c0;
        w = t;
        if (ct <= 0.0) {
            stopped = true;
            break;
        }
    }
    r.tau_raw = tau;
    r.window = w;
    r.window_hit_end = !stopped;
    r.clamped = tau < 0.5;
    r.tau_int = std::max(0.5, tau);
    return r;
}

JackknifeResult jackknife_bins(
    const std::vector<std::vector<double>>& bin_sums,
    const std::function<double(const std::vector<double>&)>& statistic) {
    const int b = static_cast<int>(bin_sums.size());
    if (b < 2) throw StatisticsError("jackknife_bins requires at least 2 bins");
    const std::size_t k = bin_sums[0].size();
    for (const auto& row : bin_sums)
        if (row.size() != k) throw ShapeError("jackknife_bins: ragged bin accumulators");

    std::vector<double> totals(k, 0.0);
    for (const auto& row : bin_sums)
        for (std::size_t i = 0; i < k; ++i) totals[i] += row[i];

    JackknifeResult r;
    r.n_bins = b;
    r.value = statistic(totals);

    std::vector<double> reps(b);
    std::vector<double> loo(k);
    double rep_mean = 0.0;
    for (int j = 0; j < b; ++j) {
        for (std::size_t i = 0; i < k; ++i) loo[i] = totals[i] - bin_sums[j][i];
        reps[j] = statistic(loo);
        rep_mean += reps[j];
    }
    rep_mean /= b;

    double var = 0.0;
    for (int j = 0; j < b; ++j) var += (reps[j] - rep_mean) * (reps[j] - rep_mean);
    var *= static_cast<double>(b - 1) / b;
    r.err = std::sqrt(var);
    return r;
}

LinFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const int n = static_cast<int>(xs.size());
    if (ys.size() != xs.size()) throw ShapeError("linear_fit: xs and ys differ in length");
    if (n < 2) throw StatisticsError("linear_fit requires at least 2 points");

    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;

    double sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw StatisticsError("linear_fit: all abscissas coincide");

    LinFit f;
    f.n = n;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    if (n > 2) {
        double ssr = 0.0;
        for (int i = 0; i < n; ++i) {
            const double resid = ys[i] - f.intercept - f.slope * xs[i];
            ssr += resid * resid;
        }
        const double s2 = ssr / (n - 2);
        f.slope_err = std::sqrt(s2 / sxx);
        f.intercept_err = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    }
    return f;
}

double effective_sample_size(const std::vector<double>& weights) {
    double s1 = 0.0, s2 = 0.0;
    for (double w : weights) {
        if (w < 0.0 || !std::isfinite(w))
            throw StatisticsError("effective_sample_size: weights must be finite and >= 0");
        s1 += w;
        s2 += w * w;
    }
    if (s2 == 0.0) throw StatisticsError("effective_sample_size: all weights are zero");
    return s1 * s1 / s2;
}

void mean_and_err(const std::vector<double>& xs, double& mean, double& err) {
    const int n = static_cast<int>(xs.size());
    if (n < 2) throw StatisticsError("mean_and_err requires at least 2 samples");
    mean = 0.0;
    for (double x : xs) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= (n - 1);
    err = std::sqrt(var / n);
}

}  // namespace actionlab
