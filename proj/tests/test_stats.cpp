#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "actionlab/rng.hpp"
#include "actionlab/stats.hpp"

using namespace actionlab;

namespace {

// Box-Muller standard normals from the deterministic generator.
std::vector<double> normals(std::uint64_t seed, int n) {
    SplitMix64 rng(seed);
    std::vector<double> out;
    out.reserve(n + 1);
    while (static_cast<int>(out.size()) < n) {
        const double u1 = rng.next_u01();
        const double u2 = rng.next_u01();
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        out.push_back(r * std::cos(2.0 * M_PI * u2));
        out.push_back(r * std::sin(2.0 * M_PI * u2));
    }
    out.resize(n);
    return out;
}

}  // namespace

TEST_CASE("autocorrelation time: iid series sits at the floor") {
    const std::vector<double> xs = normals(7, 100000);
    const AutocorrResult r = autocorr_time(xs);
    CHECK(r.tau_int >= 0.5);
    CHECK(r.tau_int <= 0.65);
    CHECK(!r.degenerate);
}

TEST_CASE("autocorrelation time: AR(1) with rho = 0.9 gives tau near 9.5") {
    // tau_int = 1/2 + sum rho^t = 1/2 + rho/(1-rho) = 9.5 for rho = 0.9.
    const std::vector<double> xi = normals(42, 201000);
    std::vector<double> series;
    series.reserve(200000);
    double x = 0.0;
    for (int i = 0; i < 201000; ++i) {
        x = 0.9 * x + xi[i];
        if (i >= 1000) series.push_back(x);
    }
    const AutocorrResult r = autocorr_time(series);
    CHECK(r.tau_int == doctest::Approx(9.5).epsilon(0.20));
    CHECK(r.window > 0);
}

TEST_CASE("autocorrelation time: degenerate and short series") {
    const std::vector<double> flat(500, 3.25);
    const AutocorrResult r = autocorr_time(flat);
    CHECK(r.degenerate);
    CHECK(r.tau_int == 0.5);
    CHECK_THROWS_AS(autocorr_time(std::vector<double>(99, 1.0)), StatisticsError);
}

TEST_CASE("jackknife of a linear statistic reproduces the binned standard error") {
    // 40 bins, each accumulating {sum, count} for the running mean.
    SplitMix64 rng(11);
    const int b = 40, c = 25;
    std::vector<std::vector<double>> bins(b, std::vector<double>(2, 0.0));
    std::vector<double> bin_means(b);
    double total = 0.0;
    for (int j = 0; j < b; ++j) {
        for (int i = 0; i < c; ++i) bins[j][0] += rng.next_u01() + 0.5;
        bins[j][1] = c;
        bin_means[j] = bins[j][0] / c;
        total += bins[j][0];
    }
    const double v = total / (b * c);
    double var = 0.0;
    for (int j = 0; j < b; ++j) var += (bin_means[j] - v) * (bin_means[j] - v);
    const double expected_err = std::sqrt(var / (static_cast<double>(b) * (b - 1)));

    const JackknifeResult r = jackknife_bins(
        bins, [](const std::vector<double>& t) { return t[0] / t[1]; });
    CHECK(r.n_bins == b);
    CHECK(r.value == doctest::Approx(v).epsilon(1e-13));
    CHECK(r.err == doctest::Approx(expected_err).epsilon(1e-10));
}

TEST_CASE("jackknife input validation") {
    CHECK_THROWS_AS(jackknife_bins({{1.0}}, [](const std::vector<double>& t) { return t[0]; }),
                    StatisticsError);
    CHECK_THROWS_AS(jackknife_bins({{1.0, 2.0}, {1.0}},
                                   [](const std::vector<double>& t) { return t[0]; }),
                    ShapeError);
}

TEST_CASE("jackknife handles nonlinear (ratio) statistics") {
    // Self-normalized ratio <w f>/<w>: value must be ratio of totals.
    std::vector<std::vector<double>> bins = {
        {2.0, 1.0}, {3.0, 2.0}, {1.0, 0.5}, {4.0, 2.5}, {2.5, 1.5}};
    const JackknifeResult r = jackknife_bins(
        bins, [](const std::vector<double>& t) { return t[0] / t[1]; });
    CHECK(r.value == doctest::Approx(12.5 / 7.5).epsilon(1e-14));
    CHECK(r.err > 0.0);
}

TEST_CASE("linear fit recovers an exact line with zero errors") {
    const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0};
    std::vector<double> ys(4);
    for (int i = 0; i < 4; ++i) ys[i] = 2.0 + 3.0 * xs[i];
    const LinFit f = linear_fit(xs, ys);
    CHECK(f.intercept == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(f.slope == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(f.intercept_err <= 1e-12);
    CHECK(f.slope_err <= 1e-12);
}

TEST_CASE("linear fit standard errors follow the OLS formulas") {
    const std::vector<double> xs = {0.0, 1.0, 2.0, 3.0, 4.0};
    const std::vector<double> ys = {1.1, 2.9, 5.2, 6.8, 9.1};
    const LinFit f = linear_fit(xs, ys);

    // Independent accumulation of the textbook expressions.
    const int n = 5;
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n; my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    const double slope = sxy / sxx;
    const double intercept = my - slope * mx;
    double ssr = 0;
    for (int i = 0; i < n; ++i) {
        const double e = ys[i] - intercept - slope * xs[i];
        ssr += e * e;
    }
    const double s2 = ssr / (n - 2);
    CHECK(f.slope == doctest::Approx(slope).epsilon(1e-13));
    CHECK(f.intercept == doctest::Approx(intercept).epsilon(1e-13));
    CHECK(f.slope_err == doctest::Approx(std::sqrt(s2 / sxx)).epsilon(1e-12));
    CHECK(f.intercept_err ==
          doctest::Approx(std::sqrt(s2 * (1.0 / n + mx * mx / sxx))).epsilon(1e-12));
}

TEST_CASE("linear fit guards") {
    CHECK_THROWS_AS(linear_fit({1.0}, {2.0}), StatisticsError);
    CHECK_THROWS_AS(linear_fit({1.0, 1.0}, {2.0, 3.0}), StatisticsError);
    CHECK_THROWS_AS(linear_fit({1.0, 2.0}, {2.0}), ShapeError);
    const LinFit two = linear_fit({1.0, 2.0}, {5.0, 7.0});
    CHECK(two.slope == doctest::Approx(2.0));
    CHECK(two.slope_err == 0.0);  // no spare degrees of freedom
}

TEST_CASE("effective sample size") {
    CHECK(effective_sample_size(std::vector<double>(50, 2.0)) == doctest::Approx(50.0));
    CHECK(effective_sample_size({1.0, 0.0, 0.0}) == doctest::Approx(1.0));
    // Two equal weights among zeros -> ESS 2.
    CHECK(effective_sample_size({0.0, 5.0, 5.0, 0.0}) == doctest::Approx(2.0));
    CHECK_THROWS_AS(effective_sample_size({1.0, -0.1}), StatisticsError);
    CHECK_THROWS_AS(effective_sample_size({0.0, 0.0}), StatisticsError);
}

TEST_CASE("mean and standard error") {
    double m = 0.0, e = 0.0;
    mean_and_err({1.0, 2.0, 3.0, 4.0}, m, e);
    CHECK(m == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(e == doctest::Approx(std::sqrt(5.0 / 36.0 * 3.0)).epsilon(1e-13));  // sqrt(var/n), var = 5/3
    CHECK_THROWS_AS(mean_and_err({1.0}, m, e), StatisticsError);
}
