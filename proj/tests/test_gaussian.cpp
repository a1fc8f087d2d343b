#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "actionlab/gaussian.hpp"

using namespace actionlab;

namespace {

LatticeAction harmonic_16() {
    return make_action({1.0, 1.0}, make_grid(8.0, 16), {0.0, 1.0}, Potential::harmonic(1.0));
}

// Independent Isserlis enumerator (used-flag recursion, unlike the library's
// swap-based walk) for cross-checking wick_moment.
double brute_pairings(const Propagator& g, const std::vector<int>& sites,
                      std::vector<bool>& used) {
    std::size_t first = 0;
    while (first < sites.size() && used[first]) ++first;
    if (first == sites.size()) return 1.0;
    used[first] = true;
    double total = 0.0;
    for (std::size_t j = first + 1; j < sites.size(); ++j) {
        if (used[j]) continue;
        used[j] = true;
        total += g.at(sites[first], sites[j]) * brute_pairings(g, sites, used);
        used[j] = false;
    }
    used[first] = false;
    return total;
}

double brute_moment(const Propagator& g, const std::vector<int>& sites) {
    if (sites.size() % 2 == 1) return 0.0;
    std::vector<bool> used(sites.size(), false);
    return brute_pairings(g, sites, used);
}

}  // namespace

TEST_CASE("decompose_quadratic accepts quadratic potentials only") {
    CHECK_THROWS_AS(decompose_quadratic(make_action({1.0, 1.0}, make_grid(8.0, 16), {0.0, 1.0},
                                                    Potential::quartic(1.0, 0.1))),
                    UnsupportedError);
    const QuadraticDecomposition d = decompose_quadratic(harmonic_16());
    CHECK(d.fluctuation.size() == 15);
    CHECK(d.s_classical > 0.0);
    // The decomposition is exact: S(classical + xi) - s_cl == xi^T A xi / 2.
    const LatticeAction a = harmonic_16();
    Path perturbed = d.classical;
    std::vector<double> xi(15);
    for (int j = 1; j <= 15; ++j) {
        xi[j - 1] = 0.3 * std::sin(1.9 * j) + 0.1;
        perturbed.values[j] += xi[j - 1];
    }
    const double lhs = action_value(a, perturbed) - d.s_classical;
    const std::vector<double> axi = d.fluctuation.matvec(xi);
    double quad = 0.0;
    for (int i = 0; i < 15; ++i) quad += 0.5 * xi[i] * axi[i];
    CHECK(lhs == doctest::Approx(quad).epsilon(1e-12));
}

TEST_CASE("free-particle propagator matches the closed form") {
    // G_ij = hbar dt min(i,j) (N - max(i,j)) / (m N)
    const LatticeAction a =
        make_action({1.0, 1.0}, make_grid(4.0, 4), {0.0, 0.0}, Potential::free_particle());
    const Propagator g = propagator(decompose_quadratic(a), 1.0);
    REQUIRE(g.n == 3);
    const double dt = 1.0;
    for (int i = 1; i <= 3; ++i)
        for (int j = 1; j <= 3; ++j) {
            const double exact = dt * std::min(i, j) * (4 - std::max(i, j)) / 4.0;
            CHECK(g.at(i, j) == doctest::Approx(exact).epsilon(1e-12));
        }
}

TEST_CASE("propagator inverts the fluctuation matrix and scales with hbar") {
    const QuadraticDecomposition d = decompose_quadratic(harmonic_16());
    const Propagator g1 = propagator(d, 1.0);
    const Propagator g2 = propagator(d, 2.0);
    for (int j = 1; j <= 15; ++j) {
        std::vector<double> col(15);
        for (int i = 1; i <= 15; ++i) col[i - 1] = g1.at(i, j);
        const std::vector<double> back = d.fluctuation.matvec(col);
        for (int i = 1; i <= 15; ++i)
            CHECK(back[i - 1] == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-10));
        for (int i = 1; i <= 15; ++i)
            CHECK(g2.at(i, j) == doctest::Approx(2.0 * g1.at(i, j)).epsilon(1e-12));
    }
    for (int i = 1; i <= 15; ++i)
        for (int j = 1; j <= 15; ++j) CHECK(g1.at(i, j) == g1.at(j, i));
    CHECK_THROWS_AS(propagator(d, 0.0), ConfigError);
}

TEST_CASE("wick moments: parity, pairs, and the Isserlis sum") {
    const LatticeAction a =
        make_action({1.0, 1.0}, make_grid(4.0, 8), {0.0, 0.0}, Potential::free_particle());
    const Propagator g = propagator(decompose_quadratic(a), 1.0);

    CHECK(wick_moment(g, {}) == 1.0);
    CHECK(wick_moment(g, {3}) == 0.0);
    CHECK(wick_moment(g, {1, 2, 3}) == 0.0);
    CHECK(wick_moment(g, {2, 5}) == doctest::Approx(g.at(2, 5)).epsilon(1e-14));

    // Fourth moment, all pairings written out.
    const double m4 = g.at(1, 2) * g.at(3, 4) + g.at(1, 3) * g.at(2, 4) +
                      g.at(1, 4) * g.at(2, 3);
    CHECK(wick_moment(g, {1, 2, 3, 4}) == doctest::Approx(m4).epsilon(1e-12));

    // Sixth and eighth moments against the independent enumerator.
    const std::vector<int> s6 = {1, 1, 2, 2, 3, 3};
    CHECK(wick_moment(g, s6) == doctest::Approx(brute_moment(g, s6)).epsilon(1e-12));
    const std::vector<int> s8 = {1, 2, 2, 4, 5, 5, 6, 7};
    CHECK(wick_moment(g, s8) == doctest::Approx(brute_moment(g, s8)).epsilon(1e-12));
}

TEST_CASE("wick moments: diagonal covariance sanity") {
    const Propagator g = diagonal_propagator({2.0, 3.0});
    CHECK(wick_moment(g, {1, 1}) == doctest::Approx(2.0));
    CHECK(wick_moment(g, {1, 2}) == doctest::Approx(0.0));
    CHECK(wick_moment(g, {1, 1, 1, 1}) == doctest::Approx(3.0 * 4.0).epsilon(1e-13));   // 3 G^2
    CHECK(wick_moment(g, {2, 2, 2, 2, 2, 2}) == doctest::Approx(15.0 * 27.0).epsilon(1e-13));
}

TEST_CASE("wick moment guards") {
    const Propagator g = diagonal_propagator({1.0, 1.0});
    CHECK_THROWS_AS(wick_moment(g, std::vector<int>(14, 1)), LimitError);
    CHECK_THROWS_AS(wick_moment(g, {0}), ShapeError);
    CHECK_THROWS_AS(wick_moment(g, {3}), ShapeError);
}

TEST_CASE("exact checks pass for every supported family on the harmonic lattice") {
    const LatticeAction a = harmonic_16();
    const QuadraticDecomposition d = decompose_quadratic(a);
    const std::vector<IdentityId> ids = {
        IdentityId::ehrenfest(),     IdentityId::power(1),  IdentityId::power(2),
        IdentityId::power(3),        IdentityId::power(4),  IdentityId::exponential(0.5),
        IdentityId::exponential(1.0), IdentityId::second_var(), IdentityId::chain(3),
        IdentityId::chain(4)};
    for (const IdentityId& id : ids) {
        const CheckResult r = exact_check(a, d, 1.0, id, 8, 8);
        INFO(r.check_id);
        CHECK(r.pass);
        CHECK(std::abs(r.residual) <= 1e-10 * (1.0 + std::abs(r.lhs) + std::abs(r.rhs)));
        CHECK(r.residual_err == 0.0);
        CHECK(r.paper_eq == paper_tag(id));
    }
}

TEST_CASE("second variation equals hbar times the fluctuation matrix, entrywise") {
    const LatticeAction a = harmonic_16();
    const QuadraticDecomposition d = decompose_quadratic(a);
    for (int tau = 7; tau <= 10; ++tau) {
        const CheckResult r = exact_check(a, d, 1.0, IdentityId::second_var(), 8, tau);
        double entry = 0.0;
        if (tau == 8) entry = 4.5;
        else if (std::abs(tau - 8) == 1) entry = -2.0;
        CHECK(r.lhs == doctest::Approx(entry).scale(1.0).epsilon(1e-12));
        CHECK(r.rhs == doctest::Approx(entry).scale(1.0).epsilon(1e-10));
        CHECK(r.pass);
    }
}

TEST_CASE("exact backend limits and guards") {
    const LatticeAction a = harmonic_16();
    const QuadraticDecomposition d = decompose_quadratic(a);
    CHECK_THROWS_AS(exact_check(a, d, 1.0, IdentityId::power(5), 8, 0), LimitError);
    CHECK_THROWS_AS(exact_check(a, d, 1.0, IdentityId::negpower(1), 8, 0), UnsupportedError);
    CHECK_THROWS_AS(exact_check(a, d, 1.0, IdentityId::ehrenfest(), 0, 0), ConfigError);
    CHECK_THROWS_AS(exact_check(a, d, 1.0, IdentityId::second_var(), 8, 16), ConfigError);
}

TEST_CASE("flip control breaks the two-sided identities") {
    const LatticeAction a = harmonic_16();
    const QuadraticDecomposition d = decompose_quadratic(a);
    const CheckResult r = exact_check(a, d, 1.0, IdentityId::second_var(), 8, 8, true);
    CHECK(!r.pass);
    CHECK(r.lhs == doctest::Approx(4.5).epsilon(1e-12));
    CHECK(r.rhs == doctest::Approx(-4.5).epsilon(1e-10));
    // One-sided identities are immune: their right side is identically zero.
    CHECK(exact_check(a, d, 1.0, IdentityId::ehrenfest(), 8, 0, true).pass);
}

TEST_CASE("action moments match the dense trace formulas") {
    const LatticeAction a = harmonic_16();
    const QuadraticDecomposition d = decompose_quadratic(a);
    const double hbar = 1.0;
    const Propagator g = propagator(d, hbar);
    const int n = g.n;

    // Dense A G, A G A G, ... products give the cumulants of Q = xi^T A xi / 2
    // independently: kappa_p = (1/2) (p-1)! tr((A G)^p).
    std::vector<double> ag(n * n, 0.0);
    for (int i = 1; i <= n; ++i)
        for (int j = 1; j <= n; ++j) {
            double v = 0.0;
            if (i > 1) v += d.fluctuation.off[i - 2] * g.at(i - 1, j);
            v += d.fluctuation.diag[i - 1] * g.at(i, j);
            if (i < n) v += d.fluctuation.off[i - 1] * g.at(i + 1, j);
            ag[(i - 1) * n + (j - 1)] = v;
        }
    auto trace_power = [&](int p) {
        std::vector<double> acc = ag;
        for (int q = 1; q < p; ++q) {
            std::vector<double> next(n * n, 0.0);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k)
                    for (int j = 0; j < n; ++j)
                        next[i * n + j] += acc[i * n + k] * ag[k * n + j];
            acc = std::move(next);
        }
        double t = 0.0;
        for (int i = 0; i < n; ++i) t += acc[i * n + i];
        return t;
    };
    const double k1 = 0.5 * trace_power(1);
    const double k2 = 0.5 * trace_power(2);
    const double k3 = trace_power(3);
    const double s = d.s_classical;

    CHECK(action_moment(d, hbar, 1) == doctest::Approx(s + k1).epsilon(1e-12));
    CHECK(action_moment(d, hbar, 2) ==
          doctest::Approx(s * s + 2.0 * s * k1 + k2 + k1 * k1).epsilon(1e-12));
    const double m3 = s * s * s + 3.0 * s * s * k1 + 3.0 * s * (k2 + k1 * k1) +
                      (k3 + 3.0 * k2 * k1 + k1 * k1 * k1);
    CHECK(action_moment(d, hbar, 3) == doctest::Approx(m3).epsilon(1e-12));

    CHECK_THROWS_AS(action_moment(d, hbar, 0), ConfigError);
    CHECK_THROWS_AS(action_moment(d, hbar, 5), LimitError);
}
