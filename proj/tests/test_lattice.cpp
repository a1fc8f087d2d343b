#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "actionlab/lattice.hpp"

using namespace actionlab;

namespace {

LatticeAction harmonic_16() {
    return make_action({1.0, 1.0}, make_grid(8.0, 16), {0.0, 1.0}, Potential::harmonic(1.0));
}

double max_abs_gradient(const LatticeAction& a, const Path& p) {
    double m = 0.0;
    for (double g : action_gradient(a, p)) m = std::max(m, std::abs(g));
    return m;
}

}  // namespace

TEST_CASE("time grid construction") {
    const TimeGrid g = make_grid(8.0, 16);
    CHECK(g.t_total == 8.0);
    CHECK(g.n_slices == 16);
    CHECK(g.dt == 0.5);
    CHECK_THROWS_AS(make_grid(0.0, 16), ConfigError);
    CHECK_THROWS_AS(make_grid(-1.0, 16), ConfigError);
    CHECK_THROWS_AS(make_grid(8.0, 1), ConfigError);
    CHECK_THROWS_AS(make_grid(8.0, 0), ConfigError);
}

TEST_CASE("action construction validates parameters") {
    CHECK_THROWS_AS(make_action({0.0, 1.0}, make_grid(1.0, 2), {0, 0}, Potential::free_particle()),
                    ConfigError);
    CHECK_THROWS_AS(make_action({1.0, 0.0}, make_grid(1.0, 2), {0, 0}, Potential::free_particle()),
                    ConfigError);
    CHECK_THROWS_AS(Potential::harmonic(0.0), ConfigError);
    CHECK_THROWS_AS(Potential::harmonic(-1.0), ConfigError);
    CHECK_THROWS_AS(Potential::quartic(-1.0, 0.1), ConfigError);
    CHECK_THROWS_AS(Potential::quartic(1.0, -0.1), ConfigError);
}

TEST_CASE("potential derivatives, quartic") {
    const Potential v = Potential::quartic(2.0, 0.3);
    const double m = 1.5, x = 2.0;
    // V = (1/2) m w^2 x^2 + g x^4 and its x-derivatives.
    CHECK(v.derivative(0, x, m) == doctest::Approx(16.8).epsilon(1e-14));
    CHECK(v.derivative(1, x, m) == doctest::Approx(21.6).epsilon(1e-14));
    CHECK(v.derivative(2, x, m) == doctest::Approx(20.4).epsilon(1e-14));
    CHECK(v.derivative(3, x, m) == doctest::Approx(14.4).epsilon(1e-14));
    CHECK(v.derivative(4, x, m) == doctest::Approx(7.2).epsilon(1e-14));
    CHECK(v.derivative(5, x, m) == 0.0);
    CHECK(v.derivative(9, x, m) == 0.0);
    CHECK_THROWS_AS(v.derivative(-1, x, m), ConfigError);
    CHECK(Potential::free_particle().derivative(0, 3.0, 2.0) == 0.0);
    CHECK(Potential::harmonic(2.0).is_quadratic());
    CHECK(!Potential::quartic(1.0, 0.1).is_quadratic());
    CHECK(Potential::quartic(1.0, 0.0).is_quadratic());
}

TEST_CASE("linear path endpoints and interpolation") {
    const LatticeAction a = harmonic_16();
    const Path p = linear_path(a);
    REQUIRE(p.values.size() == 17);
    CHECK(p.values.front() == 0.0);
    CHECK(p.values.back() == 1.0);
    CHECK(p.values[8] == doctest::Approx(0.5).epsilon(1e-15));
    check_path(a, p);  // must not throw
}

TEST_CASE("path and site validation") {
    const LatticeAction a = harmonic_16();
    Path bad = linear_path(a);
    bad.values.pop_back();
    CHECK_THROWS_AS(check_path(a, bad), ShapeError);
    Path wrong_end = linear_path(a);
    wrong_end.values.back() = 2.0;
    CHECK_THROWS_AS(check_path(a, wrong_end), ShapeError);
    CHECK_THROWS_AS(check_site(a, 0, "sigma"), ConfigError);
    CHECK_THROWS_AS(check_site(a, 16, "sigma"), ConfigError);
    CHECK_NOTHROW(check_site(a, 1, "sigma"));
    CHECK_NOTHROW(check_site(a, 15, "sigma"));
}

TEST_CASE("action value on a small hand-computed path") {
    // N = 2, dt = 0.5, m = 1, harmonic omega = 1, path {0, 0.3, 1}.
    const LatticeAction a =
        make_action({1.0, 1.0}, make_grid(1.0, 2), {0.0, 1.0}, Potential::harmonic(1.0));
    Path p;
    p.values = {0.0, 0.3, 1.0};
    const double kinetic = 0.5 * 0.3 * 0.3 / 0.5 + 0.5 * 0.7 * 0.7 / 0.5;
    const double potential = 0.5 * (0.0 + 0.5 * 0.3 * 0.3);
    CHECK(action_value(a, p) == doctest::Approx(kinetic + potential).epsilon(1e-15));
}

TEST_CASE("gradient matches the closed form and central differences") {
    const LatticeAction a =
        make_action({1.3, 1.0}, make_grid(4.0, 8), {0.2, -0.7}, Potential::quartic(1.1, 0.15));
    Path p = linear_path(a);
    // Deterministic wiggle so nothing is symmetric.
    for (int j = 1; j <= 7; ++j) p.values[j] += 0.1 * std::sin(2.3 * j);

    const std::vector<double> grad = action_gradient(a, p);
    REQUIRE(grad.size() == 7);

    const double dt = a.grid.dt;
    for (int j = 1; j <= 7; ++j) {
        const double x = p.values[j];
        const double closed = 1.3 * (2.0 * x - p.values[j + 1] - p.values[j - 1]) / dt +
                              dt * a.potential.derivative(1, x, 1.3);
        CHECK(grad[j - 1] == doctest::Approx(closed).epsilon(1e-13));

        const double h = 1e-6;
        Path up = p, dn = p;
        up.values[j] += h;
        dn.values[j] -= h;
        const double fd = (action_value(a, up) - action_value(a, dn)) / (2.0 * h);
        CHECK(grad[j - 1] == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("hessian structure: harmonic reference values") {
    const LatticeAction a = harmonic_16();
    const Tridiag h = action_hessian(a, linear_path(a));
    REQUIRE(h.size() == 15);
    // diag = 2 m/dt + dt m w^2 = 4 + 0.5, off = -m/dt = -2 (path independent).
    for (double d : h.diag) CHECK(d == doctest::Approx(4.5).epsilon(1e-15));
    for (double o : h.off) CHECK(o == doctest::Approx(-2.0).epsilon(1e-15));
}

TEST_CASE("hessian matches central differences of the gradient (quartic)") {
    const LatticeAction a =
        make_action({1.0, 1.0}, make_grid(3.0, 6), {0.0, 0.5}, Potential::quartic(1.0, 0.2));
    Path p = linear_path(a);
    for (int j = 1; j <= 5; ++j) p.values[j] += 0.2 * std::cos(1.7 * j);
    const Tridiag h = action_hessian(a, p);
    const double step = 1e-6;
    for (int j = 1; j <= 5; ++j) {
        Path up = p, dn = p;
        up.values[j] += step;
        dn.values[j] -= step;
        const std::vector<double> gu = action_gradient(a, up);
        const std::vector<double> gd = action_gradient(a, dn);
        for (int k = 1; k <= 5; ++k) {
            const double fd = (gu[k - 1] - gd[k - 1]) / (2.0 * step);
            double exact = 0.0;
            if (k == j) exact = h.diag[j - 1];
            else if (std::abs(k - j) == 1) exact = h.off[std::min(j, k) - 1];
            CHECK(fd == doctest::Approx(exact).epsilon(1e-5));
        }
    }
}

TEST_CASE("tridiagonal solve round trip and pivot guard") {
    Tridiag t;
    t.diag = {4.5, 4.5, 4.5, 4.5};
    t.off = {-2.0, -2.0, -2.0};
    const std::vector<double> rhs = {1.0, -0.5, 2.0, 0.25};
    const std::vector<double> x = t.solve(rhs);
    const std::vector<double> back = t.matvec(x);
    for (int i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(rhs[i]).epsilon(1e-13));

    Tridiag bad;
    bad.diag = {1.0, 0.2};
    bad.off = {-1.0};
    CHECK_THROWS_AS(bad.solve({1.0, 1.0}), NumericalError);
    CHECK_THROWS_AS(t.solve({1.0, 1.0}), ShapeError);
    CHECK_THROWS_AS(t.matvec({1.0}), ShapeError);
}

TEST_CASE("local derivative: orders and guards") {
    const LatticeAction a =
        make_action({1.0, 1.0}, make_grid(4.0, 8), {0.0, 1.0}, Potential::quartic(1.0, 0.3));
    const Path p = linear_path(a);
    const double dt = a.grid.dt;
    const double x4 = p.values[4];
    CHECK(local_derivative(a, p, 4, 3) == doctest::Approx(dt * 24.0 * 0.3 * x4).epsilon(1e-14));
    CHECK(local_derivative(a, p, 4, 4) == doctest::Approx(dt * 24.0 * 0.3).epsilon(1e-14));
    CHECK(local_derivative(a, p, 4, 5) == 0.0);
    CHECK_THROWS_AS(local_derivative(a, p, 4, 2), ConfigError);
    CHECK_THROWS_AS(local_derivative(a, p, 0, 3), ConfigError);
}

TEST_CASE("classical path: free particle is the linear interpolant") {
    const LatticeAction a =
        make_action({1.0, 1.0}, make_grid(4.0, 8), {-0.3, 0.9}, Potential::free_particle());
    const Path c = classical_path(a);
    const Path l = linear_path(a);
    for (int j = 0; j <= 8; ++j) CHECK(c.values[j] == doctest::Approx(l.values[j]).epsilon(1e-13));
}

TEST_CASE("classical path solves the discrete equations of motion") {
    const LatticeAction h = harmonic_16();
    CHECK(max_abs_gradient(h, classical_path(h)) <= 1e-10);

    const LatticeAction q =
        make_action({1.0, 1.0}, make_grid(8.0, 16), {0.0, 1.0}, Potential::quartic(1.0, 0.4));
    CHECK(max_abs_gradient(q, classical_path(q)) <= 1e-10);

    // Symmetric zero boundary: the quartic solver must find the zero path.
    const LatticeAction z =
        make_action({1.0, 1.0}, make_grid(8.0, 16), {0.0, 0.0}, Potential::quartic(1.0, 0.4));
    for (double x : classical_path(z).values) CHECK(std::abs(x) <= 1e-12);
}

TEST_CASE("classical harmonic action approaches the continuum value") {
    // Continuum: S = (w/2) [(a^2+b^2) cosh(wT) - 2ab] / sinh(wT) = coth(8)/2.
    const double continuum = 0.5 * std::cosh(8.0) / std::sinh(8.0);
    CHECK(continuum == doctest::Approx(0.500000112535187).epsilon(1e-12));

    auto lattice_value = [](int n) {
        const LatticeAction a =
            make_action({1.0, 1.0}, make_grid(8.0, n), {0.0, 1.0}, Potential::harmonic(1.0));
        return action_value(a, classical_path(a));
    };
    const double e16 = std::abs(lattice_value(16) - continuum);
    const double e32 = std::abs(lattice_value(32) - continuum);
    const double e64 = std::abs(lattice_value(64) - continuum);
    const double e256 = std::abs(lattice_value(256) - continuum);
    // Left-node potential rule: first-order endpoint error, halving with dt.
    CHECK(e16 / e32 == doctest::Approx(2.0).epsilon(0.35));
    CHECK(e32 / e64 == doctest::Approx(2.0).epsilon(0.25));
    // First-order coefficient is ~0.25, so the N = 256 error sits near
    // 0.25 * dt = 0.0078; the ceiling allows a third of slack on top.
    CHECK(e256 <= 0.0104);
}
