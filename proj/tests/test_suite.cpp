#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "actionlab/suite.hpp"

using namespace actionlab;

namespace {

LatticeAction harmonic_lattice(int n_slices, double t_total = 8.0) {
    return make_action({1.0, 1.0}, make_grid(t_total, n_slices), {0.0, 1.0},
                       Potential::harmonic(1.0));
}

int count_substr(const std::vector<CheckResult>& checks, const std::string& needle,
                 bool failed_only = false) {
    int n = 0;
    for (const CheckResult& c : checks) {
        if (failed_only && (c.pass || c.skipped)) continue;
        if (c.check_id.find(needle) != std::string::npos) ++n;
    }
    return n;
}

}  // namespace

TEST_CASE("backend names round-trip, aliases included") {
    CHECK(backend_name(Backend::Exact) == "exact");
    CHECK(backend_name(Backend::MonteCarlo) == "monte-carlo");
    CHECK(backend_name(Backend::ZeroDim) == "zerodim");
    CHECK(backend_from_name("exact") == Backend::Exact);
    CHECK(backend_from_name("monte-carlo") == Backend::MonteCarlo);
    CHECK(backend_from_name("mc") == Backend::MonteCarlo);
    CHECK(backend_from_name("zerodim") == Backend::ZeroDim);
    CHECK(backend_from_name("zero-dim") == Backend::ZeroDim);
    CHECK_THROWS_AS(backend_from_name("quantum"), ConfigError);
    CHECK_THROWS_AS(backend_from_name(""), ConfigError);
}

TEST_CASE("default identity instances and site grids") {
    const std::vector<IdentityId> ids = default_identities();
    REQUIRE(ids.size() == 11);
    CHECK(ids[0].name() == "EHRENFEST");
    CHECK(ids[1].name() == "POWER(1)");
    CHECK(ids[2].name() == "POWER(2)");
    CHECK(ids[3].name() == "POWER(3)");
    CHECK(ids[4].name() == "NEGPOWER(1)");
    CHECK(ids[5].name() == "NEGPOWER(2)");
    CHECK(ids[6].name() == "EXP(0.5)");
    CHECK(ids[7].name() == "EXP(1)");
    CHECK(ids[8].name() == "SECOND_VAR");
    CHECK(ids[9].name() == "CHAIN(3)");
    CHECK(ids[10].name() == "CHAIN(4)");

    const LatticeAction a16 = harmonic_lattice(16);
    CHECK(default_sigmas(a16) == std::vector<int>{4, 8, 12});
    CHECK(default_taus(a16, 4) == std::vector<int>{1, 4, 8});
    CHECK(default_taus(a16, 8) == std::vector<int>{4, 8, 12});
    CHECK(default_taus(a16, 12) == std::vector<int>{8, 12, 15});

    // Clamping and deduplication on a small lattice.
    const LatticeAction a4 = harmonic_lattice(4, 2.0);
    CHECK(default_sigmas(a4) == std::vector<int>{1, 2, 3});
    CHECK(default_taus(a4, 1) == std::vector<int>{1, 2});

    CHECK(version_string() == "actionlab 1.0.0");
}

TEST_CASE("exact backend: default suite layout and outcomes") {
    const LatticeAction a = harmonic_lattice(16);
    SuiteConfig cfg;
    const SuiteReport rep = evaluate_suite(Backend::Exact, a, cfg);

    // 8 single-site instances x 3 sigmas + 3 two-site instances x 9 pairs.
    CHECK(rep.checks.size() == 51);
    CHECK(rep.backend == "exact");
    CHECK(rep.version == "actionlab 1.0.0");
    CHECK(rep.model_description.find("harmonic") != std::string::npos);
    CHECK(rep.summary.n_checks == 51);
    // NEGPOWER has no Gaussian closed form: declared skips, not errors.
    CHECK(rep.summary.n_skipped == 6);
    CHECK(rep.summary.n_error == 0);
    CHECK(rep.summary.n_fail == 0);
    CHECK(rep.summary.n_pass == 45);
    CHECK(rep.summary.exit_status == 0);
    CHECK(rep.summary.max_abs_pull == 0.0);

    for (const CheckResult& c : rep.checks) {
        CAPTURE(c.check_id);
        if (c.skipped) {
            CHECK(c.check_id.find("NEGPOWER") != std::string::npos);
            CHECK(c.skip_reason.rfind("error: ", 0) != 0);
        } else {
            CHECK(c.pass);
            CHECK(c.residual_err == 0.0);
        }
    }

    // Deterministic ordering: identity-outer, sigma, then tau.
    CHECK(rep.checks[0].check_id == "EHRENFEST[sigma=4]");
    CHECK(rep.checks[1].check_id == "EHRENFEST[sigma=8]");
    CHECK(rep.checks[2].check_id == "EHRENFEST[sigma=12]");
    CHECK(rep.checks[24].check_id == "SECOND_VAR[sigma=4,tau=1]");
}

TEST_CASE("exact backend: hbar flip breaks exactly the diagonal SECOND_VAR rows") {
    const LatticeAction a = harmonic_lattice(16);
    SuiteConfig cfg;
    cfg.flip_hbar_sign = true;
    const SuiteReport rep = evaluate_suite(Backend::Exact, a, cfg);
    CHECK(rep.summary.n_fail == 3);
    CHECK(rep.summary.exit_status == 1);
    int diag_fails = 0;
    for (const CheckResult& c : rep.checks) {
        if (c.skipped || c.pass) continue;
        CHECK(c.check_id.find("SECOND_VAR") != std::string::npos);
        CHECK(c.sigma == c.tau);
        ++diag_fails;
    }
    CHECK(diag_fails == 3);
}

TEST_CASE("exact backend: full site sweep covers every interior site") {
    const LatticeAction a = harmonic_lattice(8, 4.0);
    SuiteConfig cfg;
    cfg.full_site_sweep = true;
    const SuiteReport rep = evaluate_suite(Backend::Exact, a, cfg);
    // 7 interior sites; single-site instances contribute one row per site.
    CHECK(count_substr(rep.checks, "EHRENFEST") == 7);
    CHECK(count_substr(rep.checks, "EHRENFEST[sigma=1]") == 1);
    CHECK(count_substr(rep.checks, "EHRENFEST[sigma=7]") == 1);
    CHECK(rep.checks.size() > 51);
    CHECK(rep.summary.exit_status == 0);
}

TEST_CASE("evaluate_suite validates every requested instance up front") {
    const LatticeAction a = harmonic_lattice(8, 4.0);
    SuiteConfig cfg;
    IdentityId bad = IdentityId::exponential(-0.9);  // factory accepts > -1
    bad.lambda = -0.96;  // inside the rejection band of the identity table
    cfg.identities = {IdentityId::ehrenfest(), bad};
    CHECK_THROWS_AS(evaluate_suite(Backend::Exact, a, cfg), ConfigError);

    // Explicit sigmas are validated as interior sites.
    SuiteConfig site_cfg;
    site_cfg.sigmas = {0};
    CHECK_THROWS_AS(evaluate_suite(Backend::Exact, a, site_cfg), ConfigError);
    site_cfg.sigmas = {8};
    CHECK_THROWS_AS(evaluate_suite(Backend::Exact, a, site_cfg), ConfigError);
}

TEST_CASE("monte carlo backend: full default suite on a small chain") {
    const LatticeAction a = harmonic_lattice(8, 4.0);
    SuiteConfig cfg;
    cfg.pull_threshold = 5.0;
    cfg.mc.n_sweeps = 30000;
    cfg.mc.burn_in = 2000;
    cfg.mc.step_width = 0.5;
    cfg.mc.thinning = 10;
    cfg.mc.seed = 12345;
    cfg.mc.bin_size = 2;
    const SuiteReport rep = evaluate_suite(Backend::MonteCarlo, a, cfg);

    CHECK(rep.checks.size() == 51);
    CHECK(rep.backend == "monte-carlo");
    CHECK(rep.seed == 12345);
    CHECK(rep.summary.n_error == 0);
    CHECK(rep.summary.n_skipped == 0);
    // A healthy chain: at most one 5-sigma outlier, nothing beyond 6.
    CHECK(rep.summary.n_fail <= 1);
    CHECK(rep.summary.max_abs_pull < 6.0);

    // Identity coverage survives estimator relabeling (EXP rows may use a
    // direct tilted chain).
    CHECK(count_substr(rep.checks, "EXP(0.5)") == 3);
    CHECK(count_substr(rep.checks, "EXP(1)") == 3);
    CHECK(count_substr(rep.checks, "NEGPOWER(1)") == 3);
    CHECK(count_substr(rep.checks, "SECOND_VAR") == 9);

    // Stochastic rows carry uncertainties.
    for (const CheckResult& c : rep.checks) {
        if (c.skipped) continue;
        if (c.check_id.rfind("SECOND_VAR", 0) == 0) CHECK(c.residual_err > 0.0);
    }

    // Determinism: the same configuration reproduces the same report.
    const SuiteReport rep2 = evaluate_suite(Backend::MonteCarlo, a, cfg);
    REQUIRE(rep2.checks.size() == rep.checks.size());
    for (std::size_t i = 0; i < rep.checks.size(); ++i) {
        CHECK(rep2.checks[i].check_id == rep.checks[i].check_id);
        CHECK(rep2.checks[i].lhs == rep.checks[i].lhs);
        CHECK(rep2.checks[i].residual == rep.checks[i].residual);
    }
}

TEST_CASE("zero-dimensional backend: both signatures over the battery") {
    const LatticeAction a = harmonic_lattice(16);
    SuiteConfig cfg;
    const SuiteReport rep = evaluate_suite(Backend::ZeroDim, a, cfg);

    // 11 instances x 5 models x 2 signatures.
    CHECK(rep.checks.size() == 110);
    CHECK(rep.backend == "zerodim");
    CHECK(rep.model_description ==
          "zero-dimensional battery (5 models, both signatures), hbar=1");

    int euclid = 0, mink = 0, skips = 0;
    for (const CheckResult& c : rep.checks) {
        CAPTURE(c.check_id);
        if (c.check_id.find("/euclidean") != std::string::npos) ++euclid;
        if (c.check_id.find("/minkowski") != std::string::npos) ++mink;
        if (c.skipped) {
            ++skips;
            // Declared skips only: NEGPOWER at min s = 0, POWER(n >= 2) on
            // quartic models in the oscillatory signature.
            CHECK(c.skip_reason.rfind("error: ", 0) != 0);
        } else {
            CHECK(c.pass);
        }
    }
    CHECK(euclid == 55);
    CHECK(mink == 55);
    // 2 Euclidean NEGPOWER skips + the same 2 in Minkowski
    // + POWER(2,3) on the three quartic models.
    CHECK(skips == 10);
    CHECK(rep.summary.n_skipped == 10);
    CHECK(rep.summary.n_error == 0);
    CHECK(rep.summary.exit_status == 0);
}

TEST_CASE("pass_fail aggregation rules") {
    auto row = [](const std::string& id, bool pass, double pull, double rerr) {
        CheckResult c;
        c.check_id = id;
        c.pass = pass;
        c.pull = pull;
        c.residual_err = rerr;
        return c;
    };

    SuiteReport rep;
    CHECK_THROWS_AS(pass_fail(rep), ConfigError);  // no checks at all

    rep.checks = {row("a", true, 1.0, 0.5), row("b", true, -1.0, 0.5),
                  row("c", true, 0.0, 0.0)};
    SuiteSummary s = pass_fail(rep);
    CHECK(s.n_checks == 3);
    CHECK(s.n_pass == 3);
    CHECK(s.exit_status == 0);
    CHECK(s.max_abs_pull == 1.0);
    // Sample variance over the rows with stochastic errors only: {1, -1}.
    CHECK(s.pull_variance == doctest::Approx(2.0));

    rep.checks.push_back(row("d", false, 7.0, 0.5));
    s = pass_fail(rep);
    CHECK(s.n_fail == 1);
    CHECK(s.exit_status == 1);
    CHECK(s.max_abs_pull == 7.0);

    CheckResult skip;
    skip.check_id = "e";
    skip.skipped = true;
    skip.skip_reason = "declared: unsupported family";
    rep.checks.push_back(skip);
    s = pass_fail(rep);
    CHECK(s.n_skipped == 1);
    CHECK(s.n_error == 0);
    CHECK(s.exit_status == 1);

    CheckResult err;
    err.check_id = "f";
    err.skipped = true;
    err.skip_reason = "error: estimator blew up";
    rep.checks.push_back(err);
    s = pass_fail(rep);
    CHECK(s.n_skipped == 2);
    CHECK(s.n_error == 1);
    CHECK(s.exit_status == 2);  // operational failure outranks a plain fail
    CHECK(rep.summary.exit_status == 2);  // stored back into the report

    // Non-finite pulls saturate max_abs_pull.
    SuiteReport inf_rep;
    inf_rep.checks = {row("g", false, std::numeric_limits<double>::infinity(), 0.0)};
    s = pass_fail(inf_rep);
    CHECK(std::isinf(s.max_abs_pull));
}
