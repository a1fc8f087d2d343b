#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "actionlab/config.hpp"
#include "actionlab/errors.hpp"
#include "actionlab/gaussian.hpp"
#include "actionlab/identity.hpp"
#include "actionlab/lattice.hpp"
#include "actionlab/report.hpp"
#include "actionlab/suite.hpp"
#include "actionlab/zerodim.hpp"

namespace py = pybind11;
using namespace actionlab;

namespace {

LatticeAction build_action(const std::string& potential, double mass, double omega,
                           double g, double hbar, double t_total, int n_slices,
                           double x_start, double x_end) {
    Potential pot;
    if (potential == "free")
        pot = Potential::free_particle();
    else if (potential == "harmonic")
        pot = Potential::harmonic(omega);
    else if (potential == "quartic")
        pot = Potential::quartic(omega, g);
    else
        throw ConfigError("unknown potential '" + potential +
                          "' (free, harmonic, quartic)");
    return make_action({mass, hbar}, make_grid(t_total, n_slices), {x_start, x_end},
                       pot);
}

}  // namespace

PYBIND11_MODULE(_actionlab, m) {
    m.doc() = "lattice action identity laboratory (C++ core)";
    m.attr("__version__") = "1.0.0";

    auto base = py::register_exception<ActionlabError>(m, "ActionlabError");
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
    py::register_exception<DomainError>(m, "DomainError", base.ptr());
    py::register_exception<LimitError>(m, "LimitError", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<StatisticsError>(m, "StatisticsError", base.ptr());
    py::register_exception<UnsupportedError>(m, "UnsupportedError", base.ptr());
    py::register_exception<IoError>(m, "IoError", base.ptr());

    // ------------------------------------------------------------- identities
    py::class_<IdentityId>(m, "IdentityId")
        .def_static("ehrenfest", &IdentityId::ehrenfest)
        .def_static("power", &IdentityId::power, py::arg("n"))
        .def_static("negpower", &IdentityId::negpower, py::arg("n"))
        .def_static("exponential", &IdentityId::exponential, py::arg("lambda_"))
        .def_static("second_var", &IdentityId::second_var)
        .def_static("chain", &IdentityId::chain, py::arg("m"))
        .def("name", &IdentityId::name)
        .def("uses_tau", &IdentityId::uses_tau)
        .def("__repr__", [](const IdentityId& id) { return "IdentityId(" + id.name() + ")"; })
        .def("__eq__", [](const IdentityId& a, const IdentityId& b) { return a == b; });

    m.def("paper_tag", py::overload_cast<const IdentityId&>(&paper_tag), py::arg("id"),
          "equation tag attached to report rows");

    py::class_<CheckResult>(m, "CheckResult")
        .def_readonly("check_id", &CheckResult::check_id)
        .def_readonly("paper_eq", &CheckResult::paper_eq)
        .def_readonly("sigma", &CheckResult::sigma)
        .def_readonly("tau", &CheckResult::tau)
        .def_readonly("lhs", &CheckResult::lhs)
        .def_readonly("lhs_err", &CheckResult::lhs_err)
        .def_readonly("rhs", &CheckResult::rhs)
        .def_readonly("rhs_err", &CheckResult::rhs_err)
        .def_readonly("residual", &CheckResult::residual)
        .def_readonly("residual_err", &CheckResult::residual_err)
        .def_readonly("pull", &CheckResult::pull)
        .def_readonly("passed", &CheckResult::pass)
        .def_readonly("skipped", &CheckResult::skipped)
        .def_readonly("skip_reason", &CheckResult::skip_reason)
        .def_readonly("note", &CheckResult::note)
        .def("__repr__", [](const CheckResult& c) {
            return "CheckResult(" + c.check_id +
                   (c.skipped ? ", skipped" : (c.pass ? ", pass" : ", FAIL")) + ")";
        });

    // ----------------------------------------------------------------- lattice
    py::class_<LatticeAction>(m, "LatticeAction")
        .def_property_readonly("n_slices",
                               [](const LatticeAction& a) { return a.grid.n_slices; })
        .def_property_readonly("dt", [](const LatticeAction& a) { return a.grid.dt; })
        .def_property_readonly("hbar",
                               [](const LatticeAction& a) { return a.params.hbar; })
        .def_property_readonly("n_interior", &LatticeAction::n_interior);

    m.def("make_action", &build_action, py::arg("potential"), py::arg("mass") = 1.0,
          py::arg("omega") = 1.0, py::arg("g") = 0.0, py::arg("hbar") = 1.0,
          py::arg("t_total") = 8.0, py::arg("n_slices") = 16, py::arg("x_start") = 0.0,
          py::arg("x_end") = 1.0);

    m.def("action_value", [](const LatticeAction& a, const std::vector<double>& xs) {
        Path p{xs};
        return action_value(a, p);
    });
    m.def("action_gradient", [](const LatticeAction& a, const std::vector<double>& xs) {
        Path p{xs};
        return action_gradient(a, p);
    });
    m.def("classical_path",
          [](const LatticeAction& a) { return classical_path(a).values; });
    m.def("linear_path", [](const LatticeAction& a) { return linear_path(a).values; });

    // ---------------------------------------------------------------- gaussian
    m.def("propagator_matrix", [](const LatticeAction& a) {
        const QuadraticDecomposition d = decompose_quadratic(a);
        const Propagator g = propagator(d, a.params.hbar);
        std::vector<std::vector<double>> rows(g.n, std::vector<double>(g.n));
        for (int i = 1; i <= g.n; ++i)
            for (int j = 1; j <= g.n; ++j) rows[i - 1][j - 1] = g.at(i, j);
        return rows;
    });
    m.def("action_moment", [](const LatticeAction& a, int n) {
        return action_moment(decompose_quadratic(a), a.params.hbar, n);
    });
    m.def("exact_check",
          [](const LatticeAction& a, const IdentityId& id, int sigma, int tau,
             bool flip) {
              const QuadraticDecomposition d = decompose_quadratic(a);
              return exact_check(a, d, a.params.hbar, id, sigma, tau, flip);
          },
          py::arg("action"), py::arg("identity"), py::arg("sigma"), py::arg("tau") = 0,
          py::arg("flip_hbar_sign") = false);

    // ------------------------------------------------------------------- suite
    py::class_<SuiteSummary>(m, "SuiteSummary")
        .def_readonly("n_checks", &SuiteSummary::n_checks)
        .def_readonly("n_pass", &SuiteSummary::n_pass)
        .def_readonly("n_fail", &SuiteSummary::n_fail)
        .def_readonly("n_skipped", &SuiteSummary::n_skipped)
        .def_readonly("n_error", &SuiteSummary::n_error)
        .def_readonly("max_abs_pull", &SuiteSummary::max_abs_pull)
        .def_readonly("pull_variance", &SuiteSummary::pull_variance)
        .def_readonly("exit_status", &SuiteSummary::exit_status);

    py::class_<SuiteReport>(m, "SuiteReport")
        .def_readonly("model_description", &SuiteReport::model_description)
        .def_readonly("backend", &SuiteReport::backend)
        .def_readonly("seed", &SuiteReport::seed)
        .def_readonly("config_hash", &SuiteReport::config_hash)
        .def_readonly("version", &SuiteReport::version)
        .def_readonly("checks", &SuiteReport::checks)
        .def_readonly("summary", &SuiteReport::summary)
        .def("to_json", [](const SuiteReport& r) { return to_json(r); })
        .def("to_csv", [](const SuiteReport& r) { return to_csv(r); })
        .def("to_text", [](const SuiteReport& r) { return to_text(r); });

    m.def("evaluate_suite",
          [](const std::string& backend, const LatticeAction& action,
             const std::vector<IdentityId>& identities, const std::vector<int>& sigmas,
             long long n_sweeps, long long burn_in, int thinning, std::uint64_t seed,
             double step_width, int bin_size, double pull_threshold,
             bool full_site_sweep, bool flip_hbar_sign) {
              SuiteConfig cfg;
              cfg.identities = identities;
              cfg.sigmas = sigmas;
              cfg.mc.n_sweeps = n_sweeps;
              cfg.mc.burn_in = burn_in;
              cfg.mc.thinning = thinning;
              cfg.mc.seed = seed;
              cfg.mc.step_width = step_width;
              cfg.mc.bin_size = bin_size;
              cfg.pull_threshold = pull_threshold;
              cfg.full_site_sweep = full_site_sweep;
              cfg.flip_hbar_sign = flip_hbar_sign;
              return evaluate_suite(backend_from_name(backend), action, cfg);
          },
          py::arg("backend"), py::arg("action"),
          py::arg("identities") = std::vector<IdentityId>{},
          py::arg("sigmas") = std::vector<int>{}, py::arg("n_sweeps") = 200000,
          py::arg("burn_in") = 20000, py::arg("thinning") = 10,
          py::arg("seed") = 12345, py::arg("step_width") = 0.5, py::arg("bin_size") = 2,
          py::arg("pull_threshold") = 4.0, py::arg("full_site_sweep") = false,
          py::arg("flip_hbar_sign") = false);

    m.def("default_identities", &default_identities);

    // ----------------------------------------------------------------- zerodim
    py::enum_<Signature>(m, "Signature")
        .value("Euclidean", Signature::Euclidean)
        .value("Minkowski", Signature::Minkowski);

    py::class_<ZeroDimModel>(m, "ZeroDimModel")
        .def_property_readonly("hbar", [](const ZeroDimModel& z) { return z.hbar; })
        .def_property_readonly(
            "coefficients",
            [](const ZeroDimModel& z) {
                return std::vector<double>(z.c.begin(), z.c.end());
            })
        .def("s", &ZeroDimModel::s, py::arg("x"))
        .def("ds", &ZeroDimModel::ds, py::arg("order"), py::arg("x"));

    m.def("make_zerodim_model", &make_zerodim_model, py::arg("c0"), py::arg("c1"),
          py::arg("c2"), py::arg("c3"), py::arg("c4"), py::arg("hbar") = 1.0,
          py::arg("signature") = Signature::Euclidean);
    m.def("model_min_s", &model_min_s);
    m.def("euclidean_identity_check", &euclidean_identity_check, py::arg("model"),
          py::arg("identity"), py::arg("hbar") = 1.0,
          py::arg("flip_hbar_sign") = false);

    py::class_<MinkowskiResidual>(m, "MinkowskiResidual")
        .def_readonly("r", &MinkowskiResidual::r)
        .def_readonly("two_eps_ox", &MinkowskiResidual::two_eps_ox)
        .def_readonly("lhs_term", &MinkowskiResidual::lhs_term)
        .def_readonly("rhs_term", &MinkowskiResidual::rhs_term);

    m.def("minkowski_identity_residual", &minkowski_identity_residual, py::arg("model"),
          py::arg("identity"), py::arg("epsilon"), py::arg("flip_hbar_sign") = false);

    // ------------------------------------------------------------------ config
    m.def("config_hash_of_text", [](const std::string& text) {
        return config_hash(parse_config_text(text, "<string>"));
    });
    m.def("version_string", &version_string);
}
