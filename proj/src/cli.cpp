#include "actionlab/cli.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "actionlab/config.hpp"
#include "actionlab/errors.hpp"
#include "actionlab/report.hpp"
#include "actionlab/suite.hpp"

namespace actionlab {

namespace {

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        std::size_t a = 0, b = item.size();
        while (a < b && std::isspace(static_cast<unsigned char>(item[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(item[b - 1]))) --b;
        out.push_back(item.substr(a, b - a));
    }
    return out;
}

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// File-name-safe rendering of a sweep value: '.' -> 'p', '-' -> 'm'.
std::string value_slug(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    std::string s = buf;
    std::replace(s.begin(), s.end(), '.', 'p');
    std::replace(s.begin(), s.end(), '-', 'm');
    return s;
}

struct GlobalFlags {
    std::string config_path;
    std::string out_dir;       // --out-dir
    std::string formats;       // --format (comma list)
    std::uint64_t seed = 0;
    bool seed_set = false;
    double threshold = 0.0;
    bool threshold_set = false;
};

std::string resolve_out_dir(const GlobalFlags& flags, const RunConfig& cfg) {
    if (!flags.out_dir.empty()) return flags.out_dir;
    if (!cfg.out_dir.empty()) return cfg.out_dir;
    if (const char* env = std::getenv("ACTIONLAB_OUT_DIR"); env && *env) return env;
    return ".";
}

void apply_overrides(RunConfig& cfg, const GlobalFlags& flags) {
    if (flags.seed_set) cfg.mc.seed = flags.seed;
    if (flags.threshold_set) {
        if (!(flags.threshold > 0.0))
            throw ConfigError("--threshold must be > 0");
        cfg.pull_threshold = flags.threshold;
    }
    if (!flags.formats.empty()) {
        cfg.formats = split_commas(flags.formats);
        for (const std::string& f : cfg.formats)
            if (f != "json" && f != "csv" && f != "text")
                throw ConfigError("--format: '" + f +
                                  "' is not a format (json, csv, text)");
    }
}

void write_formats(const SuiteReport& report, const RunConfig& cfg,
                   const std::string& out_dir, const std::string& basename,
                   std::vector<std::string>& written) {
    for (const std::string& f : cfg.formats) {
        std::string path = out_dir + "/" + basename;
        std::string content;
        if (f == "json") {
            path += ".json";
            content = to_json(report);
        } else if (f == "csv") {
            path += ".csv";
            content = to_csv(report);
        } else {
            path += ".txt";
            content = to_text(report);
        }
        write_text_file(path, content);
        written.push_back(path);
    }
}

void print_summary(const SuiteReport& report, const std::vector<std::string>& written) {
    const SuiteSummary& s = report.summary;
    std::printf("%s backend: %d checks, %d pass, %d fail, %d skipped (%d errors), "
                "max |pull| = %.3g, exit %d\n",
                report.backend.c_str(), s.n_checks, s.n_pass, s.n_fail, s.n_skipped,
                s.n_error, s.max_abs_pull, s.exit_status);
    for (const std::string& p : written) std::printf("wrote %s\n", p.c_str());
}

SuiteReport run_one(const RunConfig& cfg) {
    const LatticeAction action = action_from_config(cfg);
    SuiteReport report =
        evaluate_suite(backend_from_config(cfg), action, suite_from_config(cfg));
    report.config_hash = config_hash(cfg);
    return report;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int cmd_verify(const GlobalFlags& flags) {
    RunConfig cfg = parse_config(flags.config_path);
    apply_overrides(cfg, flags);
    const std::string out_dir = resolve_out_dir(flags, cfg);
    const SuiteReport report = run_one(cfg);
    std::vector<std::string> written;
    write_formats(report, cfg, out_dir, cfg.basename, written);
    print_summary(report, written);
    return report.summary.exit_status;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

double sweep_metric(const SuiteReport& report) {
    if (report.backend == "monte-carlo") return report.summary.max_abs_pull;
    double worst = 0.0;
    for (const CheckResult& c : report.checks)
        if (!c.skipped) worst = std::max(worst, std::abs(c.residual));
    return worst;
}

RunConfig sweep_instance(const RunConfig& base, const std::string& parameter, double v) {
    RunConfig run = base;
    auto require_family = [&](const char* family) {
        if (std::find(run.families.begin(), run.families.end(), family) ==
            run.families.end())
            throw ConfigError("sweep parameter '" + parameter + "' requires the " +
                              family + " family in checks.families");
    };
    auto as_int = [&](const char* what) {
        if (v != std::floor(v))
            throw ConfigError(std::string("sweep value for ") + what +
                              " must be an integer (got " + fmt_g17(v) + ")");
        return static_cast<int>(v);
    };
    if (parameter == "lambda") {
        require_family("EXP");
        if (v <= -0.95)
            throw ConfigError("sweep lambda value " + fmt_g17(v) +
                              " violates lambda > -0.95 (degenerate at lambda = -1)");
        run.exp_lambda = {v};
    } else if (parameter == "n_slices") {
        const int n = as_int("n_slices");
        if (n < 2) throw ConfigError("sweep n_slices values must be >= 2");
        run.n_slices = n;
        for (int s : run.sigmas)
            if (s < 1 || s > n - 1)
                throw ConfigError("checks.sigma " + std::to_string(s) +
                                  " is outside the interior at n_slices = " +
                                  std::to_string(n) + "; leave sigma unset to use "
                                  "the per-N default sites");
    } else if (parameter == "g") {
        if (run.potential != "quartic")
            throw ConfigError("sweep parameter g requires model.potential = quartic");
        if (v < 0.0) throw ConfigError("sweep g values must be >= 0");
        run.g = v;
    } else if (parameter == "n") {
        require_family("POWER");
        const int n = as_int("n");
        if (n < 1) throw ConfigError("sweep n values must be >= 1");
        run.power_n = {n};
    } else {
        throw ConfigError("unknown sweep parameter '" + parameter +
                          "' (lambda, n_slices, g, n)");
    }
    return run;
}

int cmd_sweep(const GlobalFlags& flags, const std::string& parameter,
              const std::string& values_text) {
    RunConfig base = parse_config(flags.config_path);
    apply_overrides(base, flags);
    const std::string out_dir = resolve_out_dir(flags, base);

    std::vector<double> values;
    for (const std::string& tok : split_commas(values_text)) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || end != tok.c_str() + tok.size())
            throw ConfigError("--values: '" + tok + "' is not a number");
        values.push_back(v);
    }
    if (values.empty()) throw ConfigError("--values: at least one value required");

    // Validate every instance before any run starts.
    std::vector<RunConfig> runs;
    for (double v : values) runs.push_back(sweep_instance(base, parameter, v));

    SuiteReport combined;
    combined.backend = base.backend;
    combined.seed = base.mc.seed;
    combined.version = version_string();
    combined.config_hash = config_hash(base);
    combined.pull_threshold = base.pull_threshold;
    combined.model_description = "sweep of " + parameter;

    std::string dat;
    std::vector<std::string> written;
    int exit_status = 0;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const SuiteReport report = run_one(runs[i]);
        exit_status = std::max(exit_status, report.summary.exit_status);
        dat += fmt_g17(values[i]) + " " + fmt_g17(sweep_metric(report)) + "\n";
        const std::string name =
            base.basename + "_" + parameter + "_" + value_slug(values[i]);
        write_formats(report, base, out_dir, name, written);
        for (CheckResult c : report.checks) {
            c.check_id += "@" + parameter + "=" + value_slug(values[i]);
            combined.checks.push_back(std::move(c));
        }
    }
    pass_fail(combined);

    const std::string dat_path = out_dir + "/" + base.basename + "_sweep.dat";
    write_text_file(dat_path, dat);
    written.push_back(dat_path);

    const std::string combined_path =
        out_dir + "/" + base.basename + "_sweep_combined.json";
    write_text_file(combined_path, to_json(combined));
    written.push_back(combined_path);

    const std::string plot_path = out_dir + "/" + base.basename + "_plot.py";
    write_text_file(plot_path,
                    "#!/usr/bin/env python3\n"
                    "\"\"\"Plot stub for the sweep data file (two columns: value, "
                    "max-statistic).\"\"\"\n"
                    "import sys\n\n"
                    "import matplotlib.pyplot as plt\n"
                    "import numpy as np\n\n"
                    "data = np.loadtxt(sys.argv[1] if len(sys.argv) > 1 else \"" +
                        base.basename + "_sweep.dat\")\n"
                    "data = np.atleast_2d(data)\n"
                    "plt.plot(data[:, 0], data[:, 1], \"o-\")\n"
                    "plt.xlabel(\"" + parameter + "\")\n"
                    "plt.ylabel(\"max statistic\")\n"
                    "plt.savefig(\"" + base.basename + "_sweep.png\", dpi=150)\n");
    written.push_back(plot_path);

    print_summary(combined, written);
    return exit_status;
}

// ---------------------------------------------------------------------------
// report (re-render an existing JSON)
// ---------------------------------------------------------------------------

int cmd_report(const GlobalFlags& flags, const std::string& input_path) {
    const SuiteReport report = report_from_json(read_text_file(input_path));
    std::vector<std::string> fmts =
        flags.formats.empty() ? std::vector<std::string>{"text"}
                              : split_commas(flags.formats);
    for (const std::string& f : fmts)
        if (f != "json" && f != "csv" && f != "text")
            throw ConfigError("--format: '" + f + "' is not a format (json, csv, text)");

    std::string stem = input_path;
    if (const std::size_t slash = stem.find_last_of('/'); slash != std::string::npos)
        stem = stem.substr(slash + 1);
    if (stem.size() > 5 && stem.substr(stem.size() - 5) == ".json")
        stem = stem.substr(0, stem.size() - 5);

    for (const std::string& f : fmts) {
        const std::string content = f == "json"   ? to_json(report)
                                    : f == "csv" ? to_csv(report)
                                                 : to_text(report);
        if (flags.out_dir.empty()) {
            std::fwrite(content.data(), 1, content.size(), stdout);
        } else {
            const std::string ext = f == "json" ? ".json" : f == "csv" ? ".csv" : ".txt";
            const std::string path = flags.out_dir + "/" + stem + "_rendered" + ext;
            write_text_file(path, content);
            std::printf("wrote %s\n", path.c_str());
        }
    }
    return report.summary.exit_status;
}

}  // namespace

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"identity verification laboratory for lattice actions"};
    app.require_subcommand(1);

    GlobalFlags flags;
    std::string parameter, values_text, input_path;

    auto add_globals = [&](CLI::App* cmd, bool needs_config) {
        auto* c = cmd->add_option("--config", flags.config_path, "run configuration file");
        if (needs_config) c->required();
        cmd->add_option("--seed", flags.seed, "override mc.seed")
            ->each([&](const std::string&) { flags.seed_set = true; });
        cmd->add_option("--out-dir", flags.out_dir, "output directory");
        cmd->add_option("--format", flags.formats, "comma list of json,csv,text");
        cmd->add_option("--threshold", flags.threshold, "override checks.pull_threshold")
            ->each([&](const std::string&) { flags.threshold_set = true; });
    };

    CLI::App* verify = app.add_subcommand("verify", "run the suite and write reports");
    add_globals(verify, true);

    CLI::App* sweep = app.add_subcommand("sweep", "run one suite per parameter value");
    add_globals(sweep, true);
    sweep->add_option("--parameter", parameter, "lambda | n_slices | g | n")->required();
    sweep->add_option("--values", values_text, "comma list of values")->required();

    CLI::App* report = app.add_subcommand("report", "re-render an existing JSON report");
    add_globals(report, false);
    report->add_option("--input", input_path, "existing JSON report")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(flags);
        if (sweep->parsed()) return cmd_sweep(flags, parameter, values_text);
        return cmd_report(flags, input_path);
    } catch (const ActionlabError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.push_back("actionlab");
    for (const std::string& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace actionlab
