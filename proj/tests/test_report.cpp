#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "actionlab/report.hpp"

using namespace actionlab;

namespace {

bool contains(const std::string& haystack, const std::string& needle) {
    return haystack.find(needle) != std::string::npos;
}

SuiteReport sample_report() {
    SuiteReport r;
    r.model_description = "synthetic model for serialization tests";
    r.backend = "exact";
    r.seed = 42;
    r.config_hash = "00ff00ff00ff00ff";
    r.version = "actionlab 1.0.0";
    r.pull_threshold = 4.0;

    CheckResult good;
    good.check_id = "SECOND_VAR[sigma=8,tau=8]";
    good.paper_eq = "Eq. (29)";
    good.sigma = 8;
    good.tau = 8;
    good.lhs = 4.5;
    good.rhs = 4.5000000000000107;
    good.residual = good.lhs - good.rhs;
    good.residual_err = 0.0;
    good.pull = 0.0;
    good.pass = true;
    good.note = "diagnostic text that must stay out of JSON and CSV";

    CheckResult bad;
    bad.check_id = "CHAIN(3)[sigma=4,tau=4]";
    bad.paper_eq = "Eq. (33)";
    bad.sigma = 4;
    bad.tau = 4;
    bad.lhs = 0.11;
    bad.lhs_err = 0.01;
    bad.rhs = -0.13;
    bad.rhs_err = 0.01;
    bad.residual = 0.24;
    bad.residual_err = 0.014;
    bad.pull = 17.14;
    bad.pass = false;

    CheckResult skip;
    skip.check_id = "NEGPOWER(1)[sigma=4]";
    skip.paper_eq = "Eqs. (16)-(21)";
    skip.sigma = 4;
    skip.skipped = true;
    skip.skip_reason = "error: \"quoted\", with commas,\nand a second line\tplus tab";

    r.checks = {good, bad, skip};
    pass_fail(r);
    return r;
}

}  // namespace

TEST_CASE("json rendering: shape, order, and determinism") {
    const SuiteReport r = sample_report();
    const std::string j = to_json(r);
    CHECK(j == to_json(r));  // bytewise deterministic

    CHECK(contains(j, "\"meta\""));
    CHECK(contains(j, "\"seed\": 42"));
    CHECK(contains(j, "\"config_hash\": \"00ff00ff00ff00ff\""));
    CHECK(contains(j, "\"version\": \"actionlab 1.0.0\""));
    CHECK(contains(j, "\"backend\": \"exact\""));
    // Field order inside a check row is pinned.
    const std::size_t id_pos = j.find("\"check_id\"");
    const std::size_t eq_pos = j.find("\"paper_eq\"");
    const std::size_t lhs_pos = j.find("\"lhs\"");
    const std::size_t pass_pos = j.find("\"pass\"");
    REQUIRE(id_pos != std::string::npos);
    CHECK(id_pos < eq_pos);
    CHECK(eq_pos < lhs_pos);
    CHECK(lhs_pos < pass_pos);
    CHECK(contains(j, "\"paper_eq\": \"Eq. (29)\""));
    // 17 significant digits keep doubles bit-exact.
    CHECK(contains(j, "4.5000000000000107"));
    // Escapes: quote, newline, tab inside skip_reason.
    CHECK(contains(j, "\\\"quoted\\\""));
    CHECK(contains(j, "\\n"));
    CHECK(contains(j, "\\t"));
    // The diagnostic note never leaks into the serialized form.
    CHECK_FALSE(contains(j, "\"note\""));
    CHECK_FALSE(contains(j, "diagnostic text"));
}

TEST_CASE("json round trip is byte-identical and recomputes the summary") {
    const SuiteReport r = sample_report();
    const std::string j = to_json(r);
    const SuiteReport rt = report_from_json(j);
    CHECK(to_json(rt) == j);
    CHECK(rt.seed == 42);
    CHECK(rt.backend == "exact");
    CHECK(rt.config_hash == "00ff00ff00ff00ff");
    REQUIRE(rt.checks.size() == 3);
    CHECK(rt.checks[0].rhs == 4.5000000000000107);  // bit-exact float transport
    CHECK(rt.checks[2].skip_reason ==
          "error: \"quoted\", with commas,\nand a second line\tplus tab");
    // Summary is recomputed, not parsed.
    CHECK(rt.summary.n_checks == 3);
    CHECK(rt.summary.n_pass == 1);
    CHECK(rt.summary.n_fail == 1);
    CHECK(rt.summary.n_skipped == 1);
    CHECK(rt.summary.n_error == 1);
    CHECK(rt.summary.exit_status == 2);
}

TEST_CASE("non-finite values clamp to the largest finite double") {
    SuiteReport r = sample_report();
    r.checks[0].lhs = std::numeric_limits<double>::quiet_NaN();
    r.checks[0].pull = std::numeric_limits<double>::infinity();
    r.checks[0].rhs = -std::numeric_limits<double>::infinity();
    const std::string j = to_json(r);
    CHECK(contains(j, "\"lhs\": 1.7976931348623157e+308"));
    CHECK(contains(j, "\"rhs\": -1.7976931348623157e+308"));
    CHECK(contains(j, "\"pull\": 1.7976931348623157e+308"));
    const SuiteReport rt = report_from_json(j);
    CHECK(rt.checks[0].lhs == std::numeric_limits<double>::max());
    CHECK(rt.checks[0].rhs == -std::numeric_limits<double>::max());
}

TEST_CASE("report_from_json rejects malformed and incomplete input") {
    CHECK_THROWS_AS(report_from_json("this is not json"), ConfigError);
    CHECK_THROWS_AS(report_from_json("{\"checks\": []}"), ConfigError);  // no meta
    CHECK_THROWS_AS(report_from_json(
                        "{\"meta\": {\"seed\": 1, \"config_hash\": \"x\", "
                        "\"version\": \"v\", \"backend\": \"exact\"}, "
                        "\"checks\": [{\"check_id\": \"A\"}]}"),
                    ConfigError);  // check row missing fields
    // An empty checks list is legal (no summary recomputation).
    const SuiteReport empty = report_from_json(
        "{\"meta\": {\"seed\": 7, \"config_hash\": \"h\", \"version\": \"v\", "
        "\"backend\": \"exact\"}, \"checks\": []}");
    CHECK(empty.seed == 7);
    CHECK(empty.checks.empty());
    CHECK(empty.summary.n_checks == 0);
}

TEST_CASE("csv rendering follows RFC 4180") {
    const SuiteReport r = sample_report();
    const std::string csv = to_csv(r);
    CHECK(csv.rfind("check_id,paper_eq,sigma,tau,lhs,lhs_err,rhs,rhs_err,"
                    "residual,residual_err,pull,pass,skipped,skip_reason\r\n",
                    0) == 0);
    // CRLF endings on every record: 1 header + 3 rows.
    std::size_t crlf = 0;
    for (std::size_t p = csv.find("\r\n"); p != std::string::npos;
         p = csv.find("\r\n", p + 2))
        ++crlf;
    CHECK(crlf == 4);
    // paper_eq contains commas inside parentheses-free text? It does contain
    // a comma-free tag here, but the skip_reason has commas, quotes, and a
    // newline: field is quoted and internal quotes are doubled.
    CHECK(contains(csv, "\"error: \"\"quoted\"\", with commas,\nand a second line"));
    CHECK(contains(csv, "4.5000000000000107"));
    CHECK(contains(csv, ",true,false,"));   // pass row
    CHECK(contains(csv, ",false,true,"));   // skipped row
    CHECK_FALSE(contains(csv, "diagnostic text"));
}

TEST_CASE("text rendering carries provenance, status markers, and notes") {
    const SuiteReport r = sample_report();
    const std::string t = to_text(r);
    CHECK(contains(t, "model:      synthetic model for serialization tests"));
    CHECK(contains(t, "backend:    exact"));
    CHECK(contains(t, "seed:       42"));
    CHECK(contains(t, "config:     00ff00ff00ff00ff"));
    CHECK(contains(t, "version:    actionlab 1.0.0"));
    CHECK(contains(t, "3 checks, 1 pass, 1 fail, 1 skipped (1 errors)"));
    CHECK(contains(t, "exit status 2"));
    CHECK(contains(t, "pass"));
    CHECK(contains(t, "FAIL"));
    CHECK(contains(t, "skip"));
    CHECK(contains(t, "Eq. (29)"));
    // Notes and skip reasons are text-only diagnostics and appear here.
    CHECK(contains(t, "diagnostic text that must stay out of JSON and CSV"));
    CHECK(contains(t, "error: \"quoted\""));
}

TEST_CASE("text file round trip and io errors") {
    const std::string path = "test_report_roundtrip.tmp";
    std::string content = "line one\r\nline two\n";
    content.push_back('\0');
    content += "binary tail";
    write_text_file(path, content);
    CHECK(read_text_file(path) == content);
    std::remove(path.c_str());

    CHECK_THROWS_AS(read_text_file("/nonexistent_dir_zz/report.json"), IoError);
    CHECK_THROWS_AS(write_text_file("/nonexistent_dir_zz/report.json", "x"), IoError);
    try {
        read_text_file("/nonexistent_dir_zz/report.json");
    } catch (const IoError& e) {
        CHECK(contains(e.what(), "/nonexistent_dir_zz/report.json"));
    }
}
