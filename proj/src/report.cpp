#include "actionlab/report.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "actionlab/errors.hpp"
#include "json.hpp"

namespace actionlab {

namespace {

// ---------------------------------------------------------------------------
// Serialization primitives
// ---------------------------------------------------------------------------

std::string json_number(double v) {
    if (std::isnan(v)) v = DBL_MAX;
    if (std::isinf(v)) v = v > 0 ? DBL_MAX : -DBL_MAX;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (unsigned char ch : s) {
        switch (ch) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (ch < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                    out += buf;
                } else {
                    out += static_cast<char>(ch);
                }
        }
    }
    out += "\"";
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        out += ch;
        if (ch == '"') out += '"';
    }
    out += "\"";
    return out;
}

std::string fmt_g(double v, const char* spec = "%.17g") {
    char buf[40];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

std::string to_json(const SuiteReport& report) {
    std::string out;
    out += "{\n  \"meta\": {\n";
    out += "    \"seed\": " + std::to_string(report.seed) + ",\n";
    out += "    \"config_hash\": " + json_string(report.config_hash) + ",\n";
    out += "    \"version\": " + json_string(report.version) + ",\n";
    out += "    \"backend\": " + json_string(report.backend) + "\n";
    out += "  },\n  \"checks\": [";
    for (std::size_t i = 0; i < report.checks.size(); ++i) {
        const CheckResult& c = report.checks[i];
        out += i ? ",\n    {" : "\n    {";
        out += "\"check_id\": " + json_string(c.check_id) + ", ";
        out += "\"paper_eq\": " + json_string(c.paper_eq) + ", ";
        out += "\"sigma\": " + std::to_string(c.sigma) + ", ";
        out += "\"tau\": " + std::to_string(c.tau) + ", ";
        out += "\"lhs\": " + json_number(c.lhs) + ", ";
        out += "\"lhs_err\": " + json_number(c.lhs_err) + ", ";
        out += "\"rhs\": " + json_number(c.rhs) + ", ";
        out += "\"rhs_err\": " + json_number(c.rhs_err) + ", ";
        out += "\"residual\": " + json_number(c.residual) + ", ";
        out += "\"residual_err\": " + json_number(c.residual_err) + ", ";
        out += "\"pull\": " + json_number(c.pull) + ", ";
        out += std::string("\"pass\": ") + (c.pass ? "true" : "false") + ", ";
        out += std::string("\"skipped\": ") + (c.skipped ? "true" : "false") + ", ";
        out += "\"skip_reason\": " + json_string(c.skip_reason) + "}";
    }
    out += "\n  ]\n}\n";
    return out;
}

SuiteReport report_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("report JSON is malformed: ") + e.what());
    }
    SuiteReport r;
    try {
        const nlohmann::json& meta = j.at("meta");
        r.seed = meta.at("seed").get<std::uint64_t>();
        r.config_hash = meta.at("config_hash").get<std::string>();
        r.version = meta.at("version").get<std::string>();
        r.backend = meta.at("backend").get<std::string>();
        for (const nlohmann::json& jc : j.at("checks")) {
            CheckResult c;
            c.check_id = jc.at("check_id").get<std::string>();
            c.paper_eq = jc.at("paper_eq").get<std::string>();
            c.sigma = jc.at("sigma").get<int>();
            c.tau = jc.at("tau").get<int>();
            c.lhs = jc.at("lhs").get<double>();
            c.lhs_err = jc.at("lhs_err").get<double>();
            c.rhs = jc.at("rhs").get<double>();
            c.rhs_err = jc.at("rhs_err").get<double>();
            c.residual = jc.at("residual").get<double>();
            c.residual_err = jc.at("residual_err").get<double>();
            c.pull = jc.at("pull").get<double>();
            c.pass = jc.at("pass").get<bool>();
            c.skipped = jc.at("skipped").get<bool>();
            c.skip_reason = jc.at("skip_reason").get<std::string>();
            r.checks.push_back(std::move(c));
        }
    } catch (const std::exception& e) {
        throw ConfigError(std::string("report JSON is missing fields: ") + e.what());
    }
    if (!r.checks.empty()) pass_fail(r);
    return r;
}

// ---------------------------------------------------------------------------
// CSV
// ---------------------------------------------------------------------------

std::string to_csv(const SuiteReport& report) {
    std::string out =
        "check_id,paper_eq,sigma,tau,lhs,lhs_err,rhs,rhs_err,"
        "residual,residual_err,pull,pass,skipped,skip_reason\r\n";
    for (const CheckResult& c : report.checks) {
        out += csv_field(c.check_id) + ",";
        out += csv_field(c.paper_eq) + ",";
        out += std::to_string(c.sigma) + ",";
        out += std::to_string(c.tau) + ",";
        out += json_number(c.lhs) + ",";
        out += json_number(c.lhs_err) + ",";
        out += json_number(c.rhs) + ",";
        out += json_number(c.rhs_err) + ",";
        out += json_number(c.residual) + ",";
        out += json_number(c.residual_err) + ",";
        out += json_number(c.pull) + ",";
        out += std::string(c.pass ? "true" : "false") + ",";
        out += std::string(c.skipped ? "true" : "false") + ",";
        out += csv_field(c.skip_reason) + "\r\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Text table
// ---------------------------------------------------------------------------

std::string to_text(const SuiteReport& report) {
    std::ostringstream out;
    out << "model:      " << report.model_description << "\n";
    out << "backend:    " << report.backend << "\n";
    out << "seed:       " << report.seed << "\n";
    out << "config:     " << report.config_hash << "\n";
    out << "version:    " << report.version << "\n";
    const SuiteSummary& s = report.summary;
    out << "summary:    " << s.n_checks << " checks, " << s.n_pass << " pass, "
        << s.n_fail << " fail, " << s.n_skipped << " skipped (" << s.n_error
        << " errors); max |pull| = " << fmt_g(s.max_abs_pull, "%.3g")
        << ", pull variance = " << fmt_g(s.pull_variance, "%.3g")
        << ", exit status " << s.exit_status << "\n\n";

    struct Row {
        std::string id, eq, lhs, rhs, res, pull, status, note;
    };
    std::vector<Row> rows;
    Row head{"check", "paper_eq", "lhs", "rhs", "residual", "pull", "status", "note"};
    rows.push_back(head);
    for (const CheckResult& c : report.checks) {
        Row r;
        r.id = c.check_id;
        r.eq = c.paper_eq;
        if (c.skipped) {
            r.lhs = r.rhs = r.res = r.pull = "-";
            r.status = "skip";
            r.note = c.skip_reason;
        } else {
            r.lhs = fmt_g(c.lhs, "%.6g");
            r.rhs = fmt_g(c.rhs, "%.6g");
            r.res = fmt_g(c.residual, "%.3g");
            r.pull = fmt_g(c.pull, "%.2f");
            r.status = c.pass ? "pass" : "FAIL";
            r.note = c.note;
        }
        rows.push_back(std::move(r));
    }
    std::size_t w[7] = {0, 0, 0, 0, 0, 0, 0};
    for (const Row& r : rows) {
        w[0] = std::max(w[0], r.id.size());
        w[1] = std::max(w[1], r.eq.size());
        w[2] = std::max(w[2], r.lhs.size());
        w[3] = std::max(w[3], r.rhs.size());
        w[4] = std::max(w[4], r.res.size());
        w[5] = std::max(w[5], r.pull.size());
        w[6] = std::max(w[6], r.status.size());
    }
    auto pad = [](const std::string& s, std::size_t width) {
        return s + std::string(width - s.size(), ' ');
    };
    for (const Row& r : rows) {
        out << pad(r.id, w[0]) << "  " << pad(r.eq, w[1]) << "  " << pad(r.lhs, w[2])
            << "  " << pad(r.rhs, w[3]) << "  " << pad(r.res, w[4]) << "  "
            << pad(r.pull, w[5]) << "  " << pad(r.status, w[6]);
        if (!r.note.empty()) out << "  " << r.note;
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open for reading: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace actionlab
