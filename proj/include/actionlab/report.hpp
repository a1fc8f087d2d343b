#pragma once

#include <string>

#include "actionlab/suite.hpp"

namespace actionlab {

// Deterministic JSON rendering with fixed field order:
//   {"meta": {"seed", "config_hash", "version", "backend"},
//    "checks": [{"check_id", "paper_eq", "sigma", "tau", "lhs", "lhs_err",
//                "rhs", "rhs_err", "residual", "residual_err", "pull",
//                "pass", "skipped", "skip_reason"}, ...]}
// Floats are serialized with 17 significant digits (%.17g), which round-trips
// IEEE doubles bit-exactly. JSON has no Infinity/NaN literals, so non-finite
// values clamp to +/-1.7976931348623157e308. The diagnostic `note` field is
// text-rendering only and never serialized.
std::string to_json(const SuiteReport& report);

// Same CheckResult fields flattened, one header row, RFC-4180 quoting, CRLF
// line endings, floats in %.17g.
std::string to_csv(const SuiteReport& report);

// Human-readable aligned table with a provenance header block; includes the
// paper equation tag and diagnostic notes per row.
std::string to_text(const SuiteReport& report);

// Parses a report produced by to_json; CheckResult fields are reproduced
// bit-exactly and the summary block is recomputed. Malformed input ->
// ConfigError.
SuiteReport report_from_json(const std::string& json_text);

// Whole-file helpers; failures -> IoError naming the path.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace actionlab
