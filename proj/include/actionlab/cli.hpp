#pragma once

#include <string>
#include <vector>

namespace actionlab {

// Batch front door shared by the binary and the tests.
//   actionlab verify --config FILE [--seed S] [--out-dir D] [--format F,..]
//                    [--threshold T]
//   actionlab sweep  --config FILE --parameter {lambda|n_slices|g|n}
//                    --values V1,V2,.. [same global flags]
//   actionlab report --input REPORT.json [--format F,..] [--out-dir D]
// Exit status: 0 all checks pass, 1 any identity failure, 2 operational error
// (bad config, I/O failure, estimator breakdown) — never conflated. The
// default output directory is --out-dir, else the config's [output] dir, else
// $ACTIONLAB_OUT_DIR, else the working directory.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args exclude argv[0]

}  // namespace actionlab
