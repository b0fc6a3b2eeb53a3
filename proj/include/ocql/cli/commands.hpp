#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ocql {

// Process exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kExitRuntimeError = 4;

struct CliOptions {
    std::string config_path;
    std::vector<std::string> overrides;  // key=value pairs applied after loading
    std::string bundle_path;             // input bundle (tune, eval, compare)
    std::string out_path;                // bundle output (train, tune) or report prefix
    std::string log_path;                // train: per-iteration JSONL
    std::uint64_t seed = 0;
    int n_eval = -1;     // < 0 means use the config value
    double omega = -1.0;  // < 0 means use the config value
};

// Each returns a process exit code instead of throwing: kExitConfigError for
// bad configs/arguments/unreadable inputs, kExitNoConvergence when backoff
// tuning stops above tolerance, kExitRuntimeError for everything else.
int cmd_train(const CliOptions& opts);
int cmd_tune(const CliOptions& opts);
int cmd_eval(const CliOptions& opts);
int cmd_compare(const CliOptions& opts);

}  // namespace ocql
