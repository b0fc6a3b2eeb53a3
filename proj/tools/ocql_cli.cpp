#include <string>

#include "CLI11.hpp"
#include "ocql/cli/commands.hpp"

namespace {

// Options shared by every subcommand; each flag writes straight into opts.
void add_common(CLI::App* cmd, ocql::CliOptions* opts) {
    cmd->add_option("-c,--config", opts->config_path, "Configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("-D,--define", opts->overrides,
                    "Override a config key, key=value (repeatable)");
    cmd->add_option("-s,--seed", opts->seed, "Base seed for all randomness");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Oracle-assisted constrained Q-learning for batch process control"};
    app.require_subcommand(1);

    ocql::CliOptions opts;

    CLI::App* train = app.add_subcommand("train", "Train a policy bundle");
    add_common(train, &opts);
    train->add_option("-o,--out", opts.out_path, "Output bundle path")->required();
    train->add_option("-l,--log", opts.log_path, "Per-iteration JSONL log path");

    CLI::App* tune = app.add_subcommand("tune", "Tune constraint backoffs on a trained bundle");
    add_common(tune, &opts);
    tune->add_option("-b,--bundle", opts.bundle_path, "Input bundle")->required();
    tune->add_option("-o,--out", opts.out_path, "Output bundle path")->required();
    tune->add_option("-w,--omega", opts.omega, "Joint violation budget in (0,1)");
    tune->add_option("-n,--n-eval", opts.n_eval, "Rollouts per satisfaction estimate");

    CLI::App* eval = app.add_subcommand("eval", "Evaluate a bundle's greedy policy");
    add_common(eval, &opts);
    eval->add_option("-b,--bundle", opts.bundle_path, "Input bundle")->required();
    eval->add_option("-o,--out", opts.out_path, "Output prefix for csv/json reports")->required();
    eval->add_option("-n,--n-eval", opts.n_eval, "Number of evaluation episodes");

    CLI::App* compare =
        app.add_subcommand("compare", "Evaluate a bundle against the receding-horizon baseline");
    add_common(compare, &opts);
    compare->add_option("-b,--bundle", opts.bundle_path, "Input bundle")->required();
    compare->add_option("-o,--out", opts.out_path, "Output prefix for csv/json reports")
        ->required();
    compare->add_option("-n,--n-eval", opts.n_eval, "Number of evaluation episodes");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        // CLI11 returns 0 for --help; anything else is a usage problem.
        return code == 0 ? ocql::kExitOk : ocql::kExitConfigError;
    }

    if (train->parsed()) return ocql::cmd_train(opts);
    if (tune->parsed()) return ocql::cmd_tune(opts);
    if (eval->parsed()) return ocql::cmd_eval(opts);
    return ocql::cmd_compare(opts);
}
