#include "ocql/cli/commands.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <utility>

#include "ocql/agent/bundle.hpp"
#include "ocql/agent/train.hpp"
#include "ocql/calibrate/tune.hpp"
#include "ocql/cli/eval.hpp"
#include "ocql/config.hpp"
#include "ocql/nmpc/nmpc.hpp"
#include "ocql/sim/environment.hpp"

namespace ocql {
namespace {

Config load_config(const CliOptions& opts) {
    if (opts.config_path.empty()) throw ConfigError("no config file given");
    Config cfg = Config::load(opts.config_path);
    for (const std::string& kv : opts.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override must look like key=value, got '" + kv + "'");
        }
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    return cfg;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary keeps \n on every platform
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

// A bundle that cannot be read is a usage problem, so it maps to the config
// exit code rather than the runtime one.
PolicyBundle load_bundle_input(const std::string& path) {
    try {
        return load_bundle_file(path);
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

// Maps exceptions to the documented exit codes and keeps the subcommand
// bodies free of try blocks.
int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfigError;
    } catch (const std::ios_base::failure& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kExitRuntimeError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntimeError;
    }
}

void write_eval_outputs(const std::string& prefix, const EnvSpec& spec, const EvalResult& result,
                        const std::vector<double>& percentiles) {
    auto returns = open_out(prefix + "_returns.csv");
    write_returns_csv(returns, result);
    auto bands = open_out(prefix + "_bands.csv");
    write_bands_csv(bands, spec, result, percentiles);
    auto report = open_out(prefix + "_report.json");
    report << eval_report(result, percentiles).dump(2) << '\n';
}

void print_eval_summary(const std::string& label, const EvalResult& result) {
    std::cout << label << ": mean return " << result.mean_return << ", joint violation "
              << result.p_violation_joint << " over " << result.n_eval << " episodes\n";
}

}  // namespace

int cmd_train(const CliOptions& opts) {
    return guarded([&] {
        const Config cfg = load_config(opts);
        if (opts.out_path.empty()) throw ConfigError("train needs --out for the bundle");
        const auto env = make_environment(cfg);
        const AgentConfig ac = agent_config_from(cfg);

        std::ofstream log;
        std::ostream* log_stream = nullptr;
        if (!opts.log_path.empty()) {
            log = open_out(opts.log_path);
            log_stream = &log;
        }

        TrainResult result = train_agent(*env, ac, opts.seed, log_stream);
        save_bundle_file(opts.out_path, result.bundle);

        const TrainRecord& last = result.log.back();
        std::cout << "trained " << ac.iterations << " iterations; final mean return "
                  << last.mean_return << ", violation rate " << last.violation_rate
                  << "; bundle written to " << opts.out_path << '\n';
        return kExitOk;
    });
}

int cmd_tune(const CliOptions& opts) {
    return guarded([&] {
        const Config cfg = load_config(opts);
        if (opts.bundle_path.empty()) throw ConfigError("tune needs --bundle");
        if (opts.out_path.empty()) throw ConfigError("tune needs --out for the tuned bundle");
        const auto env = make_environment(cfg);
        PolicyBundle bundle = load_bundle_input(opts.bundle_path);

        TuneConfig tc = tune_config_from(cfg);
        tc.es = agent_config_from(cfg).es;
        tc.seed = opts.seed;
        if (opts.omega >= 0.0) tc.omega = opts.omega;
        if (opts.n_eval > 0) tc.samples = opts.n_eval;

        const TuneResult result = tune_backoffs(*env, bundle, tc);
        save_bundle_file(opts.out_path, bundle);

        std::cout << "tuned backoffs:";
        for (int j = 0; j < result.backoffs.size(); ++j) std::cout << ' ' << result.backoffs(j);
        std::cout << "; satisfaction:";
        for (int j = 0; j < result.satisfaction.size(); ++j) {
            std::cout << ' ' << result.satisfaction(j);
        }
        std::cout << " (targets";
        for (int j = 0; j < result.targets.size(); ++j) std::cout << ' ' << result.targets(j);
        std::cout << ") after " << result.iterations << " steps, " << result.evals
                  << " estimates; bundle written to " << opts.out_path << '\n';

        if (!result.converged) {
            std::cerr << "tune did not reach tolerance; best iterate kept\n";
            return kExitNoConvergence;
        }
        return kExitOk;
    });
}

int cmd_eval(const CliOptions& opts) {
    return guarded([&] {
        const Config cfg = load_config(opts);
        if (opts.bundle_path.empty()) throw ConfigError("eval needs --bundle");
        if (opts.out_path.empty()) throw ConfigError("eval needs --out prefix");
        const auto env = make_environment(cfg);
        const PolicyBundle bundle = load_bundle_input(opts.bundle_path);

        EvalConfig ec = eval_config_from(cfg);
        ec.seed = opts.seed;
        if (opts.n_eval > 0) ec.n_eval = opts.n_eval;

        const Policy greedy =
            make_greedy_policy(bundle, env->spec().control_box, agent_config_from(cfg).es);
        const EvalResult result = run_eval(*env, [&] { return greedy; }, ec);

        write_eval_outputs(opts.out_path, env->spec(), result, ec.percentiles);
        print_eval_summary("eval", result);
        return kExitOk;
    });
}

int cmd_compare(const CliOptions& opts) {
    return guarded([&] {
        const Config cfg = load_config(opts);
        if (opts.bundle_path.empty()) throw ConfigError("compare needs --bundle");
        if (opts.out_path.empty()) throw ConfigError("compare needs --out prefix");
        const auto env = make_environment(cfg);
        const PolicyBundle bundle = load_bundle_input(opts.bundle_path);

        EvalConfig ec = eval_config_from(cfg);
        ec.seed = opts.seed;
        if (opts.n_eval > 0) ec.n_eval = opts.n_eval;

        const Policy greedy =
            make_greedy_policy(bundle, env->spec().control_box, agent_config_from(cfg).es);
        const EvalResult rl = run_eval(*env, [&] { return greedy; }, ec);
        write_eval_outputs(opts.out_path + "_rl", env->spec(), rl, ec.percentiles);
        print_eval_summary("rl", rl);

        const NmpcConfig nc = nmpc_config_from(cfg);
        // Fresh policy per episode so warm-start chains never cross episodes.
        const EvalResult mpc = run_eval(*env, [&] { return nmpc_policy(*env, nc); }, ec);
        write_eval_outputs(opts.out_path + "_nmpc", env->spec(), mpc, ec.percentiles);
        print_eval_summary("nmpc", mpc);

        nlohmann::json rep;
        rep["rl"] = eval_report(rl, ec.percentiles);
        rep["nmpc"] = eval_report(mpc, ec.percentiles);
        rep["step_seconds_ratio_nmpc_over_rl"] =
            rl.mean_step_seconds > 0.0 ? mpc.mean_step_seconds / rl.mean_step_seconds : 0.0;
        auto out = open_out(opts.out_path + "_compare.json");
        out << rep.dump(2) << '\n';
        return kExitOk;
    });
}

}  // namespace ocql
