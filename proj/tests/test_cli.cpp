#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "ocql/agent/bundle.hpp"
#include "ocql/cli/commands.hpp"
#include "ocql/cli/eval.hpp"
#include "ocql/config.hpp"
#include "ocql/nnet/io.hpp"
#include "ocql/nnet/mlp.hpp"
#include "ocql/rng.hpp"
#include "ocql/sim/synthetic.hpp"

using namespace ocql;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "ocql_cli_tests";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path p = work_dir() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Small end-to-end budget on the one-step plant; quality is covered by the
// module tests, these exercise the wiring.
std::string tiny_config() {
    static const std::string path = write_file(
        "tiny.cfg",
        "[env]\n"
        "id = synthetic\n"
        "[agent]\n"
        "iterations = 30\n"
        "episodes = 10\n"
        "hidden = 16,16\n"
        "q_minibatch = 32\n"
        "g_minibatch = 64\n"
        "q_buffer = 500\n"
        "g_buffer = 2000\n"
        "[es]\n"
        "population = 16\n"
        "parents = 4\n"
        "generations = 10\n"
        "[tune]\n"
        "omega = 0.1\n"
        "allocation = marginal\n"
        "samples = 1000\n"
        "max_iter = 12\n"
        "damp_frac = 0.5\n"
        "[eval]\n"
        "n_eval = 50\n"
        "percentiles = 1,50,99\n"
        "[nmpc]\n"
        "population = 12\n"
        "generations = 6\n");
    return path;
}

Policy constant_policy(double u) {
    return [u](const Vec&, int, std::mt19937_64&) { return Vec::Constant(1, u); };
}

MlpNetwork affine_net(int in_dim, const std::vector<double>& weights, double bias) {
    auto rng = make_rng(70, {0});
    MlpNetwork net = MlpNetwork::create({in_dim, 1}, rng);
    net.w[0].setZero();
    for (int k = 0; k < in_dim; ++k) net.w[0](0, k) = weights[k];
    net.b[0](0) = bias;
    return net;
}

// Greedy control on the one-step plant is u = -x - b exactly.
PolicyBundle analytic_bundle(double backoff0) {
    PolicyBundle bundle;
    bundle.env_id = "synthetic";
    bundle.t_f = 1;
    bundle.q_net = affine_net(3, {0.0, 0.0, 1.0}, 0.0);
    bundle.g_nets.push_back(affine_net(3, {1.0, 0.0, 1.0}, 0.0));
    bundle.backoffs = Vec::Constant(1, backoff0);
    bundle.penalty_weights = Vec::Constant(1, 1e6);
    return bundle;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

}  // namespace

TEST_CASE("nearest-rank percentiles are always observed samples") {
    std::vector<double> v = {50.0, 10.0, 40.0, 20.0, 30.0};  // unsorted on purpose
    CHECK(percentile_nearest_rank(v, 1.0) == 10.0);
    CHECK(percentile_nearest_rank(v, 20.0) == 10.0);   // ceil(1.0) = rank 1
    CHECK(percentile_nearest_rank(v, 50.0) == 30.0);
    CHECK(percentile_nearest_rank(v, 99.0) == 50.0);
    CHECK(percentile_nearest_rank(v, 100.0) == 50.0);
    CHECK(percentile_nearest_rank(v, 0.0) == 10.0);    // rank clamped up to 1
    CHECK(percentile_nearest_rank({1.0, 2.0, 3.0, 4.0}, 50.0) == 2.0);
    CHECK(percentile_nearest_rank({7.0}, 99.0) == 7.0);
    CHECK_THROWS_AS(percentile_nearest_rank({}, 50.0), std::invalid_argument);
}

TEST_CASE("evaluation statistics match a hand count on the one-step plant") {
    SyntheticEnvironment env(Config::from_string(""));
    EvalConfig ec;
    ec.n_eval = 200;
    ec.seed = 7;
    ec.threads = 1;

    // Pushing up by 2 lands around +1.5, far above the bound; pushing down
    // by 2 lands around -2.5, far below it.
    EvalResult up = run_eval(env, [] { return constant_policy(2.0); }, ec);
    CHECK(up.p_violation(0) == 1.0);
    CHECK(up.p_violation_joint == 1.0);
    CHECK(up.returns.size() == 200);
    CHECK(up.step_seconds.size() == 200);  // one control per episode

    EvalResult down = run_eval(env, [] { return constant_policy(-2.0); }, ec);
    CHECK(down.p_violation(0) == 0.0);
    CHECK(down.p_violation_joint == 0.0);
    CHECK(down.mean_return == doctest::Approx(-2.5).epsilon(0.05));

    // Summary stats are recomputable from the raw returns.
    const double mean = down.returns.mean();
    CHECK(down.mean_return == mean);
    const double var = (down.returns.array() - mean).square().sum() / (ec.n_eval - 1);
    CHECK(down.sd_return == doctest::Approx(std::sqrt(var)).epsilon(1e-12));

    // Episodes draw from seed-derived streams, so different policies face
    // identical disturbances: the returns differ by exactly the control gap.
    EvalResult mid = run_eval(env, [] { return constant_policy(0.0); }, ec);
    for (int i = 0; i < ec.n_eval; ++i) {
        CHECK(mid.returns(i) - down.returns(i) == doctest::Approx(2.0).epsilon(1e-12));
    }

    // Same seed, same numbers, bit for bit.
    EvalResult again = run_eval(env, [] { return constant_policy(-2.0); }, ec);
    CHECK((again.returns == down.returns));

    EvalConfig one = ec;
    one.n_eval = 1;
    CHECK(run_eval(env, [] { return constant_policy(0.0); }, one).sd_return == 0.0);
    EvalConfig bad = ec;
    bad.n_eval = 0;
    CHECK_THROWS_AS(run_eval(env, [] { return constant_policy(0.0); }, bad),
                    std::invalid_argument);
}

TEST_CASE("csv writers emit the documented layout") {
    SyntheticEnvironment env(Config::from_string(""));
    EvalConfig ec;
    ec.n_eval = 8;
    ec.seed = 3;
    ec.threads = 1;
    const EvalResult res = run_eval(env, [] { return constant_policy(2.0); }, ec);

    std::ostringstream returns;
    write_returns_csv(returns, res);
    std::istringstream rlines(returns.str());
    std::string line;
    std::getline(rlines, line);
    CHECK(line == "episode,return,violated,violated_g1");
    int rows = 0;
    while (std::getline(rlines, line)) {
        ++rows;
        // every row ends with the joint and per-constraint flags, here all 1
        CHECK(line.substr(line.size() - 4) == ",1,1");
    }
    CHECK(rows == 8);

    std::ostringstream bands;
    const std::vector<double> pcts = {1.0, 50.0, 99.0};
    write_bands_csv(bands, env.spec(), res, pcts);
    std::istringstream blines(bands.str());
    std::getline(blines, line);
    CHECK(line == "kind,name,t,stat,value");
    std::getline(blines, line);
    // first series row: mean of the initial state across episodes
    double x0_mean = 0.0;
    for (const Trajectory& tr : res.trajectories) x0_mean += tr.states(0, 0);
    x0_mean /= res.n_eval;
    CHECK(line == "state,level,0,mean," + format_double(x0_mean));
    int band_rows = 1;
    while (std::getline(blines, line)) ++band_rows;
    // (states 2 stages + controls 1 + constraints 2 stages) x (mean + 3 pcts)
    CHECK(band_rows == (2 + 1 + 2) * 4);

    const nlohmann::json rep = eval_report(res, pcts);
    CHECK(rep["n_eval"] == 8);
    CHECK(rep["p_violation_joint"] == 1.0);
    CHECK(rep["return_percentiles"].contains("p50"));
    CHECK(rep["n_steps"] == 8);
    CHECK(rep["mean_return"].get<double>() == res.mean_return);
}

TEST_CASE("bad usage maps to the config exit code") {
    CliOptions none;
    CHECK(cmd_train(none) == kExitConfigError);  // no config at all

    CliOptions missing;
    missing.config_path = (work_dir() / "does_not_exist.cfg").string();
    missing.out_path = (work_dir() / "b.bundle").string();
    CHECK(cmd_train(missing) == kExitConfigError);

    CliOptions no_out;
    no_out.config_path = tiny_config();
    CHECK(cmd_train(no_out) == kExitConfigError);

    CliOptions bad_override;
    bad_override.config_path = tiny_config();
    bad_override.out_path = (work_dir() / "b.bundle").string();
    bad_override.overrides = {"no_equals_sign"};
    CHECK(cmd_train(bad_override) == kExitConfigError);
    bad_override.overrides = {"=value_without_key"};
    CHECK(cmd_train(bad_override) == kExitConfigError);

    CliOptions no_bundle;
    no_bundle.config_path = tiny_config();
    no_bundle.out_path = (work_dir() / "out").string();
    CHECK(cmd_eval(no_bundle) == kExitConfigError);

    CliOptions gone_bundle = no_bundle;
    gone_bundle.bundle_path = (work_dir() / "missing.bundle").string();
    CHECK(cmd_eval(gone_bundle) == kExitConfigError);

    CliOptions corrupt = no_bundle;
    corrupt.bundle_path = write_file("corrupt.bundle", "not a bundle at all\n");
    CHECK(cmd_eval(corrupt) == kExitConfigError);
}

TEST_CASE("a write failure after training maps to the runtime exit code") {
    CliOptions opts;
    opts.config_path = tiny_config();
    opts.overrides = {"agent.iterations=2", "agent.episodes=2"};
    opts.out_path = "/nonexistent_dir/bundle.out";
    CHECK(cmd_train(opts) == kExitRuntimeError);
}

TEST_CASE("train, eval, and compare round trip through files") {
    const std::string bundle_path = (work_dir() / "trained.bundle").string();
    const std::string log_path = (work_dir() / "train.jsonl").string();

    CliOptions train;
    train.config_path = tiny_config();
    train.out_path = bundle_path;
    train.log_path = log_path;
    train.seed = 11;
    REQUIRE(cmd_train(train) == kExitOk);
    REQUIRE(fs::exists(bundle_path));

    // One JSON object per iteration, each parseable.
    const std::string log_text = read_file(log_path);
    CHECK(count_lines(log_text) == 30);
    std::istringstream log_lines(log_text);
    std::string line;
    std::getline(log_lines, line);
    const nlohmann::json first = nlohmann::json::parse(line);
    CHECK(first["iteration"] == 1);  // logged 1-based
    CHECK(first.contains("q_loss"));

    // Saving the reloaded bundle reproduces the file byte for byte.
    const PolicyBundle loaded = load_bundle_file(bundle_path);
    const std::string copy_path = (work_dir() / "copy.bundle").string();
    save_bundle_file(copy_path, loaded);
    CHECK(read_file(copy_path) == read_file(bundle_path));

    CliOptions eval;
    eval.config_path = tiny_config();
    eval.bundle_path = bundle_path;
    eval.out_path = (work_dir() / "eval_a").string();
    eval.seed = 21;
    REQUIRE(cmd_eval(eval) == kExitOk);

    CliOptions eval_b = eval;
    eval_b.out_path = (work_dir() / "eval_b").string();
    REQUIRE(cmd_eval(eval_b) == kExitOk);

    // Rerunning with the same seed reproduces the CSVs byte for byte. The
    // JSON report holds the wall-clock timings, so it is exempt.
    CHECK(read_file(eval.out_path + "_returns.csv") == read_file(eval_b.out_path + "_returns.csv"));
    CHECK(read_file(eval.out_path + "_bands.csv") == read_file(eval_b.out_path + "_bands.csv"));

    const nlohmann::json rep = nlohmann::json::parse(read_file(eval.out_path + "_report.json"));
    CHECK(rep["n_eval"] == 50);
    CHECK(rep["p_violation"].size() == 1);

    CliOptions cmp = eval;
    cmp.out_path = (work_dir() / "cmp").string();
    cmp.n_eval = 10;
    REQUIRE(cmd_compare(cmp) == kExitOk);
    for (const char* suffix : {"_rl_returns.csv", "_rl_bands.csv", "_rl_report.json",
                               "_nmpc_returns.csv", "_nmpc_bands.csv", "_nmpc_report.json",
                               "_compare.json"}) {
        CHECK(fs::exists(cmp.out_path + suffix));
    }
    const nlohmann::json both = nlohmann::json::parse(read_file(cmp.out_path + "_compare.json"));
    CHECK(both["rl"]["n_eval"] == 10);
    CHECK(both["nmpc"]["n_eval"] == 10);
    CHECK(both["step_seconds_ratio_nmpc_over_rl"].get<double>() > 0.0);
}

TEST_CASE("tune converges on the analytic bundle and reports when it cannot") {
    const std::string in_path = (work_dir() / "analytic.bundle").string();
    save_bundle_file(in_path, analytic_bundle(0.0));

    CliOptions tune;
    tune.config_path = tiny_config();
    tune.bundle_path = in_path;
    tune.out_path = (work_dir() / "tuned.bundle").string();
    REQUIRE(cmd_tune(tune) == kExitOk);

    // The one-step plant has a known quantile answer: push the bound in by
    // the disturbance sd times the 90% normal quantile.
    const PolicyBundle tuned = load_bundle_file(tune.out_path);
    CHECK(tuned.backoffs(0) == doctest::Approx(0.25 * 1.2815515655446004).epsilon(0.25));

    // A constraint net stuck at +1 violates no matter the backoff, so the
    // residual never moves and tuning must admit defeat but keep the bundle.
    PolicyBundle hopeless = analytic_bundle(0.0);
    hopeless.g_nets[0] = affine_net(3, {0.0, 0.0, 0.0}, 1.0);
    const std::string hopeless_path = (work_dir() / "hopeless.bundle").string();
    save_bundle_file(hopeless_path, hopeless);

    CliOptions stuck = tune;
    stuck.bundle_path = hopeless_path;
    stuck.out_path = (work_dir() / "hopeless_tuned.bundle").string();
    stuck.overrides = {"tune.samples=40", "tune.max_iter=2"};
    CHECK(cmd_tune(stuck) == kExitNoConvergence);
    CHECK(fs::exists(stuck.out_path));

    CliOptions no_bundle = tune;
    no_bundle.bundle_path.clear();
    CHECK(cmd_tune(no_bundle) == kExitConfigError);
}
