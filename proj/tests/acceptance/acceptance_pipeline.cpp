// End-to-end acceptance pipeline at desk scale: train, tune, and evaluate on
// both plants, compare against the receding-horizon baseline, and check the
// per-step solve time ordering. Prints one pass/fail line per check and some
// progress notes; exits nonzero if any check fails. Expect tens of minutes.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include "ocql/agent/bundle.hpp"
#include "ocql/agent/train.hpp"
#include "ocql/calibrate/tune.hpp"
#include "ocql/cli/eval.hpp"
#include "ocql/config.hpp"
#include "ocql/nmpc/nmpc.hpp"
#include "ocql/rng.hpp"
#include "ocql/sim/environment.hpp"

using namespace ocql;

namespace {

int failures = 0;
const auto start_time = std::chrono::steady_clock::now();

double elapsed_minutes() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count() /
           60.0;
}

void progress(const std::string& msg) {
    std::printf("-- [%5.1f min] %s\n", elapsed_minutes(), msg.c_str());
    std::fflush(stdout);
}

void report(const char* name, bool ok, const std::string& detail) {
    std::printf("[%s] %s (%s)\n", ok ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

AgentConfig scaled_agent_config() {
    AgentConfig ac;
    ac.iterations = 300;
    ac.episodes = 30;
    ac.hidden = {64, 64};
    // One Adam step per iteration means 300 updates total here, a fraction of
    // a full run, so a hotter learning rate stands in for the missing steps.
    ac.lr = 5e-3;
    return ac;
}

EvalResult eval_bundle(const Environment& env, const PolicyBundle& bundle, const EsConfig& es,
                       int n_eval, std::uint64_t seed) {
    const Policy greedy = make_greedy_policy(bundle, env.spec().control_box, es);
    EvalConfig ec;
    ec.n_eval = n_eval;
    ec.seed = seed;
    return run_eval(env, [&] { return greedy; }, ec);
}

EvalResult eval_nmpc(const Environment& env, const NmpcConfig& nc, int n_eval,
                     std::uint64_t seed) {
    EvalConfig ec;
    ec.n_eval = n_eval;
    ec.seed = seed;
    return run_eval(env, [&] { return nmpc_policy(env, nc); }, ec);
}

TuneResult tune_scaled(const Environment& env, PolicyBundle& bundle, const EsConfig& es,
                       std::uint64_t seed) {
    TuneConfig tc;
    tc.omega = 0.10;
    tc.allocation = OmegaAllocation::kBonferroni;
    tc.samples = 500;
    tc.seed = seed;
    tc.es = es;
    return tune_backoffs(env, bundle, tc);
}

// Closed loop on the known-parameter plant from its mean start, with a
// generous solve budget; the baseline should track the constraint boundaries
// without crossing them.
double nominal_worst_constraint(const Environment& env, Vec x) {
    NmpcConfig nc;
    nc.es.population = 80;
    nc.es.generations = 100;

    const Vec params = env.nominal_params();
    const Vec scales = env.spec().constraint_scales;
    auto rng = make_rng(707, {0});
    Vec plan_tail;
    double worst = -1e300;
    for (int t = 0; t < env.spec().t_f; ++t) {
        const NmpcStepResult step =
            nmpc_solve(env, x, t, nc, rng, plan_tail.size() > 0 ? &plan_tail : nullptr);
        x = env.step(x, step.control, params, t);
        const Vec g = env.constraints(x);
        worst = std::max(worst, (g.array() / scales.array()).maxCoeff());
        const int rest = static_cast<int>(step.plan.size()) - env.spec().n_u;
        plan_tail = rest > 0 ? Vec(step.plan.tail(rest)) : Vec();
    }
    return worst;
}

}  // namespace

int main() {
    try {
        // ------------------------------------------------------------- CS1
        const auto cs1 = make_environment(Config::from_string("[env]\nid = cs1\n"));
        const AgentConfig ac = scaled_agent_config();

        progress("cs1: training " + std::to_string(ac.iterations) + " iterations x " +
                 std::to_string(ac.episodes) + " episodes, hidden 64x64");
        const TrainResult trained = train_agent(*cs1, ac, 1001);

        progress("cs1: evaluating untuned policy (400 episodes)");
        const PolicyBundle untuned_bundle = trained.bundle;
        const EvalResult untuned = eval_bundle(*cs1, untuned_bundle, ac.es, 400, 2001);
        progress(fmt("cs1: untuned joint Pv %.3f, mean objective %.4f", untuned.p_violation_joint,
                     untuned.mean_return));

        progress("cs1: tuning backoffs (omega 0.1, 500 samples)");
        PolicyBundle tuned_bundle = trained.bundle;
        const TuneResult tune = tune_scaled(*cs1, tuned_bundle, ac.es, 3001);
        progress(fmt("cs1: tune %s after %d steps, backoffs %.1f / %.4f, satisfaction %.3f / %.3f",
                     tune.converged ? "converged" : "stopped at best iterate", tune.iterations,
                     tune.backoffs(0), tune.backoffs(1), tune.satisfaction(0),
                     tune.satisfaction(1)));

        progress("cs1: evaluating tuned policy (400 fresh episodes)");
        const EvalResult tuned = eval_bundle(*cs1, tuned_bundle, ac.es, 400, 2002);
        progress(fmt("cs1: tuned joint Pv %.3f, mean objective %.4f", tuned.p_violation_joint,
                     tuned.mean_return));

        const double gap =
            std::abs(tuned.mean_return - untuned.mean_return) / std::abs(untuned.mean_return);
        report("scaled fed-batch pipeline",
               untuned.p_violation_joint >= 0.2 && tuned.p_violation_joint <= 0.15 && gap <= 0.25,
               fmt("untuned Pv %.3f >= 0.2, tuned Pv %.3f <= 0.15, objective gap %.1f%% <= 25%%",
                   untuned.p_violation_joint, tuned.p_violation_joint, 100.0 * gap));

        progress("cs1: evaluating receding-horizon baseline under uncertainty (400 episodes)");
        const EvalResult mpc = eval_nmpc(*cs1, NmpcConfig{}, 400, 2002);
        progress(fmt("cs1: baseline joint Pv %.3f, mean objective %.4f", mpc.p_violation_joint,
                     mpc.mean_return));
        progress("cs1: nominal closed loop at high solve budget");
        const double nominal_worst = nominal_worst_constraint(*cs1, (Vec(3) << 1.0, 150.0, 0.0).finished());
        report("receding-horizon comparison",
               mpc.p_violation_joint >= 2.0 * tuned.p_violation_joint && nominal_worst <= 1e-3,
               fmt("baseline Pv %.3f >= 2 x tuned %.3f, nominal worst g/scale %.2e <= 1e-3",
                   mpc.p_violation_joint, tuned.p_violation_joint, nominal_worst));

        // ------------------------------------------------------------- CS2
        const auto cs2 = make_environment(Config::from_string("[env]\nid = cs2\n"));

        progress("cs2: training " + std::to_string(ac.iterations) + " iterations x " +
                 std::to_string(ac.episodes) + " episodes, hidden 64x64");
        const TrainResult trained2 = train_agent(*cs2, ac, 1002);

        progress("cs2: evaluating untuned policy (400 episodes)");
        const PolicyBundle untuned_bundle2 = trained2.bundle;
        const EvalResult untuned2 = eval_bundle(*cs2, untuned_bundle2, ac.es, 400, 2101);
        progress(fmt("cs2: untuned Pv per constraint %.3f / %.3f, mean objective %.1f",
                     untuned2.p_violation(0), untuned2.p_violation(1), untuned2.mean_return));

        progress("cs2: tuning backoffs (omega 0.1, 500 samples)");
        PolicyBundle tuned_bundle2 = trained2.bundle;
        const TuneResult tune2 = tune_scaled(*cs2, tuned_bundle2, ac.es, 3002);
        progress(fmt("cs2: tune %s after %d steps, backoffs %.2f / %.2f, satisfaction %.3f / %.3f",
                     tune2.converged ? "converged" : "stopped at best iterate", tune2.iterations,
                     tune2.backoffs(0), tune2.backoffs(1), tune2.satisfaction(0),
                     tune2.satisfaction(1)));

        progress("cs2: evaluating tuned policy (400 fresh episodes)");
        const EvalResult tuned2 = eval_bundle(*cs2, tuned_bundle2, ac.es, 400, 2102);
        progress(fmt("cs2: tuned joint Pv %.3f, mean objective %.1f", tuned2.p_violation_joint,
                     tuned2.mean_return));

        report("reactor stand-in pipeline",
               untuned2.p_violation(0) >= 0.1 && untuned2.p_violation(1) >= 0.1 &&
                   tuned2.p_violation_joint <= 0.2,
               fmt("untuned Pv %.3f / %.3f >= 0.1 each, tuned joint Pv %.3f <= 0.2",
                   untuned2.p_violation(0), untuned2.p_violation(1), tuned2.p_violation_joint));

        progress("cs2: timing receding-horizon baseline (20 episodes)");
        const EvalResult mpc2 = eval_nmpc(*cs2, NmpcConfig{}, 20, 2102);
        report("per-step solve time ordering",
               tuned2.mean_step_seconds < mpc2.mean_step_seconds,
               fmt("policy %.1f ms < baseline %.1f ms per step",
                   1e3 * tuned2.mean_step_seconds, 1e3 * mpc2.mean_step_seconds));

        progress("done");
    } catch (const std::exception& e) {
        report("pipeline execution", false, std::string("exception: ") + e.what());
    }
    return failures == 0 ? 0 : 1;
}
