#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "json.hpp"
#include "ocql/config.hpp"
#include "ocql/sim/environment.hpp"

namespace ocql {

// Evaluation may need a fresh policy per episode (receding-horizon policies
// carry warm-start state); stateless policies can return the same object.
using PolicyFactory = std::function<Policy()>;

struct EvalConfig {
    int n_eval = 400;
    std::uint64_t seed = 0;
    int threads = 0;
    std::vector<double> percentiles = {1.0, 50.0, 99.0};
};

struct EvalResult {
    int n_eval = 0;
    std::vector<Trajectory> trajectories;  // episode order, replayable from seed
    Vec returns;                           // per-episode objective
    Vec p_violation;                       // per constraint, violation anywhere
    double p_violation_joint = 0.0;
    double mean_return = 0.0;
    double sd_return = 0.0;  // sample sd, zero when n_eval < 2
    std::vector<double> step_seconds;  // one entry per policy call, episode order
    double mean_step_seconds = 0.0;
    double max_step_seconds = 0.0;
};

// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (ranks
// clamped to [1, n]), so the result is always an observed sample.
double percentile_nearest_rank(std::vector<double> values, double p);

// Runs n_eval closed-loop episodes; episode i draws from the seed derived as
// (seed, {4, i}), so repeat runs and different policies see identical
// disturbances. Every policy call is timed.
EvalResult run_eval(const Environment& env, const PolicyFactory& make_policy,
                    const EvalConfig& cfg);

// One row per episode: the objective and 0/1 violation flags, joint first.
// Doubles are printed with 17 significant digits, so reruns with the same
// seed are byte identical.
void write_returns_csv(std::ostream& out, const EvalResult& result);

// Long-format time series: kind,name,t,stat,value with stat = mean or pXX.
// Covers every state, control, and constraint dimension.
void write_bands_csv(std::ostream& out, const EnvSpec& spec, const EvalResult& result,
                     const std::vector<double>& percentiles);

// Scalar summary as JSON: objective stats, violation probabilities, and step
// timing. Timing fields are the only non-reproducible values, which is why
// they live here and not in the CSVs.
nlohmann::json eval_report(const EvalResult& result, const std::vector<double>& percentiles);

// Reads the eval.* keys (n_eval, threads, percentiles).
EvalConfig eval_config_from(const Config& cfg);

}  // namespace ocql
