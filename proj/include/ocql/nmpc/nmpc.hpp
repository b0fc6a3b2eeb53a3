#pragma once

#include <vector>

#include "ocql/agent/es.hpp"
#include "ocql/config.hpp"
#include "ocql/sim/environment.hpp"

namespace ocql {

// Receding-horizon baseline: at each stage it optimizes the whole remaining
// control sequence against a nominal-parameter simulation, applies the first
// control, and re-plans at the next stage from the measured state.
struct NmpcConfig {
    EsConfig es{.population = 60, .parents = 12, .generations = 60, .sigma_frac = 0.10,
                .sigma_halving = 20, .elites = 1};
    double penalty_base = 1e6;   // per-constraint weight is penalty_base / scale_j
    bool hard_rejection = false; // discard violating plans instead of penalizing
    int threads = 0;
};

struct NmpcStepResult {
    Vec control;               // first block of the optimized sequence
    Vec plan;                  // full sequence, (t_f - t) * n_u entries
    double fitness = 0.0;      // penalized nominal objective of the plan
    double solve_seconds = 0.0;
};

// Solves the stage-t sequence problem from state x. The candidate fitness is
// the nominal rollout's terminal reward minus penalty_base / scale_j times
// each post-decision constraint excess (or -inf under hard rejection). A
// warm start of length (t_f - t) * n_u joins the initial ES population.
NmpcStepResult nmpc_solve(const Environment& env, const Vec& x, int t, const NmpcConfig& cfg,
                          std::mt19937_64& rng, const Vec* warm_start = nullptr);

// Wraps nmpc_solve as a Policy. Keeps the previous plan and warm starts the
// next stage from its tail; the chain resets automatically at t = 0 because
// the stored plan then has the wrong length. Per-step solve times are
// appended to *step_seconds when given. The environment must outlive the
// returned policy.
Policy nmpc_policy(const Environment& env, const NmpcConfig& cfg,
                   std::vector<double>* step_seconds = nullptr);

// Reads the nmpc.* keys (population, parents, generations, sigma_frac,
// sigma_halving, elites, penalty_base, hard_rejection, threads).
NmpcConfig nmpc_config_from(const Config& cfg);

}  // namespace ocql
