#pragma once

#include <cstdint>

#include "ocql/agent/bundle.hpp"
#include "ocql/calibrate/broyden.hpp"
#include "ocql/config.hpp"
#include "ocql/sim/environment.hpp"

namespace ocql {

struct SatisfactionEstimate {
    Vec marginal;        // per-constraint P(g_j <= 0 at every visited state)
    double joint = 0.0;  // P(all constraints hold at every visited state)
    int samples = 0;
};

// Empirical satisfaction of the bundle's greedy policy over `samples`
// closed-loop rollouts. Rollout i always draws from the seed derived as
// (seed, {3, i}), so re-evaluating with different backoffs replays the
// identical disturbances and the estimate is a deterministic, piecewise
// constant function of the backoff vector (common random numbers).
SatisfactionEstimate estimate_satisfaction(const Environment& env, const PolicyBundle& bundle,
                                           const EsConfig& es, int samples, std::uint64_t seed,
                                           int threads = 0);

// How the joint violation budget omega is split across constraints.
// kBonferroni targets 1 - omega/n_g per constraint so the union bound keeps
// the joint rate at or under omega; kMarginal targets 1 - omega on each
// constraint individually.
enum class OmegaAllocation { kBonferroni, kMarginal };

struct TuneConfig {
    double omega = 0.10;
    OmegaAllocation allocation = OmegaAllocation::kBonferroni;
    int samples = 1000;      // rollouts per satisfaction estimate
    std::uint64_t seed = 0;  // base seed for the common-random-number pool
    int threads = 0;
    EsConfig es;             // control sub-problem settings for the greedy policy
    BroydenOptions broyden;  // tol is floored at one ECDF bin (1/samples)
};

struct TuneResult {
    Vec backoffs;      // tuned values, also written into the bundle
    Vec satisfaction;  // marginal satisfaction at the tuned backoffs
    double joint = 0.0;
    Vec targets;       // per-constraint satisfaction targets 1 - omega_j
    int iterations = 0;
    int evals = 0;  // satisfaction estimates performed
    bool converged = false;
};

// Solves F_j(b) = 1 - omega_j for the backoff vector, where F_j is the
// common-random-number satisfaction estimate, using broyden_solve over the
// environment's constraint scales. The search starts from zero backoffs
// regardless of what the bundle carries. The bundle's backoffs are updated in
// place (best iterate seen, whether or not the solve converged).
TuneResult tune_backoffs(const Environment& env, PolicyBundle& bundle, const TuneConfig& cfg);

// Reads the tune.* keys (omega, allocation, samples, max_iter, tol, fd_frac,
// damp_frac, threads). The ES settings and seed are wired by the caller.
TuneConfig tune_config_from(const Config& cfg);

}  // namespace ocql
