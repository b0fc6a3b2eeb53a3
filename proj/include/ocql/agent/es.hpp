#pragma once

#include <functional>
#include <random>

#include "ocql/sim/types.hpp"

namespace ocql {

// (mu+lambda) evolutionary strategy over a box. Shared by the per-step
// control sub-problem and the receding-horizon baseline (which plans whole
// control sequences, so the dimension is horizon * n_u there).
struct EsConfig {
    int population = 40;        // lambda: candidates evaluated per generation
    int parents = 8;            // mu: survivors that breed
    int generations = 30;
    double sigma_frac = 0.10;   // initial mutation sd, fraction of box range
    int sigma_halving = 10;     // halve sigma every this many generations
    int elites = 1;             // carried over unchanged each generation
};

// Candidates are columns; must return one fitness per column. Non-finite
// fitness ranks below everything finite.
using BatchFitness = std::function<Vec(const Mat& candidates)>;

struct EsResult {
    Vec best;
    double fitness;
};

// Maximizes f over the box. Deterministic for a given RNG state: the number
// of RNG draws per call is fixed by the config and the number of warm starts,
// never by fitness values. Ties rank by lower candidate index. Warm starts
// are injected into the initial population (clipped to the box).
EsResult es_maximize(const BatchFitness& f, const Box& box, const EsConfig& cfg,
                     std::mt19937_64& rng, const std::vector<Vec>& warm_starts = {});

}  // namespace ocql
