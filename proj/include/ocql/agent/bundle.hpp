#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ocql/agent/es.hpp"
#include "ocql/memory/extract.hpp"
#include "ocql/nnet/mlp.hpp"
#include "ocql/sim/environment.hpp"

namespace ocql {

// Everything needed to act greedily: the value network Q(x, t, u), one
// constraint network per path constraint predicting the worst future value
// G_j(x, t_f - t, u), the current backoffs, and the penalty weights. Plain
// value type; tuning works on copies.
struct PolicyBundle {
    std::string env_id;
    int t_f = 0;
    double gamma = 1.0;
    OracleAlignment alignment = OracleAlignment::kPostDecision;
    MlpNetwork q_net;
    std::vector<MlpNetwork> g_nets;
    Vec backoffs;         // b_j: selection feasibility is G_j + b_j <= 0
    Vec penalty_weights;  // C_j

    int n_g() const { return static_cast<int>(g_nets.size()); }
};

// Penalized acquisition value of candidate controls at (x, t):
//   f(u) = Q(x,t,u) + sum_j C_j * min(0, -(G_j(x, t_f - t, u) + b_j))
// Feasible candidates (all G_j + b_j <= 0) keep their raw Q.
double bundle_fitness(const PolicyBundle& bundle, const Vec& x, int t, const Vec& u);
Vec bundle_fitness_batch(const PolicyBundle& bundle, const Vec& x, int t, const Mat& controls);

// Solves the constrained control sub-problem with the ES engine.
EsResult select_control(const PolicyBundle& bundle, const Vec& x, int t, const Box& box,
                        const EsConfig& es, std::mt19937_64& rng);

// Always solves the sub-problem.
Policy make_greedy_policy(const PolicyBundle& bundle, const Box& box, const EsConfig& es);

// With probability epsilon picks uniformly in the box, otherwise greedy.
Policy make_epsilon_greedy_policy(const PolicyBundle& bundle, const Box& box, const EsConfig& es,
                                  double epsilon);

// Versioned text container holding the manifest and all networks; a
// save/load/save cycle is byte identical.
void save_bundle(std::ostream& out, const PolicyBundle& bundle);
PolicyBundle load_bundle(std::istream& in);
void save_bundle_file(const std::string& path, const PolicyBundle& bundle);
PolicyBundle load_bundle_file(const std::string& path);

}  // namespace ocql
