#pragma once

#include <cstdint>
#include <iosfwd>

#include "ocql/agent/bundle.hpp"
#include "ocql/config.hpp"

namespace ocql {

struct AgentConfig {
    int iterations = 2000;         // training iterations, one net update each
    int episodes = 100;            // exploration episodes per iteration
    double epsilon0 = 0.99;
    double epsilon_decay = 0.99;
    double backoff_decay = 0.995;  // shrinks the relaxed training backoffs
    double gamma = 1.0;
    int q_minibatch = 100;
    std::vector<int> g_minibatch = {500, 1000};  // per constraint, last entry repeats
    int q_capacity = 3000;
    int g_capacity = 30000;
    std::vector<int> hidden = {200, 200};
    double lr = 1e-3;
    double huber_delta = 1.0;
    double penalty_base = 1e6;  // C_j = penalty_base / constraint_scale_j
    OracleAlignment alignment = OracleAlignment::kPostDecision;
    EsConfig es;
    int threads = 0;  // 0 = hardware concurrency
};

// Reads agent.* / es.* keys; unset keys keep the defaults above.
AgentConfig agent_config_from(const Config& cfg);

struct TrainRecord {
    int iteration = 0;
    double q_loss = 0.0;
    std::vector<double> g_losses;
    double epsilon = 0.0;
    std::vector<double> backoffs;
    double mean_return = 0.0;
    double violation_rate = 0.0;  // fraction of the iteration's episodes violating any g
};

struct TrainResult {
    PolicyBundle bundle;
    std::vector<TrainRecord> log;
};

// Collect-then-update loop: each iteration runs `episodes` exploration episodes
// with the current networks, refreshes the replay stores, then applies one
// Adam step per network. If log_stream is given, one JSON object per
// iteration is appended. Deterministic for a given seed regardless of the
// thread count. Episodes explore under geometrically shrinking relaxed
// backoffs, but the returned bundle carries nominal (zero) backoffs; margins
// against uncertainty come from tuning afterwards.
TrainResult train_agent(const Environment& env, const AgentConfig& cfg, uint64_t seed,
                        std::ostream* log_stream = nullptr);

}  // namespace ocql
