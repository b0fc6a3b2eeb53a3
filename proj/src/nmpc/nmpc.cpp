#include "ocql/nmpc/nmpc.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "ocql/parallel.hpp"

namespace ocql {
namespace {

Box sequence_box(const Box& control_box, int horizon) {
    const int n_u = control_box.dim();
    Box seq;
    seq.lo = Vec(horizon * n_u);
    seq.hi = Vec(horizon * n_u);
    for (int k = 0; k < horizon; ++k) {
        seq.lo.segment(k * n_u, n_u) = control_box.lo;
        seq.hi.segment(k * n_u, n_u) = control_box.hi;
    }
    return seq;
}

}  // namespace

NmpcStepResult nmpc_solve(const Environment& env, const Vec& x, int t, const NmpcConfig& cfg,
                          std::mt19937_64& rng, const Vec* warm_start) {
    const EnvSpec& spec = env.spec();
    if (t < 0 || t >= spec.t_f) throw std::invalid_argument("nmpc_solve: stage out of range");
    if (x.size() != spec.n_x) throw std::invalid_argument("nmpc_solve: state dimension mismatch");

    const int horizon = spec.t_f - t;
    const int n_u = spec.n_u;
    const int dim = horizon * n_u;
    const Box seq_box = sequence_box(spec.control_box, horizon);
    const Vec params = env.nominal_params();
    const Vec penalty = (cfg.penalty_base / spec.constraint_scales.array()).matrix();
    constexpr double kReject = -std::numeric_limits<double>::infinity();

    const BatchFitness fitness = [&](const Mat& candidates) {
        Vec values(candidates.cols());
        parallel_for(
            static_cast<int>(candidates.cols()),
            [&](int c) {
                Vec state = x;
                double pen = 0.0;
                bool rejected = false;
                // Nominal simulation of the remaining stages; only states the
                // plan can influence (post-decision) are charged.
                for (int k = 0; k < horizon && !rejected; ++k) {
                    const Vec u = candidates.block(k * n_u, c, n_u, 1);
                    try {
                        state = env.step(state, u, params, t + k);
                    } catch (const std::exception&) {
                        rejected = true;
                        break;
                    }
                    const Vec g = env.constraints(state);
                    if (cfg.hard_rejection) {
                        if ((g.array() > 0.0).any()) rejected = true;
                    } else {
                        pen += (penalty.array() * g.array().max(0.0)).sum();
                    }
                }
                values(c) = rejected ? kReject : env.terminal_reward(state) - pen;
            },
            cfg.threads);
        return values;
    };

    std::vector<Vec> warm;
    if (warm_start != nullptr) {
        if (warm_start->size() != dim) {
            throw std::invalid_argument("nmpc_solve: warm start length mismatch");
        }
        warm.push_back(*warm_start);
    }

    const auto t0 = std::chrono::steady_clock::now();
    const EsResult sol = es_maximize(fitness, seq_box, cfg.es, rng, warm);
    const auto t1 = std::chrono::steady_clock::now();

    NmpcStepResult out;
    out.plan = sol.best;
    out.control = sol.best.segment(0, n_u);
    out.fitness = sol.fitness;
    out.solve_seconds = std::chrono::duration<double>(t1 - t0).count();
    return out;
}

Policy nmpc_policy(const Environment& env, const NmpcConfig& cfg,
                   std::vector<double>* step_seconds) {
    auto plan = std::make_shared<Vec>();
    return [&env, cfg, plan, step_seconds](const Vec& x, int t, std::mt19937_64& rng) -> Vec {
        const EnvSpec& spec = env.spec();
        const int dim = (spec.t_f - t) * spec.n_u;
        // The previous stage's plan is one control longer; its tail seeds the
        // current solve. Any other stored length (fresh policy, new episode)
        // means there is nothing usable.
        Vec warm;
        if (plan->size() == dim + spec.n_u) warm = plan->tail(dim);

        NmpcStepResult step =
            nmpc_solve(env, x, t, cfg, rng, warm.size() == dim ? &warm : nullptr);
        *plan = step.plan;
        if (step_seconds != nullptr) step_seconds->push_back(step.solve_seconds);
        return step.control;
    };
}

NmpcConfig nmpc_config_from(const Config& cfg) {
    NmpcConfig nc;
    nc.es.population = cfg.get_int("nmpc.population", nc.es.population);
    nc.es.parents = cfg.get_int("nmpc.parents", nc.es.parents);
    nc.es.generations = cfg.get_int("nmpc.generations", nc.es.generations);
    nc.es.sigma_frac = cfg.get_double("nmpc.sigma_frac", nc.es.sigma_frac);
    nc.es.sigma_halving = cfg.get_int("nmpc.sigma_halving", nc.es.sigma_halving);
    nc.es.elites = cfg.get_int("nmpc.elites", nc.es.elites);
    nc.penalty_base = cfg.get_double("nmpc.penalty_base", nc.penalty_base);
    nc.hard_rejection = cfg.get_bool("nmpc.hard_rejection", nc.hard_rejection);
    nc.threads = cfg.get_int("nmpc.threads", nc.threads);
    return nc;
}

}  // namespace ocql
