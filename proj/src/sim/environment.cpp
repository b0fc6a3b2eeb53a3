#include "ocql/sim/environment.hpp"

#include "ocql/sim/cs1.hpp"
#include "ocql/sim/cs2.hpp"
#include "ocql/sim/integrator.hpp"
#include "ocql/sim/synthetic.hpp"

namespace ocql {

Vec Environment::step(const Vec& x, const Vec& u, const Vec& params, int t) const {
    if (u.size() != spec_.n_u)
        throw std::invalid_argument("env.step: control has wrong dimension");
    if (!spec_.control_box.contains(u, 1e-9))
        throw std::invalid_argument("env.step: control outside the admissible box");
    auto rate = [&](const Vec& s, double) { return derivative(s, u, params); };
    return rk4_integrate(rate, x, t * spec_.dt, spec_.dt, spec_.substeps);
}

Trajectory rollout(const Environment& env, const Policy& policy, std::mt19937_64& rng) {
    const EnvSpec& spec = env.spec();
    Trajectory traj;
    traj.states.resize(spec.n_x, spec.t_f + 1);
    traj.controls.resize(spec.n_u, spec.t_f);
    traj.rewards = Vec::Zero(spec.t_f);
    traj.constraint_values.resize(spec.n_g, spec.t_f + 1);

    Vec x, params;
    env.sample_initial(rng, x, params);
    traj.states.col(0) = x;
    traj.constraint_values.col(0) = env.constraints(x);
    for (int t = 0; t < spec.t_f; ++t) {
        Vec u = policy(x, t, rng);
        x = env.step(x, u, params, t);
        traj.controls.col(t) = u;
        traj.states.col(t + 1) = x;
        traj.constraint_values.col(t + 1) = env.constraints(x);
    }
    traj.rewards(spec.t_f - 1) = env.terminal_reward(x);
    return traj;
}

std::unique_ptr<Environment> make_environment(const Config& cfg) {
    std::string id = cfg.get_string("env.id");
    if (id == "cs1") return std::make_unique<Cs1Environment>(cfg);
    if (id == "cs2") return std::make_unique<Cs2Environment>(cfg);
    if (id == "synthetic") return std::make_unique<SyntheticEnvironment>(cfg);
    throw ConfigError("config: unknown env.id '" + id + "'");
}

}  // namespace ocql
