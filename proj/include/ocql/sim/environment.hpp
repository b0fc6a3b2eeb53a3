#pragma once

#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ocql/config.hpp"
#include "ocql/sim/types.hpp"

namespace ocql {

// Static description of a control problem: dimensions, horizon, sampling
// interval, control box, and per-constraint magnitude scales (used for
// penalty weights, tuning step caps, and finite-difference sizes).
struct EnvSpec {
    std::string id;
    int n_x = 0;
    int n_u = 0;
    int n_g = 0;
    int t_f = 0;            // number of control intervals
    double dt = 0.0;        // hours per interval
    int substeps = 20;
    Box control_box;
    Vec constraint_scales;
    Vec train_backoff0;     // initial training-time constraint relaxations
    std::vector<std::string> state_names;
    std::vector<std::string> control_names;
};

// A stochastic finite-horizon plant. Immutable after construction; rollouts
// are re-entrant and draw everything they need from the RNG passed in.
class Environment {
public:
    virtual ~Environment() = default;

    const EnvSpec& spec() const { return spec_; }

    // Episode randomness: initial state and the parameter vector held fixed
    // for the whole episode.
    virtual void sample_initial(std::mt19937_64& rng, Vec& x0, Vec& params) const = 0;

    virtual Vec nominal_params() const = 0;

    // Instantaneous state rates under fixed parameters.
    virtual Vec derivative(const Vec& x, const Vec& u, const Vec& params) const = 0;

    // Constraint values g(x); feasible means g <= 0 componentwise.
    virtual Vec constraints(const Vec& x) const = 0;

    virtual double terminal_reward(const Vec& x_tf) const = 0;

    // Advances one sampling interval with RK4.
    Vec step(const Vec& x, const Vec& u, const Vec& params, int t) const;

protected:
    EnvSpec spec_;
};

// Maps (state, decision stage) to a control; may consume RNG (exploration,
// optimizer mutations). Fresh instance per episode so stateful policies
// (warm-started optimizers) stay episode-local.
using Policy = std::function<Vec(const Vec& x, int t, std::mt19937_64& rng)>;

// Runs one full episode. Draws initial state/params first, then consults the
// policy once per stage. Terminal reward is stored at rewards[t_f - 1]; all
// other rewards are zero for the environments built here.
Trajectory rollout(const Environment& env, const Policy& policy, std::mt19937_64& rng);

// Builds the environment named by `env.id` ("cs1" | "cs2" | "synthetic").
std::unique_ptr<Environment> make_environment(const Config& cfg);

}  // namespace ocql
