#pragma once

#include "ocql/sim/environment.hpp"

namespace ocql {

// One-step testbed with a closed-form satisfaction curve. State x ("level"),
// control u ("push"): x_1 = x_0 + u + w where w ~ N(0, noise_sd^2) enters as
// an episode parameter. x_0 ~ N(x0_mean, x0_sd^2) with x0_mean five sd below
// the bound so the start state never violates. Constraint g = x <= 0, reward
// x_1, so the greedy policy pushes to the boundary and the tuned backoff has
// the analytic value b* = noise_sd * Phi^{-1}(1 - omega).
class SyntheticEnvironment : public Environment {
public:
    explicit SyntheticEnvironment(const Config& cfg);

    void sample_initial(std::mt19937_64& rng, Vec& x0, Vec& params) const override;
    Vec nominal_params() const override;
    Vec derivative(const Vec& x, const Vec& u, const Vec& params) const override;
    Vec constraints(const Vec& x) const override;
    double terminal_reward(const Vec& x_tf) const override;

private:
    double x0_mean_, x0_sd_, noise_sd_;
};

}  // namespace ocql
