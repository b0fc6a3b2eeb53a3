#include "ocql/sim/synthetic.hpp"

namespace ocql {

SyntheticEnvironment::SyntheticEnvironment(const Config& cfg) {
    spec_.id = "synthetic";
    spec_.n_x = 1;
    spec_.n_u = 1;
    spec_.n_g = 1;
    spec_.t_f = 1;
    spec_.dt = 1.0;
    spec_.substeps = cfg.get_int("env.substeps", 1);
    spec_.control_box.lo = Vec::Constant(1, cfg.get_double("synthetic.push_min", -2.0));
    spec_.control_box.hi = Vec::Constant(1, cfg.get_double("synthetic.push_max", 2.0));
    spec_.constraint_scales = Vec::Constant(1, cfg.get_double("synthetic.scale_g1", 1.0));
    spec_.train_backoff0 = Vec::Constant(1, cfg.get_double("synthetic.backoff0_g1", -0.5));
    spec_.state_names = {"level"};
    spec_.control_names = {"push"};
    x0_mean_ = cfg.get_double("synthetic.x0_mean", -0.5);
    x0_sd_ = cfg.get_double("synthetic.x0_sd", 0.1);
    noise_sd_ = cfg.get_double("synthetic.noise_sd", 0.25);
}

void SyntheticEnvironment::sample_initial(std::mt19937_64& rng, Vec& x0, Vec& params) const {
    std::normal_distribution<double> x0d(x0_mean_, x0_sd_);
    std::normal_distribution<double> wd(0.0, noise_sd_);
    x0 = Vec::Constant(1, x0d(rng));
    params = Vec::Constant(1, wd(rng));
}

Vec SyntheticEnvironment::nominal_params() const { return Vec::Zero(1); }

// Constant rate over the single unit interval: x_1 = x_0 + u + w.
Vec SyntheticEnvironment::derivative(const Vec&, const Vec& u, const Vec& params) const {
    return Vec::Constant(1, u(0) + params(0));
}

Vec SyntheticEnvironment::constraints(const Vec& x) const { return x; }

double SyntheticEnvironment::terminal_reward(const Vec& x_tf) const { return x_tf(0); }

}  // namespace ocql
