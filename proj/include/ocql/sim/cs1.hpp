#pragma once

#include "ocql/sim/environment.hpp"

namespace ocql {

// Fed-batch photobioreactor. States (c_x, c_N, c_q) = biomass g/L, nitrate
// mg/L, product mg/L; controls (I, F_N) = light intensity and nitrate feed.
// Path constraints: c_N <= 800 and c_q <= 0.011 * c_x. Objective: product
// concentration at the end of the 240 h batch.
//
// Episode-to-episode uncertainty: initial (c_x, c_N) and the kinetic
// parameters (k_s, k_i, k_n), each Gaussian with variance = var_frac * mean
// and negative draws clamped to zero.
class Cs1Environment : public Environment {
public:
    explicit Cs1Environment(const Config& cfg);

    void sample_initial(std::mt19937_64& rng, Vec& x0, Vec& params) const override;
    Vec nominal_params() const override;
    Vec derivative(const Vec& x, const Vec& u, const Vec& params) const override;
    Vec constraints(const Vec& x) const override;
    double terminal_reward(const Vec& x_tf) const override;

private:
    // fixed kinetics
    double u_m_, u_d_, y_nx_, k_m_, k_d_, k_sq_, k_iq_, k_nq_;
    // sampled-parameter means (k_s, k_i, k_n) and variance fraction
    double k_s_mean_, k_i_mean_, k_n_mean_, var_frac_;
    // initial-state distribution
    double cx0_mean_, cn0_mean_, cx0_var_, cn0_var_;
    double product_ratio_;  // g_2 bound: c_q - product_ratio * c_x <= 0
    double cn_bound_;       // g_1 bound: c_N - cn_bound <= 0
};

}  // namespace ocql
