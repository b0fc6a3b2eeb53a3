#pragma once

#include "ocql/sim/environment.hpp"

namespace ocql {

// Semi-batch reaction 2A -> B -> 3C in a jacketed reactor. States
// (c_A, c_B, c_C, T, Vol); controls (F, T_0) = feed rate of A solution and
// jacket temperature. Step 1 is exothermic, step 2 endothermic; both are
// first order with Arrhenius rates referenced at T_ref:
//
//   k_1 = k1_ref * exp(1000 * theta_1 * (1/T_ref - 1/T))   [theta_1 scales E_1/R]
//   k_2 = A_2    * exp(e2r         * (1/T_ref - 1/T))      [A_2 = rate at T_ref]
//
//   dc_A = -2 k_1 c_A + q (c_in - c_A)          q = theta_F F / Vol
//   dc_B =    k_1 c_A - k_2 c_B - q c_B
//   dc_C =  3 k_2 c_B           - q c_C
//   dT   = h_1 k_1 c_A + h_2 k_2 c_B + (jacket * theta_4 / Vol)(T_0 - T)
//          + q (T_feed - T)                     [theta_4 = heat-transfer coeff]
//   dVol = theta_F F                            [theta_F = pump calibration]
//
// Path constraints: T <= 420 K and Vol <= 800 L. Objective: moles of product
// c_C * Vol at the end of the 4 h batch. Uncertainty: (theta_1, A_2, theta_4,
// theta_F) drawn once per episode; the start state is deterministic. The
// delivered feed is theta_F times the commanded rate, so the volume bound is
// at risk even under a policy that tracks it exactly.
class Cs2Environment : public Environment {
public:
    explicit Cs2Environment(const Config& cfg);

    void sample_initial(std::mt19937_64& rng, Vec& x0, Vec& params) const override;
    Vec nominal_params() const override;
    Vec derivative(const Vec& x, const Vec& u, const Vec& params) const override;
    Vec constraints(const Vec& x) const override;
    double terminal_reward(const Vec& x_tf) const override;

private:
    double k1_ref_, t_ref_, e2r_, c_in_, h1_, h2_, jacket_, t_feed_;
    double th1_mean_, th1_var_, a2_mean_, a2_var_, th4_mean_, th4_var_;
    double thf_mean_, thf_var_;
    double t0_init_, vol_init_;
    double t_bound_, vol_bound_;
};

}  // namespace ocql
