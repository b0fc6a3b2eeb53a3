#include "ocql/sim/cs1.hpp"

#include <algorithm>

namespace ocql {

Cs1Environment::Cs1Environment(const Config& cfg) {
    spec_.id = "cs1";
    spec_.n_x = 3;
    spec_.n_u = 2;
    spec_.n_g = 2;
    spec_.t_f = cfg.get_int("env.t_f", 12);
    spec_.dt = cfg.get_double("env.dt", 20.0);
    spec_.substeps = cfg.get_int("env.substeps", 20);
    spec_.control_box.lo = Vec(2);
    spec_.control_box.hi = Vec(2);
    spec_.control_box.lo << cfg.get_double("cs1.light_min", 120.0), cfg.get_double("cs1.feed_min", 0.0);
    spec_.control_box.hi << cfg.get_double("cs1.light_max", 400.0), cfg.get_double("cs1.feed_max", 40.0);
    spec_.constraint_scales = Vec(2);
    spec_.constraint_scales << cfg.get_double("cs1.scale_g1", 800.0), cfg.get_double("cs1.scale_g2", 0.11);
    spec_.train_backoff0 = Vec(2);
    spec_.train_backoff0 << cfg.get_double("cs1.backoff0_g1", -500.0), cfg.get_double("cs1.backoff0_g2", -0.05);
    spec_.state_names = {"c_x", "c_N", "c_q"};
    spec_.control_names = {"I", "F_N"};

    u_m_ = cfg.get_double("cs1.u_m", 0.0572);
    u_d_ = cfg.get_double("cs1.u_d", 0.0);
    y_nx_ = cfg.get_double("cs1.y_nx", 504.5);
    k_m_ = cfg.get_double("cs1.k_m", 0.00016);
    k_d_ = cfg.get_double("cs1.k_d", 0.281);
    k_sq_ = cfg.get_double("cs1.k_sq", 23.51);
    k_iq_ = cfg.get_double("cs1.k_iq", 800.0);
    k_nq_ = cfg.get_double("cs1.k_nq", 16.89);
    k_s_mean_ = cfg.get_double("cs1.k_s_mean", 178.9);
    k_i_mean_ = cfg.get_double("cs1.k_i_mean", 447.1);
    k_n_mean_ = cfg.get_double("cs1.k_n_mean", 393.1);
    var_frac_ = cfg.get_double("cs1.var_frac", 0.1);
    cx0_mean_ = cfg.get_double("cs1.cx0_mean", 1.0);
    cn0_mean_ = cfg.get_double("cs1.cn0_mean", 150.0);
    cx0_var_ = cfg.get_double("cs1.cx0_var", 1e-3);
    cn0_var_ = cfg.get_double("cs1.cn0_var", 22.5);
    product_ratio_ = cfg.get_double("cs1.product_ratio", 0.011);
    cn_bound_ = cfg.get_double("cs1.cn_bound", 800.0);
}

void Cs1Environment::sample_initial(std::mt19937_64& rng, Vec& x0, Vec& params) const {
    std::normal_distribution<double> cx0(cx0_mean_, std::sqrt(cx0_var_));
    std::normal_distribution<double> cn0(cn0_mean_, std::sqrt(cn0_var_));
    x0 = Vec(3);
    x0 << std::max(0.0, cx0(rng)), std::max(0.0, cn0(rng)), 0.0;
    params = Vec(3);
    const double means[3] = {k_s_mean_, k_i_mean_, k_n_mean_};
    for (int i = 0; i < 3; ++i) {
        std::normal_distribution<double> d(means[i], std::sqrt(var_frac_ * means[i]));
        params(i) = std::max(0.0, d(rng));
    }
}

Vec Cs1Environment::nominal_params() const {
    Vec p(3);
    p << k_s_mean_, k_i_mean_, k_n_mean_;
    return p;
}

Vec Cs1Environment::derivative(const Vec& x, const Vec& u, const Vec& params) const {
    double c_x = x(0), c_n = x(1), c_q = x(2);
    double light = u(0), feed = u(1);
    double k_s = params(0), k_i = params(1), k_n = params(2);

    double growth_den = c_n + k_n;
    double decay_den = c_n + k_nq_;
    if (growth_den < 1e-12 || decay_den < 1e-12)
        throw DegenerateStateError("cs1: nitrate concentration makes a rate denominator vanish");

    double photo = light / (light + k_s + light * light / k_i);
    double growth = u_m_ * photo * c_x * c_n / growth_den;
    double photo_q = light / (light + k_sq_ + light * light / k_iq_);

    Vec dx(3);
    dx(0) = growth - u_d_ * c_x;
    dx(1) = -y_nx_ * growth + feed;
    dx(2) = k_m_ * photo_q * c_x - k_d_ * c_q / decay_den;
    return dx;
}

Vec Cs1Environment::constraints(const Vec& x) const {
    Vec g(2);
    g(0) = x(1) - cn_bound_;
    g(1) = x(2) - product_ratio_ * x(0);
    return g;
}

double Cs1Environment::terminal_reward(const Vec& x_tf) const { return x_tf(2); }

}  // namespace ocql
