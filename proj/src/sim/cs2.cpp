#include "ocql/sim/cs2.hpp"

#include <cmath>

namespace ocql {

Cs2Environment::Cs2Environment(const Config& cfg) {
    spec_.id = "cs2";
    spec_.n_x = 5;
    spec_.n_u = 2;
    spec_.n_g = 2;
    spec_.t_f = cfg.get_int("env.t_f", 10);
    spec_.dt = cfg.get_double("env.dt", 0.4);
    spec_.substeps = cfg.get_int("env.substeps", 20);
    spec_.control_box.lo = Vec(2);
    spec_.control_box.hi = Vec(2);
    spec_.control_box.lo << cfg.get_double("cs2.feed_min", 0.0), cfg.get_double("cs2.jacket_min", 280.0);
    spec_.control_box.hi << cfg.get_double("cs2.feed_max", 250.0), cfg.get_double("cs2.jacket_max", 450.0);
    t_bound_ = cfg.get_double("cs2.t_bound", 420.0);
    vol_bound_ = cfg.get_double("cs2.vol_bound", 800.0);
    spec_.constraint_scales = Vec(2);
    spec_.constraint_scales << cfg.get_double("cs2.scale_g1", t_bound_), cfg.get_double("cs2.scale_g2", vol_bound_);
    spec_.train_backoff0 = Vec(2);
    // default training relaxation: 10% of each bound
    spec_.train_backoff0 << cfg.get_double("cs2.backoff0_g1", -0.1 * t_bound_),
        cfg.get_double("cs2.backoff0_g2", -0.1 * vol_bound_);
    spec_.state_names = {"c_A", "c_B", "c_C", "T", "Vol"};
    spec_.control_names = {"F", "T_0"};

    k1_ref_ = cfg.get_double("cs2.k1_ref", 0.8);
    t_ref_ = cfg.get_double("cs2.t_ref", 350.0);
    e2r_ = cfg.get_double("cs2.e2r", 5000.0);
    c_in_ = cfg.get_double("cs2.c_in", 10.0);
    h1_ = cfg.get_double("cs2.h1", 16.0);
    h2_ = cfg.get_double("cs2.h2", -4.0);
    jacket_ = cfg.get_double("cs2.jacket", 6.0);
    t_feed_ = cfg.get_double("cs2.t_feed", 330.0);
    th1_mean_ = cfg.get_double("cs2.th1_mean", 4.0);
    th1_var_ = cfg.get_double("cs2.th1_var", 0.1);
    a2_mean_ = cfg.get_double("cs2.a2_mean", 0.08);
    a2_var_ = cfg.get_double("cs2.a2_var", 1.6e-4);
    th4_mean_ = cfg.get_double("cs2.th4_mean", 100.0);
    th4_var_ = cfg.get_double("cs2.th4_var", 5.0);
    thf_mean_ = cfg.get_double("cs2.thf_mean", 1.0);
    thf_var_ = cfg.get_double("cs2.thf_var", 2.5e-3);
    t0_init_ = cfg.get_double("cs2.t_init", 290.0);
    vol_init_ = cfg.get_double("cs2.vol_init", 100.0);
}

void Cs2Environment::sample_initial(std::mt19937_64& rng, Vec& x0, Vec& params) const {
    x0 = Vec(5);
    x0 << 0.0, 0.0, 0.0, t0_init_, vol_init_;
    params = Vec(4);
    std::normal_distribution<double> th1(th1_mean_, std::sqrt(th1_var_));
    std::normal_distribution<double> a2(a2_mean_, std::sqrt(a2_var_));
    std::normal_distribution<double> th4(th4_mean_, std::sqrt(th4_var_));
    std::normal_distribution<double> thf(thf_mean_, std::sqrt(thf_var_));
    params << th1(rng), std::max(0.0, a2(rng)), std::max(0.0, th4(rng)), std::max(0.0, thf(rng));
}

Vec Cs2Environment::nominal_params() const {
    Vec p(4);
    p << th1_mean_, a2_mean_, th4_mean_, thf_mean_;
    return p;
}

Vec Cs2Environment::derivative(const Vec& x, const Vec& u, const Vec& params) const {
    double c_a = x(0), c_b = x(1), c_c = x(2), temp = x(3), vol = x(4);
    double t_jacket = u(1);
    double th1 = params(0), a2 = params(1), th4 = params(2);
    double feed = params(3) * u(0);  // delivered flow, not the commanded one

    if (vol < 1e-9) throw DegenerateStateError("cs2: reactor volume is nonpositive");
    if (temp < 1e-9) throw DegenerateStateError("cs2: absolute temperature is nonpositive");

    double arr = 1.0 / t_ref_ - 1.0 / temp;
    double k1 = k1_ref_ * std::exp(1000.0 * th1 * arr);
    double k2 = a2 * std::exp(e2r_ * arr);
    double r1 = k1 * c_a;
    double r2 = k2 * c_b;
    double q = feed / vol;

    Vec dx(5);
    dx(0) = -2.0 * r1 + q * (c_in_ - c_a);
    dx(1) = r1 - r2 - q * c_b;
    dx(2) = 3.0 * r2 - q * c_c;
    dx(3) = h1_ * r1 + h2_ * r2 + (jacket_ * th4 / vol) * (t_jacket - temp) + q * (t_feed_ - temp);
    dx(4) = feed;
    return dx;
}

Vec Cs2Environment::constraints(const Vec& x) const {
    Vec g(2);
    g(0) = x(3) - t_bound_;
    g(1) = x(4) - vol_bound_;
    return g;
}

double Cs2Environment::terminal_reward(const Vec& x_tf) const { return x_tf(2) * x_tf(4); }

}  // namespace ocql
