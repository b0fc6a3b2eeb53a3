#pragma once

#include <random>
#include <vector>

#include "ocql/sim/types.hpp"

namespace ocql {

inline double huber_loss(double err, double delta) {
    double a = std::abs(err);
    return a <= delta ? 0.5 * err * err : delta * (a - 0.5 * delta);
}

inline double huber_grad(double err, double delta) {
    if (err > delta) return delta;
    if (err < -delta) return -delta;
    return err;
}

// Fully connected scalar-output regressor: LeakyReLU hidden layers, linear
// output. Inputs are standardized per feature and the regression target is
// standardized too; both sets of constants travel with the network so a saved
// model evaluates identically after reload.
struct MlpNetwork {
    std::vector<int> layers;  // sizes including input and the final 1
    double alpha = 0.01;      // LeakyReLU negative slope
    std::vector<Mat> w;       // w[l]: layers[l+1] x layers[l]
    std::vector<Vec> b;
    Vec in_mean, in_std;
    double out_mean = 0.0;
    double out_std = 1.0;

    // Uniform fan-in init U(-1/sqrt(fan_in), 1/sqrt(fan_in)), zero biases.
    static MlpNetwork create(const std::vector<int>& sizes, std::mt19937_64& rng);

    int input_dim() const { return layers.front(); }
    int layer_count() const { return static_cast<int>(w.size()); }

    double forward(const Vec& x) const;

    // X holds one sample per column; returns one prediction per column.
    Vec forward_batch(const Mat& X) const;

    void set_input_stats(const Vec& mean, const Vec& std);
    void set_target_stats(double mean, double std);
};

struct Grads {
    std::vector<Mat> w;
    std::vector<Vec> b;
};

// Mean Huber loss of the batch on the standardized target scale.
double huber_objective(const MlpNetwork& net, const Mat& X, const Vec& y, double delta);

// Same objective plus its gradient with respect to every weight and bias
// (reverse mode, averaged over the batch).
double backward_huber(const MlpNetwork& net, const Mat& X, const Vec& y, double delta, Grads& out);

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    long t = 0;
    std::vector<Mat> mw, vw;
    std::vector<Vec> mb, vb;
};

AdamState make_adam(const MlpNetwork& net, double lr = 1e-3);

// One bias-corrected Adam update. Throws std::invalid_argument if the
// gradients are non-finite or shaped wrong; the network is left untouched.
void adam_step(MlpNetwork& net, const Grads& grads, AdamState& state);

}  // namespace ocql
