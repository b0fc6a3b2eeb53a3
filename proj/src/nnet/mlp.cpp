#include "ocql/nnet/mlp.hpp"

#include <cmath>

namespace ocql {

MlpNetwork MlpNetwork::create(const std::vector<int>& sizes, std::mt19937_64& rng) {
    if (sizes.size() < 2) throw std::invalid_argument("mlp: need at least input and output layer");
    if (sizes.back() != 1) throw std::invalid_argument("mlp: output layer must have size 1");
    for (int s : sizes)
        if (s < 1) throw std::invalid_argument("mlp: layer sizes must be positive");

    MlpNetwork net;
    net.layers = sizes;
    for (size_t l = 0; l + 1 < sizes.size(); ++l) {
        double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
        std::uniform_real_distribution<double> dist(-bound, bound);
        Mat wl(sizes[l + 1], sizes[l]);
        for (int r = 0; r < wl.rows(); ++r)
            for (int c = 0; c < wl.cols(); ++c) wl(r, c) = dist(rng);
        net.w.push_back(std::move(wl));
        net.b.push_back(Vec::Zero(sizes[l + 1]));
    }
    net.in_mean = Vec::Zero(sizes.front());
    net.in_std = Vec::Ones(sizes.front());
    return net;
}

void MlpNetwork::set_input_stats(const Vec& mean, const Vec& std) {
    if (mean.size() != input_dim() || std.size() != input_dim())
        throw std::invalid_argument("mlp: input stats have wrong dimension");
    in_mean = mean;
    in_std = std.cwiseMax(1e-8);
}

void MlpNetwork::set_target_stats(double mean, double std) {
    out_mean = mean;
    out_std = std::max(std, 1e-8);
}

double MlpNetwork::forward(const Vec& x) const {
    Mat X(x.size(), 1);
    X.col(0) = x;
    return forward_batch(X)(0);
}

Vec MlpNetwork::forward_batch(const Mat& X) const {
    if (X.rows() != input_dim()) throw std::invalid_argument("mlp: input has wrong dimension");
    Mat a = ((X.colwise() - in_mean).array().colwise() / in_std.array()).matrix();
    int last = layer_count() - 1;
    for (int l = 0; l <= last; ++l) {
        Mat z = w[l] * a;
        z.colwise() += b[l];
        if (l < last)
            a = z.unaryExpr([s = alpha](double v) { return v >= 0.0 ? v : s * v; });
        else
            a = std::move(z);
    }
    return (out_mean + out_std * a.row(0).transpose().array()).matrix();
}

namespace {

// Shared forward pass that keeps pre-activations for the backward sweep.
// Returns the raw (standardized-scale) output row.
Eigen::RowVectorXd forward_cached(const MlpNetwork& net, const Mat& X, std::vector<Mat>* acts,
                                  std::vector<Mat>* preacts) {
    Mat a = ((X.colwise() - net.in_mean).array().colwise() / net.in_std.array()).matrix();
    int last = net.layer_count() - 1;
    if (acts) acts->push_back(a);
    for (int l = 0; l < last; ++l) {
        Mat z = net.w[l] * a;
        z.colwise() += net.b[l];
        if (preacts) preacts->push_back(z);
        a = z.unaryExpr([s = net.alpha](double v) { return v >= 0.0 ? v : s * v; });
        if (acts) acts->push_back(a);
    }
    Mat z = net.w[last] * a;
    z.colwise() += net.b[last];
    return z.row(0);
}

}  // namespace

double huber_objective(const MlpNetwork& net, const Mat& X, const Vec& y, double delta) {
    if (y.size() != X.cols()) throw std::invalid_argument("mlp: batch target size mismatch");
    Eigen::RowVectorXd out = forward_cached(net, X, nullptr, nullptr);
    double total = 0.0;
    for (int i = 0; i < y.size(); ++i) {
        double target = (y(i) - net.out_mean) / net.out_std;
        total += huber_loss(out(i) - target, delta);
    }
    return total / static_cast<double>(y.size());
}

double backward_huber(const MlpNetwork& net, const Mat& X, const Vec& y, double delta, Grads& out) {
    if (y.size() != X.cols()) throw std::invalid_argument("mlp: batch target size mismatch");
    int m = static_cast<int>(X.cols());
    int last = net.layer_count() - 1;

    std::vector<Mat> acts, preacts;
    acts.reserve(last + 1);
    preacts.reserve(last);
    Eigen::RowVectorXd raw = forward_cached(net, X, &acts, &preacts);

    double total = 0.0;
    Eigen::RowVectorXd delta_row(m);
    for (int i = 0; i < m; ++i) {
        double target = (y(i) - net.out_mean) / net.out_std;
        double err = raw(i) - target;
        total += huber_loss(err, delta);
        delta_row(i) = huber_grad(err, delta) / m;
    }

    out.w.assign(net.w.size(), Mat());
    out.b.assign(net.b.size(), Vec());
    Mat d = delta_row;  // 1 x m error signal at the output layer
    for (int l = last; l >= 0; --l) {
        out.w[l] = d * acts[l].transpose();
        out.b[l] = d.rowwise().sum();
        if (l > 0) {
            Mat back = net.w[l].transpose() * d;
            d = back.cwiseProduct(preacts[l - 1].unaryExpr(
                [s = net.alpha](double v) { return v >= 0.0 ? 1.0 : s; }));
        }
    }
    return total / m;
}

AdamState make_adam(const MlpNetwork& net, double lr) {
    AdamState st;
    st.lr = lr;
    for (const auto& wl : net.w) {
        st.mw.push_back(Mat::Zero(wl.rows(), wl.cols()));
        st.vw.push_back(Mat::Zero(wl.rows(), wl.cols()));
    }
    for (const auto& bl : net.b) {
        st.mb.push_back(Vec::Zero(bl.size()));
        st.vb.push_back(Vec::Zero(bl.size()));
    }
    return st;
}

void adam_step(MlpNetwork& net, const Grads& grads, AdamState& st) {
    if (grads.w.size() != net.w.size() || grads.b.size() != net.b.size())
        throw std::invalid_argument("adam: gradient layer count mismatch");
    for (size_t l = 0; l < net.w.size(); ++l) {
        if (grads.w[l].rows() != net.w[l].rows() || grads.w[l].cols() != net.w[l].cols() ||
            grads.b[l].size() != net.b[l].size())
            throw std::invalid_argument("adam: gradient shape mismatch");
        if (!grads.w[l].allFinite() || !grads.b[l].allFinite())
            throw std::invalid_argument("adam: non-finite gradient rejected");
    }
    st.t += 1;
    double c1 = 1.0 - std::pow(st.beta1, static_cast<double>(st.t));
    double c2 = 1.0 - std::pow(st.beta2, static_cast<double>(st.t));
    for (size_t l = 0; l < net.w.size(); ++l) {
        st.mw[l] = st.beta1 * st.mw[l] + (1.0 - st.beta1) * grads.w[l];
        st.vw[l] = st.beta2 * st.vw[l] + (1.0 - st.beta2) * grads.w[l].cwiseProduct(grads.w[l]);
        net.w[l] -= (st.lr * (st.mw[l] / c1).array() / ((st.vw[l] / c2).array().sqrt() + st.eps)).matrix();
        st.mb[l] = st.beta1 * st.mb[l] + (1.0 - st.beta1) * grads.b[l];
        st.vb[l] = st.beta2 * st.vb[l] + (1.0 - st.beta2) * grads.b[l].cwiseProduct(grads.b[l]);
        net.b[l] -= (st.lr * (st.mb[l] / c1).array() / ((st.vb[l] / c2).array().sqrt() + st.eps)).matrix();
    }
}

}  // namespace ocql
