#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace ocql {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Axis-aligned control box; all sub-problem optimizers clip to it.
struct Box {
    Vec lo;
    Vec hi;

    int dim() const { return static_cast<int>(lo.size()); }

    Vec clip(const Vec& u) const { return u.cwiseMax(lo).cwiseMin(hi); }

    bool contains(const Vec& u, double tol = 0.0) const {
        return (u.array() >= lo.array() - tol).all() && (u.array() <= hi.array() + tol).all();
    }

    Vec range() const { return hi - lo; }
};

// One finished episode. Columns are time steps: states has t_f+1 columns,
// controls/rewards have t_f, constraint_values has t_f+1 (g evaluated at every
// visited state including x_0).
struct Trajectory {
    Mat states;
    Mat controls;
    Vec rewards;
    Mat constraint_values;

    int horizon() const { return static_cast<int>(controls.cols()); }
};

struct IntegrationError : std::runtime_error {
    double time;
    explicit IntegrationError(const std::string& msg, double t)
        : std::runtime_error(msg + " (t=" + std::to_string(t) + ")"), time(t) {}
};

struct DegenerateStateError : std::runtime_error {
    explicit DegenerateStateError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace ocql
