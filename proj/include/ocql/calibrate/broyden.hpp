#pragma once

#include <functional>

#include "ocql/sim/types.hpp"

namespace ocql {

// Residual map for root finding; input and output share dimension n.
using ResidualFn = std::function<Vec(const Vec&)>;

struct BroydenOptions {
    int max_iter = 40;        // quasi-Newton steps after the initial Jacobian
    double tol = 1e-10;       // convergence threshold on |r|_inf
    double fd_frac = 0.02;    // finite-difference step as a fraction of scale
    double damp_frac = 0.20;  // per-dimension step cap as a fraction of scale
};

struct BroydenResult {
    Vec x;               // best iterate seen (smallest |r|_inf, ties by |r|_1)
    Vec residual;        // residual at x
    int iterations = 0;  // quasi-Newton steps taken
    int evals = 0;       // residual evaluations, including Jacobian columns
    bool converged = false;
};

// Broyden's good method, hardened for noisy step-shaped residuals such as
// empirical CDFs. The iteration runs in the normalized variables z = x/scale
// so the rank-one update stays well conditioned when dimensions differ by
// orders of magnitude. The initial Jacobian comes from forward differences
// with per-dimension steps fd_frac * scale. Steps longer than damp_frac *
// scale in any dimension are shrunk uniformly, preserving the search
// direction. A step that leaves the residual exactly unchanged (a plateau of
// a piecewise constant residual) skips the rank-one update so the Jacobian
// keeps its slope information and the iteration walks across the plateau. A
// singular Jacobian is reset to the identity in z, i.e. slope 1/scale in x;
// callers with decreasing residuals should negate their function.
BroydenResult broyden_solve(const ResidualFn& fn, const Vec& x0, const Vec& scale,
                            const BroydenOptions& opts = {});

}  // namespace ocql
