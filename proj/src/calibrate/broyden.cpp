#include "ocql/calibrate/broyden.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ocql {
namespace {

Vec eval_checked(const ResidualFn& fn, const Vec& x, int n) {
    Vec r = fn(x);
    if (r.size() != n) {
        throw std::runtime_error("broyden_solve: residual dimension mismatch");
    }
    if (!r.allFinite()) {
        throw std::runtime_error("broyden_solve: residual is not finite");
    }
    return r;
}

}  // namespace

BroydenResult broyden_solve(const ResidualFn& fn, const Vec& x0, const Vec& scale,
                            const BroydenOptions& opts) {
    const int n = static_cast<int>(x0.size());
    if (n == 0) throw std::invalid_argument("broyden_solve: empty problem");
    if (scale.size() != n) throw std::invalid_argument("broyden_solve: scale size mismatch");
    if ((scale.array() <= 0.0).any() || !scale.allFinite()) {
        throw std::invalid_argument("broyden_solve: scales must be positive and finite");
    }
    if (opts.max_iter < 1 || opts.fd_frac <= 0.0 || opts.damp_frac <= 0.0) {
        throw std::invalid_argument("broyden_solve: bad options");
    }

    BroydenResult out;
    Vec x = x0;
    Vec r = eval_checked(fn, x, n);
    out.evals = 1;
    out.x = x;
    out.residual = r;
    double best_inf = r.lpNorm<Eigen::Infinity>();
    double best_one = r.lpNorm<1>();
    if (best_inf <= opts.tol) {
        out.converged = true;
        return out;
    }

    // All linear algebra runs in the normalized variables z = x / scale, so
    // dimensions that differ by orders of magnitude contribute comparably to
    // the secant update. The Jacobian below is d r / d z.
    Mat jac(n, n);
    for (int i = 0; i < n; ++i) {
        const double h = opts.fd_frac * scale(i);
        Vec xp = x;
        xp(i) += h;
        Vec rp = eval_checked(fn, xp, n);
        ++out.evals;
        jac.col(i) = (rp - r) / opts.fd_frac;
    }

    for (int it = 0; it < opts.max_iter; ++it) {
        Vec dz(n);
        {
            Eigen::FullPivLU<Mat> lu(jac);
            if (!lu.isInvertible()) {
                jac.setIdentity();
                lu.compute(jac);
            }
            dz = lu.solve(-r);
        }
        if (!dz.allFinite()) {
            jac.setIdentity();
            dz = -r;
        }

        // Uniform shrink so no dimension moves more than damp_frac of its
        // scale, preserving the search direction.
        double shrink = 1.0;
        for (int i = 0; i < n; ++i) {
            const double mag = std::abs(dz(i));
            if (mag > opts.damp_frac) shrink = std::min(shrink, opts.damp_frac / mag);
        }
        dz *= shrink;

        x += (scale.array() * dz.array()).matrix();
        Vec rn = eval_checked(fn, x, n);
        ++out.evals;
        ++out.iterations;

        // Step-shaped residuals produce ties in the max norm, so the total
        // miss breaks them; otherwise the first overshoot would stick.
        const double norm_inf = rn.lpNorm<Eigen::Infinity>();
        const double norm_one = rn.lpNorm<1>();
        if (norm_inf < best_inf || (norm_inf == best_inf && norm_one < best_one)) {
            best_inf = norm_inf;
            best_one = norm_one;
            out.x = x;
            out.residual = rn;
        }
        if (norm_inf <= opts.tol) {
            out.converged = true;
            return out;
        }

        Vec dr = rn - r;
        const double ss = dz.squaredNorm();
        if (dr.lpNorm<Eigen::Infinity>() > 0.0 && ss > 0.0) {
            jac += (dr - jac * dz) * (dz.transpose() / ss);
        }
        r = rn;
    }
    return out;
}

}  // namespace ocql
