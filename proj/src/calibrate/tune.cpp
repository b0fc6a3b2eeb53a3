#include "ocql/calibrate/tune.hpp"

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ocql/parallel.hpp"
#include "ocql/rng.hpp"

namespace ocql {

SatisfactionEstimate estimate_satisfaction(const Environment& env, const PolicyBundle& bundle,
                                           const EsConfig& es, int samples, std::uint64_t seed,
                                           int threads) {
    if (samples < 1) throw std::invalid_argument("estimate_satisfaction: samples must be >= 1");
    const int n_g = env.spec().n_g;
    if (bundle.n_g() != n_g) {
        throw std::invalid_argument("estimate_satisfaction: bundle/env constraint count mismatch");
    }

    const Policy greedy = make_greedy_policy(bundle, env.spec().control_box, es);
    std::vector<std::uint8_t> joint_ok(samples, 0);
    std::vector<std::uint8_t> marg_ok(static_cast<std::size_t>(samples) * n_g, 0);

    parallel_for(
        samples,
        [&](int i) {
            auto rng = make_rng(seed, {3, static_cast<std::uint64_t>(i)});
            const Trajectory traj = rollout(env, greedy, rng);
            bool all_ok = true;
            for (int j = 0; j < n_g; ++j) {
                const bool ok = traj.constraint_values.row(j).maxCoeff() <= 0.0;
                marg_ok[static_cast<std::size_t>(i) * n_g + j] = ok ? 1 : 0;
                all_ok = all_ok && ok;
            }
            joint_ok[i] = all_ok ? 1 : 0;
        },
        threads);

    SatisfactionEstimate out;
    out.samples = samples;
    out.marginal = Vec::Zero(n_g);
    int joint_count = 0;
    for (int i = 0; i < samples; ++i) {
        for (int j = 0; j < n_g; ++j) {
            out.marginal(j) += marg_ok[static_cast<std::size_t>(i) * n_g + j];
        }
        joint_count += joint_ok[i];
    }
    out.marginal /= samples;
    out.joint = static_cast<double>(joint_count) / samples;
    return out;
}

TuneResult tune_backoffs(const Environment& env, PolicyBundle& bundle, const TuneConfig& cfg) {
    const int n_g = env.spec().n_g;
    if (bundle.n_g() != n_g) {
        throw std::invalid_argument("tune_backoffs: bundle/env constraint count mismatch");
    }
    if (cfg.omega <= 0.0 || cfg.omega >= 1.0) {
        throw std::invalid_argument("tune_backoffs: omega must lie in (0, 1)");
    }
    if (cfg.samples < 1) throw std::invalid_argument("tune_backoffs: samples must be >= 1");

    const double omega_j =
        cfg.allocation == OmegaAllocation::kBonferroni ? cfg.omega / n_g : cfg.omega;
    Vec targets = Vec::Constant(n_g, 1.0 - omega_j);

    // The residual mutates only this scratch copy; the caller's bundle is
    // untouched until the solve finishes.
    PolicyBundle work = bundle;
    int evals = 0;
    const ResidualFn fn = [&](const Vec& b) {
        work.backoffs = b;
        const auto est = estimate_satisfaction(env, work, cfg.es, cfg.samples, cfg.seed, cfg.threads);
        ++evals;
        return Vec(est.marginal - targets);
    };

    BroydenOptions opts = cfg.broyden;
    opts.tol = std::max(opts.tol, 1.0 / cfg.samples);
    // The search always starts from the untightened constraints, so re-tuning
    // a bundle is independent of whatever backoffs it carried in.
    const BroydenResult solve =
        broyden_solve(fn, Vec::Zero(n_g), env.spec().constraint_scales, opts);

    bundle.backoffs = solve.x;
    const auto final_est =
        estimate_satisfaction(env, bundle, cfg.es, cfg.samples, cfg.seed, cfg.threads);

    TuneResult out;
    out.backoffs = solve.x;
    out.satisfaction = final_est.marginal;
    out.joint = final_est.joint;
    out.targets = targets;
    out.iterations = solve.iterations;
    out.evals = evals + 1;
    out.converged = solve.converged;
    return out;
}

TuneConfig tune_config_from(const Config& cfg) {
    TuneConfig tc;
    tc.omega = cfg.get_double("tune.omega", tc.omega);
    const std::string alloc = cfg.get_string("tune.allocation", "bonferroni");
    if (alloc == "bonferroni") {
        tc.allocation = OmegaAllocation::kBonferroni;
    } else if (alloc == "marginal") {
        tc.allocation = OmegaAllocation::kMarginal;
    } else {
        throw ConfigError("tune.allocation must be 'bonferroni' or 'marginal', got '" + alloc + "'");
    }
    tc.samples = cfg.get_int("tune.samples", tc.samples);
    tc.threads = cfg.get_int("tune.threads", tc.threads);
    tc.broyden.max_iter = cfg.get_int("tune.max_iter", tc.broyden.max_iter);
    tc.broyden.tol = cfg.get_double("tune.tol", tc.broyden.tol);
    tc.broyden.fd_frac = cfg.get_double("tune.fd_frac", tc.broyden.fd_frac);
    tc.broyden.damp_frac = cfg.get_double("tune.damp_frac", tc.broyden.damp_frac);
    return tc;
}

}  // namespace ocql
