#include "ocql/cli/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>

#include "ocql/nnet/io.hpp"
#include "ocql/parallel.hpp"
#include "ocql/rng.hpp"

namespace ocql {
namespace {

std::string stat_label(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "p%g", p);
    return buf;
}

std::string series_name(const std::vector<std::string>& names, const char* prefix, int i) {
    if (i < static_cast<int>(names.size()) && !names[i].empty()) return names[i];
    return prefix + std::to_string(i + 1);
}

// Emits mean plus the requested percentiles of one time series row.
void write_band_rows(std::ostream& out, const char* kind, const std::string& name, int t,
                     std::vector<double>& samples, const std::vector<double>& percentiles) {
    double sum = 0.0;
    for (double v : samples) sum += v;
    out << kind << ',' << name << ',' << t << ",mean," << format_double(sum / samples.size())
        << '\n';
    for (double p : percentiles) {
        out << kind << ',' << name << ',' << t << ',' << stat_label(p) << ','
            << format_double(percentile_nearest_rank(samples, p)) << '\n';
    }
}

}  // namespace

double percentile_nearest_rank(std::vector<double> values, double p) {
    if (values.empty()) throw std::invalid_argument("percentile_nearest_rank: empty sample");
    std::sort(values.begin(), values.end());
    const int n = static_cast<int>(values.size());
    int rank = static_cast<int>(std::ceil(p / 100.0 * n));
    rank = std::clamp(rank, 1, n);
    return values[rank - 1];
}

EvalResult run_eval(const Environment& env, const PolicyFactory& make_policy,
                    const EvalConfig& cfg) {
    if (cfg.n_eval < 1) throw std::invalid_argument("run_eval: n_eval must be >= 1");
    const int n = cfg.n_eval;
    const int n_g = env.spec().n_g;

    EvalResult out;
    out.n_eval = n;
    out.trajectories.resize(n);
    std::vector<std::vector<double>> times(n);

    parallel_for(
        n,
        [&](int i) {
            Policy inner = make_policy();
            std::vector<double>* sink = &times[i];
            const Policy timed = [inner = std::move(inner), sink](const Vec& x, int t,
                                                                  std::mt19937_64& rng) {
                const auto t0 = std::chrono::steady_clock::now();
                Vec u = inner(x, t, rng);
                const auto t1 = std::chrono::steady_clock::now();
                sink->push_back(std::chrono::duration<double>(t1 - t0).count());
                return u;
            };
            auto rng = make_rng(cfg.seed, {4, static_cast<std::uint64_t>(i)});
            out.trajectories[i] = rollout(env, timed, rng);
        },
        cfg.threads);

    out.returns = Vec(n);
    out.p_violation = Vec::Zero(n_g);
    int joint = 0;
    for (int i = 0; i < n; ++i) {
        const Trajectory& traj = out.trajectories[i];
        out.returns(i) = traj.rewards.sum();
        bool any = false;
        for (int j = 0; j < n_g; ++j) {
            const bool violated = traj.constraint_values.row(j).maxCoeff() > 0.0;
            if (violated) out.p_violation(j) += 1.0;
            any = any || violated;
        }
        if (any) ++joint;
        for (double s : times[i]) out.step_seconds.push_back(s);
    }
    out.p_violation /= n;
    out.p_violation_joint = static_cast<double>(joint) / n;
    out.mean_return = out.returns.mean();
    out.sd_return =
        n < 2 ? 0.0 : std::sqrt((out.returns.array() - out.mean_return).square().sum() / (n - 1));
    if (!out.step_seconds.empty()) {
        double sum = 0.0, mx = 0.0;
        for (double s : out.step_seconds) {
            sum += s;
            mx = std::max(mx, s);
        }
        out.mean_step_seconds = sum / static_cast<double>(out.step_seconds.size());
        out.max_step_seconds = mx;
    }
    return out;
}

void write_returns_csv(std::ostream& out, const EvalResult& result) {
    const int n_g = static_cast<int>(result.p_violation.size());
    out << "episode,return,violated";
    for (int j = 0; j < n_g; ++j) out << ",violated_g" << (j + 1);
    out << '\n';
    for (int i = 0; i < result.n_eval; ++i) {
        const Trajectory& traj = result.trajectories[i];
        bool any = false;
        std::string flags;
        for (int j = 0; j < n_g; ++j) {
            const bool violated = traj.constraint_values.row(j).maxCoeff() > 0.0;
            flags += violated ? ",1" : ",0";
            any = any || violated;
        }
        out << i << ',' << format_double(result.returns(i)) << (any ? ",1" : ",0") << flags
            << '\n';
    }
}

void write_bands_csv(std::ostream& out, const EnvSpec& spec, const EvalResult& result,
                     const std::vector<double>& percentiles) {
    if (result.trajectories.empty()) throw std::invalid_argument("write_bands_csv: empty result");
    const int n = result.n_eval;
    std::vector<double> samples(n);
    out << "kind,name,t,stat,value\n";

    for (int d = 0; d < spec.n_x; ++d) {
        const std::string name = series_name(spec.state_names, "x", d);
        for (int t = 0; t <= spec.t_f; ++t) {
            for (int i = 0; i < n; ++i) samples[i] = result.trajectories[i].states(d, t);
            write_band_rows(out, "state", name, t, samples, percentiles);
        }
    }
    for (int d = 0; d < spec.n_u; ++d) {
        const std::string name = series_name(spec.control_names, "u", d);
        for (int t = 0; t < spec.t_f; ++t) {
            for (int i = 0; i < n; ++i) samples[i] = result.trajectories[i].controls(d, t);
            write_band_rows(out, "control", name, t, samples, percentiles);
        }
    }
    for (int j = 0; j < spec.n_g; ++j) {
        const std::string name = "g" + std::to_string(j + 1);
        for (int t = 0; t <= spec.t_f; ++t) {
            for (int i = 0; i < n; ++i) samples[i] = result.trajectories[i].constraint_values(j, t);
            write_band_rows(out, "constraint", name, t, samples, percentiles);
        }
    }
}

nlohmann::json eval_report(const EvalResult& result, const std::vector<double>& percentiles) {
    nlohmann::json rep;
    rep["n_eval"] = result.n_eval;
    rep["mean_return"] = result.mean_return;
    rep["sd_return"] = result.sd_return;
    nlohmann::json pct;
    std::vector<double> returns(result.returns.data(), result.returns.data() + result.returns.size());
    for (double p : percentiles) pct[stat_label(p)] = percentile_nearest_rank(returns, p);
    rep["return_percentiles"] = pct;
    rep["p_violation"] = std::vector<double>(result.p_violation.data(),
                                             result.p_violation.data() + result.p_violation.size());
    rep["p_violation_joint"] = result.p_violation_joint;
    rep["n_steps"] = result.step_seconds.size();
    rep["mean_step_seconds"] = result.mean_step_seconds;
    rep["max_step_seconds"] = result.max_step_seconds;
    return rep;
}

EvalConfig eval_config_from(const Config& cfg) {
    EvalConfig ec;
    ec.n_eval = cfg.get_int("eval.n_eval", ec.n_eval);
    ec.threads = cfg.get_int("eval.threads", ec.threads);
    ec.percentiles = cfg.get_vector("eval.percentiles", ec.percentiles);
    return ec;
}

}  // namespace ocql
