#include "ocql/memory/extract.hpp"

#include <cstdint>
#include <istream>
#include <ostream>

namespace ocql {

Vec datapoint_input(const DataPoint& dp) {
    Vec in(dp.state.size() + 1 + dp.control.size());
    in << dp.state, dp.stage, dp.control;
    return in;
}

std::vector<DataPoint> extract_q_targets(const Trajectory& traj, double gamma) {
    int horizon = traj.horizon();
    std::vector<DataPoint> out;
    out.reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
        double acc = 0.0, disc = 1.0;
        for (int tp = t; tp < horizon; ++tp) {
            acc += disc * traj.rewards(tp);
            disc *= gamma;
        }
        out.push_back({traj.states.col(t), static_cast<double>(t), traj.controls.col(t), acc});
    }
    return out;
}

std::vector<DataPoint> extract_oracle_targets(const Trajectory& traj, int j, OracleAlignment alignment) {
    if (j < 0 || j >= traj.constraint_values.rows())
        throw std::invalid_argument("extract: constraint index out of range");
    int horizon = traj.horizon();
    std::vector<DataPoint> out;
    out.reserve(horizon);
    for (int t = 0; t < horizon; ++t) {
        int from = alignment == OracleAlignment::kPostDecision ? t + 1 : t;
        double worst = traj.constraint_values(j, from);
        for (int tp = from + 1; tp <= horizon; ++tp)
            worst = std::max(worst, traj.constraint_values(j, tp));
        out.push_back({traj.states.col(t), static_cast<double>(horizon - t), traj.controls.col(t), worst});
    }
    return out;
}

namespace {

void put_i64(std::ostream& out, int64_t v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); }
void put_f64(std::ostream& out, double v) { out.write(reinterpret_cast<const char*>(&v), sizeof(v)); }

int64_t get_i64(std::istream& in) {
    int64_t v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("buffer dump: truncated");
    return v;
}

double get_f64(std::istream& in) {
    double v;
    in.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!in) throw std::runtime_error("buffer dump: truncated");
    return v;
}

}  // namespace

void save_buffer(std::ostream& out, const RingBuffer<DataPoint>& buf) {
    put_i64(out, buf.size());
    for (int i = 0; i < buf.size(); ++i) {
        const DataPoint& dp = buf.at(i);
        put_i64(out, dp.state.size());
        put_i64(out, dp.control.size());
        for (int k = 0; k < dp.state.size(); ++k) put_f64(out, dp.state(k));
        put_f64(out, dp.stage);
        for (int k = 0; k < dp.control.size(); ++k) put_f64(out, dp.control(k));
        put_f64(out, dp.target);
    }
}

RingBuffer<DataPoint> load_buffer(std::istream& in, int capacity) {
    RingBuffer<DataPoint> buf(capacity);
    int64_t n = get_i64(in);
    for (int64_t i = 0; i < n; ++i) {
        DataPoint dp;
        int64_t nx = get_i64(in), nu = get_i64(in);
        dp.state = Vec(nx);
        for (int64_t k = 0; k < nx; ++k) dp.state(k) = get_f64(in);
        dp.stage = get_f64(in);
        dp.control = Vec(nu);
        for (int64_t k = 0; k < nu; ++k) dp.control(k) = get_f64(in);
        dp.target = get_f64(in);
        buf.push(std::move(dp));
    }
    return buf;
}

}  // namespace ocql
