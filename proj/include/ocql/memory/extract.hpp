#pragma once

#include <iosfwd>

#include "ocql/memory/buffer.hpp"
#include "ocql/sim/types.hpp"

namespace ocql {

// One regression sample for the value or constraint networks. `stage` is the
// decision time t for value samples and the time to termination t_f - t for
// constraint samples; the network input is the concatenation
// [state; stage; control].
struct DataPoint {
    Vec state;
    double stage = 0.0;
    Vec control;
    double target = 0.0;
};

Vec datapoint_input(const DataPoint& dp);

// Monte Carlo returns: for each decision stage t the target is
// sum_{t'>=t} gamma^(t'-t) * reward[t'].
std::vector<DataPoint> extract_q_targets(const Trajectory& traj, double gamma);

// Which future constraint values the stored target may range over.
enum class OracleAlignment {
    kPostDecision,    // worst value over states x_{t+1} .. x_{t_f}
    kIncludeCurrent,  // worst value over states x_t .. x_{t_f}
};

// Worst-case future value of constraint j along the episode, one sample per
// decision stage, with stage = t_f - t.
std::vector<DataPoint> extract_oracle_targets(const Trajectory& traj, int j, OracleAlignment alignment);

// Binary dump for training resumption: little-endian int64 count followed by
// per-item int64 state/control sizes and raw doubles.
void save_buffer(std::ostream& out, const RingBuffer<DataPoint>& buf);
RingBuffer<DataPoint> load_buffer(std::istream& in, int capacity);

}  // namespace ocql
