#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ocql/memory/extract.hpp"
#include "ocql/rng.hpp"

using namespace ocql;

namespace {

// Trajectory with the given rewards and one constraint row; states and
// controls get distinct values so sample/column mixups are visible.
Trajectory make_traj(const std::vector<double>& rewards, const std::vector<double>& g_row) {
    const int horizon = static_cast<int>(rewards.size());
    REQUIRE(static_cast<int>(g_row.size()) == horizon + 1);
    Trajectory traj;
    traj.states = Mat(2, horizon + 1);
    traj.controls = Mat(1, horizon);
    traj.rewards = Vec(horizon);
    traj.constraint_values = Mat(1, horizon + 1);
    for (int t = 0; t <= horizon; ++t) {
        traj.states(0, t) = 10.0 + t;
        traj.states(1, t) = -5.0 * t;
        traj.constraint_values(0, t) = g_row[t];
    }
    for (int t = 0; t < horizon; ++t) {
        traj.controls(0, t) = 100.0 + t;
        traj.rewards(t) = rewards[t];
    }
    return traj;
}

Trajectory random_traj(int horizon, std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 3.0);
    Trajectory traj;
    traj.states = Mat(2, horizon + 1);
    traj.controls = Mat(1, horizon);
    traj.rewards = Vec(horizon);
    traj.constraint_values = Mat(2, horizon + 1);
    for (int i = 0; i < traj.states.size(); ++i) traj.states.data()[i] = d(rng);
    for (int i = 0; i < traj.controls.size(); ++i) traj.controls.data()[i] = d(rng);
    for (int i = 0; i < horizon; ++i) traj.rewards(i) = d(rng);
    for (int i = 0; i < traj.constraint_values.size(); ++i)
        traj.constraint_values.data()[i] = d(rng);
    return traj;
}

}  // namespace

TEST_CASE("value targets are discounted reward suffixes") {
    Trajectory traj = make_traj({1.0, 2.0, 4.0}, {0.0, 0.0, 0.0, 0.0});
    auto points = extract_q_targets(traj, 0.5);
    REQUIRE(points.size() == 3);
    CHECK(points[0].target == 3.0);  // 1 + 0.5*2 + 0.25*4
    CHECK(points[1].target == 4.0);  // 2 + 0.5*4
    CHECK(points[2].target == 4.0);

    // Sample t carries the pre-decision state, the decision time, and the
    // control actually taken.
    CHECK(points[1].state(0) == 11.0);
    CHECK(points[1].stage == 1.0);
    CHECK(points[1].control(0) == 101.0);

    // Undiscounted: plain suffix sums.
    auto flat = extract_q_targets(traj, 1.0);
    CHECK(flat[0].target == 7.0);
    CHECK(flat[1].target == 6.0);
}

TEST_CASE("value targets match an independent suffix recomputation exactly") {
    auto rng = make_rng(99, {0});
    std::uniform_int_distribution<int> len(1, 12);
    const double gammas[] = {1.0, 0.9, 0.5};
    for (int rep = 0; rep < 1000; ++rep) {
        Trajectory traj = random_traj(len(rng), rng);
        const double gamma = gammas[rep % 3];
        auto points = extract_q_targets(traj, gamma);
        REQUIRE(static_cast<int>(points.size()) == traj.horizon());
        for (int t = 0; t < traj.horizon(); ++t) {
            double want = 0.0, disc = 1.0;
            for (int tp = t; tp < traj.horizon(); ++tp) {
                want += disc * traj.rewards(tp);
                disc *= gamma;
            }
            CHECK(points[t].target == want);  // bitwise, not approximate
        }
    }
}

TEST_CASE("oracle targets are suffix maxima with the requested alignment") {
    Trajectory traj = make_traj({0.0, 0.0}, {-1.0, 2.0, -3.0});

    auto post = extract_oracle_targets(traj, 0, OracleAlignment::kPostDecision);
    REQUIRE(post.size() == 2);
    CHECK(post[0].target == 2.0);   // worst of g(x_1), g(x_2)
    CHECK(post[1].target == -3.0);  // worst of g(x_2) alone
    CHECK(post[0].stage == 2.0);    // time to termination t_f - t
    CHECK(post[1].stage == 1.0);

    auto with_current = extract_oracle_targets(traj, 0, OracleAlignment::kIncludeCurrent);
    CHECK(with_current[0].target == 2.0);  // g(x_0) joins the window
    CHECK(with_current[1].target == 2.0);

    CHECK_THROWS_AS(extract_oracle_targets(traj, 1, OracleAlignment::kPostDecision),
                    std::invalid_argument);
}

TEST_CASE("oracle targets match an independent suffix-max recomputation exactly") {
    auto rng = make_rng(100, {0});
    std::uniform_int_distribution<int> len(1, 12);
    for (int rep = 0; rep < 1000; ++rep) {
        Trajectory traj = random_traj(len(rng), rng);
        for (int j = 0; j < 2; ++j) {
            auto post = extract_oracle_targets(traj, j, OracleAlignment::kPostDecision);
            for (int t = 0; t < traj.horizon(); ++t) {
                double want = traj.constraint_values(j, t + 1);
                for (int tp = t + 2; tp <= traj.horizon(); ++tp)
                    want = std::max(want, traj.constraint_values(j, tp));
                CHECK(post[t].target == want);
            }
        }
    }
}

TEST_CASE("datapoint_input stacks state, stage, control") {
    DataPoint dp;
    dp.state = Vec(2);
    dp.state << 1.0, 2.0;
    dp.stage = 7.0;
    dp.control = Vec(1);
    dp.control << 9.0;
    Vec in = datapoint_input(dp);
    REQUIRE(in.size() == 4);
    CHECK(in(0) == 1.0);
    CHECK(in(1) == 2.0);
    CHECK(in(2) == 7.0);
    CHECK(in(3) == 9.0);
}

TEST_CASE("ring buffer keeps insertion order and evicts the oldest") {
    RingBuffer<int> buf(3);
    CHECK_THROWS_AS(RingBuffer<int>(0), std::invalid_argument);
    CHECK(buf.capacity() == 3);

    for (int v : {1, 2, 3, 4, 5}) buf.push(v);
    REQUIRE(buf.size() == 3);
    CHECK(buf.at(0) == 3);
    CHECK(buf.at(1) == 4);
    CHECK(buf.at(2) == 5);
    CHECK_THROWS_AS(buf.at(3), std::out_of_range);
    CHECK_THROWS_AS(buf.at(-1), std::out_of_range);
}

TEST_CASE("minibatch sampling modes") {
    RingBuffer<int> buf(8);
    auto rng = make_rng(20, {0});
    CHECK_THROWS_AS(buf.sample_minibatch(1, rng), std::logic_error);

    for (int v = 0; v < 6; ++v) buf.push(v);
    CHECK_THROWS_AS(buf.sample_minibatch(0, rng), std::invalid_argument);

    // k == size: a permutation of the contents.
    auto perm = buf.sample_minibatch(6, rng);
    std::sort(perm.begin(), perm.end());
    CHECK(perm == std::vector<int>{0, 1, 2, 3, 4, 5});

    // k < size: distinct draws.
    auto some = buf.sample_minibatch(4, rng);
    std::sort(some.begin(), some.end());
    CHECK(std::adjacent_find(some.begin(), some.end()) == some.end());

    // k > size: with replacement, every value from the contents.
    auto over = buf.sample_minibatch(20, rng);
    REQUIRE(over.size() == 20);
    for (int v : over) CHECK((v >= 0 && v < 6));

    // Same seed, same minibatch.
    auto rng_a = make_rng(21, {0});
    auto rng_b = make_rng(21, {0});
    CHECK(buf.sample_minibatch(4, rng_a) == buf.sample_minibatch(4, rng_b));
}

TEST_CASE("buffer dumps round-trip and respect the reload capacity") {
    auto rng = make_rng(22, {0});
    std::normal_distribution<double> d(0.0, 1.0);
    RingBuffer<DataPoint> buf(16);
    for (int i = 0; i < 10; ++i) {
        DataPoint dp;
        dp.state = Vec(3);
        dp.control = Vec(2);
        for (int k = 0; k < 3; ++k) dp.state(k) = d(rng);
        for (int k = 0; k < 2; ++k) dp.control(k) = d(rng);
        dp.stage = i;
        dp.target = d(rng);
        buf.push(dp);
    }

    std::ostringstream out;
    save_buffer(out, buf);
    std::istringstream in(out.str());
    RingBuffer<DataPoint> loaded = load_buffer(in, 16);
    REQUIRE(loaded.size() == 10);
    for (int i = 0; i < 10; ++i) {
        CHECK(loaded.at(i).state == buf.at(i).state);
        CHECK(loaded.at(i).stage == buf.at(i).stage);
        CHECK(loaded.at(i).control == buf.at(i).control);
        CHECK(loaded.at(i).target == buf.at(i).target);
    }

    // Reloading into a smaller store keeps the newest entries.
    std::istringstream in2(out.str());
    RingBuffer<DataPoint> small = load_buffer(in2, 4);
    REQUIRE(small.size() == 4);
    CHECK(small.at(0).stage == 6.0);
    CHECK(small.at(3).stage == 9.0);

    std::istringstream bad("short");
    CHECK_THROWS_AS(load_buffer(bad, 4), std::runtime_error);
}
