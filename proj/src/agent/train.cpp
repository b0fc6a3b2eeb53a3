#include "ocql/agent/train.hpp"

#include <cmath>
#include <ostream>

#include <nlohmann/json.hpp>

#include "ocql/parallel.hpp"
#include "ocql/rng.hpp"

namespace ocql {

namespace {

// Running per-feature mean/variance over everything ever inserted into a
// replay store; the current values are frozen into the networks before each
// update and at save time.
struct Welford {
    long count = 0;
    Vec mean, m2;

    explicit Welford(int dim) : mean(Vec::Zero(dim)), m2(Vec::Zero(dim)) {}

    void add(const Vec& x) {
        ++count;
        Vec delta = x - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta.cwiseProduct(x - mean);
    }

    Vec sd() const {
        if (count < 2) return Vec::Ones(mean.size());
        return (m2 / static_cast<double>(count)).cwiseSqrt();
    }
};

Mat batch_inputs(const std::vector<DataPoint>& batch) {
    Mat X(datapoint_input(batch.front()).size(), batch.size());
    for (size_t i = 0; i < batch.size(); ++i) X.col(i) = datapoint_input(batch[i]);
    return X;
}

Vec batch_targets(const std::vector<DataPoint>& batch) {
    Vec y(batch.size());
    for (size_t i = 0; i < batch.size(); ++i) y(i) = batch[i].target;
    return y;
}

}  // namespace

AgentConfig agent_config_from(const Config& cfg) {
    AgentConfig a;
    a.iterations = cfg.get_int("agent.iterations", a.iterations);
    a.episodes = cfg.get_int("agent.episodes", a.episodes);
    a.epsilon0 = cfg.get_double("agent.epsilon0", a.epsilon0);
    a.epsilon_decay = cfg.get_double("agent.epsilon_decay", a.epsilon_decay);
    a.backoff_decay = cfg.get_double("agent.backoff_decay", a.backoff_decay);
    a.gamma = cfg.get_double("agent.gamma", a.gamma);
    a.q_minibatch = cfg.get_int("agent.q_minibatch", a.q_minibatch);
    if (cfg.has("agent.g_minibatch")) {
        a.g_minibatch.clear();
        for (double v : cfg.get_vector("agent.g_minibatch")) a.g_minibatch.push_back(static_cast<int>(v));
    }
    a.q_capacity = cfg.get_int("agent.q_buffer", a.q_capacity);
    a.g_capacity = cfg.get_int("agent.g_buffer", a.g_capacity);
    if (cfg.has("agent.hidden")) {
        a.hidden.clear();
        for (double v : cfg.get_vector("agent.hidden")) a.hidden.push_back(static_cast<int>(v));
    }
    a.lr = cfg.get_double("agent.lr", a.lr);
    a.huber_delta = cfg.get_double("agent.huber_delta", a.huber_delta);
    a.penalty_base = cfg.get_double("agent.penalty_base", a.penalty_base);
    std::string align = cfg.get_string("agent.oracle_alignment", "post_decision");
    if (align == "post_decision")
        a.alignment = OracleAlignment::kPostDecision;
    else if (align == "include_current")
        a.alignment = OracleAlignment::kIncludeCurrent;
    else
        throw ConfigError("config: agent.oracle_alignment must be post_decision or include_current");
    a.es.population = cfg.get_int("es.population", a.es.population);
    a.es.parents = cfg.get_int("es.parents", a.es.parents);
    a.es.generations = cfg.get_int("es.generations", a.es.generations);
    a.es.sigma_frac = cfg.get_double("es.sigma_frac", a.es.sigma_frac);
    a.es.sigma_halving = cfg.get_int("es.sigma_halving", a.es.sigma_halving);
    a.es.elites = cfg.get_int("es.elites", a.es.elites);
    a.threads = cfg.get_int("agent.threads", a.threads);
    return a;
}

TrainResult train_agent(const Environment& env, const AgentConfig& cfg, uint64_t seed,
                        std::ostream* log_stream) {
    const EnvSpec& spec = env.spec();
    if (cfg.iterations < 1 || cfg.episodes < 1) throw std::invalid_argument("train: bad budget");

    int in_dim = spec.n_x + 1 + spec.n_u;
    std::vector<int> sizes{in_dim};
    sizes.insert(sizes.end(), cfg.hidden.begin(), cfg.hidden.end());
    sizes.push_back(1);

    std::mt19937_64 init_rng = make_rng(seed, {0});
    TrainResult result;
    PolicyBundle& bundle = result.bundle;
    bundle.env_id = spec.id;
    bundle.t_f = spec.t_f;
    bundle.gamma = cfg.gamma;
    bundle.alignment = cfg.alignment;
    bundle.q_net = MlpNetwork::create(sizes, init_rng);
    for (int j = 0; j < spec.n_g; ++j) bundle.g_nets.push_back(MlpNetwork::create(sizes, init_rng));
    bundle.backoffs = spec.train_backoff0;
    bundle.penalty_weights = (cfg.penalty_base / spec.constraint_scales.array()).matrix();

    AdamState q_adam = make_adam(bundle.q_net, cfg.lr);
    std::vector<AdamState> g_adam;
    for (int j = 0; j < spec.n_g; ++j) g_adam.push_back(make_adam(bundle.g_nets[j], cfg.lr));

    RingBuffer<DataPoint> q_buffer(cfg.q_capacity);
    std::vector<RingBuffer<DataPoint>> g_buffers(spec.n_g, RingBuffer<DataPoint>(cfg.g_capacity));

    Welford q_in_stats(in_dim);
    Welford q_out_stats(1);
    std::vector<Welford> g_in_stats(spec.n_g, Welford(in_dim));
    std::vector<Welford> g_out_stats(spec.n_g, Welford(1));

    double epsilon = cfg.epsilon0;

    for (int iter = 1; iter <= cfg.iterations; ++iter) {
        // --- collect episodes with the current networks (parallel, seeded per slot)
        std::vector<Trajectory> episodes(cfg.episodes);
        Policy explorer = make_epsilon_greedy_policy(bundle, spec.control_box, cfg.es, epsilon);
        parallel_for(
            cfg.episodes,
            [&](int ep) {
                std::mt19937_64 rng =
                    make_rng(seed, {1, static_cast<uint64_t>(iter), static_cast<uint64_t>(ep)});
                episodes[ep] = rollout(env, explorer, rng);
            },
            cfg.threads);

        // --- push datapoints in episode order so buffer contents stay deterministic
        double return_sum = 0.0;
        int violations = 0;
        for (const Trajectory& traj : episodes) {
            return_sum += traj.rewards.sum();
            if ((traj.constraint_values.array() > 0.0).any()) ++violations;
            for (DataPoint& dp : extract_q_targets(traj, cfg.gamma)) {
                q_in_stats.add(datapoint_input(dp));
                q_out_stats.add(Vec::Constant(1, dp.target));
                q_buffer.push(std::move(dp));
            }
            for (int j = 0; j < spec.n_g; ++j) {
                for (DataPoint& dp : extract_oracle_targets(traj, j, cfg.alignment)) {
                    g_in_stats[j].add(datapoint_input(dp));
                    g_out_stats[j].add(Vec::Constant(1, dp.target));
                    g_buffers[j].push(std::move(dp));
                }
            }
        }

        // --- one Adam step per network on freshly sampled minibatches
        std::mt19937_64 batch_rng = make_rng(seed, {2, static_cast<uint64_t>(iter)});
        bundle.q_net.set_input_stats(q_in_stats.mean, q_in_stats.sd());
        bundle.q_net.set_target_stats(q_out_stats.mean(0), q_out_stats.sd()(0));
        auto q_batch = q_buffer.sample_minibatch(cfg.q_minibatch, batch_rng);
        Grads grads;
        double q_loss =
            backward_huber(bundle.q_net, batch_inputs(q_batch), batch_targets(q_batch), cfg.huber_delta, grads);
        adam_step(bundle.q_net, grads, q_adam);

        std::vector<double> g_losses(spec.n_g, 0.0);
        for (int j = 0; j < spec.n_g; ++j) {
            int h = cfg.g_minibatch.empty()
                        ? cfg.q_minibatch
                        : cfg.g_minibatch[std::min<size_t>(j, cfg.g_minibatch.size() - 1)];
            bundle.g_nets[j].set_input_stats(g_in_stats[j].mean, g_in_stats[j].sd());
            bundle.g_nets[j].set_target_stats(g_out_stats[j].mean(0), g_out_stats[j].sd()(0));
            auto g_batch = g_buffers[j].sample_minibatch(h, batch_rng);
            g_losses[j] = backward_huber(bundle.g_nets[j], batch_inputs(g_batch), batch_targets(g_batch),
                                         cfg.huber_delta, grads);
            adam_step(bundle.g_nets[j], grads, g_adam[j]);
        }

        // --- schedules
        epsilon *= cfg.epsilon_decay;
        bundle.backoffs *= cfg.backoff_decay;

        TrainRecord rec;
        rec.iteration = iter;
        rec.q_loss = q_loss;
        rec.g_losses = g_losses;
        rec.epsilon = epsilon;
        rec.backoffs.assign(bundle.backoffs.data(), bundle.backoffs.data() + bundle.backoffs.size());
        rec.mean_return = return_sum / cfg.episodes;
        rec.violation_rate = static_cast<double>(violations) / cfg.episodes;
        if (log_stream) {
            nlohmann::json line{{"iteration", rec.iteration},      {"q_loss", rec.q_loss},
                                {"g_losses", rec.g_losses},        {"epsilon", rec.epsilon},
                                {"backoffs", rec.backoffs},        {"mean_return", rec.mean_return},
                                {"violation_rate", rec.violation_rate}};
            (*log_stream) << line.dump() << '\n';
        }
        result.log.push_back(std::move(rec));
    }

    // The decaying relaxation exists only to keep early exploration feasible.
    // The artifact deploys the nominal constraints; margins are the tuning
    // stage's job.
    bundle.backoffs.setZero();
    return result;
}

}  // namespace ocql
