#include "ocql/agent/bundle.hpp"

#include <fstream>

#include "ocql/nnet/io.hpp"

namespace ocql {

namespace {

// Stacks [x; stage; u_i] columns for a network whose input is state + one
// time feature + control.
Mat stack_inputs(const Vec& x, double stage, const Mat& controls) {
    Mat in(x.size() + 1 + controls.rows(), controls.cols());
    for (int i = 0; i < controls.cols(); ++i) {
        in.col(i).head(x.size()) = x;
        in(x.size(), i) = stage;
        in.col(i).tail(controls.rows()) = controls.col(i);
    }
    return in;
}

}  // namespace

Vec bundle_fitness_batch(const PolicyBundle& bundle, const Vec& x, int t, const Mat& controls) {
    if (t < 0 || t >= bundle.t_f) throw std::invalid_argument("bundle: stage out of range");
    Vec fit = bundle.q_net.forward_batch(stack_inputs(x, static_cast<double>(t), controls));
    if (bundle.n_g() > 0) {
        double ttt = static_cast<double>(bundle.t_f - t);
        Mat gin = stack_inputs(x, ttt, controls);
        for (int j = 0; j < bundle.n_g(); ++j) {
            Vec g = bundle.g_nets[j].forward_batch(gin);
            // C_j * min(0, -(G_j + b_j)) == -C_j * max(0, G_j + b_j)
            fit -= bundle.penalty_weights(j) *
                   (g.array() + bundle.backoffs(j)).max(0.0).matrix();
        }
    }
    return fit;
}

double bundle_fitness(const PolicyBundle& bundle, const Vec& x, int t, const Vec& u) {
    Mat one(u.size(), 1);
    one.col(0) = u;
    return bundle_fitness_batch(bundle, x, t, one)(0);
}

EsResult select_control(const PolicyBundle& bundle, const Vec& x, int t, const Box& box,
                        const EsConfig& es, std::mt19937_64& rng) {
    auto f = [&](const Mat& candidates) { return bundle_fitness_batch(bundle, x, t, candidates); };
    return es_maximize(f, box, es, rng);
}

Policy make_greedy_policy(const PolicyBundle& bundle, const Box& box, const EsConfig& es) {
    return [&bundle, box, es](const Vec& x, int t, std::mt19937_64& rng) {
        return select_control(bundle, x, t, box, es, rng).best;
    };
}

Policy make_epsilon_greedy_policy(const PolicyBundle& bundle, const Box& box, const EsConfig& es,
                                  double epsilon) {
    return [&bundle, box, es, epsilon](const Vec& x, int t, std::mt19937_64& rng) -> Vec {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        if (unit(rng) < epsilon) {
            Vec u(box.dim());
            for (int d = 0; d < box.dim(); ++d) {
                std::uniform_real_distribution<double> ud(box.lo(d), box.hi(d));
                u(d) = ud(rng);
            }
            return u;
        }
        return select_control(bundle, x, t, box, es, rng).best;
    };
}

void save_bundle(std::ostream& out, const PolicyBundle& bundle) {
    out << "bundle 1\n";
    out << "env " << bundle.env_id << '\n';
    out << "t_f " << bundle.t_f << '\n';
    out << "gamma " << format_double(bundle.gamma) << '\n';
    out << "alignment "
        << (bundle.alignment == OracleAlignment::kPostDecision ? "post_decision" : "include_current")
        << '\n';
    out << "n_g " << bundle.n_g() << '\n';
    out << "backoffs";
    for (int j = 0; j < bundle.backoffs.size(); ++j) out << ' ' << format_double(bundle.backoffs(j));
    out << "\npenalty";
    for (int j = 0; j < bundle.penalty_weights.size(); ++j)
        out << ' ' << format_double(bundle.penalty_weights(j));
    out << '\n';
    save_network(out, bundle.q_net);
    for (const auto& g : bundle.g_nets) save_network(out, g);
    out << "end\n";
}

PolicyBundle load_bundle(std::istream& in) {
    auto expect = [&](const std::string& token) {
        std::string got;
        if (!(in >> got) || got != token)
            throw std::runtime_error("bundle file: expected '" + token + "', got '" + got + "'");
    };
    expect("bundle");
    int version;
    if (!(in >> version) || version != 1) throw std::runtime_error("bundle file: unsupported version");

    PolicyBundle b;
    expect("env");
    in >> b.env_id;
    expect("t_f");
    in >> b.t_f;
    expect("gamma");
    in >> b.gamma;
    expect("alignment");
    std::string align;
    in >> align;
    if (align == "post_decision")
        b.alignment = OracleAlignment::kPostDecision;
    else if (align == "include_current")
        b.alignment = OracleAlignment::kIncludeCurrent;
    else
        throw std::runtime_error("bundle file: unknown alignment '" + align + "'");
    expect("n_g");
    int n_g;
    in >> n_g;
    if (!in || n_g < 0) throw std::runtime_error("bundle file: bad constraint count");
    expect("backoffs");
    b.backoffs = Vec(n_g);
    for (int j = 0; j < n_g; ++j) in >> b.backoffs(j);
    expect("penalty");
    b.penalty_weights = Vec(n_g);
    for (int j = 0; j < n_g; ++j) in >> b.penalty_weights(j);
    if (!in) throw std::runtime_error("bundle file: truncated manifest");
    b.q_net = load_network(in);
    for (int j = 0; j < n_g; ++j) b.g_nets.push_back(load_network(in));
    expect("end");
    return b;
}

void save_bundle_file(const std::string& path, const PolicyBundle& bundle) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("bundle file: cannot write '" + path + "'");
    save_bundle(out, bundle);
}

PolicyBundle load_bundle_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("bundle file: cannot open '" + path + "'");
    return load_bundle(in);
}

}  // namespace ocql
