#include "ocql/nnet/io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace ocql {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void expect(std::istream& in, const std::string& token) {
    std::string got;
    if (!(in >> got) || got != token)
        throw std::runtime_error("network file: expected '" + token + "', got '" + got + "'");
}

double read_double(std::istream& in) {
    double v;
    if (!(in >> v)) throw std::runtime_error("network file: truncated numeric field");
    return v;
}

int read_int(std::istream& in) {
    int v;
    if (!(in >> v)) throw std::runtime_error("network file: truncated integer field");
    return v;
}

}  // namespace

void save_network(std::ostream& out, const MlpNetwork& net) {
    out << "mlpnet 1\n";
    out << "layers " << net.layers.size();
    for (int s : net.layers) out << ' ' << s;
    out << "\nalpha " << format_double(net.alpha) << '\n';
    out << "in_mean";
    for (int i = 0; i < net.in_mean.size(); ++i) out << ' ' << format_double(net.in_mean(i));
    out << "\nin_std";
    for (int i = 0; i < net.in_std.size(); ++i) out << ' ' << format_double(net.in_std(i));
    out << "\nout_mean " << format_double(net.out_mean) << '\n';
    out << "out_std " << format_double(net.out_std) << '\n';
    for (int l = 0; l < net.layer_count(); ++l) {
        const Mat& wl = net.w[l];
        out << "w " << l << ' ' << wl.rows() << ' ' << wl.cols();
        for (int r = 0; r < wl.rows(); ++r)
            for (int c = 0; c < wl.cols(); ++c) out << ' ' << format_double(wl(r, c));
        out << "\nb " << l << ' ' << net.b[l].size();
        for (int i = 0; i < net.b[l].size(); ++i) out << ' ' << format_double(net.b[l](i));
        out << '\n';
    }
    out << "end\n";
}

MlpNetwork load_network(std::istream& in) {
    expect(in, "mlpnet");
    int version = read_int(in);
    if (version != 1) throw std::runtime_error("network file: unsupported version " + std::to_string(version));

    MlpNetwork net;
    expect(in, "layers");
    int count = read_int(in);
    if (count < 2) throw std::runtime_error("network file: bad layer count");
    net.layers.resize(count);
    for (int i = 0; i < count; ++i) net.layers[i] = read_int(in);

    expect(in, "alpha");
    net.alpha = read_double(in);

    int in_dim = net.layers.front();
    expect(in, "in_mean");
    net.in_mean = Vec(in_dim);
    for (int i = 0; i < in_dim; ++i) net.in_mean(i) = read_double(in);
    expect(in, "in_std");
    net.in_std = Vec(in_dim);
    for (int i = 0; i < in_dim; ++i) net.in_std(i) = read_double(in);
    expect(in, "out_mean");
    net.out_mean = read_double(in);
    expect(in, "out_std");
    net.out_std = read_double(in);

    for (size_t l = 0; l + 1 < net.layers.size(); ++l) {
        expect(in, "w");
        if (read_int(in) != static_cast<int>(l)) throw std::runtime_error("network file: layer index mismatch");
        int rows = read_int(in), cols = read_int(in);
        if (rows != net.layers[l + 1] || cols != net.layers[l])
            throw std::runtime_error("network file: weight shape mismatch");
        Mat wl(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) wl(r, c) = read_double(in);
        net.w.push_back(std::move(wl));
        expect(in, "b");
        if (read_int(in) != static_cast<int>(l)) throw std::runtime_error("network file: bias index mismatch");
        int n = read_int(in);
        if (n != net.layers[l + 1]) throw std::runtime_error("network file: bias size mismatch");
        Vec bl(n);
        for (int i = 0; i < n; ++i) bl(i) = read_double(in);
        net.b.push_back(std::move(bl));
    }
    expect(in, "end");
    return net;
}

}  // namespace ocql
