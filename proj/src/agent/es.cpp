#include "ocql/agent/es.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ocql {

namespace {

double ranked(double v) { return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity(); }

}  // namespace

EsResult es_maximize(const BatchFitness& f, const Box& box, const EsConfig& cfg,
                     std::mt19937_64& rng, const std::vector<Vec>& warm_starts) {
    if (cfg.population < 1 || cfg.generations < 0) throw std::invalid_argument("es: bad budget");
    if (cfg.elites < 0 || cfg.elites >= cfg.population) throw std::invalid_argument("es: bad elite count");
    if (cfg.parents < 1) throw std::invalid_argument("es: need at least one parent");
    if (cfg.sigma_halving < 1) throw std::invalid_argument("es: sigma halving period must be >= 1");
    int dim = box.dim();
    if (dim < 1) throw std::invalid_argument("es: empty decision box");

    int lambda = cfg.population;
    int mu = std::min(cfg.parents, lambda);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec range = box.range();

    Mat pop(dim, lambda);
    int seeded = std::min<int>(static_cast<int>(warm_starts.size()), lambda);
    for (int i = 0; i < seeded; ++i) {
        if (warm_starts[i].size() != dim) throw std::invalid_argument("es: warm start has wrong dimension");
        pop.col(i) = box.clip(warm_starts[i]);
    }
    for (int i = seeded; i < lambda; ++i)
        for (int d = 0; d < dim; ++d) pop.col(i)(d) = box.lo(d) + unit(rng) * range(d);

    Vec fit = f(pop);
    if (fit.size() != lambda) throw std::logic_error("es: fitness batch size mismatch");

    std::vector<int> order(lambda);
    EsResult best{pop.col(0), ranked(fit(0))};
    auto rank_and_track = [&] {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return ranked(fit(a)) > ranked(fit(b)); });
        int top = order.front();
        if (ranked(fit(top)) > best.fitness) best = {pop.col(top), ranked(fit(top))};
    };
    rank_and_track();

    int children = lambda - cfg.elites;
    for (int gen = 0; gen < cfg.generations; ++gen) {
        double scale = cfg.sigma_frac * std::pow(0.5, gen / cfg.sigma_halving);
        Mat next(dim, lambda);
        Vec next_fit(lambda);
        for (int e = 0; e < cfg.elites; ++e) {
            next.col(e) = pop.col(order[e]);
            next_fit(e) = fit(order[e]);
        }
        Mat offspring(dim, children);
        for (int i = 0; i < children; ++i) {
            const auto parent = pop.col(order[i % mu]);
            for (int d = 0; d < dim; ++d) offspring.col(i)(d) = parent(d) + scale * range(d) * gauss(rng);
            offspring.col(i) = box.clip(offspring.col(i));
        }
        Vec child_fit = f(offspring);
        if (child_fit.size() != children) throw std::logic_error("es: fitness batch size mismatch");
        next.block(0, cfg.elites, dim, children) = offspring;
        next_fit.tail(children) = child_fit;
        pop = std::move(next);
        fit = std::move(next_fit);
        rank_and_track();
    }
    return best;
}

}  // namespace ocql
