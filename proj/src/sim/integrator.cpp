#include "ocql/sim/integrator.hpp"

#include <stdexcept>

namespace ocql {

Vec rk4_integrate(const RateFn& rate, const Vec& x0, double t0, double dt, int substeps) {
    if (substeps < 1) throw std::invalid_argument("rk4: substeps must be >= 1");
    if (!(dt > 0.0)) throw std::invalid_argument("rk4: dt must be positive");
    double h = dt / substeps;
    Vec x = x0;
    for (int s = 0; s < substeps; ++s) {
        double t = t0 + s * h;
        Vec k1 = rate(x, t);
        Vec k2 = rate(x + 0.5 * h * k1, t + 0.5 * h);
        Vec k3 = rate(x + 0.5 * h * k2, t + 0.5 * h);
        Vec k4 = rate(x + h * k3, t + h);
        if (!k1.allFinite() || !k2.allFinite() || !k3.allFinite() || !k4.allFinite())
            throw IntegrationError("rk4: non-finite derivative", t);
        x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (!x.allFinite()) throw IntegrationError("rk4: state became non-finite", t + h);
    }
    return x;
}

}  // namespace ocql
