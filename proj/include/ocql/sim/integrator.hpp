#pragma once

#include <functional>

#include "ocql/sim/types.hpp"

namespace ocql {

using RateFn = std::function<Vec(const Vec& x, double t)>;

// Classical fixed-step RK4 over one sampling interval [t0, t0+dt] using
// `substeps` equal substeps. Throws IntegrationError (carrying the substep
// time) if the rate function or the state stops being finite.
Vec rk4_integrate(const RateFn& rate, const Vec& x0, double t0, double dt, int substeps);

}  // namespace ocql
