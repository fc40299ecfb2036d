#include "hynoma/surrogate.hpp"

#include <cmath>
#include <stdexcept>

namespace hynoma {

AffineSurrogate tangent_quad_over_lin(double theta_n, double phi_n, double phi_floor) {
    if (!(phi_n >= phi_floor) || phi_floor <= 0.0)
        throw std::invalid_argument("tangent_quad_over_lin: expansion denominator below floor");
    AffineSurrogate s;
    s.theta_n = theta_n;
    s.phi_n = phi_n;
    s.constant = theta_n * theta_n / phi_n;
    s.coeff_theta = 2.0 * theta_n / phi_n;
    s.coeff_phi = -(theta_n * theta_n) / (phi_n * phi_n);
    return s;
}

AffineSurrogate lower_bound_square(double eps_n) {
    AffineSurrogate s;
    s.theta_n = eps_n;
    s.constant = eps_n * eps_n;
    s.coeff_theta = 2.0 * eps_n;
    return s;
}

double agm_weight(double gbar_n, double tbar_n, double tbar_floor) {
    // the guard applies to the rate term: a vanishing expansion rate would
    // otherwise blow the weight up without bound
    return gbar_n / std::max(tbar_n, tbar_floor);
}

double PwlOverestimator::eval(double t) const {
    // Convex piecewise interpolant = max of its chords.
    double v = slope(0) * t + intercept(0);
    for (int k = 1; k < segments(); ++k) v = std::max(v, slope(k) * t + intercept(k));
    return v;
}

PwlOverestimator build_pwl(double t_max, int segments) {
    if (segments < 1 || !(t_max > 0.0)) throw std::invalid_argument("build_pwl: bad arguments");
    PwlOverestimator p;
    p.t_max = t_max;
    p.breakpoints.resize(segments + 1);
    p.slope.resize(segments);
    p.intercept.resize(segments);
    for (int k = 0; k <= segments; ++k) p.breakpoints(k) = t_max * k / segments;

    double max_gap = 0.0;
    for (int k = 0; k < segments; ++k) {
        const double t0 = p.breakpoints(k);
        const double t1 = p.breakpoints(k + 1);
        const double f0 = tbar_squared(t0);
        const double f1 = tbar_squared(t1);
        p.slope(k) = (f1 - f0) / (t1 - t0);
        p.intercept(k) = f0 - p.slope(k) * t0;
        // Largest sag is where the function's slope matches the chord's:
        // d/dt (2^t-1)^2 = 2 ln2 (y^2 - y) with y = 2^t.
        if (p.slope(k) > 0.0) {
            const double y = 0.5 * (1.0 + std::sqrt(1.0 + 2.0 * p.slope(k) / M_LN2));
            const double ts = std::log2(y);
            if (ts > t0 && ts < t1) {
                const double gap = p.slope(k) * ts + p.intercept(k) - tbar_squared(ts);
                max_gap = std::max(max_gap, gap);
            }
        }
    }
    p.max_gap = max_gap;
    return p;
}

} // namespace hynoma
