#pragma once

#include <Eigen/Dense>

namespace hynoma {

/// Affine minorant/majorant with its expansion point. Evaluating at the
/// expansion point reproduces the bounded function exactly.
struct AffineSurrogate {
    double constant = 0.0;      // value at the expansion point
    double coeff_theta = 0.0;   // slope in the first variable
    double coeff_phi = 0.0;     // slope in the second variable
    double theta_n = 0.0;
    double phi_n = 0.0;

    double eval(double theta, double phi = 0.0) const {
        return constant + coeff_theta * (theta - theta_n) + coeff_phi * (phi - phi_n);
    }
};

/// Tangent of the convex quadratic-over-linear f(theta, phi) = theta^2/phi
/// at (theta_n, phi_n); a global lower bound for phi > 0.
AffineSurrogate tangent_quad_over_lin(double theta_n, double phi_n, double phi_floor = 1e-12);

/// Tangent of eps^2 at eps_n: eps_n (2 eps - eps_n).
AffineSurrogate lower_bound_square(double eps_n);

/// Arithmetic-geometric-mean weight b/a making (w/2) a^2 + b^2/(2w) = ab
/// tight at the expansion point (a = rate term, b = interference term).
/// The rate term is floored so abandoned links (t -> 0) stay well posed.
double agm_weight(double gbar_n, double tbar_n, double tbar_floor = 1e-6);

/// Piecewise-linear chord overestimator of (2^t - 1)^2 on [0, t_max].
/// Chords of a convex function interpolate it from above on each segment
/// and the piecewise interpolant is again convex, so z >= chord_k(t) for
/// every k encodes z >= pwl(t).
struct PwlOverestimator {
    Eigen::VectorXd breakpoints; // K+1 nodes, 0 = first, t_max = last
    Eigen::VectorXd slope;       // per segment
    Eigen::VectorXd intercept;   // per segment
    double t_max = 0.0;
    double max_gap = 0.0;        // largest overestimation anywhere in [0, t_max]

    int segments() const { return static_cast<int>(slope.size()); }
    double eval(double t) const;
};

PwlOverestimator build_pwl(double t_max, int segments);

/// The bounded function itself, (2^t - 1)^2.
inline double tbar_squared(double t) {
    const double tb = std::exp2(t) - 1.0;
    return tb * tb;
}

} // namespace hynoma
