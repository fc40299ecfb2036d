#pragma once

#include <Eigen/Dense>
#include <vector>

#include "hynoma/rng.hpp"

namespace hynoma {

enum class Sense { Min, Max };

/// Polyhedral perturbation region { g in R^L : A g >= -l, B g <= u }.
///
/// A and B positive definite with l, u > 0, so the region is a bounded
/// neighbourhood of the origin (a box when A and B are diagonal).
struct PolySet {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::VectorXd l;
    Eigen::VectorXd u;

    int dim() const { return static_cast<int>(l.size()); }
    bool is_diagonal() const;
};

/// Euclidean-ball perturbation region { g : ||g||_2 <= radius }.
struct BallSet {
    double radius = 0.0;
};

inline constexpr double kMembershipTol = 1e-12;

bool membership(const PolySet& set, const Eigen::VectorXd& gamma, double tol = kMembershipTol);
bool membership(const BallSet& set, const Eigen::VectorXd& gamma, double tol = kMembershipTol);

/// Exact boundedness test: the recession cone { d : A d >= 0, B d <= 0 }
/// must be trivial. Positive definiteness alone does not guarantee this for
/// dense A != B, so dense draws have to be screened. Extreme rays of the
/// (pointed) cone are found by enumerating active-row subsets; exact for the
/// small dimensions used here.
bool poly_is_bounded(const PolySet& set);

/// Exact extremum of gamma^T c over the polyhedron.
/// Diagonal sets use the per-coordinate box closed form; dense sets are
/// solved by vertex enumeration (exact for the small L used here).
double worst_linear_poly(const Eigen::VectorXd& c, const PolySet& set, Sense sense);

/// Extremum of gamma^T c over the ball: -/+ radius * ||c||_2.
double worst_linear_ball(const Eigen::VectorXd& c, const BallSet& set, Sense sense);

/// All vertices of the polyhedron (deduplicated, deterministic order).
std::vector<Eigen::VectorXd> poly_vertices(const PolySet& set);

/// Componentwise bounds of the polyhedron (the box itself when diagonal,
/// otherwise the vertex hull's bounding box).
void poly_bounds(const PolySet& set, Eigen::VectorXd& lo, Eigen::VectorXd& hi);

/// Uniform membership-checked samples via bounding-box rejection.
/// Throws if the acceptance rate collapses below 1e-3 (typical for dense
/// sliver-shaped sets); use the hit-and-run walk for those.
std::vector<Eigen::VectorXd> sample_poly(const PolySet& set, int n, Rng rng);

/// Hit-and-run walk from the origin (interior for l, u > 0): approximately
/// uniform membership-guaranteed samples that work on sliver-shaped dense
/// sets where rejection sampling collapses.
std::vector<Eigen::VectorXd> sample_poly_hit_and_run(const PolySet& set, int n, Rng rng,
                                                     int thin = 8);

/// Uniform samples from the ball (radial inversion).
std::vector<Eigen::VectorXd> sample_ball(const BallSet& set, int dim, int n, Rng rng);

/// Exact worst case of the perturbed gain product
///   min/max over (g_p in poly, g_b in ball) of
///     (h2 + g_p . alpha) * (g2 + g_b . kappa)
/// used to validate the dual reformulation and to price OMA/initialization.
/// Exact because the product factorizes: for a fixed first factor f1 the
/// ball extremum is f1*g2 -/+ |f1| rho ||kappa||, piecewise linear in f1.
double worst_bilinear_product(double h2, const Eigen::VectorXd& alpha, const PolySet& poly,
                              double g2, const Eigen::VectorXd& kappa, const BallSet& ball,
                              Sense sense);

} // namespace hynoma
