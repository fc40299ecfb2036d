#pragma once

#include <Eigen/Dense>
#include <string>

#include "hynoma/scenario.hpp"
#include "hynoma/surrogate.hpp"
#include "hynoma/uncertainty.hpp"

namespace hynoma {

/// Data coupling one link's gain product to the perturbation vectors:
///   |h_u|^2 |g_ut|^2 = const + gb.b + gp.a + gp^T Q gb
/// with gp the user's polyhedral perturbation and gb the pair's ball one.
struct CouplingData {
    Eigen::VectorXd b;          // |hـu|^2 * kappa_ut
    Eigen::VectorXd a;          // |gـut|^2 * alpha_u
    Eigen::MatrixXd Q;          // alpha_u kappa_ut^T (rank <= 1)
    Eigen::VectorXd q_row_norm; // ||row w of Q||_2
    double nominal_product = 0.0;
    int user = 0;
    int slot = 0;
};

/// Safe lower-bound system for a desired link (slot <= user):
/// there must exist lambda >= 0 with
///   cone row:  cone_const - lambda.l  >=  eps^2 / P
///   dual rows: (A^T lambda)_w >= dual_rhs_w,  w = 1..L
struct LowerBlock {
    double cone_const = 0.0;   // |hـ|^2|gـ|^2 - rho ||b||
    Eigen::VectorXd l;         // lambda cost vector in the cone row
    Eigen::MatrixXd dual_lhs;  // row w = (column w of A)^T
    Eigen::VectorXd dual_rhs;  // a_w + rho ||q_w||
    int user = 0;
    int slot = 0;
};

/// Safe upper-bound system for an interfering link (slot < user = j):
/// there must exist omega >= 0 and slack s >= 0 with
///   lhs_const + omega.u  <=  tangent(zeta, P) + s
///   dual rows: (B^T omega)_w >= dual_rhs_w
struct UpperBlock {
    double lhs_const = 0.0;    // |hـ|^2|gـ|^2 + rho ||b||
    Eigen::VectorXd u;         // omega cost vector on the left-hand side
    Eigen::MatrixXd dual_lhs;  // row w = (column w of B)^T
    Eigen::VectorXd dual_rhs;  // a_w + rho ||q_w||
    AffineSurrogate tangent;   // g(zeta, P; expansion)
    int user = 0;
    int slot = 0;
};

/// Builds the coupling fields for link (user, slot), slot <= user.
/// Own-slot links use g = 1 and kappa = 0 (no backscatter term).
CouplingData build_coupling(int user, int slot, const Scenario& s);

LowerBlock robust_lower_system(int user, int slot, const CouplingData& cd, const PolySet& set,
                               double rho);

UpperBlock robust_upper_system(int user, int slot, const CouplingData& cd, const PolySet& set,
                               double rho, const AffineSurrogate& tangent);

/// Largest value mu such that the lower system is feasible with
/// cone row >= mu, i.e. max over feasible lambda of cone_const - lambda.l.
/// Closed form for diagonal A (componentwise lambda bound); throws otherwise.
double certifiable_margin_diagonal(const LowerBlock& blk);

/// Smallest certifiable upper bound of the upper system's left side:
/// min over feasible omega of lhs_const + omega.u (diagonal B closed form).
double certifiable_upper_bound_diagonal(const UpperBlock& blk);

std::string dump(const LowerBlock& blk);
std::string dump(const UpperBlock& blk);

} // namespace hynoma
