#include "hynoma/reform.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hynoma {

CouplingData build_coupling(int user, int slot, const Scenario& s) {
    if (user < 0 || user >= s.num_users || slot < 0 || slot > user)
        throw std::out_of_range("build_coupling: bad (user, slot) pair");
    CouplingData cd;
    cd.user = user;
    cd.slot = slot;
    const double h2 = s.bs_gain(user);
    const double g2 = s.uu_gain_at(user, slot);
    const Eigen::VectorXd kappa = s.kappa_at(user, slot);
    cd.b = h2 * kappa;
    cd.a = g2 * s.alpha[user];
    cd.Q = s.alpha[user] * kappa.transpose();
    cd.q_row_norm.resize(s.error_dims);
    for (int w = 0; w < s.error_dims; ++w) cd.q_row_norm(w) = cd.Q.row(w).norm();
    cd.nominal_product = h2 * g2;
    return cd;
}

LowerBlock robust_lower_system(int user, int slot, const CouplingData& cd, const PolySet& set,
                               double rho) {
    LowerBlock blk;
    blk.user = user;
    blk.slot = slot;
    blk.cone_const = cd.nominal_product - rho * cd.b.norm();
    blk.l = set.l;
    blk.dual_lhs = set.A.transpose();
    blk.dual_rhs = cd.a + rho * cd.q_row_norm;
    return blk;
}

UpperBlock robust_upper_system(int user, int slot, const CouplingData& cd, const PolySet& set,
                               double rho, const AffineSurrogate& tangent) {
    if (slot >= user) throw std::out_of_range("robust_upper_system: needs slot < user");
    UpperBlock blk;
    blk.user = user;
    blk.slot = slot;
    blk.lhs_const = cd.nominal_product + rho * cd.b.norm();
    blk.u = set.u;
    blk.dual_lhs = set.B.transpose();
    blk.dual_rhs = cd.a + rho * cd.q_row_norm;
    blk.tangent = tangent;
    return blk;
}

double certifiable_margin_diagonal(const LowerBlock& blk) {
    const int L = static_cast<int>(blk.l.size());
    double cost = 0.0;
    for (int w = 0; w < L; ++w) {
        for (int v = 0; v < L; ++v) {
            if (v != w && blk.dual_lhs(w, v) != 0.0)
                throw std::invalid_argument("certifiable_margin_diagonal: A is not diagonal");
        }
        const double lam = std::max(0.0, blk.dual_rhs(w) / blk.dual_lhs(w, w));
        cost += lam * blk.l(w);
    }
    return blk.cone_const - cost;
}

double certifiable_upper_bound_diagonal(const UpperBlock& blk) {
    const int L = static_cast<int>(blk.u.size());
    double cost = 0.0;
    for (int w = 0; w < L; ++w) {
        for (int v = 0; v < L; ++v) {
            if (v != w && blk.dual_lhs(w, v) != 0.0)
                throw std::invalid_argument("certifiable_upper_bound_diagonal: B is not diagonal");
        }
        const double om = std::max(0.0, blk.dual_rhs(w) / blk.dual_lhs(w, w));
        cost += om * blk.u(w);
    }
    return blk.lhs_const + cost;
}

std::string dump(const LowerBlock& blk) {
    std::ostringstream os;
    os << "lower block (u=" << blk.user << ", t=" << blk.slot << ")\n";
    os << "  cone: " << blk.cone_const << " - lambda.l >= eps^2/P,  l = [" << blk.l.transpose()
       << "]\n";
    for (int w = 0; w < blk.dual_rhs.size(); ++w)
        os << "  dual " << w << ": lambda.[" << blk.dual_lhs.row(w) << "] >= " << blk.dual_rhs(w)
           << "\n";
    return os.str();
}

std::string dump(const UpperBlock& blk) {
    std::ostringstream os;
    os << "upper block (j=" << blk.user << ", t=" << blk.slot << ")\n";
    os << "  " << blk.lhs_const << " + omega.u <= tangent + s,  u = [" << blk.u.transpose()
       << "]\n";
    os << "  tangent: " << blk.tangent.constant << " + " << blk.tangent.coeff_theta
       << " (zeta - " << blk.tangent.theta_n << ") + " << blk.tangent.coeff_phi << " (P - "
       << blk.tangent.phi_n << ")\n";
    for (int w = 0; w < blk.dual_rhs.size(); ++w)
        os << "  dual " << w << ": omega.[" << blk.dual_lhs.row(w) << "] >= " << blk.dual_rhs(w)
           << "\n";
    return os.str();
}

} // namespace hynoma
