#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hynoma/uncertainty.hpp"

namespace hynoma {

enum class UncertaintyMode { Diagonal, Dense };

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Instance-generation knobs mirroring the evaluation protocol defaults
/// (U=4 users, L=3 error dimensions, users in a 2 m square centred 15 m
/// from the base station, Rician K=10 dB between users, noise 1e-9 W).
struct GenConfig {
    int num_users = 4;
    int error_dims = 3;
    double square_side = 2.0;    // r_p [m]
    double center_offset = 15.0; // r_c [m]
    double rician_k_db = 10.0;
    double pathloss_exp_bs = 3.0;
    double pathloss_exp_uu = 2.0;
    double noise_var = 1e-9;
    std::uint64_t rng_seed = 1;
    UncertaintyMode uncertainty_mode = UncertaintyMode::Diagonal;
    double ball_radius = 0.025;
    Interval sic_residual_range{0.0, 0.1};
    Interval shift_range{0.05, 2.0};
    Interval l_range{0.5, 10.0};
    double u_factor = 5.0;

    void validate() const; // throws std::invalid_argument on bad fields
};

/// A generated problem instance. Users are sorted by decreasing nominal
/// BS gain; only gains are kept (all downstream math consumes gains).
struct Scenario {
    int num_users = 0;
    int error_dims = 0;
    Eigen::VectorXd bs_gain;                         // |hـu|^2, descending
    Eigen::MatrixXd uu_gain;                         // |gـut|^2 for t < u
    std::vector<Eigen::VectorXd> alpha;              // per-user gain shift
    std::vector<std::vector<Eigen::VectorXd>> kappa; // kappa[u][t], t < u
    std::vector<PolySet> poly;                       // one set per user
    double ball_radius = 0.0;
    Eigen::MatrixXd sic_residual;                    // Pi(j,t) for t <= j
    double noise_var = 0.0;

    /// Own-slot channel is the direct link: |gـuu|^2 = 1 by convention.
    double uu_gain_at(int u, int t) const { return (u == t) ? 1.0 : uu_gain(u, t); }
    /// Own-slot links carry no backscatter error: kappa_uu = 0.
    Eigen::VectorXd kappa_at(int u, int t) const {
        return (u == t) ? Eigen::VectorXd::Zero(error_dims) : kappa[u][t];
    }

    /// Worst/best |h_u|^2 over the user's polyhedral set.
    double worst_bs_gain(int u, Sense sense) const;
    /// Exact extremum of |h_u|^2 |g_ut|^2 over both sets (t <= u or u < t).
    double worst_link_gain(int u, int t, Sense sense) const;

    /// Nominal twin: zero ball radius and zero shifts, same channels and
    /// SIC residuals. Used by the perfect-CSI baseline.
    Scenario without_uncertainty() const;
};

struct LinkDiagnostic {
    int u = 0;
    int t = 0;
    double nominal_product = 0.0;
    double worst_product = 0.0;
    bool feasible = false;
};

struct DiagnosticsReport {
    std::vector<LinkDiagnostic> links;
    bool all_feasible = false;
    std::string summary() const;
};

Scenario generate_scenario(const GenConfig& cfg);
DiagnosticsReport validate_scenario(const Scenario& s);

std::string scenario_to_json(const Scenario& s);
Scenario scenario_from_json(const std::string& text);
std::string genconfig_to_json(const GenConfig& cfg);
GenConfig genconfig_from_json(const std::string& text);

} // namespace hynoma
