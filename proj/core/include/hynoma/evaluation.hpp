#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "hynoma/optimizer.hpp"
#include "hynoma/scenario.hpp"

namespace hynoma {

struct EvalConfig {
    double h_error_std = 0.00316227766016838; // 10^-2.5 per complex component
    double g_error_std = 0.00316227766016838;
    int samples = 1000;
    std::uint64_t seed = 1;
    double threshold = 3.0;
    int threads = 0; // 0 = hardware concurrency
};

struct TrueGains {
    Eigen::VectorXd h2;  // |h_u|^2
    Eigen::MatrixXd g2;  // |g_jt|^2 for t < j (diagonal unused: own slot has no g)
};

struct EvalReport {
    std::string method;
    double pf = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    int pass_count = 0;
    int samples = 0;
    double total_power = 0.0;
    std::uint64_t config_hash = 0;
    std::string to_json() const;
};

/// Achieved per-link rates for fixed powers under given true gains:
/// the SINR numerator is |h_u|^2 |g_ut|^2 P_ut (|g|=1 in the own slot),
/// the denominator collects imperfect-SIC residuals of earlier users,
/// interference of later users, and noise.
Eigen::MatrixXd achieved_rates(const RobustDesign& d, const TrueGains& gains,
                               const Eigen::MatrixXd& sic_residual, double noise_var);

/// Gains reconstructed from complex channel errors around the nominal values:
/// |h|^2 = |hـ|^2 + 2 Re(hـ dh) + |dh|^2, per-component deviation std given.
TrueGains sample_gains(const Scenario& s, const EvalConfig& cfg, std::uint64_t draw_index);

/// Probability of feasibility: the fraction of error draws under which every
/// user's summed rate meets the threshold. Deterministic in (cfg.seed), and
/// independent of the worker count (counter-based per-draw substreams).
EvalReport pf_montecarlo(const RobustDesign& d, const Scenario& s, const EvalConfig& cfg);

struct RateCdf {
    int user = 0;
    Eigen::VectorXd rate;        // sorted sample values
    Eigen::VectorXd probability; // empirical CDF at those values
    std::string to_csv() const;
};

RateCdf rate_cdf(const RobustDesign& d, const Scenario& s, const EvalConfig& cfg, int user);

enum class SweepAxis { Threshold, GErrorStd, CenterOffset };

struct SweepRow {
    double axis_value = 0.0;
    std::string method;
    double mean_power = 0.0; // over converged seeds
    double pf = 0.0;         // pooled over seeds
    double pf_lo = 0.0;
    double pf_hi = 0.0;
    int seeds_ok = 0;
    int seeds_failed = 0;
};

struct SweepConfig {
    GenConfig gen;
    SolveParams params;
    EvalConfig eval;
    SweepAxis axis = SweepAxis::Threshold;
    std::vector<double> grid;
    int seeds = 10;
    std::vector<std::string> methods{"robust", "nominal", "oma1", "oma2"};
};

std::vector<SweepRow> sweep(const SweepConfig& cfg);

std::string sweep_to_csv(const std::vector<SweepRow>& rows, SweepAxis axis);

/// Solve one method by name on a scenario ("robust", "nominal", "oma1", "oma2").
RobustDesign solve_method(const std::string& method, const Scenario& s, const SolveParams& p);

} // namespace hynoma
