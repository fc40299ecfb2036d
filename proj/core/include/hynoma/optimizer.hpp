#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "hynoma/conic.hpp"
#include "hynoma/scenario.hpp"

namespace hynoma {

struct SolveParams {
    double threshold = 3.0; // aggregate rate target T [b/s/Hz]
    double tau0 = 1.0;
    double xi = 0.5;             // tau^{n+1} = min(tau^n / xi, tau_max)
    double tau_max = 150.0;
    double obj_tol = 1e-3;       // |obj_{n+1} - obj_n| stopping rule
    int max_outer = 100;
    double p_floor = 1e-12;      // W; keeps quad-over-lin expansions away from 0
    int pwl_segments = 32;
    double init_margin = 10.0;   // power head-room factor at the start point
    bool freeze_tau = false;     // hold tau at tau_max throughout
    double slack_feasible_tol = 1e-7;
    SolverOptions solver;
};

/// Expansion point of one outer iteration.
struct SubproblemState {
    Eigen::MatrixXd P;    // (u, t), t <= u
    Eigen::MatrixXd eps;  // (u, t), t <= u
    Eigen::MatrixXd zeta; // (j, t), j > t
    Eigen::MatrixXd agm;  // lambda_ut weights, t <= u
    double tau = 1.0;
    int iter = 0;
};

enum class DesignStatus {
    Feasible,               // converged, slacks below tolerance
    Penalized,              // converged with nonzero terminal slacks
    MaxIter,                // outer loop exhausted
    Infeasible,             // a subproblem was certified infeasible
    StructurallyInfeasible, // some worst-case gain is nonpositive
    NumericalFailure,
};
const char* to_string(DesignStatus s);

struct IterRecord {
    int n = 0;
    double objective = 0.0; // penalized objective of the subproblem
    double max_slack = 0.0;
    double tau = 0.0;
};

/// Optimized design for any of the four methods.
struct RobustDesign {
    DesignStatus status = DesignStatus::NumericalFailure;
    std::string method;     // robust | nominal | oma1 | oma2
    double threshold = 0.0;
    Eigen::MatrixXd P;      // powers [W], (u,t) for t <= u, 0 elsewhere
    Eigen::VectorXd slot_power;              // P_uu
    Eigen::MatrixXd beta;                    // P_ut / P_tt, in [0,1]
    Eigen::MatrixXd t_split;                 // per-link rate shares
    Eigen::MatrixXd slack;                   // terminal s_jt
    std::vector<Eigen::VectorXd> lambda_dual; // per user
    std::vector<Eigen::VectorXd> omega_dual;  // per user (index 0 unused)
    std::vector<IterRecord> trace;
    double objective = 0.0;           // sum of slot powers [W]
    double penalized_objective = 0.0; // objective + tau * sum slacks
    double max_slack = 0.0;
    int iterations = 0;

    double total_power() const { return objective; }
    std::string to_json() const;
    static RobustDesign from_json(const std::string& text);
    std::string trace_csv() const;
};

/// Variable index map of an assembled subproblem (-1 where absent).
/// Variables are expressed in expansion-point units inside the program;
/// physical value = var_scale[index] * solver value.
struct VarMap {
    Eigen::MatrixXi p, t, eps, z, w, q; // (u,t) t <= u
    Eigen::MatrixXi zeta, s;            // (j,t) j > t
    std::vector<Eigen::VectorXi> lambda; // per user (empty without uncertainty)
    std::vector<Eigen::VectorXi> omega;
    bool with_duals = false;
    Eigen::VectorXd var_scale;
    double value(const ConicSolution& sol, int idx) const { return var_scale(idx) * sol.x(idx); }
};

std::pair<ConicProgram, VarMap> build_subproblem(const Scenario& s, const SubproblemState& st,
                                                 const SolveParams& p);

/// Start point: even rate split, worst-case-gain powers with head-room,
/// matching epsilon/zeta, AGM weights at that point.
/// Throws StructurallyInfeasibleError when a worst-case gain is nonpositive.
struct StructurallyInfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
SubproblemState init_point(const Scenario& s, const SolveParams& p);

RobustDesign algorithm1(const Scenario& s, const SolveParams& p);
RobustDesign algorithm1(const Scenario& s, const SolveParams& p, const SubproblemState& init);

/// Perfect-CSI comparator: same pipeline on the zero-uncertainty twin.
RobustDesign solve_nominal(const Scenario& s, const SolveParams& p);

enum class OmaKind { Poly, Ball };

/// One user per slot, full threshold in the own slot, worst-case direct gain.
RobustDesign solve_oma(const Scenario& s, OmaKind kind, const SolveParams& p);

} // namespace hynoma
