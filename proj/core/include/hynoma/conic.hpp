#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace hynoma {

enum class ConeKind { NonNeg, Soc, Rsoc };

struct ConeBlock {
    ConeKind kind = ConeKind::NonNeg;
    int size = 0; // rows taken by the block
};

/// Sparse affine expression constant + sum coeff_i * x_i used to build rows.
struct LinExpr {
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;

    LinExpr() = default;
    /*implicit*/ LinExpr(double c) : constant(c) {}
    static LinExpr of(int var, double coeff = 1.0) {
        LinExpr e;
        e.terms.emplace_back(var, coeff);
        return e;
    }
    LinExpr& add(int var, double coeff) {
        terms.emplace_back(var, coeff);
        return *this;
    }
    LinExpr& operator+=(const LinExpr& o);
    LinExpr& operator+=(double c) {
        constant += c;
        return *this;
    }
    LinExpr& operator*=(double k);
    friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
    friend LinExpr operator-(LinExpr a, const LinExpr& b);
    friend LinExpr operator*(double k, LinExpr e) { return e *= k; }
};

/// Cone-constrained linear program in the canonical slack form
///   minimize  c^T x   subject to   h - G x  in  K
/// with K an ordered product of nonnegative, second-order, and rotated
/// second-order cone blocks. Rows are stored sparsely until solve time.
struct ConicProgram {
    std::vector<double> obj;
    std::vector<std::string> var_names;

    struct Row {
        std::vector<std::pair<int, double>> g; // entries of the G row
        double h = 0.0;
    };
    std::vector<Row> rows;
    std::vector<ConeBlock> cones;

    int num_vars() const { return static_cast<int>(obj.size()); }
    int num_rows() const { return static_cast<int>(rows.size()); }

    int add_var(std::string name, double obj_coeff = 0.0);
    void set_obj(int var, double coeff);

    /// expr >= 0 as a one-row nonnegative block.
    void add_nonneg(const LinExpr& expr);
    /// ||rest||_2 <= head.
    void add_soc(const LinExpr& head, const std::vector<LinExpr>& rest);
    /// w q >= sum v_i^2 with w, q >= 0 (spec (w, q, v) membership).
    void add_rsoc(const LinExpr& w, const LinExpr& q, const std::vector<LinExpr>& v);

    /// Dense assembly of (c, G, h) for numerical work.
    void assemble(Eigen::VectorXd& c, Eigen::MatrixXd& G, Eigen::VectorXd& h) const;

    void check_well_formed() const; // throws on structural defects
};

enum class SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    NumericalFailure,
};

const char* to_string(SolveStatus s);

struct ConicSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    Eigen::VectorXd x; // primal point, or unboundedness certificate
    Eigen::VectorXd z; // dual point in original row order, or Farkas certificate
    double prim_obj = 0.0;
    double dual_obj = 0.0;
    double prim_res = 0.0;
    double dual_res = 0.0;
    double gap = 0.0;
    int iterations = 0;
};

struct SolverOptions {
    double feas_tol = 1e-8;
    double gap_tol = 1e-8;
    int max_iters = 100;
    double static_reg = 1e-9;
    int refine_steps = 2;
    bool equilibrate = true;
};

/// Deterministic interior-point solve (homogeneous self-dual embedding with
/// Nesterov-Todd scaling). Identical inputs produce identical outputs.
ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts = {});

struct CertificateReport {
    double prim_res = 0.0;     // ||G x + s - h|| / max(1, ||h||), s = iterate slack
    double dual_res = 0.0;     // ||G^T z + c|| / max(1, ||c||)
    double gap = 0.0;          // s^T z
    double prim_cone_viol = 0.0;
    double dual_cone_viol = 0.0;
    double solver_mismatch = 0.0; // largest |recomputed - reported|
    bool certificate_valid = false; // Farkas/unboundedness check for infeasible exits
    std::string describe() const;
};

/// Recomputes residuals, gap, and cone violations from scratch and compares
/// them with the values the solver reported.
CertificateReport check_certificate(const ConicProgram& prog, const ConicSolution& sol,
                                    double mismatch_tol = 1e-10);

/// Line-oriented text dump with shortest round-trip float formatting.
std::string dump(const ConicProgram& prog);
ConicProgram parse_program(const std::string& text);

} // namespace hynoma
