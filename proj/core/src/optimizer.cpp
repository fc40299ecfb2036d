#include "hynoma/optimizer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hynoma/reform.hpp"
#include "hynoma/surrogate.hpp"
#include "json_util.hpp"

namespace hynoma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_uncertainty(const Scenario& s) {
    if (s.ball_radius > 0.0) return true;
    for (const auto& a : s.alpha)
        if (a.norm() > 0.0) return true;
    for (const auto& row : s.kappa)
        for (const auto& k : row)
            if (k.norm() > 0.0) return true;
    return false;
}

std::string vname(const char* base, int u, int t) {
    std::ostringstream os;
    os << base << "_" << u << "_" << t;
    return os.str();
}

} // namespace

const char* to_string(DesignStatus s) {
    switch (s) {
        case DesignStatus::Feasible: return "feasible";
        case DesignStatus::Penalized: return "penalized";
        case DesignStatus::MaxIter: return "max_iter";
        case DesignStatus::Infeasible: return "infeasible";
        case DesignStatus::StructurallyInfeasible: return "structurally_infeasible";
        case DesignStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

std::pair<ConicProgram, VarMap> build_subproblem(const Scenario& s, const SubproblemState& st,
                                                 const SolveParams& p) {
    const int U = s.num_users;
    const int L = s.error_dims;
    if (st.P.rows() != U || st.eps.rows() != U || st.zeta.rows() != U || st.agm.rows() != U)
        throw std::invalid_argument("build_subproblem: state does not match scenario size");

    const bool duals = has_uncertainty(s);
    const PwlOverestimator pwl = build_pwl(p.threshold, p.pwl_segments);
    const double zconst00 = tbar_squared(p.threshold); // z for the pinned t_00 = T

    // blocks first: they also provide natural units for the dual variables
    std::vector<std::vector<CouplingData>> cd(U);
    std::vector<std::vector<LowerBlock>> lower(U);
    std::vector<std::vector<UpperBlock>> upper(U);
    std::vector<std::vector<AffineSurrogate>> tang(U);
    for (int u = 0; u < U; ++u) {
        cd[u].resize(u + 1);
        lower[u].resize(u + 1);
        for (int t = 0; t <= u; ++t) {
            cd[u][t] = build_coupling(u, t, s);
            if (duals) lower[u][t] = robust_lower_system(u, t, cd[u][t], s.poly[u], s.ball_radius);
        }
        upper[u].resize(u);
        tang[u].resize(u);
        for (int t = 0; t < u; ++t) {
            tang[u][t] = tangent_quad_over_lin(st.zeta(u, t), st.P(u, t), p.p_floor);
            if (duals)
                upper[u][t] = robust_upper_system(u, t, cd[u][t], s.poly[u], s.ball_radius,
                                                  tang[u][t]);
        }
    }

    // interference level at the expansion point, per link
    Eigen::MatrixXd gbar = Eigen::MatrixXd::Zero(U, U);
    for (int u = 0; u < U; ++u)
        for (int t = 0; t <= u; ++t) {
            double g = s.noise_var;
            for (int j = t; j <= u - 1; ++j) g += s.sic_residual(j, t) * st.P(j, t);
            for (int j = u + 1; j < U; ++j) g += st.zeta(j, t) * st.zeta(j, t);
            gbar(u, t) = g;
        }

    // The physical quantities span many orders of magnitude (powers ~ W,
    // squared interference ~ noise^2), so every variable is expressed in
    // units of its expansion-point magnitude and rows stay O(1)-conditioned.
    ConicProgram prog;
    std::vector<double> scales;
    VarMap vm;
    vm.with_duals = duals;
    auto mi = [&] { return Eigen::MatrixXi::Constant(U, U, -1); };
    vm.p = mi();
    vm.t = mi();
    vm.eps = mi();
    vm.z = mi();
    vm.w = mi();
    vm.q = mi();
    vm.zeta = mi();
    vm.s = mi();

    auto add_var = [&](std::string name, double scale, double phys_obj = 0.0) {
        const double sc = std::max(scale, 1e-300);
        const int idx = prog.add_var(std::move(name), phys_obj * sc);
        scales.push_back(sc);
        return idx;
    };
    // physical-coefficient term on a scaled variable
    auto term = [&](int var, double phys_coeff = 1.0) {
        return LinExpr::of(var, phys_coeff * scales[var]);
    };
    // w q >= |v|^2 is invariant under (w, q, v) -> (w/aW, q/aQ, v/sqrt(aW aQ)),
    // which balances the member magnitudes inside one cone block (uniform
    // row equilibration cannot fix intra-block spread).
    auto add_rsoc_balanced = [&](LinExpr w, LinExpr q, std::vector<LinExpr> v, double aW,
                                 double aQ) {
        aW = std::max(aW, 1e-300);
        aQ = std::max(aQ, 1e-300);
        const double aV = std::sqrt(aW * aQ);
        w *= 1.0 / aW;
        q *= 1.0 / aQ;
        for (auto& e : v) e *= 1.0 / aV;
        prog.add_rsoc(w, q, v);
    };

    for (int u = 0; u < U; ++u)
        for (int t = 0; t <= u; ++t)
            vm.p(u, t) = add_var(vname("P", u, t), st.P(u, t), (t == u) ? 1.0 : 0.0);
    // user 0 transmits only in its own slot, so t_00 is pinned at T
    for (int u = 1; u < U; ++u)
        for (int t = 0; t <= u; ++t) vm.t(u, t) = add_var(vname("t", u, t), p.threshold);
    for (int u = 0; u < U; ++u)
        for (int t = 0; t <= u; ++t) vm.eps(u, t) = add_var(vname("eps", u, t), st.eps(u, t));
    for (int t = 0; t < U; ++t)
        for (int j = t + 1; j < U; ++j)
            vm.zeta(j, t) = add_var(vname("zeta", j, t), st.zeta(j, t));
    for (int u = 0; u < U; ++u)
        for (int t = 0; t <= u; ++t) {
            if (!(u == 0 && t == 0)) vm.z(u, t) = add_var(vname("z", u, t), zconst00);
            vm.w(u, t) = add_var(vname("w", u, t), gbar(u, t));
            vm.q(u, t) = add_var(vname("q", u, t), gbar(u, t) * gbar(u, t));
        }
    if (duals) {
        vm.lambda.resize(U);
        vm.omega.resize(U);
        for (int u = 0; u < U; ++u) {
            vm.lambda[u].resize(L);
            for (int w = 0; w < L; ++w) {
                double sc = 0.0;
                for (int t = 0; t <= u; ++t)
                    sc = std::max(sc, lower[u][t].dual_rhs(w) /
                                          std::max(lower[u][t].dual_lhs(w, w), 1e-12));
                vm.lambda[u](w) = add_var(vname("lam", u, w), std::max(sc, 1e-18));
            }
        }
        for (int j = 1; j < U; ++j) {
            vm.omega[j].resize(L);
            for (int w = 0; w < L; ++w) {
                double sc = 0.0;
                for (int t = 0; t < j; ++t)
                    sc = std::max(sc, upper[j][t].dual_rhs(w) /
                                          std::max(upper[j][t].dual_lhs(w, w), 1e-12));
                vm.omega[j](w) = add_var(vname("om", j, w), std::max(sc, 1e-18));
            }
        }
    }
    for (int t = 0; t < U; ++t)
        for (int j = t + 1; j < U; ++j) {
            const double sc = duals ? upper[j][t].lhs_const : cd[j][t].nominal_product;
            vm.s(j, t) = add_var(vname("s", j, t), sc, st.tau);
        }

    auto tvar = [&](int u, int t) -> LinExpr {
        return (u == 0) ? LinExpr(p.threshold) : term(vm.t(u, t));
    };
    auto zvar = [&](int u, int t) -> LinExpr {
        return (u == 0 && t == 0) ? LinExpr(zconst00) : term(vm.z(u, t));
    };

    // rate splits
    for (int u = 1; u < U; ++u) {
        LinExpr sum(-p.threshold);
        for (int t = 0; t <= u; ++t) sum += term(vm.t(u, t));
        prog.add_nonneg(sum);
        for (int t = 0; t <= u; ++t) {
            prog.add_nonneg(term(vm.t(u, t)));
            prog.add_nonneg(LinExpr(p.threshold) - term(vm.t(u, t)));
        }
    }

    // Theorem-1 lower systems: rotated cone per link plus shared dual rows
    for (int u = 0; u < U; ++u) {
        for (int t = 0; t <= u; ++t) {
            if (duals) {
                const LowerBlock& blk = lower[u][t];
                LinExpr margin(blk.cone_const);
                for (int w = 0; w < L; ++w) margin += term(vm.lambda[u](w), -blk.l(w));
                add_rsoc_balanced(term(vm.p(u, t)), margin, {term(vm.eps(u, t))}, st.P(u, t),
                                  std::abs(blk.cone_const));
                for (int w = 0; w < L; ++w) {
                    LinExpr row(-blk.dual_rhs(w));
                    for (int v = 0; v < L; ++v) row += term(vm.lambda[u](v), blk.dual_lhs(w, v));
                    prog.add_nonneg(row);
                }
            } else {
                add_rsoc_balanced(term(vm.p(u, t)), LinExpr(cd[u][t].nominal_product),
                                  {term(vm.eps(u, t))}, st.P(u, t), cd[u][t].nominal_product);
            }
        }
        if (duals)
            for (int w = 0; w < L; ++w) prog.add_nonneg(term(vm.lambda[u](w)));
    }

    // MM rate rows and their epigraphs
    for (int u = 0; u < U; ++u) {
        for (int t = 0; t <= u; ++t) {
            const double en = st.eps(u, t);
            const double lam = st.agm(u, t);
            // en (2 eps - en) >= (lam/2) z + q / (2 lam)
            LinExpr row(-en * en);
            row += term(vm.eps(u, t), 2.0 * en);
            row += -0.5 * lam * zvar(u, t);
            row += term(vm.q(u, t), -0.5 / lam);
            prog.add_nonneg(row);
            // z >= pwl(t_ut) chord by chord
            if (!(u == 0 && t == 0)) {
                for (int k = 0; k < pwl.segments(); ++k) {
                    LinExpr chord(-pwl.intercept(k));
                    chord += term(vm.z(u, t));
                    chord += -pwl.slope(k) * tvar(u, t);
                    prog.add_nonneg(chord);
                }
            }
            // w >= sum Pi P + sum zeta^2 + noise
            LinExpr wrow = term(vm.w(u, t)) - LinExpr(s.noise_var);
            for (int j = t; j <= u - 1; ++j) wrow += term(vm.p(j, t), -s.sic_residual(j, t));
            std::vector<LinExpr> zts;
            for (int j = u + 1; j < U; ++j) zts.push_back(term(vm.zeta(j, t)));
            if (zts.empty())
                prog.add_nonneg(wrow);
            else
                add_rsoc_balanced(LinExpr(1.0), wrow, zts, 1.0, gbar(u, t));
            // q >= w^2
            add_rsoc_balanced(LinExpr(1.0), term(vm.q(u, t)), {term(vm.w(u, t))}, 1.0,
                              gbar(u, t) * gbar(u, t));
        }
    }

    // interference upper systems with penalty slacks
    for (int t = 0; t < U; ++t) {
        for (int j = t + 1; j < U; ++j) {
            const AffineSurrogate& tan = tang[j][t];
            LinExpr g(tan.constant - tan.coeff_theta * tan.theta_n - tan.coeff_phi * tan.phi_n);
            g += term(vm.zeta(j, t), tan.coeff_theta);
            g += term(vm.p(j, t), tan.coeff_phi);
            if (duals) {
                const UpperBlock& blk = upper[j][t];
                LinExpr row = g - LinExpr(blk.lhs_const);
                row += term(vm.s(j, t));
                for (int w = 0; w < L; ++w) row += term(vm.omega[j](w), -blk.u(w));
                prog.add_nonneg(row);
                for (int w = 0; w < L; ++w) {
                    LinExpr drow(-blk.dual_rhs(w));
                    for (int v = 0; v < L; ++v) drow += term(vm.omega[j](v), blk.dual_lhs(w, v));
                    prog.add_nonneg(drow);
                }
            } else {
                LinExpr row = g - LinExpr(cd[j][t].nominal_product);
                row += term(vm.s(j, t));
                prog.add_nonneg(row);
            }
            prog.add_nonneg(term(vm.s(j, t)));
        }
    }
    if (duals)
        for (int j = 1; j < U; ++j)
            for (int w = 0; w < L; ++w) prog.add_nonneg(term(vm.omega[j](w)));

    // power coupling and floors
    for (int u = 0; u < U; ++u) {
        for (int t = 0; t < u; ++t)
            prog.add_nonneg(term(vm.p(t, t)) - term(vm.p(u, t)));
        for (int t = 0; t <= u; ++t)
            prog.add_nonneg(term(vm.p(u, t)) - LinExpr(p.p_floor));
    }

    vm.var_scale = Eigen::Map<const Eigen::VectorXd>(scales.data(), scales.size());
    return {std::move(prog), std::move(vm)};
}

SubproblemState init_point(const Scenario& s, const SolveParams& p) {
    const int U = s.num_users;
    SubproblemState st;
    st.P = Eigen::MatrixXd::Zero(U, U);
    st.eps = Eigen::MatrixXd::Zero(U, U);
    st.zeta = Eigen::MatrixXd::Zero(U, U);
    st.agm = Eigen::MatrixXd::Ones(U, U);
    st.tau = p.freeze_tau ? p.tau_max : p.tau0;

    for (int u = 0; u < U; ++u) {
        const double t0 = p.threshold / (u + 1);
        for (int t = 0; t <= u; ++t) {
            const double wg = s.worst_link_gain(u, t, Sense::Min);
            if (!(wg > 0.0))
                throw StructurallyInfeasibleError(
                    "worst-case gain nonpositive on link (" + std::to_string(u) + "," +
                    std::to_string(t) + ")");
            const double need = (std::exp2(t0) - 1.0) * s.noise_var * p.init_margin / wg;
            st.P(u, t) = std::max(p.p_floor, need);
            st.eps(u, t) = std::sqrt(wg * st.P(u, t));
        }
    }
    for (int t = 0; t < U; ++t)
        for (int j = t + 1; j < U; ++j) {
            const double mg = s.worst_link_gain(j, t, Sense::Max);
            st.zeta(j, t) = std::sqrt(mg * st.P(j, t));
        }
    for (int u = 0; u < U; ++u) {
        const double t0 = p.threshold / (u + 1);
        for (int t = 0; t <= u; ++t) {
            double gbar = s.noise_var;
            for (int j = t; j <= u - 1; ++j) gbar += s.sic_residual(j, t) * st.P(j, t);
            for (int j = u + 1; j < U; ++j) gbar += st.zeta(j, t) * st.zeta(j, t);
            st.agm(u, t) = agm_weight(gbar, std::exp2(t0) - 1.0);
        }
    }
    return st;
}

namespace {

RobustDesign run_mm(const Scenario& s, const SolveParams& p, SubproblemState st,
                    const std::string& method) {
    const int U = s.num_users;
    RobustDesign d;
    d.method = method;
    d.threshold = p.threshold;
    d.P = Eigen::MatrixXd::Zero(U, U);
    d.beta = Eigen::MatrixXd::Zero(U, U);
    d.t_split = Eigen::MatrixXd::Zero(U, U);
    d.slack = Eigen::MatrixXd::Zero(U, U);
    d.slot_power = Eigen::VectorXd::Zero(U);

    double prev_obj = kInf;
    for (int n = 0; n < p.max_outer; ++n) {
        auto [prog, vm] = build_subproblem(s, st, p);
        const ConicSolution sol = solve(prog, p.solver);
        if (sol.status == SolveStatus::PrimalInfeasible) {
            d.status = DesignStatus::Infeasible;
            d.iterations = n;
            return d;
        }
        if (sol.status != SolveStatus::Optimal) {
            d.status = DesignStatus::NumericalFailure;
            d.iterations = n;
            return d;
        }

        Eigen::MatrixXd P = Eigen::MatrixXd::Zero(U, U), tm = Eigen::MatrixXd::Zero(U, U),
                        eps = Eigen::MatrixXd::Zero(U, U), zeta = Eigen::MatrixXd::Zero(U, U),
                        sl = Eigen::MatrixXd::Zero(U, U);
        for (int u = 0; u < U; ++u)
            for (int t = 0; t <= u; ++t) {
                P(u, t) = vm.value(sol, vm.p(u, t));
                tm(u, t) = (u == 0) ? p.threshold : vm.value(sol, vm.t(u, t));
                eps(u, t) = vm.value(sol, vm.eps(u, t));
            }
        double max_slack = 0.0;
        for (int t = 0; t < U; ++t)
            for (int j = t + 1; j < U; ++j) {
                zeta(j, t) = vm.value(sol, vm.zeta(j, t));
                sl(j, t) = vm.value(sol, vm.s(j, t));
                max_slack = std::max(max_slack, sl(j, t));
            }

        const double obj = sol.prim_obj;
        d.trace.push_back({n, obj, max_slack, st.tau});

        // keep the latest iterate in the design
        d.P = P;
        d.t_split = tm;
        d.slack = sl;
        d.max_slack = max_slack;
        d.penalized_objective = obj;
        d.objective = 0.0;
        for (int u = 0; u < U; ++u) {
            d.slot_power(u) = P(u, u);
            d.objective += P(u, u);
        }
        for (int u = 0; u < U; ++u)
            for (int t = 0; t < u; ++t)
                d.beta(u, t) = std::min(1.0, std::max(0.0, P(u, t) / P(t, t)));
        d.lambda_dual.assign(U, Eigen::VectorXd());
        d.omega_dual.assign(U, Eigen::VectorXd());
        if (vm.with_duals) {
            for (int u = 0; u < U; ++u) {
                d.lambda_dual[u].resize(s.error_dims);
                for (int w = 0; w < s.error_dims; ++w)
                    d.lambda_dual[u](w) = vm.value(sol, vm.lambda[u](w));
            }
            for (int j = 1; j < U; ++j) {
                d.omega_dual[j].resize(s.error_dims);
                for (int w = 0; w < s.error_dims; ++w)
                    d.omega_dual[j](w) = vm.value(sol, vm.omega[j](w));
            }
        }
        d.iterations = n + 1;

        if (n >= 1 && std::abs(obj - prev_obj) <= p.obj_tol) {
            d.status = (max_slack <= p.slack_feasible_tol) ? DesignStatus::Feasible
                                                           : DesignStatus::Penalized;
            return d;
        }
        prev_obj = obj;

        // next expansion point
        st.P = P.cwiseMax(p.p_floor);
        st.eps = eps;
        st.zeta = zeta;
        for (int u = 0; u < U; ++u)
            for (int t = 0; t <= u; ++t) {
                double gbar = s.noise_var;
                for (int j = t; j <= u - 1; ++j) gbar += s.sic_residual(j, t) * st.P(j, t);
                for (int j = u + 1; j < U; ++j) gbar += st.zeta(j, t) * st.zeta(j, t);
                st.agm(u, t) = agm_weight(gbar, std::exp2(tm(u, t)) - 1.0);
            }
        if (!p.freeze_tau) st.tau = std::min(st.tau / p.xi, p.tau_max);
        st.iter = n + 1;
    }
    d.status = DesignStatus::MaxIter;
    return d;
}

} // namespace

RobustDesign algorithm1(const Scenario& s, const SolveParams& p, const SubproblemState& init) {
    return run_mm(s, p, init, "robust");
}

RobustDesign algorithm1(const Scenario& s, const SolveParams& p) {
    try {
        return algorithm1(s, p, init_point(s, p));
    } catch (const StructurallyInfeasibleError&) {
        RobustDesign d;
        d.method = "robust";
        d.threshold = p.threshold;
        d.status = DesignStatus::StructurallyInfeasible;
        return d;
    }
}

RobustDesign solve_nominal(const Scenario& s, const SolveParams& p) {
    const Scenario twin = s.without_uncertainty();
    RobustDesign d;
    try {
        d = run_mm(twin, p, init_point(twin, p), "nominal");
    } catch (const StructurallyInfeasibleError&) {
        d.status = DesignStatus::StructurallyInfeasible;
        d.method = "nominal";
        d.threshold = p.threshold;
    }
    return d;
}

RobustDesign solve_oma(const Scenario& s, OmaKind kind, const SolveParams& p) {
    const int U = s.num_users;
    RobustDesign d;
    d.method = (kind == OmaKind::Poly) ? "oma1" : "oma2";
    d.threshold = p.threshold;
    d.P = Eigen::MatrixXd::Zero(U, U);
    d.beta = Eigen::MatrixXd::Zero(U, U);
    d.t_split = Eigen::MatrixXd::Zero(U, U);
    d.slack = Eigen::MatrixXd::Zero(U, U);
    d.slot_power = Eigen::VectorXd::Zero(U);
    d.status = DesignStatus::Feasible;
    const double tbar = std::exp2(p.threshold) - 1.0;
    for (int u = 0; u < U; ++u) {
        const double wg = (kind == OmaKind::Poly)
                              ? s.bs_gain(u) + worst_linear_poly(s.alpha[u], s.poly[u], Sense::Min)
                              : s.bs_gain(u) - s.ball_radius * s.alpha[u].norm();
        d.t_split(u, u) = p.threshold;
        if (!(wg > 0.0)) {
            d.status = DesignStatus::StructurallyInfeasible;
            d.P(u, u) = kInf;
        } else {
            d.P(u, u) = tbar * s.noise_var / wg;
        }
        d.slot_power(u) = d.P(u, u);
    }
    if (d.status == DesignStatus::Feasible) {
        d.objective = d.slot_power.sum();
        d.penalized_objective = d.objective;
    } else {
        d.objective = kInf;
        d.penalized_objective = kInf;
    }
    d.iterations = 1;
    d.trace.push_back({0, d.objective, 0.0, 0.0});
    return d;
}

// ---------------------------------------------------------------------------

std::string RobustDesign::to_json() const {
    nlohmann::json j;
    j["format_version"] = 1;
    j["method"] = method;
    j["status"] = to_string(status);
    j["threshold"] = threshold;
    j["objective_w"] = objective;
    j["penalized_objective"] = penalized_objective;
    j["max_slack"] = max_slack;
    j["iterations"] = iterations;
    j["powers_w"] = detail::mat_to_json(P);
    j["slot_power_w"] = detail::vec_to_json(slot_power);
    j["beta"] = detail::mat_to_json(beta);
    j["rate_split"] = detail::mat_to_json(t_split);
    j["slack"] = detail::mat_to_json(slack);
    nlohmann::json lam = nlohmann::json::array(), om = nlohmann::json::array();
    for (const auto& v : lambda_dual) lam.push_back(detail::vec_to_json(v));
    for (const auto& v : omega_dual) om.push_back(detail::vec_to_json(v));
    j["lambda_dual"] = std::move(lam);
    j["omega_dual"] = std::move(om);
    nlohmann::json tr = nlohmann::json::array();
    for (const auto& r : trace)
        tr.push_back({{"n", r.n}, {"objective", r.objective}, {"max_slack", r.max_slack},
                      {"tau", r.tau}});
    j["trace"] = std::move(tr);
    return j.dump(2);
}

RobustDesign RobustDesign::from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    RobustDesign d;
    d.method = j.at("method").get<std::string>();
    const std::string st = j.at("status").get<std::string>();
    for (DesignStatus cand :
         {DesignStatus::Feasible, DesignStatus::Penalized, DesignStatus::MaxIter,
          DesignStatus::Infeasible, DesignStatus::StructurallyInfeasible,
          DesignStatus::NumericalFailure})
        if (st == to_string(cand)) d.status = cand;
    d.threshold = j.at("threshold").get<double>();
    d.objective = j.at("objective_w").get<double>();
    d.penalized_objective = j.at("penalized_objective").get<double>();
    d.max_slack = j.at("max_slack").get<double>();
    d.iterations = j.at("iterations").get<int>();
    d.P = detail::mat_from_json(j.at("powers_w"));
    d.slot_power = detail::vec_from_json(j.at("slot_power_w"));
    d.beta = detail::mat_from_json(j.at("beta"));
    d.t_split = detail::mat_from_json(j.at("rate_split"));
    d.slack = detail::mat_from_json(j.at("slack"));
    for (const auto& v : j.at("lambda_dual")) d.lambda_dual.push_back(detail::vec_from_json(v));
    for (const auto& v : j.at("omega_dual")) d.omega_dual.push_back(detail::vec_from_json(v));
    for (const auto& r : j.at("trace"))
        d.trace.push_back({r.at("n").get<int>(), r.at("objective").get<double>(),
                           r.at("max_slack").get<double>(), r.at("tau").get<double>()});
    return d;
}

std::string RobustDesign::trace_csv() const {
    std::ostringstream os;
    os << "n,objective,max_slack,tau\n";
    os.precision(17);
    for (const auto& r : trace)
        os << r.n << "," << r.objective << "," << r.max_slack << "," << r.tau << "\n";
    return os.str();
}

} // namespace hynoma
