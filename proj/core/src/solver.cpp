#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "hynoma/conic.hpp"

// Homogeneous self-dual interior-point method for
//     minimize c^T x   s.t.   h - G x in K
// with K = nonnegative orthant x product of second-order cones after the
// rotated cones are lowered. Nesterov-Todd scaling, Mehrotra
// predictor-corrector, dense KKT solves with static regularization and a
// fixed number of refinement rounds. Entirely deterministic.

namespace hynoma {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct ConeLayout {
    int orthant = 0;          // leading orthant rows
    std::vector<int> soc;     // SOC block sizes, in order
    int total = 0;
    int degree() const { return orthant + static_cast<int>(soc.size()); }
};

// ---- Jordan-algebra helpers on flat cone vectors -------------------------

Eigen::VectorXd cone_identity(const ConeLayout& K) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(K.total);
    e.head(K.orthant).setOnes();
    int at = K.orthant;
    for (int sz : K.soc) {
        e(at) = 1.0;
        at += sz;
    }
    return e;
}

Eigen::VectorXd jordan_prod(const ConeLayout& K, const Eigen::VectorXd& u,
                            const Eigen::VectorXd& v) {
    Eigen::VectorXd r(K.total);
    r.head(K.orthant) = u.head(K.orthant).cwiseProduct(v.head(K.orthant));
    int at = K.orthant;
    for (int sz : K.soc) {
        const auto ub = u.segment(at, sz);
        const auto vb = v.segment(at, sz);
        r(at) = ub.dot(vb);
        r.segment(at + 1, sz - 1) = ub(0) * vb.tail(sz - 1) + vb(0) * ub.tail(sz - 1);
        at += sz;
    }
    return r;
}

// Solve lambda o x = b.
Eigen::VectorXd jordan_solve(const ConeLayout& K, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& b) {
    Eigen::VectorXd x(K.total);
    x.head(K.orthant) = b.head(K.orthant).cwiseQuotient(lambda.head(K.orthant));
    int at = K.orthant;
    for (int sz : K.soc) {
        const auto lb = lambda.segment(at, sz);
        const auto bb = b.segment(at, sz);
        const double l0 = lb(0);
        const double lt2 = lb.tail(sz - 1).squaredNorm();
        const double det = l0 * l0 - lt2;
        const double x0 = (l0 * bb(0) - lb.tail(sz - 1).dot(bb.tail(sz - 1))) / det;
        x(at) = x0;
        x.segment(at + 1, sz - 1) = (bb.tail(sz - 1) - x0 * lb.tail(sz - 1)) / l0;
        at += sz;
    }
    return x;
}

// sup { a >= 0 : u + a du in K }, capped.
double max_step(const ConeLayout& K, const Eigen::VectorXd& u, const Eigen::VectorXd& du,
                double cap) {
    double a = cap;
    for (int i = 0; i < K.orthant; ++i) {
        if (du(i) < 0.0) a = std::min(a, -u(i) / du(i));
    }
    int at = K.orthant;
    for (int sz : K.soc) {
        const auto ub = u.segment(at, sz);
        const auto db = du.segment(at, sz);
        // stay in { v : v0 >= ||v1|| }: q(t) = (u+t du)^T J (u+t du) >= 0, u0+t du0 >= 0
        if (db(0) < 0.0) a = std::min(a, -ub(0) / db(0));
        const double q2 = db(0) * db(0) - db.tail(sz - 1).squaredNorm();
        const double q1 = 2.0 * (ub(0) * db(0) - ub.tail(sz - 1).dot(db.tail(sz - 1)));
        const double q0 = ub(0) * ub(0) - ub.tail(sz - 1).squaredNorm();
        // first downward crossing of q
        const double disc = q1 * q1 - 4.0 * q2 * q0;
        if (std::abs(q2) < 1e-300) {
            if (q1 < 0.0 && q0 > 0.0) a = std::min(a, -q0 / q1);
        } else if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            const double r1 = (-q1 - sq) / (2.0 * q2);
            const double r2 = (-q1 + sq) / (2.0 * q2);
            for (double r : {std::min(r1, r2), std::max(r1, r2)}) {
                if (r > 0.0 && 2.0 * q2 * r + q1 < 0.0) {
                    a = std::min(a, r);
                    break;
                }
            }
        }
        at += sz;
    }
    return a;
}

// ---- Nesterov-Todd scaling ------------------------------------------------

struct Scaling {
    Eigen::VectorXd w_orth;               // orthant scaling sqrt(s/z)
    std::vector<Eigen::MatrixXd> W;       // per SOC block
    std::vector<Eigen::MatrixXd> Winv;    // per SOC block
    std::vector<Eigen::LLT<Eigen::MatrixXd>> W2reg; // per block LLT of W^2 + reg
    Eigen::VectorXd lambda;               // W z = W^{-1} s
    double reg = 0.0;
    const ConeLayout* K = nullptr;

    Eigen::VectorXd apply_W(const Eigen::VectorXd& v) const {
        Eigen::VectorXd r(K->total);
        r.head(K->orthant) = w_orth.cwiseProduct(v.head(K->orthant));
        int at = K->orthant;
        for (std::size_t k = 0; k < K->soc.size(); ++k) {
            r.segment(at, K->soc[k]) = W[k] * v.segment(at, K->soc[k]);
            at += K->soc[k];
        }
        return r;
    }
    Eigen::VectorXd apply_Winv(const Eigen::VectorXd& v) const {
        Eigen::VectorXd r(K->total);
        r.head(K->orthant) = v.head(K->orthant).cwiseQuotient(w_orth);
        int at = K->orthant;
        for (std::size_t k = 0; k < K->soc.size(); ++k) {
            r.segment(at, K->soc[k]) = Winv[k] * v.segment(at, K->soc[k]);
            at += K->soc[k];
        }
        return r;
    }
    Eigen::VectorXd apply_W2(const Eigen::VectorXd& v) const {
        Eigen::VectorXd r(K->total);
        r.head(K->orthant) = w_orth.cwiseAbs2().cwiseProduct(v.head(K->orthant));
        int at = K->orthant;
        for (std::size_t k = 0; k < K->soc.size(); ++k) {
            r.segment(at, K->soc[k]) = W[k] * (W[k] * v.segment(at, K->soc[k]));
            at += K->soc[k];
        }
        return r;
    }
    // (W^2 + reg I)^{-1} v
    Eigen::VectorXd solve_W2reg(const Eigen::VectorXd& v) const {
        Eigen::VectorXd r(K->total);
        r.head(K->orthant) =
            (v.head(K->orthant).array() / (w_orth.array().square() + reg)).matrix();
        int at = K->orthant;
        for (std::size_t k = 0; k < K->soc.size(); ++k) {
            r.segment(at, K->soc[k]) = W2reg[k].solve(v.segment(at, K->soc[k]));
            at += K->soc[k];
        }
        return r;
    }
};

// M(w) = [[w0, w1'], [w1, I + w1 w1'/(1+w0)]]; M(w)^2 = 2 w w' - J for unit
// hyperbolic w, and M(Jw) is its inverse.
Eigen::MatrixXd soc_scaling_matrix(const Eigen::VectorXd& wbar) {
    const int sz = static_cast<int>(wbar.size());
    Eigen::MatrixXd M(sz, sz);
    M(0, 0) = wbar(0);
    M.block(0, 1, 1, sz - 1) = wbar.tail(sz - 1).transpose();
    M.block(1, 0, sz - 1, 1) = wbar.tail(sz - 1);
    M.block(1, 1, sz - 1, sz - 1) =
        Eigen::MatrixXd::Identity(sz - 1, sz - 1) +
        wbar.tail(sz - 1) * wbar.tail(sz - 1).transpose() / (1.0 + wbar(0));
    return M;
}

bool compute_scaling(const ConeLayout& K, const Eigen::VectorXd& s, const Eigen::VectorXd& z,
                     double reg, Scaling& sc) {
    sc.K = &K;
    sc.reg = reg;
    sc.w_orth = (s.head(K.orthant).cwiseQuotient(z.head(K.orthant))).cwiseSqrt();
    if (!sc.w_orth.allFinite()) return false;
    sc.W.assign(K.soc.size(), {});
    sc.Winv.assign(K.soc.size(), {});
    sc.W2reg.assign(K.soc.size(), {});
    sc.lambda.resize(K.total);
    sc.lambda.head(K.orthant) =
        (s.head(K.orthant).cwiseProduct(z.head(K.orthant))).cwiseSqrt();
    int at = K.orthant;
    for (std::size_t k = 0; k < K.soc.size(); ++k) {
        const int sz = K.soc[k];
        const auto sb = s.segment(at, sz);
        const auto zb = z.segment(at, sz);
        const double sJ2 = sb(0) * sb(0) - sb.tail(sz - 1).squaredNorm();
        const double zJ2 = zb(0) * zb(0) - zb.tail(sz - 1).squaredNorm();
        if (!(sJ2 > 0.0) || !(zJ2 > 0.0)) return false;
        const double sJ = std::sqrt(sJ2), zJ = std::sqrt(zJ2);
        const Eigen::VectorXd sbar = sb / sJ;
        Eigen::VectorXd Jzbar = zb / zJ;
        Jzbar.tail(sz - 1) *= -1.0;
        const double gamma = std::sqrt(0.5 * (1.0 + sbar.dot(zb) / zJ));
        Eigen::VectorXd wbar = (sbar + Jzbar) / (2.0 * gamma);
        const double eta = std::sqrt(sJ / zJ);
        Eigen::MatrixXd M = soc_scaling_matrix(wbar);
        Eigen::VectorXd Jwbar = wbar;
        Jwbar.tail(sz - 1) *= -1.0;
        sc.W[k] = eta * M;
        sc.Winv[k] = soc_scaling_matrix(Jwbar) / eta;
        Eigen::MatrixXd W2 = sc.W[k] * sc.W[k];
        W2.diagonal().array() += reg;
        sc.W2reg[k].compute(W2);
        if (sc.W2reg[k].info() != Eigen::Success) return false;
        sc.lambda.segment(at, sz) = sc.W[k] * zb;
        at += sz;
    }
    return sc.lambda.allFinite();
}

// ---- KKT solve -------------------------------------------------------------

struct Kkt {
    const Eigen::MatrixXd* G = nullptr;
    const Scaling* sc = nullptr;
    double reg = 0.0;
    int refine = 1;
    Eigen::LDLT<Eigen::MatrixXd> Hfac;

    bool factor(const Eigen::MatrixXd& Gm, const Scaling& s, double rg, int refine_steps) {
        G = &Gm;
        sc = &s;
        reg = rg;
        refine = refine_steps;
        const int n = static_cast<int>(Gm.cols());
        // H = reg I + G^T (W^2 + reg)^{-1} G
        Eigen::MatrixXd T(Gm.rows(), n);
        for (int j = 0; j < n; ++j) T.col(j) = s.solve_W2reg(Gm.col(j));
        Eigen::MatrixXd H = Gm.transpose() * T;
        H.diagonal().array() += reg;
        Hfac.compute(H);
        return Hfac.info() == Eigen::Success;
    }

    //  reg dx + G^T dz            = bx
    //  G dx  - (W^2 + reg) dz     = bz
    void solve_once(const Eigen::VectorXd& bx, const Eigen::VectorXd& bz, Eigen::VectorXd& dx,
                    Eigen::VectorXd& dz) const {
        dx = Hfac.solve(bx + G->transpose() * sc->solve_W2reg(bz));
        dz = sc->solve_W2reg(*G * dx - bz);
    }

    void solve(const Eigen::VectorXd& bx, const Eigen::VectorXd& bz, Eigen::VectorXd& dx,
               Eigen::VectorXd& dz) const {
        solve_once(bx, bz, dx, dz);
        for (int r = 0; r < refine; ++r) {
            const Eigen::VectorXd rx = bx - (reg * dx + G->transpose() * dz);
            const Eigen::VectorXd rz = bz - (*G * dx - sc->apply_W2(dz) - reg * dz);
            Eigen::VectorXd ex, ez;
            solve_once(rx, rz, ex, ez);
            dx += ex;
            dz += ez;
        }
    }
};

// ---- program lowering ------------------------------------------------------

struct Lowered {
    Eigen::MatrixXd G;
    Eigen::VectorXd c, h;
    ConeLayout K;
    // map original row -> lowered row (after permutation); RSOC blocks carry
    // the linear transform T on their own rows.
    std::vector<int> row_of_original;
    struct RsocSpan {
        int orig_start;   // first original row of the block
        int low_start;    // first lowered row
        int size;
    };
    std::vector<RsocSpan> rsoc_spans;
};

Lowered lower_program(const ConicProgram& prog) {
    Eigen::VectorXd c, h;
    Eigen::MatrixXd G;
    prog.assemble(c, G, h);
    const int m = prog.num_rows();

    Lowered lw;
    lw.c = c;
    lw.row_of_original.assign(m, -1);

    // orthant rows first, then SOC/RSOC blocks in order of appearance
    int orthant_rows = 0;
    for (const auto& b : prog.cones)
        if (b.kind == ConeKind::NonNeg) orthant_rows += b.size;
    lw.K.orthant = orthant_rows;
    lw.G.resize(m, G.cols());
    lw.h.resize(m);

    int at_orig = 0;
    int next_orth = 0;
    int next_cone = orthant_rows;
    for (const auto& b : prog.cones) {
        if (b.kind == ConeKind::NonNeg) {
            for (int i = 0; i < b.size; ++i) {
                lw.G.row(next_orth) = G.row(at_orig + i);
                lw.h(next_orth) = h(at_orig + i);
                lw.row_of_original[at_orig + i] = next_orth;
                ++next_orth;
            }
        } else if (b.kind == ConeKind::Soc) {
            for (int i = 0; i < b.size; ++i) {
                lw.G.row(next_cone + i) = G.row(at_orig + i);
                lw.h(next_cone + i) = h(at_orig + i);
                lw.row_of_original[at_orig + i] = next_cone + i;
            }
            lw.K.soc.push_back(b.size);
            next_cone += b.size;
        } else {
            // (w, q, v) with wq >= ||v||^2  ->  SOC rows (w+q, w-q, 2v)
            lw.G.row(next_cone) = G.row(at_orig) + G.row(at_orig + 1);
            lw.h(next_cone) = h(at_orig) + h(at_orig + 1);
            lw.G.row(next_cone + 1) = G.row(at_orig) - G.row(at_orig + 1);
            lw.h(next_cone + 1) = h(at_orig) - h(at_orig + 1);
            for (int i = 2; i < b.size; ++i) {
                lw.G.row(next_cone + i) = 2.0 * G.row(at_orig + i);
                lw.h(next_cone + i) = 2.0 * h(at_orig + i);
            }
            for (int i = 0; i < b.size; ++i) lw.row_of_original[at_orig + i] = next_cone + i;
            lw.rsoc_spans.push_back({at_orig, next_cone, b.size});
            lw.K.soc.push_back(b.size);
            next_cone += b.size;
        }
        at_orig += b.size;
    }
    lw.K.total = m;
    return lw;
}

// Map lowered dual back to original rows: z_orig = T^T z_low on RSOC spans,
// identity elsewhere (T symmetric: [[1,1,0],[1,-1,0],[0,0,2I]]).
Eigen::VectorXd dual_to_original(const Lowered& lw, const Eigen::VectorXd& zlow) {
    Eigen::VectorXd z(zlow.size());
    for (std::size_t i = 0; i < lw.row_of_original.size(); ++i)
        z(static_cast<int>(i)) = zlow(lw.row_of_original[i]);
    for (const auto& sp : lw.rsoc_spans) {
        const double a = zlow(sp.low_start), b = zlow(sp.low_start + 1);
        z(sp.orig_start) = a + b;
        z(sp.orig_start + 1) = a - b;
        for (int i = 2; i < sp.size; ++i) z(sp.orig_start + i) = 2.0 * zlow(sp.low_start + i);
    }
    return z;
}

// ---- equilibration ---------------------------------------------------------

struct Equilibration {
    Eigen::VectorXd row_scale; // block-uniform within each cone block
    Eigen::VectorXd col_scale;
    double c_scale = 1.0;
    double h_scale = 1.0;
};

Equilibration equilibrate(Eigen::MatrixXd& G, Eigen::VectorXd& c, Eigen::VectorXd& h,
                          const ConeLayout& K, bool enabled) {
    const int m = static_cast<int>(G.rows());
    const int n = static_cast<int>(G.cols());
    Equilibration eq;
    eq.row_scale = Eigen::VectorXd::Ones(m);
    eq.col_scale = Eigen::VectorXd::Ones(n);
    if (enabled && m > 0 && n > 0) {
        for (int pass = 0; pass < 3; ++pass) {
            // rows: uniform scale per cone block (keeps the cone geometry)
            int at = 0;
            auto scale_block = [&](int sz) {
                double mx = 0.0;
                for (int i = 0; i < sz; ++i)
                    mx = std::max({mx, G.row(at + i).cwiseAbs().maxCoeff(), std::abs(h(at + i))});
                if (mx > 0.0) {
                    const double d = 1.0 / std::sqrt(mx);
                    for (int i = 0; i < sz; ++i) {
                        G.row(at + i) *= d;
                        h(at + i) *= d;
                        eq.row_scale(at + i) *= d;
                    }
                }
                at += sz;
            };
            for (int i = 0; i < K.orthant; ++i) scale_block(1);
            for (int sz : K.soc) scale_block(sz);
            for (int j = 0; j < n; ++j) {
                const double mx = std::max(G.col(j).cwiseAbs().maxCoeff(), std::abs(c(j)));
                if (mx > 0.0) {
                    const double d = 1.0 / std::sqrt(mx);
                    G.col(j) *= d;
                    c(j) *= d;
                    eq.col_scale(j) *= d;
                }
            }
        }
    }
    const double cn = c.lpNorm<Eigen::Infinity>();
    const double hn = h.lpNorm<Eigen::Infinity>();
    eq.c_scale = (cn > 1.0) ? 1.0 / cn : 1.0;
    eq.h_scale = (hn > 1.0) ? 1.0 / hn : 1.0;
    c *= eq.c_scale;
    h *= eq.h_scale;
    return eq;
}

struct Metrics {
    double pres = kInf, dres = kInf, gap = kInf, relgap = kInf;
    double pobj = 0.0, dobj = 0.0;
    double pinfres = kInf, dinfres = kInf;
};

} // namespace

ConicSolution solve(const ConicProgram& prog, const SolverOptions& opts) {
    prog.check_well_formed();

    ConicSolution sol;
    const int n = prog.num_vars();
    const int m = prog.num_rows();
    if (n == 0) {
        sol.status = SolveStatus::Optimal;
        sol.x.resize(0);
        sol.z = Eigen::VectorXd::Zero(m);
        return sol;
    }
    // Original data for reporting.
    Eigen::VectorXd c0, h0;
    Eigen::MatrixXd G0;
    prog.assemble(c0, G0, h0);

    if (m == 0) {
        sol.z.resize(0);
        if (c0.norm() == 0.0) {
            sol.status = SolveStatus::Optimal;
            sol.x = Eigen::VectorXd::Zero(n);
        } else {
            sol.status = SolveStatus::DualInfeasible;
            sol.x = -c0; // descent ray
        }
        return sol;
    }

    Lowered lw = lower_program(prog);

    for (int attempt = 0; attempt < 3; ++attempt) {
        const double reg = opts.static_reg * std::pow(100.0, attempt);
        Eigen::MatrixXd G = lw.G;
        Eigen::VectorXd c = lw.c, h = lw.h;
        const Equilibration eq = equilibrate(G, c, h, lw.K, opts.equilibrate);
        const ConeLayout& K = lw.K;

        // Least-squares start shifted into the cone interior.
        Eigen::MatrixXd GtG = G.transpose() * G;
        GtG.diagonal().array() += std::max(reg, 1e-10);
        Eigen::LDLT<Eigen::MatrixXd> Fls(GtG);
        Eigen::VectorXd x = Fls.solve(G.transpose() * h);
        Eigen::VectorXd s = h - G * x;
        Eigen::VectorXd z = -G * Fls.solve(c);
        const Eigen::VectorXd e = cone_identity(K);
        auto interior_shift = [&](Eigen::VectorXd& v) {
            double a = kInf;
            for (int i = 0; i < K.orthant; ++i) a = std::min(a, v(i));
            int at = K.orthant;
            for (int sz : K.soc) {
                a = std::min(a, v(at) - v.segment(at + 1, sz - 1).norm());
                at += sz;
            }
            v += (1.0 + std::max(0.0, -a)) * e;
        };
        interior_shift(s);
        interior_shift(z);
        double tau = 1.0, kappa = 1.0;

        const int degree = K.degree() + 1;
        Scaling sc;
        Kkt kkt;
        bool numerical_trouble = false;
        int stall = 0;

        auto unscale_metrics = [&](Metrics& mt) {
            // map scaled iterate back to original-data space
            const Eigen::VectorXd x_o = eq.col_scale.cwiseProduct(x) / eq.h_scale;
            Eigen::VectorXd s_low = s.cwiseQuotient(eq.row_scale) / eq.h_scale;
            Eigen::VectorXd z_low = z.cwiseProduct(eq.row_scale) / eq.c_scale;
            const Eigen::VectorXd xh = x_o / tau;
            // slacks/duals in original row order
            Eigen::VectorXd s_orig(m), z_orig = dual_to_original(lw, z_low);
            {
                // s_orig = T^{-1} s_low on RSOC spans; recompute directly from data
                for (std::size_t i = 0; i < lw.row_of_original.size(); ++i)
                    s_orig(static_cast<int>(i)) = s_low(lw.row_of_original[i]);
                for (const auto& sp : lw.rsoc_spans) {
                    const double a = s_low(sp.low_start), b = s_low(sp.low_start + 1);
                    s_orig(sp.orig_start) = 0.5 * (a + b);
                    s_orig(sp.orig_start + 1) = 0.5 * (a - b);
                    for (int i = 2; i < sp.size; ++i)
                        s_orig(sp.orig_start + i) = 0.5 * s_low(sp.low_start + i);
                }
            }
            const Eigen::VectorXd sh = s_orig / tau;
            const Eigen::VectorXd zh = z_orig / tau;
            mt.pres = (G0 * xh + sh - h0).norm() / std::max(1.0, h0.norm());
            mt.dres = (G0.transpose() * zh + c0).norm() / std::max(1.0, c0.norm());
            mt.pobj = c0.dot(xh);
            mt.dobj = -h0.dot(zh);
            mt.gap = sh.dot(zh);
            mt.relgap = mt.gap / std::max({1.0, std::abs(mt.pobj), std::abs(mt.dobj)});
            const double hz = h0.dot(z_orig);
            mt.pinfres = (hz < 0.0) ? (G0.transpose() * z_orig).norm() / (-hz) : kInf;
            const double cx = c0.dot(x_o);
            mt.dinfres = (cx < 0.0) ? (G0 * x_o + s_orig).norm() / (-cx) : kInf;
        };

        auto finalize = [&](SolveStatus st, int iters) {
            const Eigen::VectorXd x_o = eq.col_scale.cwiseProduct(x) / eq.h_scale;
            Eigen::VectorXd z_low = z.cwiseProduct(eq.row_scale) / eq.c_scale;
            Eigen::VectorXd z_orig = dual_to_original(lw, z_low);
            sol.iterations = iters;
            sol.status = st;
            if (st == SolveStatus::Optimal || st == SolveStatus::MaxIter) {
                sol.x = x_o / tau;
                sol.z = z_orig / tau;
            } else if (st == SolveStatus::PrimalInfeasible) {
                sol.x = Eigen::VectorXd::Zero(n);
                sol.z = z_orig / std::max(1e-300, -h0.dot(z_orig));
            } else {
                sol.x = x_o / std::max(1e-300, -c0.dot(x_o));
                sol.z = Eigen::VectorXd::Zero(m);
            }
            // reported numbers recomputed from original data
            if (st == SolveStatus::Optimal || st == SolveStatus::MaxIter) {
                const Eigen::VectorXd sh = h0 - G0 * sol.x;
                sol.prim_obj = c0.dot(sol.x);
                sol.dual_obj = -h0.dot(sol.z);
                sol.prim_res = (G0 * sol.x + sh - h0).norm() / std::max(1.0, h0.norm());
                sol.dual_res = (G0.transpose() * sol.z + c0).norm() / std::max(1.0, c0.norm());
                sol.gap = sh.dot(sol.z);
            }
        };

        Metrics mt;
        bool done = false;
        for (int iter = 0; iter <= opts.max_iters; ++iter) {
            unscale_metrics(mt);
            if (mt.pres <= opts.feas_tol && mt.dres <= opts.feas_tol &&
                (mt.gap <= opts.gap_tol || mt.relgap <= opts.gap_tol)) {
                finalize(SolveStatus::Optimal, iter);
                done = true;
                break;
            }
            if (mt.pinfres <= opts.feas_tol) {
                finalize(SolveStatus::PrimalInfeasible, iter);
                done = true;
                break;
            }
            if (mt.dinfres <= opts.feas_tol) {
                finalize(SolveStatus::DualInfeasible, iter);
                done = true;
                break;
            }
            if (iter == opts.max_iters) {
                finalize(SolveStatus::MaxIter, iter);
                done = true;
                break;
            }

            if (!compute_scaling(K, s, z, reg, sc) ||
                !kkt.factor(G, sc, reg, opts.refine_steps)) {
                numerical_trouble = true;
                break;
            }

            // residuals of the self-dual system
            const Eigen::VectorXd res1 = G.transpose() * z + c * tau;
            const Eigen::VectorXd res2 = -G * x + h * tau - s;
            const double res3 = -c.dot(x) - h.dot(z) - kappa;
            const double mu = (s.dot(z) + tau * kappa) / degree;

            Eigen::VectorXd dx1, dz1;
            kkt.solve(-c, h, dx1, dz1);
            const double denom = kappa / tau - c.dot(dx1) - h.dot(dz1);

            auto direction = [&](const Eigen::VectorXd& b1, const Eigen::VectorXd& b2, double b3,
                                 const Eigen::VectorXd& bs, double bk, Eigen::VectorXd& dx,
                                 Eigen::VectorXd& dz, Eigen::VectorXd& ds, double& dtau,
                                 double& dkappa) {
                const Eigen::VectorXd Wlbs = sc.apply_W(jordan_solve(K, sc.lambda, bs));
                Eigen::VectorXd dx0, dz0;
                kkt.solve(b1, -(b2 + Wlbs), dx0, dz0);
                dtau = (b3 + bk / tau + c.dot(dx0) + h.dot(dz0)) / denom;
                dx = dx0 + dtau * dx1;
                dz = dz0 + dtau * dz1;
                ds = Wlbs - sc.apply_W2(dz);
                dkappa = (bk - kappa * dtau) / tau;
            };

            // predictor
            Eigen::VectorXd dxa, dza, dsa;
            double dta, dka;
            const Eigen::VectorXd ll = jordan_prod(K, sc.lambda, sc.lambda);
            direction(-res1, -res2, -res3, -ll, -tau * kappa, dxa, dza, dsa, dta, dka);

            double alpha = std::min({max_step(K, s, dsa, kInf), max_step(K, z, dza, kInf),
                                     dta < 0.0 ? -tau / dta : kInf,
                                     dka < 0.0 ? -kappa / dka : kInf, 1.0});
            const double mu_aff = ((s + alpha * dsa).dot(z + alpha * dza) +
                                   (tau + alpha * dta) * (kappa + alpha * dka)) /
                                  degree;
            double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3.0);

            // corrector
            const Eigen::VectorXd corr =
                jordan_prod(K, sc.apply_Winv(dsa), sc.apply_W(dza));
            Eigen::VectorXd bs = -ll - corr + sigma * mu * cone_identity(K);
            const double bk = -tau * kappa - dta * dka + sigma * mu;
            Eigen::VectorXd dx, dz, ds;
            double dt, dk;
            direction(-(1.0 - sigma) * res1, -(1.0 - sigma) * res2, -(1.0 - sigma) * res3, bs, bk,
                      dx, dz, ds, dt, dk);

            double amax = std::min({max_step(K, s, ds, kInf), max_step(K, z, dz, kInf),
                                    dt < 0.0 ? -tau / dt : kInf, dk < 0.0 ? -kappa / dk : kInf});
            double a = std::min(1.0, 0.98 * amax);
            if (!std::isfinite(a) || a <= 1e-11) {
                if (++stall >= 3) {
                    numerical_trouble = true;
                    break;
                }
                a = std::min(1.0, 0.5 * amax);
                if (!std::isfinite(a) || a <= 0.0) {
                    numerical_trouble = true;
                    break;
                }
            } else {
                stall = 0;
            }

            x += a * dx;
            z += a * dz;
            s += a * ds;
            tau += a * dt;
            kappa += a * dk;
            if (!x.allFinite() || !z.allFinite() || !s.allFinite() || !std::isfinite(tau) ||
                !std::isfinite(kappa) || tau <= 0.0 || kappa <= 0.0) {
                numerical_trouble = true;
                break;
            }
        }
        if (!numerical_trouble) return sol;
        (void)done;
        // otherwise escalate regularization and retry deterministically
    }

    sol.status = SolveStatus::NumericalFailure;
    sol.x = Eigen::VectorXd::Zero(n);
    sol.z = Eigen::VectorXd::Zero(m);
    return sol;
}

} // namespace hynoma
