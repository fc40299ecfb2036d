#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hynoma::test {

std::vector<Eigen::VectorXd> box_corners(const PolySet& set) {
    const int L = set.dim();
    std::vector<Eigen::VectorXd> out;
    out.reserve(std::size_t(1) << L);
    for (unsigned mask = 0; mask < (1u << L); ++mask) {
        Eigen::VectorXd v(L);
        for (int i = 0; i < L; ++i)
            v(i) = (mask & (1u << i)) ? set.u(i) / set.B(i, i) : -set.l(i) / set.A(i, i);
        out.push_back(std::move(v));
    }
    return out;
}

double brute_bilinear(double h2, const Eigen::VectorXd& alpha, const PolySet& poly, double g2,
                      const Eigen::VectorXd& kappa, double rho, Sense sense, Rng rng,
                      int interior_samples) {
    std::vector<Eigen::VectorXd> poly_pts;
    if (poly.is_diagonal()) {
        poly_pts = box_corners(poly);
    } else {
        poly_pts = poly_vertices(poly);
        for (auto& p : sample_poly_hit_and_run(poly, interior_samples, rng.substream(11)))
            poly_pts.push_back(std::move(p));
    }
    // ball side: extremes of kappa.gb are +-rho khat, plus random interior points
    std::vector<Eigen::VectorXd> ball_pts;
    const int L = static_cast<int>(kappa.size());
    if (kappa.norm() > 0.0) {
        ball_pts.push_back(rho * kappa / kappa.norm());
        ball_pts.push_back(-rho * kappa / kappa.norm());
    }
    ball_pts.push_back(Eigen::VectorXd::Zero(L));
    for (auto& b : sample_ball(BallSet{rho}, L, interior_samples, rng.substream(12)))
        ball_pts.push_back(std::move(b));

    double best = (sense == Sense::Min) ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity();
    for (const auto& gp : poly_pts) {
        const double f1 = h2 + gp.dot(alpha);
        for (const auto& gb : ball_pts) {
            const double val = f1 * (g2 + gb.dot(kappa));
            best = (sense == Sense::Min) ? std::min(best, val) : std::max(best, val);
        }
    }
    return best;
}

KnownInstance make_known_instance(Rng rng, int max_vars) {
    const int n = 2 + static_cast<int>(rng.below(std::max(1, max_vars - 1)));
    KnownInstance inst;
    Eigen::VectorXd x_opt(n);
    for (int i = 0; i < n; ++i) x_opt(i) = rng.uniform(-2.0, 2.0);
    inst.x_opt = x_opt;

    struct Block {
        ConeKind kind;
        Eigen::VectorXd s, z;
    };
    std::vector<Block> blocks;

    // a few nonnegative rows: active (s=0, z>0) or inactive (s>0, z=0)
    const int p = 2 + static_cast<int>(rng.below(4));
    for (int i = 0; i < p; ++i) {
        Block b;
        b.kind = ConeKind::NonNeg;
        b.s.resize(1);
        b.z.resize(1);
        if (rng.uniform() < 0.5) {
            b.s(0) = 0.0;
            b.z(0) = rng.uniform(0.2, 2.0);
        } else {
            b.s(0) = rng.uniform(0.2, 2.0);
            b.z(0) = 0.0;
        }
        blocks.push_back(std::move(b));
    }
    // SOC blocks: boundary-complementary pair, interior s, or interior z
    const int nsoc = 1 + static_cast<int>(rng.below(2));
    for (int k = 0; k < nsoc; ++k) {
        const int sz = 2 + static_cast<int>(rng.below(3));
        Block b;
        b.kind = ConeKind::Soc;
        b.s.resize(sz);
        b.z.resize(sz);
        const double r = rng.uniform();
        Eigen::VectorXd v(sz - 1);
        for (int i = 0; i < sz - 1; ++i) v(i) = rng.uniform(-1.0, 1.0);
        if (v.norm() < 1e-3) v(0) = 1.0;
        if (r < 0.4) { // both on the boundary, s z complementary
            b.s << v.norm(), v;
            const double mu = rng.uniform(0.2, 2.0);
            b.z.resize(sz);
            b.z(0) = mu * v.norm();
            b.z.tail(sz - 1) = -mu * v;
        } else if (r < 0.7) { // s interior, z = 0
            b.s(0) = v.norm() + rng.uniform(0.3, 1.5);
            b.s.tail(sz - 1) = v;
            b.z.setZero();
        } else { // s = 0, z interior
            b.s.setZero();
            b.z(0) = v.norm() + rng.uniform(0.3, 1.5);
            b.z.tail(sz - 1) = v;
        }
        blocks.push_back(std::move(b));
    }
    // one RSOC block built from a complementary SOC pair mapped through
    // T = [[1,1,0],[1,-1,0],[0,0,2I]]: s_r = T^{-1} s_soc, z_r = T z_soc... z
    // pairing uses z_r = T^T z_soc restricted to the original rows.
    {
        const int sz = 3 + static_cast<int>(rng.below(2));
        Eigen::VectorXd v(sz - 1);
        for (int i = 0; i < sz - 1; ++i) v(i) = rng.uniform(-1.0, 1.0);
        if (v.norm() < 1e-3) v(0) = 1.0;
        Eigen::VectorXd s_soc(sz), z_soc(sz);
        if (rng.uniform() < 0.5) {
            s_soc << v.norm(), v;
            const double mu = rng.uniform(0.2, 2.0);
            z_soc(0) = mu * v.norm();
            z_soc.tail(sz - 1) = -mu * v;
        } else {
            s_soc(0) = v.norm() + rng.uniform(0.3, 1.5);
            s_soc.tail(sz - 1) = v;
            z_soc.setZero();
        }
        Block b;
        b.kind = ConeKind::Rsoc;
        b.s.resize(sz);
        b.z.resize(sz);
        // T^{-1} = [[1/2,1/2,0],[1/2,-1/2,0],[0,0,I/2]]
        b.s(0) = 0.5 * (s_soc(0) + s_soc(1));
        b.s(1) = 0.5 * (s_soc(0) - s_soc(1));
        for (int i = 2; i < sz; ++i) b.s(i) = 0.5 * s_soc(i);
        // T^T = T
        b.z(0) = z_soc(0) + z_soc(1);
        b.z(1) = z_soc(0) - z_soc(1);
        for (int i = 2; i < sz; ++i) b.z(i) = 2.0 * z_soc(i);
        blocks.push_back(std::move(b));
    }

    int m = 0;
    for (const auto& b : blocks) m += static_cast<int>(b.s.size());
    Eigen::MatrixXd G(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) G(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd s_all(m), z_all(m);
    int at = 0;
    for (const auto& b : blocks) {
        s_all.segment(at, b.s.size()) = b.s;
        z_all.segment(at, b.s.size()) = b.z;
        at += static_cast<int>(b.s.size());
    }
    const Eigen::VectorXd h = G * x_opt + s_all;
    const Eigen::VectorXd c = -G.transpose() * z_all;

    ConicProgram prog;
    for (int j = 0; j < n; ++j) prog.add_var("x" + std::to_string(j), c(j));
    at = 0;
    for (const auto& b : blocks) {
        const int sz = static_cast<int>(b.s.size());
        std::vector<LinExpr> rows;
        for (int i = 0; i < sz; ++i) {
            LinExpr e(h(at + i));
            for (int j = 0; j < n; ++j)
                if (G(at + i, j) != 0.0) e.add(j, -G(at + i, j));
            rows.push_back(std::move(e));
        }
        if (b.kind == ConeKind::NonNeg) {
            prog.add_nonneg(rows[0]);
        } else if (b.kind == ConeKind::Soc) {
            prog.add_soc(rows[0], {rows.begin() + 1, rows.end()});
        } else {
            prog.add_rsoc(rows[0], rows[1], {rows.begin() + 2, rows.end()});
        }
        at += sz;
    }
    inst.prog = std::move(prog);
    inst.opt_value = c.dot(x_opt);
    return inst;
}

namespace {

// violation and subgradient of the distance-like penalty for one block,
// rotated cones lowered locally (independent of the solver's own lowering)
double block_violation(ConeKind kind, const Eigen::VectorXd& s, Eigen::VectorXd& grad_s) {
    grad_s = Eigen::VectorXd::Zero(s.size());
    if (kind == ConeKind::NonNeg) {
        double v = 0.0;
        for (int i = 0; i < s.size(); ++i)
            if (s(i) < 0.0) {
                v -= s(i);
                grad_s(i) = -1.0;
            }
        return v;
    }
    Eigen::VectorXd u = s;
    Eigen::MatrixXd T; // lowering map for rsoc
    if (kind == ConeKind::Rsoc) {
        const int sz = static_cast<int>(s.size());
        T = Eigen::MatrixXd::Zero(sz, sz);
        T(0, 0) = 1.0;
        T(0, 1) = 1.0;
        T(1, 0) = 1.0;
        T(1, 1) = -1.0;
        for (int i = 2; i < sz; ++i) T(i, i) = 2.0;
        u = T * s;
    }
    const double tail = u.tail(u.size() - 1).norm();
    const double v = tail - u(0);
    if (v <= 0.0) return 0.0;
    Eigen::VectorXd g(u.size());
    g(0) = -1.0;
    if (tail > 1e-300)
        g.tail(u.size() - 1) = u.tail(u.size() - 1) / tail;
    else
        g.tail(u.size() - 1).setZero();
    grad_s = (kind == ConeKind::Rsoc) ? Eigen::VectorXd(T.transpose() * g) : g;
    return v;
}

} // namespace

double subgradient_reference(const ConicProgram& prog, int iters, double penalty) {
    Eigen::VectorXd c, h;
    Eigen::MatrixXd G;
    prog.assemble(c, G, h);
    const int n = prog.num_vars();
    // least-squares start: near the feasible region's bulk
    Eigen::MatrixXd GtG = G.transpose() * G;
    GtG.diagonal().array() += 1e-10;
    Eigen::VectorXd x = GtG.ldlt().solve(G.transpose() * h);
    double best = std::numeric_limits<double>::infinity();

    // Polyak steps against an estimated optimum: target = best - delta with
    // the offset halved on a fixed schedule.
    double delta = 1.0;
    const int shrink_every = 4000;
    for (int k = 0; k < iters; ++k) {
        const Eigen::VectorXd s = h - G * x;
        double f = c.dot(x);
        Eigen::VectorXd grad = c;
        int at = 0;
        for (const auto& blk : prog.cones) {
            Eigen::VectorXd gs;
            const double v = block_violation(blk.kind, s.segment(at, blk.size), gs);
            if (v > 0.0) {
                f += penalty * v;
                grad -= penalty * (G.middleRows(at, blk.size).transpose() * gs);
            }
            at += blk.size;
        }
        best = std::min(best, f);
        const double gn2 = grad.squaredNorm();
        if (gn2 < 1e-24) break;
        if (k % shrink_every == shrink_every - 1) delta = std::max(0.5 * delta, 1e-13);
        const double gap = std::max(f - (best - delta), 1e-13);
        x -= (gap / gn2) * grad;
    }
    return best;
}

} // namespace hynoma::test
