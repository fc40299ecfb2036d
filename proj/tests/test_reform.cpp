#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hynoma/reform.hpp"
#include "oracles.hpp"

using namespace hynoma;

namespace {

// Hand-built scenario: gains and uncertainty data set directly.
Scenario synthetic(int U, int L) {
    Scenario s;
    s.num_users = U;
    s.error_dims = L;
    s.noise_var = 1e-9;
    s.ball_radius = 0.0;
    s.bs_gain = Eigen::VectorXd::Ones(U);
    s.uu_gain = Eigen::MatrixXd::Zero(U, U);
    s.sic_residual = Eigen::MatrixXd::Zero(U, U);
    s.alpha.assign(U, Eigen::VectorXd::Zero(L));
    s.kappa.resize(U);
    for (int u = 0; u < U; ++u) s.kappa[u].assign(u, Eigen::VectorXd::Zero(L));
    for (int u = 0; u < U; ++u) {
        PolySet p;
        p.A = Eigen::MatrixXd::Identity(L, L);
        p.B = Eigen::MatrixXd::Identity(L, L);
        p.l = Eigen::VectorXd::Ones(L);
        p.u = 5.0 * Eigen::VectorXd::Ones(L);
        s.poly.push_back(std::move(p));
    }
    return s;
}

double margin_with_lambda(const LowerBlock& blk, const Eigen::VectorXd& lambda) {
    return blk.cone_const - lambda.dot(blk.l);
}

bool dual_rows_ok(const LowerBlock& blk, const Eigen::VectorXd& lambda) {
    if (lambda.minCoeff() < 0.0) return false;
    const Eigen::VectorXd lhs = blk.dual_lhs * lambda;
    for (int w = 0; w < lhs.size(); ++w)
        if (lhs(w) < blk.dual_rhs(w) - 1e-13) return false;
    return true;
}

} // namespace

TEST_CASE("coupling fields for unit shifts") {
    Scenario s = synthetic(2, 3);
    s.bs_gain(1) = 2.0;
    s.uu_gain(1, 0) = 3.0;
    s.alpha[1] << 1.0, 0.0, 0.0;
    s.kappa[1][0] << 0.0, 1.0, 0.0;
    const CouplingData cd = build_coupling(1, 0, s);
    CHECK(cd.b.isApprox(Eigen::Vector3d(0.0, 2.0, 0.0)));
    CHECK(cd.a.isApprox(Eigen::Vector3d(3.0, 0.0, 0.0)));
    CHECK(cd.Q(0, 1) == doctest::Approx(1.0));
    CHECK(cd.Q.norm() == doctest::Approx(1.0)); // single nonzero entry
    CHECK(cd.nominal_product == doctest::Approx(6.0));
}

TEST_CASE("own-slot coupling has no backscatter term") {
    Scenario s = synthetic(2, 3);
    s.bs_gain(1) = 2.5;
    s.alpha[1] << 0.3, 0.2, 0.1;
    const CouplingData cd = build_coupling(1, 1, s);
    CHECK(cd.b.norm() == 0.0);
    CHECK(cd.Q.norm() == 0.0);
    CHECK(cd.nominal_product == doctest::Approx(2.5));
}

TEST_CASE("rank-one coupling matrix matches the direct double loop") {
    Rng rng(41);
    for (int rep = 0; rep < 50; ++rep) {
        Scenario s = synthetic(2, 3);
        for (int i = 0; i < 3; ++i) {
            s.alpha[1](i) = rng.uniform(0.0, 2.0);
            s.kappa[1][0](i) = rng.uniform(0.0, 2.0);
        }
        s.uu_gain(1, 0) = rng.uniform(0.1, 3.0);
        const CouplingData cd = build_coupling(1, 0, s);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                CHECK(cd.Q(i, j) ==
                      doctest::Approx(s.alpha[1](i) * s.kappa[1][0](j)).epsilon(1e-15));
        for (int w = 0; w < 3; ++w)
            CHECK(cd.q_row_norm(w) ==
                  doctest::Approx(s.alpha[1](w) * s.kappa[1][0].norm()).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_coupling(0, 1, synthetic(2, 3)), std::out_of_range);
}

TEST_CASE("zero uncertainty degenerates to the nominal cone row") {
    Scenario s = synthetic(2, 3);
    s.bs_gain(1) = 2.0;
    s.uu_gain(1, 0) = 3.0;
    const CouplingData cd = build_coupling(1, 0, s);
    const LowerBlock blk = robust_lower_system(1, 0, cd, s.poly[1], 0.0);
    CHECK(blk.cone_const == doctest::Approx(6.0));
    CHECK(blk.dual_rhs.norm() == 0.0); // lambda = 0 feasible
    CHECK(dual_rows_ok(blk, Eigen::VectorXd::Zero(3)));
    CHECK(certifiable_margin_diagonal(blk) == doctest::Approx(6.0));
}

TEST_CASE("large lambda stays dual-feasible but kills the cone margin") {
    Scenario s = synthetic(2, 3);
    s.bs_gain(1) = 2.0;
    s.uu_gain(1, 0) = 3.0;
    s.alpha[1] << 0.1, 0.1, 0.1;
    const CouplingData cd = build_coupling(1, 0, s);
    const LowerBlock blk = robust_lower_system(1, 0, cd, s.poly[1], 0.0);
    Eigen::VectorXd big = Eigen::VectorXd::Constant(3, 100.0);
    CHECK(dual_rows_ok(blk, big));
    const double eps = 1.0, P = 1.0;
    CHECK(margin_with_lambda(blk, big) < eps * eps / P); // infeasible at that point
    const double best = certifiable_margin_diagonal(blk);
    CHECK(best > margin_with_lambda(blk, big));
}

TEST_CASE("L=1 diagonal: safety always, exactness iff one source is active") {
    Rng rng(43);
    int coupled = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        Scenario s = synthetic(2, 1);
        const double h2 = rng.uniform(1.0, 10.0);
        const double g2 = rng.uniform(1.0, 10.0);
        s.bs_gain(1) = h2;
        s.uu_gain(1, 0) = g2;
        PolySet& set = s.poly[1];
        set.A(0, 0) = rng.uniform(0.5, 20.0);
        set.B(0, 0) = rng.uniform(0.5, 20.0);
        set.l(0) = rng.uniform(0.5, 10.0);
        set.u(0) = 5.0 * set.l(0);
        const int regime = rep % 3; // 0: poly only, 1: ball only, 2: coupled
        const double alpha =
            (regime == 1) ? 0.0 : rng.uniform(0.0, 0.8) * h2 * set.A(0, 0) / set.l(0);
        const double kappa = (regime == 0) ? 0.0 : rng.uniform(0.05, 2.0);
        const double rho = (regime == 0) ? 0.0 : rng.uniform(0.0, 0.25) * g2 / std::max(kappa, 1e-9);
        s.alpha[1](0) = alpha;
        s.kappa[1][0](0) = kappa;
        s.ball_radius = rho;

        const CouplingData cd = build_coupling(1, 0, s);
        const LowerBlock blk = robust_lower_system(1, 0, cd, set, rho);
        const double margin = certifiable_margin_diagonal(blk);
        const double oracle = test::brute_bilinear(h2, s.alpha[1], set, g2, s.kappa[1][0], rho,
                                                   Sense::Min, rng.substream(rep));
        // Theorem-1 system is safe: it never certifies more than the truth
        CHECK(margin <= oracle + 1e-9 * std::max(1.0, std::abs(oracle)));
        if (regime < 2) {
            CHECK(margin == doctest::Approx(oracle).epsilon(1e-9));
        } else {
            // the interchange gap is exactly 2 rho ||kappa|| m, m = alpha l / A
            const double m = s.alpha[1](0) * set.l(0) / set.A(0, 0);
            if (h2 - m > 0.0) {
                const double gap_theory = 2.0 * rho * kappa * m;
                CHECK(oracle - margin == doctest::Approx(gap_theory).epsilon(1e-9));
                ++coupled;
            }
        }
    }
    CHECK(coupled > 200);
}

TEST_CASE("upper system mirrors the lower one on the max side") {
    Scenario s = synthetic(2, 3);
    s.bs_gain(1) = 2.0;
    s.uu_gain(1, 0) = 3.0;
    const CouplingData cd = build_coupling(1, 0, s);
    const AffineSurrogate tan = tangent_quad_over_lin(1.0, 1.0);

    // zero uncertainty: reduces to nominal product <= tangent + slack
    const UpperBlock b0 = robust_upper_system(1, 0, cd, s.poly[1], 0.0, tan);
    CHECK(b0.lhs_const == doctest::Approx(6.0));
    CHECK(b0.dual_rhs.norm() == 0.0);
    CHECK(certifiable_upper_bound_diagonal(b0) == doctest::Approx(6.0));

    // growing the ball radius never shrinks the left side
    Scenario s2 = synthetic(2, 3);
    s2.bs_gain(1) = 2.0;
    s2.uu_gain(1, 0) = 3.0;
    s2.kappa[1][0] << 0.5, 0.2, 0.1;
    const CouplingData cd2 = build_coupling(1, 0, s2);
    double prev = -1e300;
    for (double rho : {0.0, 0.1, 0.2, 0.5}) {
        const UpperBlock b = robust_upper_system(1, 0, cd2, s2.poly[1], rho, tan);
        CHECK(b.lhs_const >= prev);
        prev = b.lhs_const;
    }
    CHECK_THROWS_AS(robust_upper_system(0, 1, cd, s.poly[0], 0.0, tan), std::out_of_range);
}

TEST_CASE("upper certifiable bound dominates the brute-force maximum") {
    Rng rng(47);
    for (int rep = 0; rep < 300; ++rep) {
        Scenario s = synthetic(2, 1);
        const double h2 = rng.uniform(1.0, 10.0);
        const double g2 = rng.uniform(1.0, 10.0);
        s.bs_gain(1) = h2;
        s.uu_gain(1, 0) = g2;
        s.poly[1].A(0, 0) = rng.uniform(0.5, 20.0);
        s.poly[1].B(0, 0) = rng.uniform(0.5, 20.0);
        s.poly[1].l(0) = rng.uniform(0.5, 10.0);
        s.poly[1].u(0) = 5.0 * s.poly[1].l(0);
        const int regime = rep % 3;
        s.alpha[1](0) = (regime == 1) ? 0.0 : rng.uniform(0.0, 0.3) * h2;
        s.kappa[1][0](0) = (regime == 0) ? 0.0 : rng.uniform(0.05, 1.0);
        s.ball_radius = (regime == 0) ? 0.0 : rng.uniform(0.0, 0.2);

        const CouplingData cd = build_coupling(1, 0, s);
        const AffineSurrogate tan = tangent_quad_over_lin(1.0, 1.0);
        const UpperBlock blk = robust_upper_system(1, 0, cd, s.poly[1], s.ball_radius, tan);
        const double bound = certifiable_upper_bound_diagonal(blk);
        const double oracle =
            test::brute_bilinear(h2, s.alpha[1], s.poly[1], g2, s.kappa[1][0], s.ball_radius,
                                 Sense::Max, rng.substream(rep));
        CHECK(bound >= oracle - 1e-9 * std::max(1.0, oracle));
        if (regime < 2) CHECK(bound == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("safe side: certified margins hold on sampled perturbations") {
    Rng rng(53);
    for (int rep = 0; rep < 10; ++rep) {
        Scenario s = synthetic(2, 2);
        const double h2 = rng.uniform(1.0, 5.0);
        const double g2 = rng.uniform(1.0, 5.0);
        s.bs_gain(1) = h2;
        s.uu_gain(1, 0) = g2;
        for (int i = 0; i < 2; ++i) {
            s.poly[1].A(i, i) = rng.uniform(1.0, 10.0);
            s.poly[1].B(i, i) = rng.uniform(1.0, 10.0);
            s.poly[1].l(i) = rng.uniform(0.5, 2.0);
            s.poly[1].u(i) = 5.0 * s.poly[1].l(i);
            s.alpha[1](i) = rng.uniform(0.0, 0.2) * h2;
            s.kappa[1][0](i) = rng.uniform(0.05, 0.5);
        }
        s.ball_radius = 0.2;
        const CouplingData cd = build_coupling(1, 0, s);
        const LowerBlock blk = robust_lower_system(1, 0, cd, s.poly[1], s.ball_radius);
        const double margin = certifiable_margin_diagonal(blk);

        const auto gps = sample_poly(s.poly[1], 2000, rng.substream(2 * rep));
        const auto gbs = sample_ball(BallSet{s.ball_radius}, 2, 2000, rng.substream(2 * rep + 1));
        for (std::size_t k = 0; k < gps.size(); ++k) {
            const double val =
                (h2 + gps[k].dot(s.alpha[1])) * (g2 + gbs[k].dot(s.kappa[1][0]));
            REQUIRE(val >= margin - 1e-9);
        }
    }
}

TEST_CASE("debug dumps are human-readable") {
    Scenario s = synthetic(2, 2);
    s.bs_gain(1) = 2.0;
    s.uu_gain(1, 0) = 3.0;
    const CouplingData cd = build_coupling(1, 0, s);
    const LowerBlock lo = robust_lower_system(1, 0, cd, s.poly[1], 0.1);
    const UpperBlock up =
        robust_upper_system(1, 0, cd, s.poly[1], 0.1, tangent_quad_over_lin(1.0, 1.0));
    CHECK(dump(lo).find("lower block (u=1, t=0)") != std::string::npos);
    CHECK(dump(up).find("upper block (j=1, t=0)") != std::string::npos);
}
