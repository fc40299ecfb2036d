#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hynoma/conic.hpp"
#include "hynoma/rng.hpp"
#include "oracles.hpp"

using namespace hynoma;

TEST_CASE("builder assembles the canonical slack form") {
    ConicProgram p;
    const int x = p.add_var("x", 1.0);
    p.add_nonneg(LinExpr::of(x) - LinExpr(2.0)); // x - 2 >= 0
    Eigen::VectorXd c, h;
    Eigen::MatrixXd G;
    p.assemble(c, G, h);
    CHECK(c(0) == 1.0);
    CHECK(G(0, 0) == -1.0);
    CHECK(h(0) == -2.0);
    p.check_well_formed();
}

TEST_CASE("rotated cone encodes eps^2/P <= m as (P, m, eps)") {
    ConicProgram p;
    const int P = p.add_var("P");
    const int m = p.add_var("m");
    const int eps = p.add_var("eps");
    p.add_rsoc(LinExpr::of(P), LinExpr::of(m), {LinExpr::of(eps)});
    CHECK(p.cones.size() == 1);
    CHECK(p.cones[0].kind == ConeKind::Rsoc);
    CHECK(p.cones[0].size == 3);
    CHECK(p.num_rows() == 3);
}

TEST_CASE("soc block shape for ||(3,4)|| <= x") {
    ConicProgram p;
    const int x = p.add_var("x", 1.0);
    p.add_soc(LinExpr::of(x), {LinExpr(3.0), LinExpr(4.0)});
    CHECK(p.cones[0].kind == ConeKind::Soc);
    CHECK(p.cones[0].size == 3);
    Eigen::VectorXd c, h;
    Eigen::MatrixXd G;
    p.assemble(c, G, h);
    CHECK(h(1) == 3.0);
    CHECK(h(2) == 4.0);
}

TEST_CASE("dump/parse round-trips to identical bytes") {
    Rng rng(31);
    for (int rep = 0; rep < 10; ++rep) {
        const auto inst = test::make_known_instance(rng.substream(rep));
        const std::string d1 = dump(inst.prog);
        const ConicProgram back = parse_program(d1);
        const std::string d2 = dump(back);
        CHECK(d1 == d2);
        CHECK(back.num_vars() == inst.prog.num_vars());
        CHECK(back.num_rows() == inst.prog.num_rows());
    }
}

TEST_CASE("awkward doubles survive the text format") {
    ConicProgram p;
    const int x = p.add_var("x", 0.1);
    p.add_nonneg(LinExpr::of(x, 1.0 / 3.0) + LinExpr(1e-300));
    p.add_nonneg(LinExpr::of(x, -2.2250738585072014e-308) + LinExpr(9.999999999999999e22));
    const std::string d1 = dump(p);
    const std::string d2 = dump(parse_program(d1));
    CHECK(d1 == d2);
}

TEST_CASE("structural defects are rejected") {
    ConicProgram p;
    p.add_var("x");
    p.rows.push_back({});
    CHECK_THROWS_AS(p.check_well_formed(), std::invalid_argument); // rows without cones

    ConicProgram q;
    q.add_var("x");
    q.cones.push_back({ConeKind::Soc, 1}); // SOC needs >= 2 rows
    q.rows.push_back({});
    CHECK_THROWS_AS(q.check_well_formed(), std::invalid_argument);

    ConicProgram r;
    r.add_var("x");
    LinExpr bad;
    bad.add(3, 1.0); // variable index out of range
    r.add_nonneg(bad);
    CHECK_THROWS_AS(r.check_well_formed(), std::invalid_argument);
}
