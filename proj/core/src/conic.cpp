#include "hynoma/conic.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hynoma {

LinExpr& LinExpr::operator+=(const LinExpr& o) {
    constant += o.constant;
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    return *this;
}

LinExpr& LinExpr::operator*=(double k) {
    constant *= k;
    for (auto& t : terms) t.second *= k;
    return *this;
}

LinExpr operator-(LinExpr a, const LinExpr& b) {
    LinExpr nb = b;
    nb *= -1.0;
    return a += nb;
}

int ConicProgram::add_var(std::string name, double obj_coeff) {
    obj.push_back(obj_coeff);
    var_names.push_back(std::move(name));
    return static_cast<int>(obj.size()) - 1;
}

void ConicProgram::set_obj(int var, double coeff) { obj.at(var) = coeff; }

namespace {

// slack row: value = expr, i.e. h = expr.constant, G entries = -coeff.
ConicProgram::Row make_row(const LinExpr& expr) {
    ConicProgram::Row r;
    r.h = expr.constant;
    std::map<int, double> combined;
    for (const auto& [v, c] : expr.terms) combined[v] += c;
    r.g.reserve(combined.size());
    for (const auto& [v, c] : combined)
        if (c != 0.0) r.g.emplace_back(v, -c);
    return r;
}

} // namespace

void ConicProgram::add_nonneg(const LinExpr& expr) {
    rows.push_back(make_row(expr));
    cones.push_back({ConeKind::NonNeg, 1});
}

void ConicProgram::add_soc(const LinExpr& head, const std::vector<LinExpr>& rest) {
    rows.push_back(make_row(head));
    for (const auto& e : rest) rows.push_back(make_row(e));
    cones.push_back({ConeKind::Soc, 1 + static_cast<int>(rest.size())});
}

void ConicProgram::add_rsoc(const LinExpr& w, const LinExpr& q, const std::vector<LinExpr>& v) {
    rows.push_back(make_row(w));
    rows.push_back(make_row(q));
    for (const auto& e : v) rows.push_back(make_row(e));
    cones.push_back({ConeKind::Rsoc, 2 + static_cast<int>(v.size())});
}

void ConicProgram::assemble(Eigen::VectorXd& c, Eigen::MatrixXd& G, Eigen::VectorXd& h) const {
    const int n = num_vars();
    const int m = num_rows();
    c.resize(n);
    for (int j = 0; j < n; ++j) c(j) = obj[j];
    G = Eigen::MatrixXd::Zero(m, n);
    h.resize(m);
    for (int i = 0; i < m; ++i) {
        h(i) = rows[i].h;
        for (const auto& [v, g] : rows[i].g) G(i, v) += g;
    }
}

void ConicProgram::check_well_formed() const {
    int total = 0;
    for (const auto& b : cones) {
        if (b.size <= 0) throw std::invalid_argument("conic: empty cone block");
        if (b.kind == ConeKind::Soc && b.size < 2)
            throw std::invalid_argument("conic: SOC block needs at least 2 rows");
        if (b.kind == ConeKind::Rsoc && b.size < 3)
            throw std::invalid_argument("conic: RSOC block needs at least 3 rows");
        total += b.size;
    }
    if (total != num_rows()) throw std::invalid_argument("conic: cone sizes do not match rows");
    for (const auto& r : rows) {
        if (!std::isfinite(r.h)) throw std::invalid_argument("conic: nonfinite rhs");
        for (const auto& [v, g] : r.g) {
            if (v < 0 || v >= num_vars()) throw std::invalid_argument("conic: bad variable index");
            if (!std::isfinite(g)) throw std::invalid_argument("conic: nonfinite coefficient");
        }
    }
    for (double cj : obj)
        if (!std::isfinite(cj)) throw std::invalid_argument("conic: nonfinite objective");
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::PrimalInfeasible: return "primal_infeasible";
        case SolveStatus::DualInfeasible: return "dual_infeasible";
        case SolveStatus::MaxIter: return "max_iter";
        case SolveStatus::NumericalFailure: return "numerical_failure";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Certificate checking

namespace {

double cone_violation_primal(const ConeBlock& blk, const Eigen::VectorXd& v) {
    switch (blk.kind) {
        case ConeKind::NonNeg: return std::max(0.0, -v.minCoeff());
        case ConeKind::Soc: return std::max(0.0, v.tail(v.size() - 1).norm() - v(0));
        case ConeKind::Rsoc: {
            const double w = v(0), q = v(1);
            const double n2 = v.tail(v.size() - 2).squaredNorm();
            double viol = std::max(0.0, std::max(-w, -q));
            if (w >= 0.0 && q >= 0.0)
                viol = std::max(viol, std::max(0.0, std::sqrt(n2) - std::sqrt(w * q)));
            else
                viol = std::max(viol, std::sqrt(n2));
            return viol;
        }
    }
    return 0.0;
}

// Dual of {(w,q,v): wq >= ||v||^2} is {(a,b,c): 4ab >= ||c||^2, a,b >= 0}.
double cone_violation_dual(const ConeBlock& blk, const Eigen::VectorXd& v) {
    switch (blk.kind) {
        case ConeKind::NonNeg:
        case ConeKind::Soc: return cone_violation_primal(blk, v);
        case ConeKind::Rsoc: {
            const double a = v(0), b = v(1);
            const double nrm = v.tail(v.size() - 2).norm();
            double viol = std::max(0.0, std::max(-a, -b));
            if (a >= 0.0 && b >= 0.0)
                viol = std::max(viol, std::max(0.0, nrm - 2.0 * std::sqrt(a * b)));
            else
                viol = std::max(viol, nrm);
            return viol;
        }
    }
    return 0.0;
}

} // namespace

CertificateReport check_certificate(const ConicProgram& prog, const ConicSolution& sol,
                                    double mismatch_tol) {
    Eigen::VectorXd c, h;
    Eigen::MatrixXd G;
    prog.assemble(c, G, h);
    CertificateReport rep;

    if (sol.status == SolveStatus::Optimal || sol.status == SolveStatus::MaxIter) {
        const Eigen::VectorXd s = h - G * sol.x;
        rep.prim_res = (G * sol.x + s - h).norm() / std::max(1.0, h.norm()); // identically 0
        rep.dual_res = (G.transpose() * sol.z + c).norm() / std::max(1.0, c.norm());
        rep.gap = s.dot(sol.z);
        int at = 0;
        for (const auto& blk : prog.cones) {
            rep.prim_cone_viol =
                std::max(rep.prim_cone_viol, cone_violation_primal(blk, s.segment(at, blk.size)));
            rep.dual_cone_viol =
                std::max(rep.dual_cone_viol, cone_violation_dual(blk, sol.z.segment(at, blk.size)));
            at += blk.size;
        }
        const double pobj = c.dot(sol.x);
        const double dobj = -h.dot(sol.z);
        rep.solver_mismatch = std::max({std::abs(pobj - sol.prim_obj), std::abs(dobj - sol.dual_obj),
                                        std::abs(rep.gap - sol.gap)});
        rep.certificate_valid = rep.solver_mismatch <= mismatch_tol;
        return rep;
    }

    if (sol.status == SolveStatus::PrimalInfeasible) {
        // Farkas: z in K*, G^T z = 0, h^T z < 0.
        const double hz = h.dot(sol.z);
        rep.dual_res = (G.transpose() * sol.z).norm() / std::max(1.0, sol.z.norm());
        int at = 0;
        for (const auto& blk : prog.cones) {
            rep.dual_cone_viol =
                std::max(rep.dual_cone_viol, cone_violation_dual(blk, sol.z.segment(at, blk.size)));
            at += blk.size;
        }
        rep.gap = hz;
        rep.certificate_valid = hz < 0.0 && rep.dual_res <= 1e-6 && rep.dual_cone_viol <= 1e-7;
        return rep;
    }

    if (sol.status == SolveStatus::DualInfeasible) {
        // Unboundedness ray: c^T x < 0 and -G x in K.
        const Eigen::VectorXd s = -G * sol.x;
        const double cx = c.dot(sol.x);
        int at = 0;
        for (const auto& blk : prog.cones) {
            rep.prim_cone_viol =
                std::max(rep.prim_cone_viol, cone_violation_primal(blk, s.segment(at, blk.size)));
            at += blk.size;
        }
        rep.gap = cx;
        rep.certificate_valid = cx < 0.0 && rep.prim_cone_viol <= 1e-7 * std::max(1.0, s.norm());
        return rep;
    }

    return rep;
}

std::string CertificateReport::describe() const {
    std::ostringstream os;
    os << "pres=" << prim_res << " dres=" << dual_res << " gap=" << gap
       << " cone(p)=" << prim_cone_viol << " cone(d)=" << dual_cone_viol
       << " mismatch=" << solver_mismatch << " cert=" << (certificate_valid ? "ok" : "invalid");
    return os.str();
}

// ---------------------------------------------------------------------------
// Text dump / parse (exact decimal round-trip)

namespace {

std::string fmt_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(const std::string& tok) {
    double v = 0.0;
    auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        throw std::invalid_argument("conic parse: bad float '" + tok + "'");
    return v;
}

} // namespace

std::string dump(const ConicProgram& prog) {
    std::ostringstream os;
    os << "hynoma-conic v1\n";
    os << "vars " << prog.num_vars() << "\n";
    for (int j = 0; j < prog.num_vars(); ++j)
        os << "var " << (prog.var_names[j].empty() ? "_" : prog.var_names[j]) << " "
           << fmt_double(prog.obj[j]) << "\n";
    os << "rows " << prog.num_rows() << "\n";
    for (const auto& r : prog.rows) {
        os << "row " << fmt_double(r.h) << " " << r.g.size();
        for (const auto& [v, g] : r.g) os << " " << v << " " << fmt_double(g);
        os << "\n";
    }
    os << "cones " << prog.cones.size() << "\n";
    for (const auto& b : prog.cones) {
        const char* k = b.kind == ConeKind::NonNeg ? "nonneg"
                        : b.kind == ConeKind::Soc  ? "soc"
                                                   : "rsoc";
        os << "cone " << k << " " << b.size << "\n";
    }
    return os.str();
}

ConicProgram parse_program(const std::string& text) {
    std::istringstream is(text);
    std::string tok;
    auto expect = [&](const char* what) {
        if (!(is >> tok) || tok != what)
            throw std::invalid_argument(std::string("conic parse: expected '") + what + "'");
    };
    expect("hynoma-conic");
    expect("v1");
    expect("vars");
    int n = 0;
    is >> n;
    ConicProgram p;
    for (int j = 0; j < n; ++j) {
        expect("var");
        std::string name, objtok;
        is >> name >> objtok;
        p.add_var(name == "_" ? "" : name, parse_double(objtok));
    }
    expect("rows");
    int m = 0;
    is >> m;
    for (int i = 0; i < m; ++i) {
        expect("row");
        std::string htok;
        std::size_t nnz = 0;
        is >> htok >> nnz;
        ConicProgram::Row r;
        r.h = parse_double(htok);
        for (std::size_t k = 0; k < nnz; ++k) {
            int v = 0;
            std::string gtok;
            is >> v >> gtok;
            r.g.emplace_back(v, parse_double(gtok));
        }
        p.rows.push_back(std::move(r));
    }
    expect("cones");
    int ncones = 0;
    is >> ncones;
    for (int k = 0; k < ncones; ++k) {
        expect("cone");
        std::string kind;
        int size = 0;
        is >> kind >> size;
        ConeKind ck;
        if (kind == "nonneg")
            ck = ConeKind::NonNeg;
        else if (kind == "soc")
            ck = ConeKind::Soc;
        else if (kind == "rsoc")
            ck = ConeKind::Rsoc;
        else
            throw std::invalid_argument("conic parse: unknown cone kind '" + kind + "'");
        p.cones.push_back({ck, size});
    }
    p.check_well_formed();
    return p;
}

} // namespace hynoma
