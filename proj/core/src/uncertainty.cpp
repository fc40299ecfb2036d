#include "hynoma/uncertainty.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hynoma {

namespace {

void require_bounded(const PolySet& set) {
    const int L = set.dim();
    if (set.A.rows() != L || set.A.cols() != L || set.B.rows() != L || set.B.cols() != L ||
        set.u.size() != L) {
        throw std::invalid_argument("PolySet dimension mismatch");
    }
    if (!poly_is_bounded(set)) {
        throw std::invalid_argument("uncertainty polyhedron is unbounded");
    }
}

} // namespace

bool PolySet::is_diagonal() const {
    const int L = dim();
    for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
            if (i != j && (A(i, j) != 0.0 || B(i, j) != 0.0)) return false;
        }
    }
    return true;
}

bool poly_is_bounded(const PolySet& set) {
    const int L = set.dim();
    if (set.is_diagonal()) {
        for (int i = 0; i < L; ++i)
            if (!(set.A(i, i) > 0.0) || !(set.B(i, i) > 0.0)) return false;
        return true;
    }
    // M d >= 0 with M = [A; -B]; the cone is pointed whenever A is injective,
    // so a nontrivial cone exposes an extreme ray on some subset of rows.
    Eigen::MatrixXd M(2 * L, L);
    M.topRows(L) = set.A;
    M.bottomRows(L) = -set.B;
    Eigen::VectorXd row_norm(2 * L);
    for (int i = 0; i < 2 * L; ++i) row_norm(i) = M.row(i).norm();

    auto in_cone = [&](const Eigen::VectorXd& d) {
        if (d.norm() < 1e-12) return false;
        const Eigen::VectorXd md = M * d;
        for (int i = 0; i < 2 * L; ++i)
            if (md(i) < -1e-9 * row_norm(i) * d.norm()) return false;
        return true;
    };

    // all active-row subsets of size 0..L-1
    for (unsigned mask = 0; mask < (1u << (2 * L)); ++mask) {
        const int k = __builtin_popcount(mask);
        if (k >= L) continue;
        std::vector<Eigen::VectorXd> cands;
        if (k == 0) {
            for (int i = 0; i < L; ++i) cands.push_back(Eigen::VectorXd::Unit(L, i));
        } else {
            Eigen::MatrixXd S(k, L);
            int r = 0;
            for (int i = 0; i < 2 * L; ++i)
                if (mask & (1u << i)) S.row(r++) = M.row(i);
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(S, Eigen::ComputeFullV);
            const double smax = svd.singularValues()(0);
            int rank = 0;
            for (int i = 0; i < svd.singularValues().size(); ++i)
                if (svd.singularValues()(i) > 1e-10 * std::max(1.0, smax)) ++rank;
            for (int i = rank; i < L; ++i) cands.push_back(svd.matrixV().col(i));
        }
        // pairwise sums catch rays interior to degenerate null spaces
        const std::size_t nb = cands.size();
        for (std::size_t i = 0; i < nb; ++i)
            for (std::size_t j = i + 1; j < nb; ++j) cands.push_back(cands[i] + cands[j]);
        for (const auto& d : cands) {
            if (in_cone(d) || in_cone(-d)) return false;
        }
    }
    return true;
}

bool membership(const PolySet& set, const Eigen::VectorXd& gamma, double tol) {
    const Eigen::VectorXd ag = set.A * gamma;
    const Eigen::VectorXd bg = set.B * gamma;
    for (int i = 0; i < set.dim(); ++i) {
        if (ag(i) < -set.l(i) - tol) return false;
        if (bg(i) > set.u(i) + tol) return false;
    }
    return true;
}

bool membership(const BallSet& set, const Eigen::VectorXd& gamma, double tol) {
    return gamma.norm() <= set.radius + tol;
}

double worst_linear_poly(const Eigen::VectorXd& c, const PolySet& set, Sense sense) {
    require_bounded(set);
    if (set.is_diagonal()) {
        double v = 0.0;
        for (int i = 0; i < set.dim(); ++i) {
            const double lo = -set.l(i) / set.A(i, i);
            const double hi = set.u(i) / set.B(i, i);
            const double a = c(i) * lo;
            const double b = c(i) * hi;
            v += (sense == Sense::Min) ? std::min(a, b) : std::max(a, b);
        }
        return v;
    }
    const auto verts = poly_vertices(set);
    if (verts.empty()) throw std::runtime_error("polyhedron has no vertices");
    double best = c.dot(verts.front());
    for (const auto& v : verts) {
        const double val = c.dot(v);
        best = (sense == Sense::Min) ? std::min(best, val) : std::max(best, val);
    }
    return best;
}

double worst_linear_ball(const Eigen::VectorXd& c, const BallSet& set, Sense sense) {
    const double v = set.radius * c.norm();
    return (sense == Sense::Min) ? -v : v;
}

std::vector<Eigen::VectorXd> poly_vertices(const PolySet& set) {
    require_bounded(set);
    const int L = set.dim();
    // Stack the 2L facet equalities: rows of A with rhs -l, rows of B with rhs u.
    Eigen::MatrixXd M(2 * L, L);
    Eigen::VectorXd r(2 * L);
    M.topRows(L) = set.A;
    r.head(L) = -set.l;
    M.bottomRows(L) = set.B;
    r.tail(L) = set.u;

    const double feas_tol = 1e-9;
    std::vector<Eigen::VectorXd> verts;
    std::vector<int> pick(L);
    // Enumerate all L-subsets of the 2L facets in lexicographic order.
    for (unsigned mask = 0; mask < (1u << (2 * L)); ++mask) {
        if (__builtin_popcount(mask) != L) continue;
        int k = 0;
        for (int i = 0; i < 2 * L; ++i)
            if (mask & (1u << i)) pick[k++] = i;
        Eigen::MatrixXd S(L, L);
        Eigen::VectorXd b(L);
        for (int i = 0; i < L; ++i) {
            S.row(i) = M.row(pick[i]);
            b(i) = r(pick[i]);
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
        if (!lu.isInvertible()) continue;
        Eigen::VectorXd x = lu.solve(b);
        // Keep if it satisfies every facet.
        bool ok = true;
        const Eigen::VectorXd ax = set.A * x;
        const Eigen::VectorXd bx = set.B * x;
        for (int i = 0; i < L && ok; ++i) {
            if (ax(i) < -set.l(i) - feas_tol) ok = false;
            if (bx(i) > set.u(i) + feas_tol) ok = false;
        }
        if (!ok) continue;
        bool dup = false;
        for (const auto& v : verts) {
            if ((v - x).lpNorm<Eigen::Infinity>() < 1e-9 * (1.0 + x.lpNorm<Eigen::Infinity>())) {
                dup = true;
                break;
            }
        }
        if (!dup) verts.push_back(std::move(x));
    }
    return verts;
}

void poly_bounds(const PolySet& set, Eigen::VectorXd& lo, Eigen::VectorXd& hi) {
    const int L = set.dim();
    lo.resize(L);
    hi.resize(L);
    if (set.is_diagonal()) {
        for (int i = 0; i < L; ++i) {
            lo(i) = -set.l(i) / set.A(i, i);
            hi(i) = set.u(i) / set.B(i, i);
        }
        return;
    }
    const auto verts = poly_vertices(set);
    if (verts.empty()) throw std::runtime_error("polyhedron has no vertices");
    lo.setConstant(std::numeric_limits<double>::infinity());
    hi.setConstant(-std::numeric_limits<double>::infinity());
    for (const auto& v : verts) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
}

std::vector<Eigen::VectorXd> sample_poly(const PolySet& set, int n, Rng rng) {
    std::vector<Eigen::VectorXd> out;
    if (n <= 0) return out;
    Eigen::VectorXd lo, hi;
    poly_bounds(set, lo, hi);
    const int L = set.dim();
    out.reserve(n);
    long attempts = 0;
    Eigen::VectorXd x(L);
    while (static_cast<int>(out.size()) < n) {
        ++attempts;
        for (int i = 0; i < L; ++i) x(i) = rng.uniform(lo(i), hi(i));
        if (membership(set, x, 0.0)) out.push_back(x);
        if (attempts >= 10000 && static_cast<long>(out.size()) < attempts / 1000) {
            throw std::runtime_error(
                "sample_poly: rejection rate above 0.999; use a hit-and-run walk for this set");
        }
    }
    return out;
}

std::vector<Eigen::VectorXd> sample_poly_hit_and_run(const PolySet& set, int n, Rng rng,
                                                     int thin) {
    std::vector<Eigen::VectorXd> out;
    if (n <= 0) return out;
    require_bounded(set);
    const int L = set.dim();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(L); // interior for l, u > 0
    Eigen::VectorXd d(L);
    out.reserve(n);
    while (static_cast<int>(out.size()) < n) {
        for (int step = 0; step < thin; ++step) {
            for (int i = 0; i < L; ++i) d(i) = rng.normal_pair().first;
            if (d.norm() < 1e-12) continue;
            // feasible segment x + t d from the 2L facets
            double tlo = -1e300, thi = 1e300;
            const Eigen::VectorXd Ad = set.A * d, Ax = set.A * x;
            const Eigen::VectorXd Bd = set.B * d, Bx = set.B * x;
            for (int i = 0; i < L; ++i) {
                if (Ad(i) > 0.0)
                    tlo = std::max(tlo, (-set.l(i) - Ax(i)) / Ad(i));
                else if (Ad(i) < 0.0)
                    thi = std::min(thi, (-set.l(i) - Ax(i)) / Ad(i));
                if (Bd(i) > 0.0)
                    thi = std::min(thi, (set.u(i) - Bx(i)) / Bd(i));
                else if (Bd(i) < 0.0)
                    tlo = std::max(tlo, (set.u(i) - Bx(i)) / Bd(i));
            }
            if (!(tlo <= thi) || !std::isfinite(tlo) || !std::isfinite(thi)) continue;
            x += rng.uniform(tlo, thi) * d;
        }
        out.push_back(x);
    }
    return out;
}

std::vector<Eigen::VectorXd> sample_ball(const BallSet& set, int dim, int n, Rng rng) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(std::max(n, 0));
    Eigen::VectorXd x(dim);
    for (int k = 0; k < n; ++k) {
        double norm2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            x(i) = rng.normal_pair().first;
            norm2 += x(i) * x(i);
        }
        const double nrm = std::sqrt(std::max(norm2, 1e-300));
        const double r = set.radius * std::pow(rng.uniform(), 1.0 / dim);
        out.push_back(x * (r / nrm));
    }
    return out;
}

double worst_bilinear_product(double h2, const Eigen::VectorXd& alpha, const PolySet& poly,
                              double g2, const Eigen::VectorXd& kappa, const BallSet& ball,
                              Sense sense) {
    const double f1_lo = h2 + worst_linear_poly(alpha, poly, Sense::Min);
    const double f1_hi = h2 + worst_linear_poly(alpha, poly, Sense::Max);
    const double span = ball.radius * kappa.norm();

    auto value = [&](double f1) {
        return (sense == Sense::Min) ? f1 * g2 - std::abs(f1) * span
                                     : f1 * g2 + std::abs(f1) * span;
    };
    double best = value(f1_lo);
    best = (sense == Sense::Min) ? std::min(best, value(f1_hi)) : std::max(best, value(f1_hi));
    if (f1_lo < 0.0 && 0.0 < f1_hi) {
        best = (sense == Sense::Min) ? std::min(best, 0.0) : std::max(best, 0.0);
    }
    return best;
}

} // namespace hynoma
