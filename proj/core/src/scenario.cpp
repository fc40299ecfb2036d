#include "hynoma/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "json_util.hpp"

namespace hynoma {

namespace {

constexpr int kGeometryRetries = 1000;
constexpr int kSetRetries = 200;
constexpr double kMinBsDistance = 1.0;   // m
constexpr double kMinUserGap = 0.05;     // m
// Worst-case own-link gain must retain at least this fraction of nominal,
// otherwise the robust problem is ill-posed for the drawn set (see notes
// in the generator below).
constexpr double kMinRetainedGain = 0.05;

void check_interval(const Interval& iv, const char* name, bool strict_lo) {
    if (!(iv.lo <= iv.hi)) throw std::invalid_argument(std::string(name) + ": empty interval");
    if (iv.lo < 0.0 || (strict_lo && iv.lo < 0.0))
        throw std::invalid_argument(std::string(name) + ": negative lower end");
}

Eigen::VectorXd draw_uniform_vec(Rng& rng, int n, double lo, double hi) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform(lo, hi);
    return v;
}

} // namespace

void GenConfig::validate() const {
    if (num_users < 1) throw std::invalid_argument("num_users must be >= 1");
    if (error_dims < 1) throw std::invalid_argument("error_dims must be >= 1");
    if (!(square_side > 0.0)) throw std::invalid_argument("square_side must be positive");
    if (!(center_offset > 0.0)) throw std::invalid_argument("center_offset must be positive");
    if (!(noise_var > 0.0)) throw std::invalid_argument("noise_var must be positive");
    if (ball_radius < 0.0) throw std::invalid_argument("ball_radius must be nonnegative");
    if (!(u_factor > 0.0)) throw std::invalid_argument("u_factor must be positive");
    check_interval(sic_residual_range, "sic_residual_range", false);
    check_interval(shift_range, "shift_range", false);
    check_interval(l_range, "l_range", false);
    if (!(l_range.lo > 0.0)) throw std::invalid_argument("l_range lower end must be positive");
}

double Scenario::worst_bs_gain(int u, Sense sense) const {
    return bs_gain(u) + worst_linear_poly(alpha[u], poly[u], sense);
}

double Scenario::worst_link_gain(int u, int t, Sense sense) const {
    const int hi = std::max(u, t);
    const int lo = std::min(u, t);
    // Links are indexed by (user, slot); the user's own set perturbs |h|^2
    // and the pair's ball perturbs |g|^2.
    const Eigen::VectorXd kap = kappa_at(hi, lo);
    return worst_bilinear_product(bs_gain(hi), alpha[hi], poly[hi], uu_gain_at(hi, lo), kap,
                                  BallSet{ball_radius}, sense);
}

Scenario Scenario::without_uncertainty() const {
    Scenario s = *this;
    s.ball_radius = 0.0;
    for (auto& a : s.alpha) a.setZero();
    for (auto& row : s.kappa)
        for (auto& k : row) k.setZero();
    return s;
}

std::string DiagnosticsReport::summary() const {
    std::ostringstream os;
    os << "links=" << links.size() << " feasible=" << (all_feasible ? "yes" : "no") << "\n";
    for (const auto& d : links) {
        os << "  (u=" << d.u << ",t=" << d.t << ") nominal=" << d.nominal_product
           << " worst=" << d.worst_product << (d.feasible ? "" : "  [structurally infeasible]")
           << "\n";
    }
    return os.str();
}

Scenario generate_scenario(const GenConfig& cfg) {
    cfg.validate();
    const int U = cfg.num_users;
    const int L = cfg.error_dims;
    Rng rng(cfg.rng_seed, /*stream=*/0x5ce7a210);

    // Geometry: users uniform in the square of side r_p centred at (r_c, r_c),
    // base station at the origin. Degenerate draws are redone.
    std::vector<Eigen::Vector2d> pos(U);
    const double lo = cfg.center_offset - 0.5 * cfg.square_side;
    const double hi = cfg.center_offset + 0.5 * cfg.square_side;
    for (int i = 0; i < U; ++i) {
        int tries = 0;
        for (;;) {
            if (++tries > kGeometryRetries)
                throw std::runtime_error("generate_scenario: could not place user (degenerate geometry)");
            pos[i] = {rng.uniform(lo, hi), rng.uniform(lo, hi)};
            if (pos[i].norm() < kMinBsDistance) continue;
            bool clash = false;
            for (int j = 0; j < i; ++j)
                if ((pos[i] - pos[j]).norm() < kMinUserGap) clash = true;
            if (!clash) break;
        }
    }

    // Rayleigh links to the BS with distance-dependent path loss.
    Eigen::VectorXd h2(U);
    for (int i = 0; i < U; ++i) {
        const auto [n1, n2] = rng.normal_pair();
        const double cn2 = 0.5 * (n1 * n1 + n2 * n2);
        h2(i) = std::pow(pos[i].norm(), -cfg.pathloss_exp_bs) * cn2;
    }

    // Decreasing-gain user order; ties broken by draw index.
    std::vector<int> order(U);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return h2(a) > h2(b); });

    Scenario s;
    s.num_users = U;
    s.error_dims = L;
    s.noise_var = cfg.noise_var;
    s.ball_radius = cfg.ball_radius;
    s.bs_gain.resize(U);
    std::vector<Eigen::Vector2d> sorted_pos(U);
    for (int i = 0; i < U; ++i) {
        s.bs_gain(i) = h2(order[i]);
        sorted_pos[i] = pos[order[i]];
    }

    // Rician inter-user links (LOS phase 0; only gains are retained).
    const double K = std::pow(10.0, cfg.rician_k_db / 10.0);
    const double los = std::sqrt(K / (K + 1.0));
    const double nlos = std::sqrt(1.0 / (K + 1.0));
    s.uu_gain = Eigen::MatrixXd::Zero(U, U);
    for (int u = 1; u < U; ++u) {
        for (int t = 0; t < u; ++t) {
            const double d = (sorted_pos[u] - sorted_pos[t]).norm();
            const auto [n1, n2] = rng.normal_pair();
            const double re = los + nlos * n1 / std::sqrt(2.0);
            const double im = nlos * n2 / std::sqrt(2.0);
            s.uu_gain(u, t) = std::pow(d, -cfg.pathloss_exp_uu) * (re * re + im * im);
        }
    }

    // Per-user uncertainty data. Shift vectors are scaled by the nominal
    // gain they perturb, so the polyhedron expresses fractional gain error;
    // draws whose worst case wipes out the link are redone like any other
    // degenerate draw.
    s.alpha.resize(U);
    s.poly.resize(U);
    for (int u = 0; u < U; ++u) {
        int tries = 0;
        for (;;) {
            if (++tries > kSetRetries)
                throw std::runtime_error(
                    "generate_scenario: no structurally feasible uncertainty set for user " +
                    std::to_string(u));
            Eigen::MatrixXd Abar(L, L), Bbar(L, L);
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j) Abar(i, j) = rng.uniform(0.5, 20.0);
            for (int i = 0; i < L; ++i)
                for (int j = 0; j < L; ++j) Bbar(i, j) = rng.uniform(0.5, 20.0);
            PolySet set;
            if (cfg.uncertainty_mode == UncertaintyMode::Diagonal) {
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ea(Abar.transpose() * Abar);
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eb(Bbar.transpose() * Bbar);
                set.A = ea.eigenvalues().asDiagonal();
                set.B = eb.eigenvalues().asDiagonal();
            } else {
                set.A = Abar.transpose() * Abar;
                set.B = Bbar.transpose() * Bbar;
            }
            set.l = draw_uniform_vec(rng, L, cfg.l_range.lo, cfg.l_range.hi);
            set.u = cfg.u_factor * set.l;
            if (!poly_is_bounded(set)) continue; // dense pairs are often unbounded
            const Eigen::VectorXd shift =
                s.bs_gain(u) * draw_uniform_vec(rng, L, cfg.shift_range.lo, cfg.shift_range.hi);
            const double worst = s.bs_gain(u) + worst_linear_poly(shift, set, Sense::Min);
            if (worst < kMinRetainedGain * s.bs_gain(u)) continue;
            s.poly[u] = std::move(set);
            s.alpha[u] = shift;
            break;
        }
    }

    s.kappa.resize(U);
    for (int u = 0; u < U; ++u) {
        s.kappa[u].resize(u);
        for (int t = 0; t < u; ++t) {
            s.kappa[u][t] = s.uu_gain(u, t) *
                            draw_uniform_vec(rng, L, cfg.shift_range.lo, cfg.shift_range.hi);
        }
    }

    s.sic_residual = Eigen::MatrixXd::Zero(U, U);
    for (int j = 0; j < U; ++j)
        for (int t = 0; t <= j; ++t)
            s.sic_residual(j, t) = rng.uniform(cfg.sic_residual_range.lo, cfg.sic_residual_range.hi);

    return s;
}

DiagnosticsReport validate_scenario(const Scenario& s) {
    DiagnosticsReport rep;
    rep.all_feasible = true;
    for (int u = 0; u < s.num_users; ++u) {
        for (int t = 0; t <= u; ++t) {
            LinkDiagnostic d;
            d.u = u;
            d.t = t;
            d.nominal_product = s.bs_gain(u) * s.uu_gain_at(u, t);
            d.worst_product = s.worst_link_gain(u, t, Sense::Min);
            d.feasible = d.worst_product > 0.0;
            rep.all_feasible = rep.all_feasible && d.feasible;
            rep.links.push_back(d);
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

using nlohmann::json;
using detail::mat_from_json;
using detail::mat_to_json;
using detail::vec_from_json;
using detail::vec_to_json;

constexpr int kScenarioFormatVersion = 1;

} // namespace

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["format_version"] = kScenarioFormatVersion;
    j["num_users"] = s.num_users;
    j["error_dims"] = s.error_dims;
    j["noise_var"] = s.noise_var;
    j["ball_radius"] = s.ball_radius;
    j["bs_gain"] = vec_to_json(s.bs_gain);
    j["uu_gain"] = mat_to_json(s.uu_gain);
    j["sic_residual"] = mat_to_json(s.sic_residual);
    json alphas = json::array();
    for (const auto& a : s.alpha) alphas.push_back(vec_to_json(a));
    j["alpha"] = std::move(alphas);
    json kappas = json::array();
    for (int u = 0; u < s.num_users; ++u) {
        json row = json::array();
        for (int t = 0; t < u; ++t) row.push_back(vec_to_json(s.kappa[u][t]));
        kappas.push_back(std::move(row));
    }
    j["kappa"] = std::move(kappas);
    json sets = json::array();
    for (const auto& p : s.poly) {
        json set;
        set["A"] = mat_to_json(p.A);
        set["B"] = mat_to_json(p.B);
        set["l"] = vec_to_json(p.l);
        set["u"] = vec_to_json(p.u);
        sets.push_back(std::move(set));
    }
    j["poly"] = std::move(sets);
    return j.dump(2);
}

Scenario scenario_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.at("format_version").get<int>() != kScenarioFormatVersion)
        throw std::invalid_argument("unsupported scenario format version");
    Scenario s;
    s.num_users = j.at("num_users").get<int>();
    s.error_dims = j.at("error_dims").get<int>();
    s.noise_var = j.at("noise_var").get<double>();
    s.ball_radius = j.at("ball_radius").get<double>();
    s.bs_gain = vec_from_json(j.at("bs_gain"));
    s.uu_gain = mat_from_json(j.at("uu_gain"));
    s.sic_residual = mat_from_json(j.at("sic_residual"));
    for (const auto& a : j.at("alpha")) s.alpha.push_back(vec_from_json(a));
    s.kappa.resize(s.num_users);
    for (int u = 0; u < s.num_users; ++u) {
        const auto& row = j.at("kappa")[u];
        for (int t = 0; t < u; ++t) s.kappa[u].push_back(vec_from_json(row[t]));
    }
    for (const auto& set : j.at("poly")) {
        PolySet p;
        p.A = mat_from_json(set.at("A"));
        p.B = mat_from_json(set.at("B"));
        p.l = vec_from_json(set.at("l"));
        p.u = vec_from_json(set.at("u"));
        s.poly.push_back(std::move(p));
    }
    return s;
}

std::string genconfig_to_json(const GenConfig& c) {
    json j;
    j["num_users"] = c.num_users;
    j["error_dims"] = c.error_dims;
    j["square_side"] = c.square_side;
    j["center_offset"] = c.center_offset;
    j["rician_k_db"] = c.rician_k_db;
    j["pathloss_exp_bs"] = c.pathloss_exp_bs;
    j["pathloss_exp_uu"] = c.pathloss_exp_uu;
    j["noise_var"] = c.noise_var;
    j["rng_seed"] = c.rng_seed;
    j["uncertainty_mode"] = c.uncertainty_mode == UncertaintyMode::Diagonal ? "diagonal" : "dense";
    j["ball_radius"] = c.ball_radius;
    j["sic_residual_range"] = {c.sic_residual_range.lo, c.sic_residual_range.hi};
    j["shift_range"] = {c.shift_range.lo, c.shift_range.hi};
    j["l_range"] = {c.l_range.lo, c.l_range.hi};
    j["u_factor"] = c.u_factor;
    return j.dump(2);
}

GenConfig genconfig_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config parse error: ") + e.what());
    }
    GenConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("num_users", c.num_users);
    get("error_dims", c.error_dims);
    get("square_side", c.square_side);
    get("center_offset", c.center_offset);
    get("rician_k_db", c.rician_k_db);
    get("pathloss_exp_bs", c.pathloss_exp_bs);
    get("pathloss_exp_uu", c.pathloss_exp_uu);
    get("noise_var", c.noise_var);
    get("rng_seed", c.rng_seed);
    get("ball_radius", c.ball_radius);
    get("u_factor", c.u_factor);
    if (j.contains("uncertainty_mode")) {
        const auto m = j.at("uncertainty_mode").get<std::string>();
        if (m == "diagonal")
            c.uncertainty_mode = UncertaintyMode::Diagonal;
        else if (m == "dense")
            c.uncertainty_mode = UncertaintyMode::Dense;
        else
            throw std::invalid_argument("uncertainty_mode: expected \"diagonal\" or \"dense\"");
    }
    auto get_interval = [&](const char* key, Interval& iv) {
        if (!j.contains(key)) return;
        const auto& a = j.at(key);
        if (!a.is_array() || a.size() != 2)
            throw std::invalid_argument(std::string(key) + ": expected [lo, hi]");
        iv.lo = a[0].get<double>();
        iv.hi = a[1].get<double>();
    };
    get_interval("sic_residual_range", c.sic_residual_range);
    get_interval("shift_range", c.shift_range);
    get_interval("l_range", c.l_range);
    c.validate();
    return c;
}

} // namespace hynoma
