#include "hynoma/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json_util.hpp"

namespace hynoma {

namespace {

double wilson_bound(int pass, int n, bool upper) {
    // 95% Wilson score interval
    const double z = 1.959963984540054;
    const double phat = static_cast<double>(pass) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = phat + z2 / (2.0 * n);
    const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
    return (centre + (upper ? spread : -spread)) / denom;
}

std::uint64_t eval_hash(const EvalConfig& cfg) {
    std::uint64_t h = fnv1a(&cfg.h_error_std, sizeof(double));
    h = fnv1a(&cfg.g_error_std, sizeof(double), h);
    h = fnv1a(&cfg.samples, sizeof(int), h);
    h = fnv1a(&cfg.seed, sizeof(std::uint64_t), h);
    h = fnv1a(&cfg.threshold, sizeof(double), h);
    return h;
}

} // namespace

Eigen::MatrixXd achieved_rates(const RobustDesign& d, const TrueGains& gains,
                               const Eigen::MatrixXd& sic_residual, double noise_var) {
    const int U = static_cast<int>(gains.h2.size());
    Eigen::MatrixXd R = Eigen::MatrixXd::Zero(U, U);
    for (int u = 0; u < U; ++u) {
        for (int t = 0; t <= u; ++t) {
            const double g2 = (u == t) ? 1.0 : gains.g2(u, t);
            const double sig = gains.h2(u) * g2 * d.P(u, t);
            double den = noise_var;
            for (int j = t; j <= u - 1; ++j) den += sic_residual(j, t) * d.P(j, t);
            for (int j = u + 1; j < U; ++j) den += gains.h2(j) * gains.g2(j, t) * d.P(j, t);
            R(u, t) = std::log2(1.0 + sig / den);
        }
    }
    return R;
}

TrueGains sample_gains(const Scenario& s, const EvalConfig& cfg, std::uint64_t draw_index) {
    Rng rng = Rng(cfg.seed, 0x9a1b).substream(draw_index);
    const int U = s.num_users;
    TrueGains g;
    g.h2.resize(U);
    g.g2 = Eigen::MatrixXd::Zero(U, U);
    for (int u = 0; u < U; ++u) {
        const auto [n1, n2] = rng.normal_pair();
        const double re = std::sqrt(s.bs_gain(u)) + cfg.h_error_std * n1;
        const double im = cfg.h_error_std * n2;
        g.h2(u) = std::max(0.0, re * re + im * im);
    }
    for (int t = 0; t < U; ++t)
        for (int j = t + 1; j < U; ++j) {
            const auto [n1, n2] = rng.normal_pair();
            const double re = std::sqrt(s.uu_gain(j, t)) + cfg.g_error_std * n1;
            const double im = cfg.g_error_std * n2;
            g.g2(j, t) = std::max(0.0, re * re + im * im);
        }
    return g;
}

EvalReport pf_montecarlo(const RobustDesign& d, const Scenario& s, const EvalConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("pf_montecarlo: samples must be >= 1");
    const int U = s.num_users;
    const double rate_tol = 1e-9;

    auto count_range = [&](int lo, int hi) {
        int pass = 0;
        for (int k = lo; k < hi; ++k) {
            const TrueGains g = sample_gains(s, cfg, static_cast<std::uint64_t>(k));
            const Eigen::MatrixXd R = achieved_rates(d, g, s.sic_residual, s.noise_var);
            bool all_ok = true;
            for (int u = 0; u < U && all_ok; ++u) {
                double sum = 0.0;
                for (int t = 0; t <= u; ++t) sum += R(u, t);
                if (sum < cfg.threshold - rate_tol) all_ok = false;
            }
            if (all_ok) ++pass;
        }
        return pass;
    };

    int threads = cfg.threads > 0 ? cfg.threads
                                  : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::max(1, std::min(threads, cfg.samples));
    int pass = 0;
    if (threads == 1) {
        pass = count_range(0, cfg.samples);
    } else {
        std::vector<std::future<int>> futs;
        const int chunk = (cfg.samples + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int lo = t * chunk;
            const int hi = std::min(cfg.samples, lo + chunk);
            if (lo >= hi) break;
            futs.push_back(std::async(std::launch::async, count_range, lo, hi));
        }
        for (auto& f : futs) pass += f.get();
    }

    EvalReport rep;
    rep.method = d.method;
    rep.pass_count = pass;
    rep.samples = cfg.samples;
    rep.pf = static_cast<double>(pass) / cfg.samples;
    rep.wilson_lo = wilson_bound(pass, cfg.samples, false);
    rep.wilson_hi = wilson_bound(pass, cfg.samples, true);
    rep.total_power = d.objective;
    rep.config_hash = eval_hash(cfg);
    return rep;
}

RateCdf rate_cdf(const RobustDesign& d, const Scenario& s, const EvalConfig& cfg, int user) {
    if (user < 0 || user >= s.num_users) throw std::out_of_range("rate_cdf: bad user");
    RateCdf cdf;
    cdf.user = user;
    std::vector<double> sums(cfg.samples);
    for (int k = 0; k < cfg.samples; ++k) {
        const TrueGains g = sample_gains(s, cfg, static_cast<std::uint64_t>(k));
        const Eigen::MatrixXd R = achieved_rates(d, g, s.sic_residual, s.noise_var);
        double sum = 0.0;
        for (int t = 0; t <= user; ++t) sum += R(user, t);
        sums[k] = sum;
    }
    std::sort(sums.begin(), sums.end());
    cdf.rate.resize(cfg.samples);
    cdf.probability.resize(cfg.samples);
    for (int k = 0; k < cfg.samples; ++k) {
        cdf.rate(k) = sums[k];
        cdf.probability(k) = static_cast<double>(k + 1) / cfg.samples;
    }
    return cdf;
}

std::string RateCdf::to_csv() const {
    std::ostringstream os;
    os << "rate_bps_hz,probability\n";
    os.precision(17);
    for (int k = 0; k < rate.size(); ++k) os << rate(k) << "," << probability(k) << "\n";
    return os.str();
}

RobustDesign solve_method(const std::string& method, const Scenario& s, const SolveParams& p) {
    if (method == "robust") return algorithm1(s, p);
    if (method == "nominal") return solve_nominal(s, p);
    if (method == "oma1") return solve_oma(s, OmaKind::Poly, p);
    if (method == "oma2") return solve_oma(s, OmaKind::Ball, p);
    throw std::invalid_argument("unknown method '" + method + "'");
}

std::vector<SweepRow> sweep(const SweepConfig& cfg) {
    std::vector<SweepRow> rows;

    struct Cell {
        bool ok = false;
        double power = 0.0;
        int pass = 0;
        int samples = 0;
    };

    for (double value : cfg.grid) {
        GenConfig gen = cfg.gen;
        SolveParams params = cfg.params;
        EvalConfig ev = cfg.eval;
        switch (cfg.axis) {
            case SweepAxis::Threshold:
                params.threshold = value;
                ev.threshold = value;
                break;
            case SweepAxis::GErrorStd: ev.g_error_std = value; break;
            case SweepAxis::CenterOffset: gen.center_offset = value; break;
        }

        auto run_seed = [&](int seed_idx) {
            std::vector<Cell> cells(cfg.methods.size());
            GenConfig g = gen;
            g.rng_seed = cfg.gen.rng_seed + static_cast<std::uint64_t>(seed_idx);
            Scenario s;
            try {
                s = generate_scenario(g);
            } catch (const std::exception&) {
                return cells; // all failed
            }
            EvalConfig ec = ev;
            ec.seed = g.rng_seed;
            ec.threads = 1; // seeds already run in parallel
            for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
                try {
                    const RobustDesign d = solve_method(cfg.methods[mi], s, params);
                    if (d.status == DesignStatus::Feasible ||
                        d.status == DesignStatus::Penalized) {
                        const EvalReport rep = pf_montecarlo(d, s, ec);
                        cells[mi] = {true, d.objective, rep.pass_count, rep.samples};
                    }
                } catch (const std::exception&) {
                    // per-point failures are recorded and the sweep continues
                }
            }
            return cells;
        };

        std::vector<std::future<std::vector<Cell>>> futs;
        futs.reserve(cfg.seeds);
        for (int k = 0; k < cfg.seeds; ++k)
            futs.push_back(std::async(std::launch::async, run_seed, k));

        std::vector<Cell> agg(cfg.methods.size());
        std::vector<int> ok(cfg.methods.size(), 0), failed(cfg.methods.size(), 0);
        for (auto& f : futs) {
            const auto cells = f.get();
            for (std::size_t mi = 0; mi < cells.size(); ++mi) {
                if (cells[mi].ok) {
                    agg[mi].power += cells[mi].power;
                    agg[mi].pass += cells[mi].pass;
                    agg[mi].samples += cells[mi].samples;
                    ++ok[mi];
                } else {
                    ++failed[mi];
                }
            }
        }
        for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
            SweepRow row;
            row.axis_value = value;
            row.method = cfg.methods[mi];
            row.seeds_ok = ok[mi];
            row.seeds_failed = failed[mi];
            if (ok[mi] > 0) {
                row.mean_power = agg[mi].power / ok[mi];
                row.pf = static_cast<double>(agg[mi].pass) / agg[mi].samples;
                row.pf_lo = wilson_bound(agg[mi].pass, agg[mi].samples, false);
                row.pf_hi = wilson_bound(agg[mi].pass, agg[mi].samples, true);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows, SweepAxis axis) {
    std::ostringstream os;
    const char* axis_name = axis == SweepAxis::Threshold    ? "threshold_bps_hz"
                            : axis == SweepAxis::GErrorStd  ? "g_error_std"
                                                            : "center_offset_m";
    os << axis_name << ",method,mean_power_w,pf,pf_lo,pf_hi,seeds_ok,seeds_failed\n";
    os.precision(17);
    for (const auto& r : rows)
        os << r.axis_value << "," << r.method << "," << r.mean_power << "," << r.pf << ","
           << r.pf_lo << "," << r.pf_hi << "," << r.seeds_ok << "," << r.seeds_failed << "\n";
    return os.str();
}

std::string EvalReport::to_json() const {
    nlohmann::json j;
    j["method"] = method;
    j["pf"] = pf;
    j["wilson_95"] = {wilson_lo, wilson_hi};
    j["pass_count"] = pass_count;
    j["samples"] = samples;
    j["total_power_w"] = total_power;
    j["config_hash"] = config_hash;
    return j.dump(2);
}

} // namespace hynoma
