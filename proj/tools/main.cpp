#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "hynoma/evaluation.hpp"
#include "hynoma/optimizer.hpp"
#include "hynoma/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNumerical = 4;

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& text) {
    const fs::path p(path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

json section(const json& j, const char* name) {
    return j.contains(name) ? j.at(name) : json::object();
}

hynoma::SolveParams params_from_json(const json& j) {
    hynoma::SolveParams p;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("threshold", p.threshold);
    get("tau0", p.tau0);
    get("xi", p.xi);
    get("tau_max", p.tau_max);
    get("obj_tol", p.obj_tol);
    get("max_outer", p.max_outer);
    get("p_floor", p.p_floor);
    get("pwl_segments", p.pwl_segments);
    get("init_margin", p.init_margin);
    get("freeze_tau", p.freeze_tau);
    get("slack_feasible_tol", p.slack_feasible_tol);
    get("feas_tol", p.solver.feas_tol);
    get("gap_tol", p.solver.gap_tol);
    get("solver_max_iters", p.solver.max_iters);
    if (!(p.threshold > 0.0) || !(p.xi > 0.0 && p.xi < 1.0) || !(p.tau0 > 0.0) ||
        p.tau0 > p.tau_max || !(p.obj_tol > 0.0) || !(p.p_floor > 0.0) || p.pwl_segments < 1)
        throw std::invalid_argument("solve: invalid parameter combination");
    return p;
}

hynoma::EvalConfig eval_from_json(const json& j) {
    hynoma::EvalConfig c;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("h_error_std", c.h_error_std);
    get("g_error_std", c.g_error_std);
    get("samples", c.samples);
    get("seed", c.seed);
    get("threshold", c.threshold);
    get("threads", c.threads);
    if (c.h_error_std < 0.0 || c.g_error_std < 0.0 || c.samples < 1)
        throw std::invalid_argument("eval: invalid configuration");
    return c;
}

int status_exit_code(hynoma::DesignStatus st) {
    switch (st) {
        case hynoma::DesignStatus::Feasible:
        case hynoma::DesignStatus::Penalized: return kExitOk;
        case hynoma::DesignStatus::Infeasible:
        case hynoma::DesignStatus::StructurallyInfeasible: return kExitInfeasible;
        default: return kExitNumerical;
    }
}

int cmd_gen(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out) {
    hynoma::GenConfig cfg;
    if (!config_path.empty()) cfg = hynoma::genconfig_from_json(section(json::parse(read_file(config_path)), "gen").dump());
    if (seed) cfg.rng_seed = *seed;
    const hynoma::Scenario s = hynoma::generate_scenario(cfg);
    write_file(out, hynoma::scenario_to_json(s));
    const auto diag = hynoma::validate_scenario(s);
    std::cout << "scenario written to " << out << "\n" << diag.summary();
    return kExitOk;
}

int cmd_solve(const std::string& scenario_path, const std::string& config_path,
              const std::string& method, std::optional<double> tol, const std::string& out,
              const std::string& trace_out) {
    const hynoma::Scenario s = hynoma::scenario_from_json(read_file(scenario_path));
    hynoma::SolveParams p;
    if (!config_path.empty())
        p = params_from_json(section(json::parse(read_file(config_path)), "solve"));
    if (tol) p.obj_tol = *tol;
    const hynoma::RobustDesign d = hynoma::solve_method(method, s, p);
    write_file(out, d.to_json());
    if (!trace_out.empty()) write_file(trace_out, d.trace_csv());
    std::cout << "method=" << d.method << " status=" << hynoma::to_string(d.status)
              << " power_w=" << d.objective << " iterations=" << d.iterations << "\n";
    return status_exit_code(d.status);
}

int cmd_eval(const std::string& scenario_path, const std::vector<std::string>& design_paths,
             const std::string& config_path, const std::string& out, int cdf_user,
             const std::string& cdf_out) {
    const hynoma::Scenario s = hynoma::scenario_from_json(read_file(scenario_path));
    hynoma::EvalConfig cfg;
    if (!config_path.empty())
        cfg = eval_from_json(section(json::parse(read_file(config_path)), "eval"));
    std::ostringstream csv;
    csv << "method,pf,pf_lo,pf_hi,pass,samples,total_power_w,config_hash\n";
    csv.precision(17);
    for (const auto& path : design_paths) {
        const hynoma::RobustDesign d = hynoma::RobustDesign::from_json(read_file(path));
        const hynoma::EvalReport rep = hynoma::pf_montecarlo(d, s, cfg);
        csv << rep.method << "," << rep.pf << "," << rep.wilson_lo << "," << rep.wilson_hi << ","
            << rep.pass_count << "," << rep.samples << "," << rep.total_power << ","
            << rep.config_hash << "\n";
        if (!cdf_out.empty()) {
            const hynoma::RateCdf cdf = hynoma::rate_cdf(d, s, cfg, cdf_user);
            const fs::path p(cdf_out);
            fs::path named = p;
            named.replace_filename(p.stem().string() + "_" + rep.method + p.extension().string());
            write_file(named.string(), cdf.to_csv());
        }
    }
    write_file(out, csv.str());
    std::cout << "evaluation written to " << out << "\n";
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, std::optional<std::uint64_t> seed,
              const std::string& out) {
    const json root = json::parse(read_file(config_path));
    hynoma::SweepConfig sc;
    if (root.contains("gen")) sc.gen = hynoma::genconfig_from_json(root.at("gen").dump());
    sc.params = params_from_json(section(root, "solve"));
    sc.eval = eval_from_json(section(root, "eval"));
    const json sw = section(root, "sweep");
    if (seed) sc.gen.rng_seed = *seed;
    const std::string axis = sw.value("axis", std::string("threshold"));
    if (axis == "threshold")
        sc.axis = hynoma::SweepAxis::Threshold;
    else if (axis == "g_error_std")
        sc.axis = hynoma::SweepAxis::GErrorStd;
    else if (axis == "center_offset")
        sc.axis = hynoma::SweepAxis::CenterOffset;
    else
        throw std::invalid_argument("sweep.axis must be threshold | g_error_std | center_offset");
    if (!sw.contains("grid")) throw std::invalid_argument("sweep.grid missing");
    for (const auto& v : sw.at("grid")) sc.grid.push_back(v.get<double>());
    sc.seeds = sw.value("seeds", 10);
    if (sw.contains("methods")) {
        sc.methods.clear();
        for (const auto& m : sw.at("methods")) sc.methods.push_back(m.get<std::string>());
    }
    if (sc.grid.empty() || sc.seeds < 1 || sc.methods.empty())
        throw std::invalid_argument("sweep: empty grid, seeds, or methods");
    const auto rows = hynoma::sweep(sc);
    write_file(out, hynoma::sweep_to_csv(rows, sc.axis));
    std::cout << "sweep written to " << out << " (" << rows.size() << " rows)\n";
    return kExitOk;
}

int cmd_report(const std::string& design_path) {
    const hynoma::RobustDesign d = hynoma::RobustDesign::from_json(read_file(design_path));
    std::cout << "method: " << d.method << "\nstatus: " << hynoma::to_string(d.status)
              << "\nthreshold: " << d.threshold << " b/s/Hz\ntotal power: " << d.objective
              << " W\niterations: " << d.iterations << "\nmax slack: " << d.max_slack << "\n";
    const int U = static_cast<int>(d.slot_power.size());
    for (int u = 0; u < U; ++u) {
        std::cout << "user " << u << ": P=" << d.slot_power(u) << " W";
        std::ostringstream splits, betas;
        for (int t = 0; t <= u; ++t) splits << (t ? " " : "") << d.t_split(u, t);
        for (int t = 0; t < u; ++t) betas << (t ? " " : "") << d.beta(u, t);
        std::cout << "  rate split: [" << splits.str() << "]";
        if (u > 0) std::cout << "  beta: [" << betas.str() << "]";
        std::cout << "\n";
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Worst-case robust power allocation for BackCom-assisted hybrid NOMA"};
    app.require_subcommand(1);

    std::string config, out, scenario, method = "robust", trace_out, cdf_out, design;
    std::vector<std::string> designs;
    std::optional<std::uint64_t> seed;
    std::optional<double> tol;
    int cdf_user = 0;

    auto* gen = app.add_subcommand("gen", "Generate a scenario file");
    gen->add_option("--config", config, "pipeline config JSON");
    gen->add_option("--seed", seed, "scenario seed");
    gen->add_option("--out", out, "output scenario JSON")->required();

    auto* solve = app.add_subcommand("solve", "Optimize one method on a scenario");
    solve->add_option("--scenario", scenario, "scenario JSON")->required();
    solve->add_option("--config", config, "pipeline config JSON");
    solve->add_option("--method", method, "robust | nominal | oma1 | oma2");
    solve->add_option("--tol", tol, "objective convergence tolerance");
    solve->add_option("--out", out, "output design JSON")->required();
    solve->add_option("--trace", trace_out, "iteration trace CSV");

    auto* eval = app.add_subcommand("eval", "Monte Carlo evaluation of designs");
    eval->add_option("--scenario", scenario, "scenario JSON")->required();
    eval->add_option("--design", designs, "design JSON (repeatable)")->required();
    eval->add_option("--config", config, "pipeline config JSON");
    eval->add_option("--out", out, "report CSV")->required();
    eval->add_option("--cdf-user", cdf_user, "user index for rate CDF output");
    eval->add_option("--cdf-out", cdf_out, "rate CDF CSV basename");

    auto* sweep = app.add_subcommand("sweep", "Parameter sweep across seeds and methods");
    sweep->add_option("--config", config, "pipeline config JSON")->required();
    sweep->add_option("--seed", seed, "base scenario seed");
    sweep->add_option("--out", out, "sweep table CSV")->required();

    auto* report = app.add_subcommand("report", "Summarize a design file");
    report->add_option("--design", design, "design JSON")->required();

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen(config, seed, out);
        if (solve->parsed()) return cmd_solve(scenario, config, method, tol, out, trace_out);
        if (eval->parsed()) return cmd_eval(scenario, designs, config, out, cdf_user, cdf_out);
        if (sweep->parsed()) return cmd_sweep(config, seed, out);
        if (report->parsed()) return cmd_report(design);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? kExitConfig : kExitOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitConfig;
}
