// Command-line front end: graph counting, commutator expansions, scaling
// sweeps, marginal convergence, Hartree trajectories, and smoothing-constant
// checks.  Exit codes: 0 success, 2 configuration error, 3 budget guard.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "mfl/counting.hpp"
#include "mfl/errors.hpp"
#include "mfl/graphs.hpp"
#include "mfl/hartree.hpp"
#include "mfl/kato.hpp"
#include "mfl/lab.hpp"

namespace {

using json = nlohmann::json;

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out;
    std::string format = "json";
};

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_output(std::string body, const std::string& out) {
    if (body.empty() || body.back() != '\n') body.push_back('\n');
    if (out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot open output file " + out);
    f << body;
    if (!f) throw std::runtime_error("write failed for " + out);
}

mfl::ExperimentConfig load_with_overrides(const std::string& path,
                                          const GlobalOpts& g) {
    mfl::ExperimentConfig cfg = mfl::load_config(path);
    if (g.seed_set) cfg.observable.seed = g.seed;
    return cfg;
}

std::string resolve_out(const GlobalOpts& g, const mfl::ExperimentConfig& cfg) {
    return g.out.empty() ? cfg.output_path : g.out;
}

void run_graph_count(int p, int k, int l, std::optional<int> m,
                     const GlobalOpts& g) {
    std::string count, bound;
    if (m) {
        const auto census = mfl::structure_census(p, k, /*with_potential=*/true);
        const auto it = census.structures.find({l, *m});
        count = std::to_string(it == census.structures.end() ? 0 : it->second);
        bound = mfl::counting::potential_structure_bound(p, k, l, *m).str();
    } else {
        count = mfl::count_structures(p, k, l).str();
        bound = mfl::counting::loop_structure_bound(p, k, l).str();
    }
    if (g.format == "csv") {
        std::ostringstream out;
        out << "p,k,l,m,count,bound\n"
            << p << ',' << k << ',' << l << ',' << (m ? std::to_string(*m) : "")
            << ',' << count << ',' << bound << '\n';
        write_output(out.str(), g.out);
        return;
    }
    json j;
    j["p"] = p;
    j["k"] = k;
    j["l"] = l;
    if (m) j["m"] = *m;
    j["count"] = count;
    j["bound"] = bound;
    write_output(j.dump(2), g.out);
}

void run_graph_catalan(int m, long long n, const GlobalOpts& g) {
    const std::string value = mfl::counting::catalan(m, n).str();
    if (g.format == "csv") {
        std::ostringstream out;
        out << "m,n,catalan\n" << m << ',' << n << ',' << value << '\n';
        write_output(out.str(), g.out);
        return;
    }
    json j;
    j["m"] = m;
    j["n"] = n;
    j["catalan"] = value;
    write_output(j.dump(2), g.out);
}

void run_dyn_expand(const std::string& config_path, const GlobalOpts& g) {
    const mfl::ExperimentConfig cfg = load_with_overrides(config_path, g);
    const auto reports = mfl::run_dyn_expand(cfg);
    for (const auto& report : reports)
        if (std::isinf(report.tail_estimate)) {
            std::cerr << "warning: geometric tail diverges at t = "
                      << fmt17(report.t) << " (outside the convergence radius)\n";
            break;
        }
    const std::string body = g.format == "csv"
                                 ? mfl::expansion_reports_csv(reports)
                                 : mfl::expansion_reports_json(reports);
    write_output(body, resolve_out(g, cfg));
}

void run_egorov(const std::string& config_path, const GlobalOpts& g) {
    const mfl::ExperimentConfig cfg = load_with_overrides(config_path, g);
    const mfl::SweepResult result = mfl::run_egorov_sweep(cfg);
    const std::string body = g.format == "csv" ? mfl::results_csv(result)
                                               : mfl::results_json(result);
    write_output(body, resolve_out(g, cfg));
}

void run_marginals(const std::string& config_path, const GlobalOpts& g) {
    const mfl::ExperimentConfig cfg = load_with_overrides(config_path, g);
    const mfl::SweepResult result = mfl::run_marginal_convergence(cfg);
    const std::string body = g.format == "csv" ? mfl::results_csv(result)
                                               : mfl::results_json(result);
    write_output(body, resolve_out(g, cfg));
}

void run_hartree_evolve(const std::string& config_path, const GlobalOpts& g) {
    const mfl::ExperimentConfig cfg = load_with_overrides(config_path, g);
    const auto states =
        mfl::hartree_trajectory(cfg.mode_space, cfg.psi0, cfg.t_grid, 1e-11);
    const std::string body = g.format == "csv"
                                 ? mfl::trajectory_csv(cfg.mode_space, states)
                                 : mfl::trajectory_json(cfg.mode_space, states);
    write_output(body, resolve_out(g, cfg));
}

void run_kato_check(int d, std::optional<double> gamma, const GlobalOpts& g) {
    const mfl::KatoReport report = mfl::kato_check(d, gamma);
    if (g.format == "csv") {
        std::ostringstream out;
        out << "d,gamma,computed,bound,abs_err\n"
            << report.d << ',' << (report.gamma ? fmt17(*report.gamma) : "")
            << ',' << fmt17(report.computed) << ','
            << (report.bound ? fmt17(*report.bound) : "") << ','
            << (report.abs_err ? fmt17(*report.abs_err) : "") << '\n';
        write_output(out.str(), g.out);
        return;
    }
    write_output(mfl::kato_report_json(report), g.out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"desk-scale laboratory for mean-field dynamics"};
    app.require_subcommand(1);

    GlobalOpts g;
    auto* seed_opt =
        app.add_option("--seed", g.seed, "override the observable seed");
    app.add_option("--out", g.out, "write output to this file instead of stdout");
    app.add_option("--format", g.format, "output format (json or csv)")
        ->check(CLI::IsMember({"json", "csv"}));

    int gc_p = 1, gc_k = 0, gc_l = 0, gc_m = 0;
    int cat_m = 2;
    long long cat_n = 0;
    std::string config_path;
    int kato_d = 3;
    double kato_gamma = 0.0;

    auto* graphs = app.add_subcommand("graphs", "contraction-graph combinatorics");
    graphs->require_subcommand(1);
    graphs->fallthrough();

    auto* gcount =
        graphs->add_subcommand("count", "structure counts against closed-form bounds");
    gcount->fallthrough();
    gcount->add_option("--p", gc_p, "observable particle order")->required();
    gcount->add_option("--k", gc_k, "commutator depth")->required();
    gcount->add_option("--l", gc_l, "loop order")->required();
    auto* m_opt = gcount->add_option("--m", gc_m, "number of potential vertices");

    auto* gcatalan =
        graphs->add_subcommand("catalan", "generalized Catalan (Fuss) numbers");
    gcatalan->fallthrough();
    gcatalan->add_option("--m", cat_m, "branching factor (>= 2)")->required();
    gcatalan->add_option("--n", cat_n, "index (>= 0)")->required();

    auto* dyn = app.add_subcommand("dyn", "quantum commutator expansions");
    dyn->require_subcommand(1);
    dyn->fallthrough();
    auto* dexpand =
        dyn->add_subcommand("expand", "truncated expansion per (N, t) with exact error");
    dexpand->fallthrough();
    dexpand->add_option("--config", config_path, "experiment config (JSON)")
        ->required();

    auto* egorov = app.add_subcommand("egorov", "quantum/classical comparison sweeps");
    egorov->require_subcommand(1);
    egorov->fallthrough();
    auto* esweep = egorov->add_subcommand(
        "sweep", "Heisenberg expectations against Hartree symbols over N and t");
    esweep->fallthrough();
    esweep->add_option("--config", config_path, "experiment config (JSON)")
        ->required();

    auto* marginals = app.add_subcommand(
        "marginals", "reduced-density-matrix convergence to the Hartree projector");
    marginals->fallthrough();
    marginals->add_option("--config", config_path, "experiment config (JSON)")
        ->required();

    auto* hartree = app.add_subcommand("hartree", "classical mean-field flow");
    hartree->require_subcommand(1);
    hartree->fallthrough();
    auto* hevolve =
        hartree->add_subcommand("evolve", "trajectory over the config time grid");
    hevolve->fallthrough();
    hevolve->add_option("--config", config_path, "experiment config (JSON)")
        ->required();

    auto* kato = app.add_subcommand("kato", "dispersive smoothing constants");
    kato->require_subcommand(1);
    kato->fallthrough();
    auto* kcheck = kato->add_subcommand(
        "check", "sharp constant saturation or generalized angular supremum");
    kcheck->fallthrough();
    kcheck->add_option("--d", kato_d, "space dimension")->required();
    auto* gamma_opt =
        kcheck->add_option("--gamma", kato_gamma, "singularity strength in (1/2, d/2)");

    try {
        app.parse(argc, argv);
        g.seed_set = seed_opt->count() > 0;
        if (gcount->parsed()) {
            run_graph_count(gc_p, gc_k, gc_l,
                            m_opt->count() > 0 ? std::optional<int>(gc_m)
                                               : std::nullopt,
                            g);
        } else if (gcatalan->parsed()) {
            run_graph_catalan(cat_m, cat_n, g);
        } else if (dexpand->parsed()) {
            run_dyn_expand(config_path, g);
        } else if (esweep->parsed()) {
            run_egorov(config_path, g);
        } else if (marginals->parsed()) {
            run_marginals(config_path, g);
        } else if (hevolve->parsed()) {
            run_hartree_evolve(config_path, g);
        } else if (kcheck->parsed()) {
            run_kato_check(kato_d,
                           gamma_opt->count() > 0 ? std::optional<double>(kato_gamma)
                                                  : std::nullopt,
                           g);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const mfl::config_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const mfl::budget_error& e) {
        std::cerr << "budget exceeded: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
