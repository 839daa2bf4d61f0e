#include "mfl/lab.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfl/errors.hpp"
#include "mfl/fock.hpp"
#include "mfl/rng.hpp"
#include "mfl/sector_basis.hpp"

namespace mfl {

namespace {

using json = nlohmann::json;
using cplx = std::complex<double>;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json complex_vector_to_json(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back({v(i).real(), v(i).imag()});
    return out;
}

cplx complex_from_json(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw config_error(path + ": expected a [re, im] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

Eigen::VectorXcd complex_vector_from_json(const json& j, Eigen::Index size,
                                          const std::string& path) {
    if (!j.is_array())
        throw config_error(path + ": expected an array of [re, im] pairs");
    if (static_cast<Eigen::Index>(j.size()) != size)
        throw config_error(path + ": expected " + std::to_string(size) +
                           " entries, got " + std::to_string(j.size()));
    Eigen::VectorXcd v(size);
    for (Eigen::Index i = 0; i < size; ++i)
        v(i) = complex_from_json(j[static_cast<std::size_t>(i)],
                                 path + "[" + std::to_string(i) + "]");
    return v;
}

Eigen::MatrixXcd complex_matrix_from_json(const json& j, Eigen::Index rows,
                                          Eigen::Index cols, const std::string& path) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows * cols)
        throw config_error(path + ": expected a flat row-major array of " +
                           std::to_string(rows * cols) + " [re, im] pairs");
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = complex_from_json(j[static_cast<std::size_t>(r * cols + c)],
                                        path + "[" + std::to_string(r * cols + c) + "]");
    return m;
}

json complex_matrix_to_json(const Eigen::MatrixXcd& m) {
    json out = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            out.push_back({m(r, c).real(), m(r, c).imag()});
    return out;
}

double require_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw config_error(path + ": expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) throw config_error(path + ": must be finite");
    return x;
}

int require_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw config_error(path + ": expected an integer");
    return j.get<int>();
}

// Sector index n for a given scaling parameter; nu * N must be a positive
// integer up to rounding noise.
int particle_count(double nu, double N, const std::string& what) {
    const double n_real = nu * N;
    const long long n = std::llround(n_real);
    if (std::abs(n_real - static_cast<double>(n)) > 1e-9 * std::max(1.0, std::abs(n_real)) ||
        n < 1)
        throw config_error(what + ": nu * N = " + fmt17(n_real) +
                           " is not a positive integer");
    return static_cast<int>(n);
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.mode_space.modes < 1)
        throw config_error("mode_space: not initialised");
    if (cfg.psi0.size() != cfg.mode_space.modes)
        throw config_error("psi0: expected " + std::to_string(cfg.mode_space.modes) +
                           " entries, got " + std::to_string(cfg.psi0.size()));
    if (!(cfg.nu > 0.0) || !std::isfinite(cfg.nu))
        throw config_error("nu: must be a positive finite number");
    const double nrm2 = cfg.psi0.squaredNorm();
    if (std::abs(nrm2 - cfg.nu) > 1e-9 * std::max(1.0, cfg.nu))
        throw config_error("psi0: squared norm " + fmt17(nrm2) +
                           " does not match nu = " + fmt17(cfg.nu));
    if (cfg.observable.p < 1)
        throw config_error("observable.p: must be a positive integer");
    if (cfg.observable.matrix) {
        const Eigen::Index d = sector_dim(cfg.mode_space.modes, cfg.observable.p);
        if (cfg.observable.matrix->rows() != d || cfg.observable.matrix->cols() != d)
            throw config_error("observable.matrix: expected a " + std::to_string(d) +
                               " x " + std::to_string(d) + " sector matrix");
    }
    if (cfg.t_grid.empty()) throw config_error("t_grid: must not be empty");
    for (std::size_t i = 0; i < cfg.t_grid.size(); ++i) {
        if (!std::isfinite(cfg.t_grid[i]))
            throw config_error("t_grid[" + std::to_string(i) + "]: must be finite");
        if (i > 0 && cfg.t_grid[i] <= cfg.t_grid[i - 1])
            throw config_error("t_grid: times must be strictly increasing");
    }
    if (cfg.N_list.empty()) throw config_error("N_list: must not be empty");
    for (std::size_t i = 0; i < cfg.N_list.size(); ++i) {
        const std::string what = "N_list[" + std::to_string(i) + "]";
        if (!std::isfinite(cfg.N_list[i]) || cfg.N_list[i] <= 0.0)
            throw config_error(what + ": must be a positive finite number");
        if (i > 0 && cfg.N_list[i] <= cfg.N_list[i - 1])
            throw config_error("N_list: values must be strictly increasing");
        const int n = particle_count(cfg.nu, cfg.N_list[i], what);
        if (n < cfg.observable.p)
            throw config_error(what + ": sector n = " + std::to_string(n) +
                               " is smaller than the observable order p = " +
                               std::to_string(cfg.observable.p));
    }
    if (cfg.orders.K < 0) throw config_error("orders.K: must be >= 0");
    if (cfg.orders.L < 1 || cfg.orders.L > cfg.orders.K + 1)
        throw config_error("orders.L: must satisfy 1 <= L <= K + 1");
    if (cfg.orders.quad_order < 2) throw config_error("orders.quad_order: must be >= 2");
    if (cfg.dim_budget < 1) throw config_error("dim_budget: must be >= 1");
}

// Least-squares slope of log(err) against log(N); needs at least four errors
// above the rounding floor to be meaningful (errors at rounding scale carry
// no scaling signal).
std::vector<SlopeFit> fit_slopes(const std::vector<ResultRecord>& records,
                                 const std::vector<double>& t_grid,
                                 bool use_marginal) {
    std::vector<SlopeFit> fits;
    for (double t : t_grid) {
        std::vector<double> xs, ys;
        for (const auto& rec : records) {
            if (rec.t != t) continue;
            double err = rec.abs_err;
            if (use_marginal) {
                if (!rec.marginal_trace_dist) continue;
                err = *rec.marginal_trace_dist;
            }
            if (err > 1e-14) {
                xs.push_back(std::log(rec.N));
                ys.push_back(std::log(err));
            }
        }
        if (xs.size() < 4) continue;
        const double m = static_cast<double>(xs.size());
        double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        const double denom = m * sxx - sx * sx;
        if (denom <= 0.0) continue;
        fits.push_back({t, (m * sxy - sx * sy) / denom});
    }
    return fits;
}

// Classical field at each grid time, evolved once (the classical side is
// independent of N).
std::vector<Eigen::VectorXcd> hartree_fields(const ExperimentConfig& cfg) {
    std::vector<Eigen::VectorXcd> fields;
    fields.reserve(cfg.t_grid.size());
    for (double t : cfg.t_grid)
        fields.push_back(
            hartree_evolve(cfg.mode_space, {cfg.psi0, 0.0}, t, 1e-11).psi);
    return fields;
}

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

json record_to_json(const ResultRecord& rec) {
    json j;
    j["N"] = rec.N;
    j["n"] = rec.n;
    j["t"] = rec.t;
    j["lhs"] = {rec.lhs.real(), rec.lhs.imag()};
    j["rhs"] = {rec.rhs.real(), rec.rhs.imag()};
    j["abs_err"] = rec.abs_err;
    j["marginal_trace_dist"] =
        rec.marginal_trace_dist ? json(*rec.marginal_trace_dist) : json(nullptr);
    j["wall_ms"] = rec.wall_ms;
    return j;
}

} // namespace

SectorOperator random_observable(std::uint64_t seed, int p, int modes) {
    if (p < 1) throw config_error("random_observable: p must be >= 1");
    if (modes < 1) throw config_error("random_observable: modes must be >= 1");
    return SectorOperator(modes, p, random_hermitian_sector(seed, p, modes));
}

SectorOperator make_observable(const ExperimentConfig& cfg) {
    if (cfg.observable.matrix)
        return SectorOperator(cfg.mode_space.modes, cfg.observable.p,
                              *cfg.observable.matrix);
    return random_observable(cfg.observable.seed, cfg.observable.p,
                             cfg.mode_space.modes);
}

SweepResult run_egorov_sweep(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const ModeSpace& ms = cfg.mode_space;
    const SectorOperator a = make_observable(cfg);
    const ClassicalKernel kernel = kernel_of(a);
    const std::vector<Eigen::VectorXcd> fields = hartree_fields(cfg);
    const Eigen::VectorXcd psi_hat = cfg.psi0.normalized();

    SweepResult out;
    out.records.reserve(cfg.N_list.size() * cfg.t_grid.size());
    for (double N : cfg.N_list) {
        const int n = particle_count(cfg.nu, N, "N_list");
        const QuantizationParams params = make_params(N, n);
        Eigen::VectorXcd state = product_state(psi_hat, n);
        state.normalize();
        for (std::size_t it = 0; it < cfg.t_grid.size(); ++it) {
            const double t = cfg.t_grid[it];
            const double t0 = now_ms();
            const Eigen::MatrixXcd evolved =
                heisenberg_exact(ms, a, params, t, cfg.dim_budget);
            const cplx lhs = state.dot(evolved * state);
            const cplx rhs = symbol(kernel, fields[it]);
            ResultRecord rec;
            rec.N = N;
            rec.n = n;
            rec.t = t;
            rec.lhs = lhs;
            rec.rhs = rhs;
            rec.abs_err = std::abs(lhs - rhs);
            rec.wall_ms = now_ms() - t0;
            out.records.push_back(std::move(rec));
        }
    }
    out.slopes = fit_slopes(out.records, cfg.t_grid, /*use_marginal=*/false);
    return out;
}

SweepResult run_marginal_convergence(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const ModeSpace& ms = cfg.mode_space;
    const SectorOperator a = make_observable(cfg);
    const int p = a.particles;
    if (p > 2)
        throw config_error("observable.p: marginal convergence supports p <= 2");

    const std::vector<Eigen::VectorXcd> fields = hartree_fields(cfg);
    std::vector<Eigen::VectorXcd> pure(fields.size());
    std::vector<Eigen::MatrixXcd> pure_density(fields.size());
    std::vector<cplx> rhs(fields.size());
    for (std::size_t it = 0; it < fields.size(); ++it) {
        const Eigen::VectorXcd phi_hat = fields[it].normalized();
        pure[it] = product_state(phi_hat, p);
        pure_density[it] = pure[it] * pure[it].adjoint();
        rhs[it] = pure[it].dot(a.mat * pure[it]);
    }

    const Eigen::VectorXcd psi_hat = cfg.psi0.normalized();
    SweepResult out;
    out.records.reserve(cfg.N_list.size() * cfg.t_grid.size());
    for (double N : cfg.N_list) {
        const int n = particle_count(cfg.nu, N, "N_list");
        const Eigen::Index dim = sector_dim(ms.modes, n);
        if (dim > cfg.dim_budget)
            throw budget_error("marginal convergence: sector dimension " +
                               std::to_string(dim) + " exceeds budget " +
                               std::to_string(cfg.dim_budget));
        const QuantizationParams params = make_params(N, n);
        const SectorOperator H = build_hamiltonian(ms, params);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H.mat);
        if (es.info() != Eigen::Success)
            throw std::runtime_error("marginal convergence: diagonalisation failed");
        Eigen::VectorXcd state0 = product_state(psi_hat, n);
        state0.normalize();
        const Eigen::VectorXcd coeffs = es.eigenvectors().adjoint() * state0;
        for (std::size_t it = 0; it < cfg.t_grid.size(); ++it) {
            const double t = cfg.t_grid[it];
            const double t0 = now_ms();
            const Eigen::VectorXcd phases =
                (cplx(0.0, -t) * es.eigenvalues().array().cast<cplx>()).exp().matrix();
            const Eigen::VectorXcd state_t =
                es.eigenvectors() * phases.cwiseProduct(coeffs);
            const DensityMatrix gamma = marginal(state_t, ms.modes, n, p);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> diff(
                gamma.mat - pure_density[it], Eigen::EigenvaluesOnly);
            const double dist = diff.eigenvalues().cwiseAbs().sum();
            ResultRecord rec;
            rec.N = N;
            rec.n = n;
            rec.t = t;
            rec.lhs = (gamma.mat * a.mat).trace();
            rec.rhs = rhs[it];
            rec.abs_err = std::abs(rec.lhs - rec.rhs);
            rec.marginal_trace_dist = dist;
            rec.wall_ms = now_ms() - t0;
            out.records.push_back(std::move(rec));
        }
    }
    out.slopes = fit_slopes(out.records, cfg.t_grid, /*use_marginal=*/true);
    return out;
}

std::vector<ExpansionReport> run_dyn_expand(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const ModeSpace& ms = cfg.mode_space;
    const SectorOperator a = make_observable(cfg);

    std::vector<ExpansionReport> reports;
    reports.reserve(cfg.N_list.size() * cfg.t_grid.size());
    for (double N : cfg.N_list) {
        const int n = particle_count(cfg.nu, N, "N_list");
        const Eigen::Index dim = sector_dim(ms.modes, n);
        if (dim > cfg.dim_budget)
            throw budget_error("expansion: sector dimension " + std::to_string(dim) +
                               " exceeds budget " + std::to_string(cfg.dim_budget));
        const QuantizationParams params = make_params(N, n);
        for (double t : cfg.t_grid) {
            auto [sum, report] = loop_expansion(ms, a, params, t, cfg.orders);
            const Eigen::MatrixXcd exact =
                heisenberg_exact(ms, a, params, t, cfg.dim_budget);
            report.error_vs_exact = spectral_norm(sum - exact);
            reports.push_back(std::move(report));
        }
    }
    return reports;
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw config_error("config: expected a JSON object");

    ExperimentConfig cfg;
    if (!j.contains("mode_space")) throw config_error("mode_space: missing");
    cfg.mode_space = parse_mode_space(j.at("mode_space").dump());

    if (!j.contains("psi0")) throw config_error("psi0: missing");
    cfg.psi0 = complex_vector_from_json(j.at("psi0"), cfg.mode_space.modes, "psi0");

    cfg.nu = j.contains("nu") ? require_number(j.at("nu"), "nu") : 1.0;

    if (j.contains("observable")) {
        const json& jo = j.at("observable");
        if (!jo.is_object()) throw config_error("observable: expected an object");
        if (jo.contains("p")) cfg.observable.p = require_int(jo.at("p"), "observable.p");
        if (jo.contains("seed")) {
            if (!jo.at("seed").is_number_unsigned())
                throw config_error("observable.seed: expected a non-negative integer");
            cfg.observable.seed = jo.at("seed").get<std::uint64_t>();
        }
        if (jo.contains("matrix")) {
            const Eigen::Index d = sector_dim(cfg.mode_space.modes, cfg.observable.p);
            cfg.observable.matrix =
                complex_matrix_from_json(jo.at("matrix"), d, d, "observable.matrix");
        }
    }

    if (!j.contains("t_grid")) throw config_error("t_grid: missing");
    if (!j.at("t_grid").is_array()) throw config_error("t_grid: expected an array");
    for (std::size_t i = 0; i < j.at("t_grid").size(); ++i)
        cfg.t_grid.push_back(
            require_number(j.at("t_grid")[i], "t_grid[" + std::to_string(i) + "]"));

    if (!j.contains("N_list")) throw config_error("N_list: missing");
    if (!j.at("N_list").is_array()) throw config_error("N_list: expected an array");
    for (std::size_t i = 0; i < j.at("N_list").size(); ++i)
        cfg.N_list.push_back(
            require_number(j.at("N_list")[i], "N_list[" + std::to_string(i) + "]"));

    if (j.contains("orders")) {
        const json& jo = j.at("orders");
        if (!jo.is_object()) throw config_error("orders: expected an object");
        if (jo.contains("K")) cfg.orders.K = require_int(jo.at("K"), "orders.K");
        cfg.orders.L = std::min(2, cfg.orders.K + 1);
        if (jo.contains("L")) cfg.orders.L = require_int(jo.at("L"), "orders.L");
        if (jo.contains("quad_order"))
            cfg.orders.quad_order = require_int(jo.at("quad_order"), "orders.quad_order");
    } else {
        cfg.orders.K = 2;
        cfg.orders.L = 2;
    }

    if (j.contains("output_path")) {
        if (!j.at("output_path").is_string())
            throw config_error("output_path: expected a string");
        cfg.output_path = j.at("output_path").get<std::string>();
    }
    if (j.contains("dim_budget"))
        cfg.dim_budget = require_int(j.at("dim_budget"), "dim_budget");

    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string config_json(const ExperimentConfig& cfg) {
    json j;
    j["mode_space"] = json::parse(serialize_mode_space(cfg.mode_space));
    j["psi0"] = complex_vector_to_json(cfg.psi0);
    j["nu"] = cfg.nu;
    j["observable"]["p"] = cfg.observable.p;
    j["observable"]["seed"] = cfg.observable.seed;
    if (cfg.observable.matrix)
        j["observable"]["matrix"] = complex_matrix_to_json(*cfg.observable.matrix);
    j["t_grid"] = cfg.t_grid;
    j["N_list"] = cfg.N_list;
    j["orders"]["K"] = cfg.orders.K;
    j["orders"]["L"] = cfg.orders.L;
    j["orders"]["quad_order"] = cfg.orders.quad_order;
    j["output_path"] = cfg.output_path;
    j["dim_budget"] = cfg.dim_budget;
    return j.dump(2);
}

std::string results_json(const SweepResult& result) {
    json j;
    j["records"] = json::array();
    for (const auto& rec : result.records) j["records"].push_back(record_to_json(rec));
    j["slopes"] = json::array();
    for (const auto& fit : result.slopes)
        j["slopes"].push_back({{"t", fit.t}, {"slope", fit.slope}});
    return j.dump(2);
}

std::string results_csv(const SweepResult& result) {
    std::ostringstream out;
    out << "N,n,t,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,marginal_trace_dist,wall_ms\n";
    for (const auto& rec : result.records) {
        out << fmt17(rec.N) << ',' << rec.n << ',' << fmt17(rec.t) << ','
            << fmt17(rec.lhs.real()) << ',' << fmt17(rec.lhs.imag()) << ','
            << fmt17(rec.rhs.real()) << ',' << fmt17(rec.rhs.imag()) << ','
            << fmt17(rec.abs_err) << ','
            << (rec.marginal_trace_dist ? fmt17(*rec.marginal_trace_dist) : "")
            << ',' << fmt17(rec.wall_ms) << '\n';
    }
    return out.str();
}

std::string expansion_reports_json(const std::vector<ExpansionReport>& reports) {
    json j = json::array();
    for (const auto& report : reports)
        j.push_back(json::parse(expansion_report_json(report)));
    return j.dump(2);
}

std::string expansion_reports_csv(const std::vector<ExpansionReport>& reports) {
    std::ostringstream out;
    out << "N,n,t,K,L,tail_estimate,error_vs_exact\n";
    for (const auto& report : reports) {
        out << fmt17(report.N) << ',' << report.n << ',' << fmt17(report.t) << ','
            << report.order.K << ',' << report.order.L << ','
            << fmt17(report.tail_estimate) << ','
            << (report.error_vs_exact ? fmt17(*report.error_vs_exact) : "") << '\n';
    }
    return out.str();
}

std::string trajectory_json(const ModeSpace& ms,
                            const std::vector<HartreeState>& states) {
    json j = json::array();
    for (const auto& state : states) {
        json entry;
        entry["t"] = state.time;
        entry["psi"] = complex_vector_to_json(state.psi);
        entry["norm"] = state.psi.norm();
        entry["energy"] = hartree_energy(ms, state.psi);
        j.push_back(entry);
    }
    return j.dump(2);
}

std::string trajectory_csv(const ModeSpace& ms,
                           const std::vector<HartreeState>& states) {
    std::ostringstream out;
    out << "t";
    for (int i = 0; i < ms.modes; ++i) out << ",psi" << i << "_re,psi" << i << "_im";
    out << ",norm,energy\n";
    for (const auto& state : states) {
        out << fmt17(state.time);
        for (int i = 0; i < ms.modes; ++i)
            out << ',' << fmt17(state.psi(i).real()) << ',' << fmt17(state.psi(i).imag());
        out << ',' << fmt17(state.psi.norm()) << ','
            << fmt17(hartree_energy(ms, state.psi)) << '\n';
    }
    return out.str();
}

void emit_results(const SweepResult& result, const std::string& path,
                  const std::string& format) {
    if (path.empty()) throw config_error("output path is empty");
    std::string body;
    if (format == "json")
        body = results_json(result);
    else if (format == "csv")
        body = results_csv(result);
    else
        throw config_error("format: must be json or csv");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_results: cannot open " + path);
    out << body;
    if (!out) throw std::runtime_error("emit_results: write failed for " + path);
}

} // namespace mfl
