#pragma once

// Experiment orchestration: JSON experiment configs, seeded observables,
// quantum-vs-classical N-sweeps, marginal convergence, and persistence of
// result records as JSON or CSV.

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "mfl/expansion.hpp"
#include "mfl/hartree.hpp"
#include "mfl/mode_space.hpp"
#include "mfl/sector_operator.hpp"

namespace mfl {

// Observable request: an explicit p-sector matrix, or a seeded draw when no
// matrix is given.
struct ObservableSpec {
    int p = 1;
    std::uint64_t seed = 1;
    std::optional<Eigen::MatrixXcd> matrix;
};

struct ExperimentConfig {
    ModeSpace mode_space;
    Eigen::VectorXcd psi0; // classical field; squared norm must equal nu
    ObservableSpec observable;
    std::vector<double> t_grid; // strictly increasing observation times
    std::vector<double> N_list; // scaling parameters; each nu*N an integer
    double nu = 1.0;
    ExpansionOrder orders;
    std::string output_path; // optional default sink for emit_results
    int dim_budget = 4000;   // largest sector dimension worth diagonalising
};

struct ResultRecord {
    double N = 0.0;
    int n = 0;
    double t = 0.0;
    std::complex<double> lhs; // quantum expectation
    std::complex<double> rhs; // classical (Hartree) value
    double abs_err = 0.0;     // |lhs - rhs|
    std::optional<double> marginal_trace_dist;
    double wall_ms = 0.0;
};

struct SlopeFit {
    double t = 0.0;
    double slope = 0.0; // least-squares slope of log(err) against log(N)
};

struct SweepResult {
    std::vector<ResultRecord> records; // deterministic (N, t) order
    std::vector<SlopeFit> slopes;      // per time, when >= 4 N values usable
};

// Seeded Hermitian observable with unit spectral norm on the p-sector;
// deterministic in (seed, p, modes).
SectorOperator random_observable(std::uint64_t seed, int p, int modes);

// Resolves the configured observable (explicit matrix or seeded draw).
SectorOperator make_observable(const ExperimentConfig& cfg);

// For every (N, t): the Heisenberg expectation of the quantized observable
// in the normalized n-fold product of psi0 against the Hartree symbol at the
// same time.  Slopes fit the decay of the gap in N separately per time.
SweepResult run_egorov_sweep(const ExperimentConfig& cfg);

// For every (N, t): trace-norm distance between the exact p-particle
// marginal of the evolved product state and the pure Hartree marginal
// (p <= 2 from the observable spec); lhs/rhs carry the matched p-particle
// expectations of the observable in the two marginals.
SweepResult run_marginal_convergence(const ExperimentConfig& cfg);

// Truncated commutator expansion per (N, t) at the configured orders, with
// the error against exact diagonalisation filled in.
std::vector<ExpansionReport> run_dyn_expand(const ExperimentConfig& cfg);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::string& path);
std::string config_json(const ExperimentConfig& cfg); // canonical form

std::string results_json(const SweepResult& result);
std::string results_csv(const SweepResult& result);

std::string expansion_reports_json(const std::vector<ExpansionReport>& reports);
std::string expansion_reports_csv(const std::vector<ExpansionReport>& reports);

// Hartree trajectory over the config's time grid with per-state norm and
// energy, serialized like the sweep results.
std::string trajectory_json(const ModeSpace& ms,
                            const std::vector<HartreeState>& states);
std::string trajectory_csv(const ModeSpace& ms,
                           const std::vector<HartreeState>& states);

// Writes the given serialized form ("json" or "csv") of the records to path.
void emit_results(const SweepResult& result, const std::string& path,
                  const std::string& format);

} // namespace mfl
