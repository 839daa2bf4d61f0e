#pragma once

// Commutator expansion of quantized Heisenberg dynamics.
//
// For a p-particle coefficient a and Hamiltonian built from one-particle h,
// a pair interaction W (and optionally a one-particle perturbation V kept as
// an explicit vertex), iterating Duhamel's formula against the free flow
// generated by h organises e^{itH} A e^{-itH} into a series of simplex
// integrals of nested commutator kernels.  Each kernel at depth k splits by
// the number of loop contractions l (each costing a factor 1/N) and, when V
// is kept explicit, the number of potential vertices m.  The kernels obey a
// closed two-term (three-term with V) recursion in k which this module
// evaluates exactly on finite sectors, both pointwise in the time variables
// and integrated over the time simplex.

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mfl/fock.hpp"
#include "mfl/mode_space.hpp"
#include "mfl/sector_operator.hpp"

namespace mfl {

// Conjugation by the free flow: a |-> Gamma(e^{ith}) a Gamma(e^{-ith}) on the
// sector of a.  Only the one-particle part h of the mode space enters; a
// perturbation V, when present, is treated as an interaction vertex.
SectorOperator free_evolve(const ModeSpace& ms, const SectorOperator& a,
                           double t);

// One kernel evaluation request.  times[0..k-1] are the simplex times
// t_1 >= t_2 >= ... >= t_k (times[j-1] is consumed by the vertex at depth j,
// so times[k-1] belongs to the outermost commutator); t is the observable
// time.  Monotonicity is the caller's responsibility; the recursion itself is
// defined for arbitrary time tuples.
struct LoopTermRequest {
    int k = 0;
    int l = 0;
    int m = 0; // potential vertices; requires a mode space with V when > 0
    std::vector<double> times;
    double t = 0.0;
};

// Pointwise kernel G^{(k,l,m)}(t_1,...,t_k; t).  Base case G^{(0,0,0)} is the
// freely evolved a_t.  Depth step, with s = p + k - l - m the particle count
// of the result and [x,y]_r the degree-r contraction commutator:
//   G^{(k,l,m)} =   i (s-1)      [W_{t_k}, G^{(k-1,l,m)}]_1
//                 + i s(s-1)/2   [W_{t_k}, G^{(k-1,l-1,m)}]_2
//                 + i s          [V_{t_k}, G^{(k-1,l,m-1)}]_1.
// Out-of-range (l, m) give the zero operator.
SectorOperator g_term(const ModeSpace& ms, const SectorOperator& a,
                      const LoopTermRequest& req);

// Integral over the ordered simplex {0 <= u_1 <= u_2 <= ... <= u_k <= t} by
// nested Gauss-Legendre quadrature with quad_order nodes per level.  The
// integrand receives (u_1, ..., u_k); k = 0 returns integrand({}).
SectorOperator simplex_integrate(
    int k, const std::function<SectorOperator(const std::vector<double>&)>& f,
    double t, int quad_order);

// All simplex-integrated kernels with k <= K at observable time t >= 0,
// keyed by (k, l, m).  Potential vertices are included exactly when the mode
// space carries V.  Computed by one adaptive forward sweep of the coupled
// linear system the kernels satisfy in the simplex upper limit, which agrees
// with the nested quadrature but costs one ODE solve for all orders.
std::map<std::tuple<int, int, int>, SectorOperator> integrated_g_terms(
    const ModeSpace& ms, const SectorOperator& a, int K, double t,
    double tol = 1e-12);

// Exact Heisenberg evolution of the quantization of a on the n-particle
// sector, via full diagonalisation of the sector Hamiltonian (V folded into
// the one-particle part).  Refuses sectors larger than dim_budget.
Eigen::MatrixXcd heisenberg_exact(const ModeSpace& ms, const SectorOperator& a,
                                  const QuantizationParams& q, double t,
                                  int dim_budget = 4000);

// Convergence-radius bookkeeping for interaction strength |w| (or pair
// constant kappa) and density nu.
struct RadiusReport {
    double bounded_threshold = 0.0; // 1 / (8 nu |w|): series converges below
    double coulomb_radius = 0.0;    // 1 / (128 pi kappa^2 nu^2)
    double smallness = 0.0;         // sqrt(t / coulomb_radius)
    bool above_threshold = false;   // t >= bounded_threshold
};

RadiusReport radius(double coupling, double nu, double t = 0.0);

struct ExpansionOrder {
    int K = 0;          // maximal commutator depth
    int L = 1;          // keep loop orders l <= L - 1; 1 <= L <= K + 1
    int quad_order = 16; // only used by quadrature cross-checks
};

struct TermNorm {
    int k = 0;
    int l = 0;
    int m = 0;
    double norm = 0.0; // operator norm of the N^{-l}-weighted quantized term
};

struct ExpansionReport {
    ExpansionOrder order;
    double N = 1.0;
    int n = 0;
    double t = 0.0;
    RadiusReport radius;
    std::vector<TermNorm> term_norms;
    // Geometric tail (2 nu)^p |a| x^{K+1} / (1 - x) with x = 8 nu |w| t;
    // +infinity once x >= 1.
    double tail_estimate = 0.0;
    std::optional<double> error_vs_exact;
};

// Truncated expansion sum_{k <= K, l <= L-1, m} N^{-l} quantize(G^{(k,l,m)})
// on the n-particle sector, with per-term norms and the geometric tail
// estimate.  error_vs_exact is left unset; callers with access to the exact
// flow may fill it in.
std::pair<Eigen::MatrixXcd, ExpansionReport> loop_expansion(
    const ModeSpace& ms, const SectorOperator& a, const QuantizationParams& q,
    double t, const ExpansionOrder& order);

std::string expansion_report_json(const ExpansionReport& report);

} // namespace mfl
