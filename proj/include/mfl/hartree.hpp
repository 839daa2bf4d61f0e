#pragma once

// Classical (Hartree) side of the mean-field correspondence.
//
// A one-particle wave function psi carries the classical state; a kernel a
// mapping the p-sector to the q-sector induces the polynomial observable
//   A(psi) = < psi^{(x)q}, a psi^{(x)p} >.
// The flow is the Hartree equation
//   i psi' = (h + V) psi + h_MF[psi] psi,
// with the mean field h_MF obtained by sandwiching the pair interaction
// between copies of psi.  Iterating Duhamel's formula for observables around
// the free part reproduces exactly the tree (zero-loop) kernels of the
// quantum commutator expansion, now allowed to be rectangular.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "mfl/mode_space.hpp"
#include "mfl/sector_operator.hpp"

namespace mfl {

struct HartreeState {
    Eigen::VectorXcd psi;
    double time = 0.0;
};

// Rectangular kernel mapping the ket_particles-sector into the
// bra_particles-sector.
struct ClassicalKernel {
    int modes = 0;
    int bra_particles = 0;
    int ket_particles = 0;
    Eigen::MatrixXcd mat;
};

// Validating constructors.
ClassicalKernel make_kernel(int modes, int bra_particles, int ket_particles,
                            Eigen::MatrixXcd mat);
ClassicalKernel kernel_of(const SectorOperator& a);

// A(psi) = < psi^{(x)q}, a psi^{(x)p} >.
std::complex<double> symbol(const ClassicalKernel& a,
                            const Eigen::VectorXcd& psi);

// Wirtinger gradient dA / d(conj psi), an M-vector.
Eigen::VectorXcd symbol_gradient(const ClassicalKernel& a,
                                 const Eigen::VectorXcd& psi);

// Mean-field one-body operator iota_psi^dagger W iota_psi, where
// iota_psi : e |-> S_{2;1,1}^dagger (e x psi).  Hermitian, quadratic in psi;
// applied to psi itself it reproduces the familiar (w * |psi|^2) psi for
// pair-table interactions.
Eigen::MatrixXcd hartree_field(const ModeSpace& ms,
                               const Eigen::VectorXcd& psi);

// Conserved energy <psi, (h+V) psi> + 1/2 < psi^{(x)2}, W psi^{(x)2} >.
double hartree_energy(const ModeSpace& ms, const Eigen::VectorXcd& psi);

// Integrates the Hartree equation from `from` to time t (either direction)
// in the interaction picture of h + V, with adaptive stepping at the given
// tolerance.
HartreeState hartree_evolve(const ModeSpace& ms, const HartreeState& from,
                            double t, double tol = 1e-10);

// States at a strictly increasing list of times, starting from psi0 at
// time 0.
std::vector<HartreeState> hartree_trajectory(const ModeSpace& ms,
                                             const Eigen::VectorXcd& psi0,
                                             const std::vector<double>& times,
                                             double tol = 1e-10);

// Poisson bracket of square-kernel observables: the symbol of
// i p_a p_b [a, b]_1 on the (p_a + p_b - 1)-sector equals {A, B}.
SectorOperator poisson_bracket(const SectorOperator& a,
                               const SectorOperator& b);

// Pointwise tree kernel T^{(k)}(t_1, ..., t_k; t): base case is the freely
// evolved kernel a_t (free flow of h + V), and each vertex applies
//   T^{(k)} = i (q+k-1) W_{t_k} o_1 T^{(k-1)} - i (p+k-1) T^{(k-1)} o_1 W_{t_k},
// producing a kernel of shape (q+k, p+k).  For square kernels this is the
// zero-loop kernel of the quantum expansion.
ClassicalKernel tree_term(const ModeSpace& ms, const ClassicalKernel& a,
                          const std::vector<double>& times, double t);

// Simplex-integrated tree kernels for k = 0..K at observable time t >= 0,
// computed by the same forward sweep as the quantum loop expansion.
std::vector<ClassicalKernel> integrated_tree_terms(const ModeSpace& ms,
                                                   const ClassicalKernel& a,
                                                   int K, double t,
                                                   double tol = 1e-12);

struct TreeSeriesReport {
    std::vector<std::complex<double>> order_values; // symbol per tree order
    std::complex<double> sum;                       // truncated series
    double radius_x = 0.0;                          // 8 |psi|^2 |w| t
    bool within_radius = true;
};

// Truncated classical expansion of A(psi_t) at psi; converges geometrically
// while radius_x < 1.
TreeSeriesReport tree_series(const ModeSpace& ms, const ClassicalKernel& a,
                             const Eigen::VectorXcd& psi, double t, int K);

} // namespace mfl
