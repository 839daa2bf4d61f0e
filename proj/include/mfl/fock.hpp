#pragma once

// Second quantization on finite symmetric sectors.
//
// For a p-particle operator a and scaling parameter N, the second-quantized
// observable restricted to the n-particle sector is
//
//     A_N(a)|_n = (p! / N^p) binom(n, p) S^dag (a x 1^(n-p)) S,
//
// with S the splitting isometry H^(n) -> H^(p) x H^(n-p); this equals the
// symmetrized first-quantized form P+ (a x 1^(n-p)) P+ up to the stated
// combinatorial factor, and vanishes for n < p.
//
// The nested contraction of a p-particle operator a with a q-particle
// operator b over r legs is
//
//     a o_r b = P+ (a x 1^(q-r)) (1^(p-r) x b) P+   on p + q - r particles,
//
// and satisfies the product expansion
//
//     A_N(a) A_N(b) = sum_r binom(p,r) binom(q,r) r!/N^r A_N(a o_r b).
//
// The scaled Hamiltonian is H_N = N (A_N(h) + 1/2 A_N(W)); with n particles
// this equals sum_i h_i + (1/N) sum_{i<j} W_ij.

#include <utility>

#include <Eigen/Dense>

#include "mfl/mode_space.hpp"
#include "mfl/sector_operator.hpp"

namespace mfl {

// P+ (b x 1^(n - b.particles)) P+ represented on the n-sector (no prefactor).
Eigen::MatrixXcd symmetric_embed(const SectorOperator& b, int n);

// Second quantization restricted to the q.n-particle sector.  Returns the
// zero operator when q.n < a.particles.
SectorOperator quantize(const SectorOperator& a, const QuantizationParams& q);

// Nested contraction a o_r b for square sector operators, 0 <= r <= min(p, q).
SectorOperator contract(const SectorOperator& a, const SectorOperator& b, int r);

// Rectangular engine behind contract(): A maps the pa-sector to the qa-sector,
// B maps pb to qb, the result maps (u + pb) to (qa + v) with u = pa - r,
// v = qb - r.  Used directly by the classical tree expansion.
Eigen::MatrixXcd contract_rect(int modes,
                               const Eigen::MatrixXcd& A, int qa, int pa,
                               const Eigen::MatrixXcd& B, int qb, int pb, int r);

// Max-abs relative deviation between A_N(a) A_N(b) and its contraction
// expansion on the n-sector.  Requires p + q <= n + min(p, q) so that at
// least one summand survives.
double quantized_product_check(const SectorOperator& a, const SectorOperator& b,
                               const QuantizationParams& q);

// H_N restricted to the n-sector (V folded into the one-body part).
SectorOperator build_hamiltonian(const ModeSpace& ms, const QuantizationParams& q);

struct DensityMatrix {
    int modes = 0;
    int particles = 0;
    Eigen::MatrixXcd mat;
    double trace = 0.0;
};

// p-particle reduced density matrix of a normalized n-sector state vector.
// Validates positivity (eigenvalues >= -1e-10) and records the trace.
DensityMatrix marginal(const Eigen::VectorXcd& state, int modes, int n, int p);

// For a unit vector psi and integer N = n: returns (measured, bound) where
//   measured = | <psi^N, A_N(a) psi^N> - <psi^p, a psi^p> |
//            = | N(N-1)...(N-p+1)/N^p - 1 | * |<psi^p, a psi^p>|
// and bound = (p^2 / N) ||a||.
std::pair<double, double> quantization_error(const SectorOperator& a,
                                             const Eigen::VectorXcd& psi, int N);

} // namespace mfl
