#pragma once

// Splitting isometries between symmetric sectors.
//
// For u + v = s the isometry S_{s;u,v} : H^(s) -> H^(u) x H^(v) has matrix
// elements
//     <(k,l)| S |m> = delta_{k+l,m} sqrt( prod_i binom(m_i, k_i) / binom(s,u) ),
// where k runs over u-particle occupations and l over v-particle ones.  It is
// the coordinate form of the identity Phi_s = (Phi_u x Phi_v) S for the
// sector-to-tensor isometries Phi, hence S^dagger S = 1 on the s-sector and
// S S^dagger is the projector onto the image of the fully symmetric sector
// inside the product of the two partial sectors.
//
// Every symmetrized operation in this library (second quantization, nested
// contractions, partial traces, one-body lifts) is an S-sandwich; explicit
// n-fold tensor products never appear outside the test oracles.

#include <Eigen/Dense>

namespace mfl {

// Dense (sector_dim(u)*sector_dim(v)) x sector_dim(u+v) matrix; row index is
// index(k) * sector_dim(v) + index(l).  Entries are real but stored complex
// so they compose directly with operator matrices.
Eigen::MatrixXcd splitting_isometry(int modes, int u, int v);

// Lift of sum_{i=1}^{n} h_i to the n-sector: n * S^dag (h x 1) S.
Eigen::MatrixXcd one_body_lift(const Eigen::MatrixXcd& h, int n);

// Unitary sector lift of exp(i t h) acting on the n-sector, computed through
// the Hermitian eigendecomposition of one_body_lift(h, n).
Eigen::MatrixXcd free_propagator(const Eigen::MatrixXcd& h, int n, double t);

} // namespace mfl
