#pragma once

// Cached sector propagators of a one-particle Hamiltonian.  Both the
// commutator expansion and the classical tree expansion conjugate operators
// by the lifted free flow at many different times; diagonalising the lift
// once per sector and reusing the spectrum keeps that cost negligible.

#include <map>

#include <Eigen/Dense>

namespace mfl {

class FreeFlow {
public:
    explicit FreeFlow(Eigen::MatrixXcd h);

    // Lifted unitary e^{i t h} on the n-particle sector (identity for n = 0).
    Eigen::MatrixXcd propagator(int n, double t) const;

    // U_n(t) a U_n(t)^dagger for a square a on the n-sector.
    Eigen::MatrixXcd conjugate(const Eigen::MatrixXcd& a, int particles,
                               double t) const;

    // U_q(t) a U_p(t)^dagger for a rectangular kernel mapping p -> q.
    Eigen::MatrixXcd conjugate_rect(const Eigen::MatrixXcd& a, int bra_particles,
                                    int ket_particles, double t) const;

private:
    struct Spectrum {
        Eigen::VectorXd vals;
        Eigen::MatrixXcd vecs;
    };

    const Spectrum& sector(int n) const;

    Eigen::MatrixXcd h_;
    mutable std::map<int, Spectrum> cache_;
};

} // namespace mfl
