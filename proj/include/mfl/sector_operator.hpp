#pragma once

#include <stdexcept>

#include <Eigen/Dense>

#include "mfl/sector_basis.hpp"

namespace mfl {

// A p-particle operator represented on the symmetric p-sector basis of an
// M-mode space.  Value type; treat as immutable after construction.
struct SectorOperator {
    int modes = 0;
    int particles = 0;      // p
    Eigen::MatrixXcd mat;   // sector_dim(modes, p) square

    SectorOperator() = default;
    SectorOperator(int modes_, int particles_, Eigen::MatrixXcd mat_)
        : modes(modes_), particles(particles_), mat(std::move(mat_)) {
        const Eigen::Index d = sector_dim(modes, particles);
        if (mat.rows() != d || mat.cols() != d)
            throw std::invalid_argument("SectorOperator: matrix does not match sector dimension");
    }
};

inline SectorOperator identity_operator(int modes, int p) {
    const Eigen::Index d = sector_dim(modes, p);
    return SectorOperator(modes, p, Eigen::MatrixXcd::Identity(d, d));
}

inline SectorOperator zero_operator(int modes, int p) {
    const Eigen::Index d = sector_dim(modes, p);
    return SectorOperator(modes, p, Eigen::MatrixXcd::Zero(d, d));
}

inline SectorOperator adjoint(const SectorOperator& a) {
    return SectorOperator(a.modes, a.particles, a.mat.adjoint());
}

// Largest singular value; for Hermitian input this is the operator norm.
double spectral_norm(const Eigen::MatrixXcd& m);

// max_ij |A_ij - conj(A_ji)|
double hermiticity_residue(const Eigen::MatrixXcd& m);

} // namespace mfl
