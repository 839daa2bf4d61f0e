#include "mfl/free_flow.hpp"

#include <cmath>
#include <complex>
#include <utility>

#include "mfl/splitting.hpp"

namespace mfl {

namespace {
const std::complex<double> kI(0.0, 1.0);
}

FreeFlow::FreeFlow(Eigen::MatrixXcd h) : h_(std::move(h)) {}

const FreeFlow::Spectrum& FreeFlow::sector(int n) const {
    auto it = cache_.find(n);
    if (it == cache_.end()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(one_body_lift(h_, n));
        it = cache_.emplace(n, Spectrum{es.eigenvalues(), es.eigenvectors()}).first;
    }
    return it->second;
}

Eigen::MatrixXcd FreeFlow::propagator(int n, double t) const {
    if (n == 0) return Eigen::MatrixXcd::Identity(1, 1);
    const Spectrum& e = sector(n);
    Eigen::VectorXcd phase(e.vals.size());
    for (Eigen::Index i = 0; i < e.vals.size(); ++i)
        phase[i] = std::exp(kI * (t * e.vals[i]));
    return e.vecs * phase.asDiagonal() * e.vecs.adjoint();
}

Eigen::MatrixXcd FreeFlow::conjugate(const Eigen::MatrixXcd& a, int particles,
                                     double t) const {
    if (particles == 0 || t == 0.0) return a;
    const Eigen::MatrixXcd u = propagator(particles, t);
    return u * a * u.adjoint();
}

Eigen::MatrixXcd FreeFlow::conjugate_rect(const Eigen::MatrixXcd& a,
                                          int bra_particles, int ket_particles,
                                          double t) const {
    if (t == 0.0) return a;
    return propagator(bra_particles, t) * a *
           propagator(ket_particles, t).adjoint();
}

} // namespace mfl
