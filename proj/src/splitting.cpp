#include "mfl/splitting.hpp"

#include <cmath>
#include <stdexcept>

#include "mfl/sector_basis.hpp"

namespace mfl {

Eigen::MatrixXcd splitting_isometry(int modes, int u, int v) {
    if (u < 0 || v < 0) throw std::invalid_argument("splitting_isometry: negative part");
    const int s = u + v;
    SectorBasis bs(modes, s), bu(modes, u), bv(modes, v);
    const double denom = static_cast<double>(binomial(s, u));
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(bu.dim() * bv.dim(), bs.dim());
    Occupation k(static_cast<std::size_t>(modes), 0), l(static_cast<std::size_t>(modes), 0);
    for (Eigen::Index col = 0; col < bs.dim(); ++col) {
        const Occupation& m = bs.occupation(col);
        // enumerate k <= m with |k| = u
        // depth-first over modes, tracking the running sum
        struct Frame { int mode; int used; };
        std::vector<int> choice(static_cast<std::size_t>(modes), 0);
        // simple recursive lambda
        auto rec = [&](auto&& self, int mode, int used) -> void {
            if (mode == modes) {
                if (used != u) return;
                double w = 1.0;
                for (int i = 0; i < modes; ++i) {
                    k[static_cast<std::size_t>(i)] = choice[static_cast<std::size_t>(i)];
                    l[static_cast<std::size_t>(i)] = m[static_cast<std::size_t>(i)] - choice[static_cast<std::size_t>(i)];
                    w *= static_cast<double>(binomial(m[static_cast<std::size_t>(i)], choice[static_cast<std::size_t>(i)]));
                }
                Eigen::Index row = bu.index(k) * bv.dim() + bv.index(l);
                S(row, col) = std::sqrt(w / denom);
                return;
            }
            int cap = std::min(m[static_cast<std::size_t>(mode)], u - used);
            for (int c = 0; c <= cap; ++c) {
                choice[static_cast<std::size_t>(mode)] = c;
                self(self, mode + 1, used + c);
            }
            choice[static_cast<std::size_t>(mode)] = 0;
        };
        rec(rec, 0, 0);
    }
    return S;
}

Eigen::MatrixXcd one_body_lift(const Eigen::MatrixXcd& h, int n) {
    const int modes = static_cast<int>(h.rows());
    if (h.cols() != h.rows()) throw std::invalid_argument("one_body_lift: h must be square");
    if (n == 0) return Eigen::MatrixXcd::Zero(1, 1);
    Eigen::MatrixXcd S = splitting_isometry(modes, 1, n - 1);
    Eigen::Index dv = sector_dim(modes, n - 1);
    Eigen::MatrixXcd hv = Eigen::MatrixXcd::Zero(h.rows() * dv, h.rows() * dv);
    for (Eigen::Index i = 0; i < h.rows(); ++i)
        for (Eigen::Index j = 0; j < h.cols(); ++j)
            hv.block(i * dv, j * dv, dv, dv) = h(i, j) * Eigen::MatrixXcd::Identity(dv, dv);
    return static_cast<double>(n) * (S.adjoint() * hv * S);
}

Eigen::MatrixXcd free_propagator(const Eigen::MatrixXcd& h, int n, double t) {
    Eigen::MatrixXcd lift = one_body_lift(h, n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lift);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("free_propagator: eigendecomposition failed");
    Eigen::VectorXcd phases(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        phases[i] = std::exp(std::complex<double>(0.0, t * es.eigenvalues()[i]));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

} // namespace mfl
