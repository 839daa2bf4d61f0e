#include "mfl/fock.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

#include "mfl/errors.hpp"
#include "mfl/splitting.hpp"

namespace mfl {

namespace {

constexpr Eigen::Index kDenseDimBudget = 8192; // guard for dense sector work

double falling_factorial(int n, int p) {
    double r = 1.0;
    for (int j = 0; j < p; ++j) r *= static_cast<double>(n - j);
    return r;
}

Eigen::MatrixXcd kron_id_right(const Eigen::MatrixXcd& A, Eigen::Index d) {
    return Eigen::kroneckerProduct(A, Eigen::MatrixXcd::Identity(d, d));
}

Eigen::MatrixXcd kron_id_left(Eigen::Index d, const Eigen::MatrixXcd& A) {
    return Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(d, d), A);
}

} // namespace

Eigen::MatrixXcd symmetric_embed(const SectorOperator& b, int n) {
    const int s = b.particles;
    if (n < s) throw std::invalid_argument("symmetric_embed: sector smaller than operator");
    const Eigen::Index dn = sector_dim(b.modes, n);
    if (dn > kDenseDimBudget) throw budget_error("symmetric_embed: sector dimension exceeds dense budget");
    Eigen::MatrixXcd S = splitting_isometry(b.modes, s, n - s);
    return S.adjoint() * kron_id_right(b.mat, sector_dim(b.modes, n - s)) * S;
}

SectorOperator quantize(const SectorOperator& a, const QuantizationParams& q) {
    const int p = a.particles;
    if (q.n < p) return zero_operator(a.modes, q.n);
    double factor = falling_factorial(q.n, p) / std::pow(q.N, p); // p! binom(n,p) / N^p
    return SectorOperator(a.modes, q.n, factor * symmetric_embed(a, q.n));
}

Eigen::MatrixXcd contract_rect(int modes,
                               const Eigen::MatrixXcd& A, int qa, int pa,
                               const Eigen::MatrixXcd& B, int qb, int pb, int r) {
    if (r < 0 || r > std::min(pa, qb))
        throw std::invalid_argument("contract_rect: r out of range [0, min(pa, qb)]");
    const int u = pa - r;
    const int v = qb - r;
    const Eigen::Index du = sector_dim(modes, u);
    const Eigen::Index dv = sector_dim(modes, v);

    // (1_u x B) S_{u+pb; u, pb}
    Eigen::MatrixXcd acc = kron_id_left(du, B) * splitting_isometry(modes, u, pb);
    // (1_u x S_{qb; r, v})
    acc = kron_id_left(du, splitting_isometry(modes, r, v)) * acc;
    // (S_{pa; u, r}^dag x 1_v): composite row-major indices (u,(r,v)) == ((u,r),v)
    acc = kron_id_right(splitting_isometry(modes, u, r).adjoint(), dv) * acc;
    // (A x 1_v)
    acc = kron_id_right(A, dv) * acc;
    // S_{qa+v; qa, v}^dag
    return splitting_isometry(modes, qa, v).adjoint() * acc;
}

SectorOperator contract(const SectorOperator& a, const SectorOperator& b, int r) {
    if (a.modes != b.modes) throw std::invalid_argument("contract: mode-space mismatch");
    const int p = a.particles, q = b.particles;
    if (r < 0 || r > std::min(p, q))
        throw std::invalid_argument("contract: r out of range [0, min(p, q)]");
    Eigen::MatrixXcd m = contract_rect(a.modes, a.mat, p, p, b.mat, q, q, r);
    return SectorOperator(a.modes, p + q - r, std::move(m));
}

double quantized_product_check(const SectorOperator& a, const SectorOperator& b,
                               const QuantizationParams& q) {
    const int p = a.particles, pq = b.particles;
    if (p + pq > q.n + std::min(p, pq))
        throw std::invalid_argument("quantized_product_check: every summand vanishes on this sector");
    Eigen::MatrixXcd lhs = quantize(a, q).mat * quantize(b, q).mat;
    Eigen::MatrixXcd rhs = Eigen::MatrixXcd::Zero(lhs.rows(), lhs.cols());
    for (int r = 0; r <= std::min(p, pq); ++r) {
        double coeff = static_cast<double>(binomial(p, r)) * static_cast<double>(binomial(pq, r));
        for (int j = 1; j <= r; ++j) coeff *= static_cast<double>(j) / q.N; // r! / N^r
        rhs += coeff * quantize(contract(a, b, r), q).mat;
    }
    double scale = std::max({lhs.cwiseAbs().maxCoeff(), rhs.cwiseAbs().maxCoeff(), 1e-300});
    return (lhs - rhs).cwiseAbs().maxCoeff() / scale;
}

SectorOperator build_hamiltonian(const ModeSpace& ms, const QuantizationParams& q) {
    if (q.n < 1) throw std::invalid_argument("build_hamiltonian: need at least one particle");
    SectorOperator one_body(ms.modes, 1, ms.one_body());
    Eigen::MatrixXcd H = q.N * quantize(one_body, q).mat;
    if (q.n >= 2) H += 0.5 * q.N * quantize(ms.W_op(), q).mat;
    return SectorOperator(ms.modes, q.n, std::move(H));
}

DensityMatrix marginal(const Eigen::VectorXcd& state, int modes, int n, int p) {
    if (p < 0 || p > n) throw std::invalid_argument("marginal: need 0 <= p <= n");
    const Eigen::Index dn = sector_dim(modes, n);
    if (state.size() != dn) throw std::invalid_argument("marginal: state does not live on the n-sector");
    if (std::abs(state.norm() - 1.0) > 1e-10)
        throw std::invalid_argument("marginal: state must be normalized");
    const Eigen::Index dp = sector_dim(modes, p);
    const Eigen::Index dv = sector_dim(modes, n - p);
    Eigen::VectorXcd split = splitting_isometry(modes, p, n - p) * state;
    Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        T(split.data(), dp, dv);
    DensityMatrix dm;
    dm.modes = modes;
    dm.particles = p;
    dm.mat = T * T.adjoint();
    dm.trace = dm.mat.trace().real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dm.mat);
    if (es.eigenvalues().minCoeff() < -1e-10)
        throw std::runtime_error("marginal: reduced density matrix has a negative eigenvalue");
    return dm;
}

std::pair<double, double> quantization_error(const SectorOperator& a,
                                             const Eigen::VectorXcd& psi, int N) {
    const int p = a.particles;
    if (N < p) throw std::invalid_argument("quantization_error: need N >= p");
    if (std::abs(psi.norm() - 1.0) > 1e-12)
        throw std::invalid_argument("quantization_error: psi must be a unit vector");
    QuantizationParams q = make_params(static_cast<double>(N), N);
    Eigen::VectorXcd big = product_state(psi, N);
    Eigen::VectorXcd small = product_state(psi, p);
    std::complex<double> quantum = big.dot(quantize(a, q).mat * big); // .dot conjugates the left factor
    std::complex<double> classical = small.dot(a.mat * small);
    double measured = std::abs(quantum - classical);
    double bound = static_cast<double>(p) * static_cast<double>(p) / static_cast<double>(N) *
                   spectral_norm(a.mat);
    return {measured, bound};
}

// -- small helpers declared in sector_operator.hpp --------------------------

double spectral_norm(const Eigen::MatrixXcd& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    return svd.singularValues()[0];
}

double hermiticity_residue(const Eigen::MatrixXcd& m) {
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

} // namespace mfl
