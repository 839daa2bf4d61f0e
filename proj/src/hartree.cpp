#include "mfl/hartree.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include <unsupported/Eigen/KroneckerProduct>

#include "mfl/errors.hpp"
#include "mfl/fock.hpp"
#include "mfl/free_flow.hpp"
#include "mfl/ode.hpp"
#include "mfl/sector_basis.hpp"
#include "mfl/splitting.hpp"

namespace mfl {

namespace {

const std::complex<double> kI(0.0, 1.0);

// h_MF[psi] psi without materialising the mean-field matrix.
Eigen::VectorXcd mean_field_force(const Eigen::MatrixXcd& split,
                                  const Eigen::MatrixXcd& w,
                                  const Eigen::VectorXcd& psi) {
    const auto m = psi.size();
    const Eigen::MatrixXcd iota =
        split.adjoint() *
        Eigen::kroneckerProduct(Eigen::MatrixXcd::Identity(m, m), psi);
    return iota.adjoint() * (w * (iota * psi));
}

} // namespace

ClassicalKernel make_kernel(int modes, int bra_particles, int ket_particles,
                            Eigen::MatrixXcd mat) {
    if (modes < 1)
        throw config_error("make_kernel: modes must be positive");
    if (bra_particles < 0 || ket_particles < 0)
        throw config_error("make_kernel: particle numbers must be nonnegative");
    if (mat.rows() != sector_dim(modes, bra_particles) ||
        mat.cols() != sector_dim(modes, ket_particles))
        throw config_error("make_kernel: matrix shape does not match the sectors");
    return ClassicalKernel{modes, bra_particles, ket_particles, std::move(mat)};
}

ClassicalKernel kernel_of(const SectorOperator& a) {
    return ClassicalKernel{a.modes, a.particles, a.particles, a.mat};
}

std::complex<double> symbol(const ClassicalKernel& a,
                            const Eigen::VectorXcd& psi) {
    if (psi.size() != a.modes)
        throw config_error("symbol: state dimension does not match kernel modes");
    const Eigen::VectorXcd bra = product_state(psi, a.bra_particles);
    const Eigen::VectorXcd ket = product_state(psi, a.ket_particles);
    return bra.dot(a.mat * ket);
}

Eigen::VectorXcd symbol_gradient(const ClassicalKernel& a,
                                 const Eigen::VectorXcd& psi) {
    if (psi.size() != a.modes)
        throw config_error(
            "symbol_gradient: state dimension does not match kernel modes");
    const int q = a.bra_particles;
    if (q == 0)
        return Eigen::VectorXcd::Zero(a.modes);
    // d/d(conj psi_i) <psi^(x)q, v> = q <e_i (x) psi^(x)(q-1), S v>: peeling
    // one conjugate factor off the product state splits the bra sector.
    const Eigen::VectorXcd image =
        a.mat * product_state(psi, a.ket_particles);
    const Eigen::MatrixXcd split = splitting_isometry(a.modes, 1, q - 1);
    const Eigen::MatrixXcd peel = Eigen::kroneckerProduct(
        Eigen::MatrixXcd::Identity(a.modes, a.modes),
        product_state(psi, q - 1));
    return static_cast<double>(q) * (peel.adjoint() * (split * image));
}

Eigen::MatrixXcd hartree_field(const ModeSpace& ms,
                               const Eigen::VectorXcd& psi) {
    if (psi.size() != ms.modes)
        throw config_error(
            "hartree_field: state dimension does not match mode space");
    const Eigen::MatrixXcd split = splitting_isometry(ms.modes, 1, 1);
    const Eigen::MatrixXcd iota =
        split.adjoint() *
        Eigen::kroneckerProduct(
            Eigen::MatrixXcd::Identity(ms.modes, ms.modes), psi);
    return iota.adjoint() * ms.W * iota;
}

double hartree_energy(const ModeSpace& ms, const Eigen::VectorXcd& psi) {
    if (psi.size() != ms.modes)
        throw config_error(
            "hartree_energy: state dimension does not match mode space");
    const Eigen::VectorXcd pair = product_state(psi, 2);
    const std::complex<double> value =
        psi.dot(ms.one_body() * psi) + 0.5 * pair.dot(ms.W * pair);
    return value.real();
}

HartreeState hartree_evolve(const ModeSpace& ms, const HartreeState& from,
                            double t, double tol) {
    if (from.psi.size() != ms.modes)
        throw config_error(
            "hartree_evolve: state dimension does not match mode space");
    if (!(tol > 0.0))
        throw config_error("hartree_evolve: tolerance must be positive");
    const double span = t - from.time;
    if (span == 0.0)
        return HartreeState{from.psi, t};

    // Interaction picture of the one-body part: psi(tau) = U(tau) chi(tau)
    // with U(tau) = e^{-i tau (h + V)}, so only the mean-field term drives
    // chi and the stiff linear phase is handled exactly.
    const FreeFlow flow(ms.one_body());
    const Eigen::MatrixXcd split = splitting_isometry(ms.modes, 1, 1);
    const OdeRhs rhs = [&](double tau, const OdeState& y) {
        const Eigen::MatrixXcd u = flow.propagator(1, -tau);
        const Eigen::VectorXcd psi = u * y[0];
        const Eigen::VectorXcd force = mean_field_force(split, ms.W, psi);
        OdeState dy(1);
        dy[0] = -kI * (u.adjoint() * force);
        return dy;
    };

    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-2;
    OdeState y0(1);
    y0[0] = from.psi;
    const OdeState chi = integrate_dp54(rhs, y0, 0.0, span, opts);

    HartreeState out;
    out.psi = flow.propagator(1, -span) * chi[0];
    out.time = t;
    return out;
}

std::vector<HartreeState> hartree_trajectory(const ModeSpace& ms,
                                             const Eigen::VectorXcd& psi0,
                                             const std::vector<double>& times,
                                             double tol) {
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1]))
            throw config_error(
                "hartree_trajectory: times must be strictly increasing");
    }
    std::vector<HartreeState> out;
    out.reserve(times.size());
    HartreeState cur{psi0, 0.0};
    for (double t : times) {
        cur = hartree_evolve(ms, cur, t, tol);
        out.push_back(cur);
    }
    return out;
}

SectorOperator poisson_bracket(const SectorOperator& a,
                               const SectorOperator& b) {
    if (a.modes != b.modes)
        throw config_error(
            "poisson_bracket: operators act on different mode counts");
    const int pa = a.particles;
    const int pb = b.particles;
    if (pa == 0 || pb == 0)
        return zero_operator(a.modes, std::max(pa + pb - 1, 0));
    const double weight = static_cast<double>(pa) * static_cast<double>(pb);
    Eigen::MatrixXcd mat =
        kI * weight * (contract(a, b, 1).mat - contract(b, a, 1).mat);
    return SectorOperator(a.modes, pa + pb - 1, std::move(mat));
}

ClassicalKernel tree_term(const ModeSpace& ms, const ClassicalKernel& a,
                          const std::vector<double>& times, double t) {
    if (a.modes != ms.modes)
        throw config_error("tree_term: kernel modes do not match mode space");
    const FreeFlow flow(ms.one_body());
    Eigen::MatrixXcd cur =
        flow.conjugate_rect(a.mat, a.bra_particles, a.ket_particles, t);
    int q = a.bra_particles;
    int p = a.ket_particles;
    for (double tj : times) {
        const Eigen::MatrixXcd w_t = flow.conjugate(ms.W, 2, tj);
        cur = kI * (static_cast<double>(q) *
                        contract_rect(ms.modes, w_t, 2, 2, cur, q, p, 1) -
                    static_cast<double>(p) *
                        contract_rect(ms.modes, cur, q, p, w_t, 2, 2, 1));
        ++q;
        ++p;
    }
    return ClassicalKernel{ms.modes, q, p, std::move(cur)};
}

std::vector<ClassicalKernel> integrated_tree_terms(const ModeSpace& ms,
                                                   const ClassicalKernel& a,
                                                   int K, double t,
                                                   double tol) {
    if (a.modes != ms.modes)
        throw config_error(
            "integrated_tree_terms: kernel modes do not match mode space");
    if (K < 0)
        throw config_error("integrated_tree_terms: order must be nonnegative");
    if (t < 0.0)
        throw config_error("integrated_tree_terms: time must be nonnegative");
    if (!(tol > 0.0))
        throw config_error("integrated_tree_terms: tolerance must be positive");

    const FreeFlow flow(ms.one_body());
    const int q = a.bra_particles;
    const int p = a.ket_particles;
    const Eigen::MatrixXcd base =
        flow.conjugate_rect(a.mat, q, p, t);

    std::vector<ClassicalKernel> out;
    out.reserve(K + 1);
    out.push_back(ClassicalKernel{ms.modes, q, p, base});
    if (K == 0)
        return out;

    if (t == 0.0) {
        for (int k = 1; k <= K; ++k)
            out.push_back(ClassicalKernel{
                ms.modes, q + k, p + k,
                Eigen::MatrixXcd::Zero(sector_dim(ms.modes, q + k),
                                       sector_dim(ms.modes, p + k))});
        return out;
    }

    // Forward sweep over the simplex: the order-k accumulator is driven by
    // the order-(k-1) one through the vertex at time t - sigma, so a single
    // pass from sigma = 0 to t produces every integrated order at once.
    OdeState y0;
    for (int k = 1; k <= K; ++k)
        y0.emplace_back(
            Eigen::MatrixXcd::Zero(sector_dim(ms.modes, q + k),
                                   sector_dim(ms.modes, p + k)));

    const OdeRhs rhs = [&](double sigma, const OdeState& y) {
        const Eigen::MatrixXcd w_t = flow.conjugate(ms.W, 2, t - sigma);
        OdeState dy(y.size());
        for (int k = 1; k <= K; ++k) {
            const Eigen::MatrixXcd& child = (k == 1) ? base : y[k - 2];
            const int qc = q + k - 1;
            const int pc = p + k - 1;
            dy[k - 1] =
                kI * (static_cast<double>(qc) *
                          contract_rect(ms.modes, w_t, 2, 2, child, qc, pc, 1) -
                      static_cast<double>(pc) *
                          contract_rect(ms.modes, child, qc, pc, w_t, 2, 2, 1));
        }
        return dy;
    };

    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-2;
    const OdeState terms = integrate_dp54(rhs, y0, 0.0, t, opts);
    for (int k = 1; k <= K; ++k)
        out.push_back(ClassicalKernel{ms.modes, q + k, p + k, terms[k - 1]});
    return out;
}

TreeSeriesReport tree_series(const ModeSpace& ms, const ClassicalKernel& a,
                             const Eigen::VectorXcd& psi, double t, int K) {
    if (psi.size() != ms.modes)
        throw config_error(
            "tree_series: state dimension does not match mode space");
    const std::vector<ClassicalKernel> terms =
        integrated_tree_terms(ms, a, K, t);

    TreeSeriesReport report;
    report.order_values.reserve(terms.size());
    std::complex<double> sum(0.0, 0.0);
    for (const ClassicalKernel& term : terms) {
        const std::complex<double> value = symbol(term, psi);
        report.order_values.push_back(value);
        sum += value;
    }
    report.sum = sum;
    report.radius_x = 8.0 * psi.squaredNorm() * ms.w_sup * t;
    report.within_radius = report.radius_x < 1.0;
    return report;
}

} // namespace mfl
