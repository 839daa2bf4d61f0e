#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "mfl/errors.hpp"
#include "mfl/expansion.hpp"
#include "mfl/fock.hpp"
#include "mfl/hartree.hpp"
#include "mfl/mode_space.hpp"
#include "mfl/rng.hpp"
#include "mfl/sector_basis.hpp"
#include "mfl/sector_operator.hpp"

using namespace mfl;
using cplx = std::complex<double>;

namespace {

const cplx kI(0.0, 1.0);

double max_abs(const Eigen::MatrixXcd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

ModeSpace seeded_space(std::uint64_t seed, int modes, bool with_v = false,
                       double v_scale = 1.0) {
    const Eigen::MatrixXcd h = random_hermitian_sector(seed, 1, modes);
    const Eigen::MatrixXcd w = random_hermitian_sector(seed + 1, 2, modes);
    std::optional<Eigen::MatrixXcd> v;
    if (with_v) v = v_scale * random_hermitian_sector(seed + 2, 1, modes);
    return make_mode_space(h, w, v);
}

Eigen::VectorXcd random_state(std::uint64_t seed, int modes, double norm) {
    SplitMix64 rng = SplitMix64::stream(seed, 0x700D, modes);
    Eigen::VectorXcd v(modes);
    for (int i = 0; i < modes; ++i)
        v(i) = cplx(rng.next_normal(), rng.next_normal());
    v *= norm / v.norm();
    return v;
}

Eigen::MatrixXcd random_rect(std::uint64_t seed, int modes, int bra, int ket) {
    SplitMix64 rng = SplitMix64::stream(seed, bra, ket);
    Eigen::MatrixXcd m(sector_dim(modes, bra), sector_dim(modes, ket));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            m(r, c) = cplx(rng.next_normal(), rng.next_normal());
    return m;
}

// Free one-body propagator built directly from an eigendecomposition, kept
// independent of the library's cached flow.
Eigen::VectorXcd one_body_reference(const Eigen::MatrixXcd& h, double t,
                                    const Eigen::VectorXcd& psi) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXcd phases =
        (-kI * t * es.eigenvalues().cast<cplx>().array()).exp();
    return es.eigenvectors() * phases.asDiagonal() *
           es.eigenvectors().adjoint() * psi;
}

} // namespace

TEST_CASE("mean field is Hermitian and acts as the pair convolution") {
    Eigen::MatrixXd table(2, 2);
    table << 0.3, 1.0, 1.0, -0.4;
    const Eigen::MatrixXcd h = random_hermitian_sector(41, 1, 2);
    const ModeSpace ms = make_mode_space_pair(h, table, std::nullopt);
    const Eigen::VectorXcd psi = random_state(7, 2, 1.1);

    const Eigen::MatrixXcd field = hartree_field(ms, psi);
    CHECK(max_abs(field - field.adjoint()) <= 1e-13);

    Eigen::VectorXcd conv(2);
    for (int i = 0; i < 2; ++i) {
        double acc = 0.0;
        for (int j = 0; j < 2; ++j) acc += table(i, j) * std::norm(psi(j));
        conv(i) = acc;
    }
    CHECK(max_abs(field * psi - conv.asDiagonal() * psi) <= 1e-13);

    // Energy agrees with the classical double sum over the pair table.
    double pair_sum = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            pair_sum += table(i, j) * std::norm(psi(i)) * std::norm(psi(j));
    const double direct =
        std::real(psi.dot(ms.one_body() * psi)) + 0.5 * pair_sum;
    CHECK(std::abs(hartree_energy(ms, psi) - direct) <= 1e-13);

    // General 2-sector interactions still give a Hermitian field.
    const ModeSpace general = seeded_space(91, 3, true, 0.6);
    const Eigen::VectorXcd chi = random_state(8, 3, 0.9);
    const Eigen::MatrixXcd general_field = hartree_field(general, chi);
    CHECK(max_abs(general_field - general_field.adjoint()) <= 1e-13);

    CHECK_THROWS_AS(hartree_field(ms, chi), config_error);
}

TEST_CASE("hartree flow conserves mass and energy") {
    for (int inst = 1; inst <= 20; ++inst) {
        CAPTURE(inst);
        const int modes = 2 + inst % 2;
        const bool with_v = inst % 3 == 0;
        const ModeSpace ms = seeded_space(100 + inst, modes, with_v, 0.7);
        const Eigen::VectorXcd psi0 =
            random_state(200 + inst, modes, 0.8 + 0.02 * inst);
        const double t = 0.05 * inst;

        const HartreeState out = hartree_evolve(ms, HartreeState{psi0, 0.0}, t);
        CHECK(out.time == t);
        CHECK(std::abs(out.psi.norm() - psi0.norm()) <= 1e-8);
        CHECK(std::abs(hartree_energy(ms, out.psi) -
                       hartree_energy(ms, psi0)) <= 1e-8);
    }
}

TEST_CASE("hartree flow without interaction is the one-body propagator") {
    const int modes = 3;
    const Eigen::MatrixXcd h = random_hermitian_sector(55, 1, modes);
    const Eigen::MatrixXcd v = 0.8 * random_hermitian_sector(56, 1, modes);
    const Eigen::MatrixXcd w0 =
        Eigen::MatrixXcd::Zero(sector_dim(modes, 2), sector_dim(modes, 2));
    const ModeSpace ms = make_mode_space(h, w0, v);
    const Eigen::VectorXcd psi0 = random_state(9, modes, 1.0);

    const double t = 0.9;
    const HartreeState out = hartree_evolve(ms, HartreeState{psi0, 0.0}, t);
    const Eigen::VectorXcd want = one_body_reference(ms.one_body(), t, psi0);
    CHECK(max_abs(out.psi - want) <= 1e-10);
}

TEST_CASE("hartree flow runs backwards to its initial state") {
    const ModeSpace ms = seeded_space(140, 3, true, 0.5);
    const Eigen::VectorXcd psi0 = random_state(10, 3, 1.05);

    const HartreeState fwd = hartree_evolve(ms, HartreeState{psi0, 0.0}, 0.7);
    const HartreeState back = hartree_evolve(ms, fwd, 0.0);
    CHECK(back.time == 0.0);
    CHECK(max_abs(back.psi - psi0) <= 1e-8);
}

TEST_CASE("trajectory sampling agrees with direct evolution") {
    const ModeSpace ms = seeded_space(150, 2);
    const Eigen::VectorXcd psi0 = random_state(11, 2, 0.95);
    const std::vector<double> times{0.1, 0.25, 0.4};

    const std::vector<HartreeState> traj =
        hartree_trajectory(ms, psi0, times, 1e-11);
    REQUIRE(traj.size() == times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        CAPTURE(i);
        CHECK(traj[i].time == times[i]);
        const HartreeState direct =
            hartree_evolve(ms, HartreeState{psi0, 0.0}, times[i], 1e-11);
        CHECK(max_abs(traj[i].psi - direct.psi) <= 1e-9);
    }

    CHECK_THROWS_AS(hartree_trajectory(ms, psi0, {0.2, 0.2}, 1e-10),
                    config_error);
    CHECK_THROWS_AS(hartree_trajectory(ms, psi0, {0.3, 0.1}, 1e-10),
                    config_error);
}

TEST_CASE("symbol: normalization, product kernels, shape checks") {
    const int modes = 3;
    const Eigen::VectorXcd psi = random_state(12, modes, 1.3);

    for (int p = 0; p <= 3; ++p) {
        CAPTURE(p);
        const cplx val = symbol(kernel_of(identity_operator(modes, p)), psi);
        CHECK(std::abs(val - std::pow(psi.squaredNorm(), p)) <= 1e-12);
    }

    // Rank-one rectangular kernel |phi^(x)2><chi| evaluates to
    // <psi,phi>^2 <chi,psi>.
    const Eigen::VectorXcd phi = random_state(13, modes, 1.0);
    const Eigen::VectorXcd chi = random_state(14, modes, 1.0);
    const ClassicalKernel rank_one = make_kernel(
        modes, 2, 1, product_state(phi, 2) * chi.transpose().conjugate());
    const cplx got = symbol(rank_one, psi);
    const cplx want = psi.dot(phi) * psi.dot(phi) * chi.dot(psi);
    CHECK(std::abs(got - want) <= 1e-12);

    CHECK_THROWS_AS(make_kernel(modes, 2, 1, Eigen::MatrixXcd::Zero(2, 2)),
                    config_error);
    CHECK_THROWS_AS(make_kernel(0, 0, 0, Eigen::MatrixXcd::Zero(1, 1)),
                    config_error);
    CHECK_THROWS_AS(symbol(rank_one, random_state(15, 2, 1.0)), config_error);
}

TEST_CASE("symbol gradient matches complex finite differences") {
    const int modes = 3;
    const Eigen::VectorXcd psi = random_state(16, modes, 1.1);
    const double delta = 1e-4;

    std::vector<ClassicalKernel> kernels;
    kernels.push_back(
        kernel_of(SectorOperator(modes, 2, random_hermitian_sector(60, 2, modes))));
    kernels.push_back(make_kernel(modes, 2, 1, random_rect(61, modes, 2, 1)));
    kernels.push_back(make_kernel(modes, 1, 2, random_rect(62, modes, 1, 2)));

    for (std::size_t which = 0; which < kernels.size(); ++which) {
        CAPTURE(which);
        const ClassicalKernel& a = kernels[which];
        const Eigen::VectorXcd grad = symbol_gradient(a, psi);
        for (int i = 0; i < modes; ++i) {
            CAPTURE(i);
            Eigen::VectorXcd e = Eigen::VectorXcd::Zero(modes);
            e(i) = 1.0;
            const cplx d_re =
                (symbol(a, psi + delta * e) - symbol(a, psi - delta * e)) /
                (2.0 * delta);
            const cplx d_im = (symbol(a, psi + delta * kI * e) -
                               symbol(a, psi - delta * kI * e)) /
                              (2.0 * delta);
            // The Wirtinger derivative in conj(psi_i) recombines the two
            // real directional derivatives.
            const cplx want = 0.5 * (d_re + kI * d_im);
            CHECK(std::abs(grad(i) - want) <= 1e-6);
        }
    }

    // Kernels into the vacuum sector are holomorphic in psi, so the
    // conjugate gradient vanishes identically.
    const ClassicalKernel into_vacuum =
        make_kernel(modes, 0, 2, random_rect(63, modes, 0, 2));
    CHECK(max_abs(symbol_gradient(into_vacuum, psi)) == 0.0);
}

TEST_CASE("poisson bracket: antisymmetry, identities, gradient pairing") {
    const int modes = 3;
    const SectorOperator a(modes, 1, random_hermitian_sector(70, 1, modes));
    const SectorOperator b(modes, 2, random_hermitian_sector(71, 2, modes));
    const Eigen::VectorXcd psi = random_state(17, modes, 0.9);

    CHECK(max_abs(poisson_bracket(a, b).mat + poisson_bracket(b, a).mat) ==
          0.0);
    CHECK(max_abs(poisson_bracket(b, b).mat) == 0.0);

    // The one-particle identity generates the global phase flow, which every
    // kernel observable is invariant under.
    const SectorOperator number = identity_operator(modes, 1);
    CHECK(max_abs(poisson_bracket(number, b).mat) <= 1e-13);

    const SectorOperator scalar(modes, 0, Eigen::MatrixXcd::Ones(1, 1));
    const SectorOperator degenerate = poisson_bracket(scalar, b);
    CHECK(degenerate.particles == 1);
    CHECK(max_abs(degenerate.mat) == 0.0);

    const std::vector<std::pair<SectorOperator, SectorOperator>> pairs{
        {a, a}, {a, b}, {b, b}};
    for (std::size_t which = 0; which < pairs.size(); ++which) {
        CAPTURE(which);
        const SectorOperator& x = pairs[which].first;
        const SectorOperator& y = pairs[which].second;
        const cplx lhs = symbol(kernel_of(poisson_bracket(x, y)), psi);
        const Eigen::VectorXcd gx = symbol_gradient(kernel_of(x), psi);
        const Eigen::VectorXcd gy = symbol_gradient(kernel_of(y), psi);
        const cplx rhs = kI * (gx.dot(gy) - gy.dot(gx));
        CHECK(std::abs(lhs - rhs) <= 1e-10);
    }
}

TEST_CASE("flow derivative of a symbol matches the energy brackets") {
    const int modes = 3;
    const ModeSpace ms = seeded_space(160, modes, true, 0.6);
    const Eigen::VectorXcd psi = random_state(18, modes, 0.9);
    const SectorOperator h_kernel(modes, 1, ms.one_body());

    for (int p = 1; p <= 2; ++p) {
        CAPTURE(p);
        const SectorOperator b(modes, p,
                               random_hermitian_sector(80 + p, p, modes));
        const ClassicalKernel bk = kernel_of(b);

        const double delta = 1e-4;
        const HartreeState plus =
            hartree_evolve(ms, HartreeState{psi, 0.0}, delta, 1e-11);
        const HartreeState minus =
            hartree_evolve(ms, HartreeState{psi, 0.0}, -delta, 1e-11);
        const double numeric =
            std::real(symbol(bk, plus.psi) - symbol(bk, minus.psi)) /
            (2.0 * delta);

        const double bracket = std::real(
            symbol(kernel_of(poisson_bracket(h_kernel, b)), psi) +
            0.5 * symbol(kernel_of(poisson_bracket(ms.W_op(), b)), psi));

        const Eigen::VectorXcd g_energy =
            symbol_gradient(kernel_of(h_kernel), psi) +
            0.5 * symbol_gradient(kernel_of(ms.W_op()), psi);
        const Eigen::VectorXcd g_b = symbol_gradient(bk, psi);
        const double paired = -2.0 * std::imag(g_energy.dot(g_b));

        CHECK(std::abs(numeric - bracket) <= 1e-6);
        CHECK(std::abs(bracket - paired) <= 1e-10);
    }
}

TEST_CASE("tree kernels match the zero-loop quantum kernels pointwise") {
    const ModeSpace ms = seeded_space(170, 2);
    const std::vector<double> all_times{0.13, 0.07, 0.29};
    const double t = 0.21;

    for (int p = 1; p <= 2; ++p) {
        const SectorOperator a(2, p, random_hermitian_sector(90 + p, p, 2));
        for (int k = 0; k <= 3; ++k) {
            CAPTURE(p);
            CAPTURE(k);
            const std::vector<double> times(all_times.begin(),
                                            all_times.begin() + k);
            const ClassicalKernel tree = tree_term(ms, kernel_of(a), times, t);
            const SectorOperator loopless =
                g_term(ms, a, LoopTermRequest{k, 0, 0, times, t});
            CHECK(tree.bra_particles == p + k);
            CHECK(tree.ket_particles == p + k);
            CHECK(max_abs(tree.mat - loopless.mat) <= 1e-12);
        }
    }
}

TEST_CASE("tree series converges to the evolved symbol inside the radius") {
    const int modes = 2;
    const ModeSpace ms = seeded_space(180, modes);
    const Eigen::VectorXcd psi = random_state(19, modes, std::sqrt(0.8));
    const SectorOperator a(modes, 1, random_hermitian_sector(95, 1, modes));
    const ClassicalKernel ak = kernel_of(a);
    const double t = 0.05;

    const HartreeState evolved =
        hartree_evolve(ms, HartreeState{psi, 0.0}, t, 1e-12);
    const cplx exact = symbol(ak, evolved.psi);

    double prev = 0.0;
    for (int K = 0; K <= 6; ++K) {
        CAPTURE(K);
        const TreeSeriesReport rep = tree_series(ms, ak, psi, t, K);
        REQUIRE(rep.order_values.size() == static_cast<std::size_t>(K) + 1);
        CHECK(std::abs(rep.radius_x - 8.0 * 0.8 * ms.w_sup * t) <= 1e-12);
        CHECK(rep.within_radius);
        const double err = std::abs(rep.sum - exact);
        if (K > 0 && prev > 1e-10)
            CHECK(err <= 0.6 * prev);
        if (K == 6)
            CHECK(err <= 1e-7);
        prev = err;
    }

    const TreeSeriesReport far = tree_series(ms, ak, psi, 10.0, 0);
    CHECK_FALSE(far.within_radius);

    CHECK_THROWS_AS(tree_series(ms, ak, psi, -1.0, 2), config_error);
    CHECK_THROWS_AS(tree_series(ms, ak, psi, 0.5, -1), config_error);
}
