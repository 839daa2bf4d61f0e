#include "mfl/expansion.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <utility>

#include <json.hpp>

#include "mfl/errors.hpp"
#include "mfl/free_flow.hpp"
#include "mfl/ode.hpp"
#include "mfl/sector_basis.hpp"
#include "mfl/splitting.hpp"

namespace mfl {

namespace {

const std::complex<double> kI(0.0, 1.0);

// Degree-r contraction commutator [x, y]_r = x o_r y - y o_r x.
Eigen::MatrixXcd comm_mat(const SectorOperator& x, const SectorOperator& y, int r) {
    return contract(x, y, r).mat - contract(y, x, r).mat;
}

// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
// three-term recurrence.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
    std::vector<double> x(static_cast<std::size_t>(order));
    std::vector<double> w(static_cast<std::size_t>(order));
    for (int i = 0; i < order; ++i) {
        double xi = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double p0 = 0.0;
        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            p0 = 1.0;
            double p1 = 0.0;
            for (int j = 0; j < order; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * xi * p1 - j * p2) / (j + 1.0);
            }
            deriv = order * (xi * p0 - p1) / (xi * xi - 1.0);
            const double dx = p0 / deriv;
            xi -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        x[static_cast<std::size_t>(i)] = xi;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - xi * xi) * deriv * deriv);
    }
    return {std::move(x), std::move(w)};
}

} // namespace

SectorOperator free_evolve(const ModeSpace& ms, const SectorOperator& a,
                           double t) {
    if (a.modes != ms.modes)
        throw config_error("free_evolve: observable mode count does not match mode space");
    FreeFlow ev(ms.h);
    return SectorOperator(a.modes, a.particles, ev.conjugate(a.mat, a.particles, t));
}

SectorOperator g_term(const ModeSpace& ms, const SectorOperator& a,
                      const LoopTermRequest& req) {
    if (a.modes != ms.modes)
        throw config_error("g_term: observable mode count does not match mode space");
    if (req.k < 0) throw config_error("g_term: negative commutator depth");
    if (static_cast<int>(req.times.size()) != req.k)
        throw config_error("g_term: need exactly one time per vertex");
    const int p = a.particles;
    if (req.l < 0 || req.m < 0 || req.l + req.m > req.k)
        return zero_operator(ms.modes, std::max(p + req.k - req.l - req.m, 0));
    if (req.m > 0 && !ms.V)
        throw config_error("g_term: potential vertices requested but the mode space has no V");

    FreeFlow ev(ms.h);
    std::map<std::tuple<int, int, int>, SectorOperator> memo;
    std::function<const SectorOperator&(int, int, int)> rec =
        [&](int k, int l, int m) -> const SectorOperator& {
        const auto key = std::make_tuple(k, l, m);
        auto it = memo.find(key);
        if (it != memo.end()) return it->second;

        const int s = p + k - l - m;
        SectorOperator out = zero_operator(ms.modes, s);
        if (k == 0) {
            out.mat = ev.conjugate(a.mat, p, req.t);
        } else {
            const double tk = req.times[static_cast<std::size_t>(k - 1)];
            const SectorOperator wt(ms.modes, 2, ev.conjugate(ms.W, 2, tk));
            if (s >= 2 && l + m <= k - 1)
                out.mat += (kI * double(s - 1)) * comm_mat(wt, rec(k - 1, l, m), 1);
            if (s >= 2 && l >= 1)
                out.mat += (kI * (0.5 * s * (s - 1))) * comm_mat(wt, rec(k - 1, l - 1, m), 2);
            if (s >= 1 && m >= 1) {
                const SectorOperator vt(ms.modes, 1, ev.conjugate(*ms.V, 1, tk));
                out.mat += (kI * double(s)) * comm_mat(vt, rec(k - 1, l, m - 1), 1);
            }
        }
        return memo.emplace(key, std::move(out)).first->second;
    };
    return rec(req.k, req.l, req.m);
}

SectorOperator simplex_integrate(
    int k, const std::function<SectorOperator(const std::vector<double>&)>& f,
    double t, int quad_order) {
    if (k < 0) throw config_error("simplex_integrate: negative depth");
    if (quad_order < 1) throw config_error("simplex_integrate: quadrature order must be positive");
    if (k == 0) return f({});

    const auto [xs, ws] = gauss_legendre(quad_order);
    std::vector<double> u(static_cast<std::size_t>(k));
    std::optional<SectorOperator> proto;
    // Level j integrates u_j over [0, upper]; j = k is the outermost level.
    std::function<Eigen::MatrixXcd(int, double)> level =
        [&](int j, double upper) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd acc;
        for (int q = 0; q < quad_order; ++q) {
            const double uj = 0.5 * upper * (xs[static_cast<std::size_t>(q)] + 1.0);
            u[static_cast<std::size_t>(j - 1)] = uj;
            Eigen::MatrixXcd inner;
            if (j == 1) {
                SectorOperator val = f(u);
                if (!proto) proto = val;
                inner = std::move(val.mat);
            } else {
                inner = level(j - 1, uj);
            }
            const double wq = 0.5 * upper * ws[static_cast<std::size_t>(q)];
            if (acc.size() == 0)
                acc = wq * inner;
            else
                acc.noalias() += wq * inner;
        }
        return acc;
    };

    Eigen::MatrixXcd total = level(k, t);
    SectorOperator out = *proto;
    out.mat = std::move(total);
    return out;
}

std::map<std::tuple<int, int, int>, SectorOperator> integrated_g_terms(
    const ModeSpace& ms, const SectorOperator& a, int K, double t,
    double tol) {
    if (a.modes != ms.modes)
        throw config_error("integrated_g_terms: observable mode count does not match mode space");
    if (K < 0) throw config_error("integrated_g_terms: negative depth");
    if (t < 0.0) throw config_error("integrated_g_terms: negative time");
    if (!(tol > 0.0)) throw config_error("integrated_g_terms: tolerance must be positive");

    const bool with_v = ms.V.has_value();
    const int p = a.particles;

    FreeFlow ev(ms.h);
    const Eigen::MatrixXcd a_t = ev.conjugate(a.mat, p, t);

    std::map<std::tuple<int, int, int>, SectorOperator> out;
    out.emplace(std::make_tuple(0, 0, 0), SectorOperator(ms.modes, p, a_t));

    std::vector<std::tuple<int, int, int>> idx;
    std::map<std::tuple<int, int, int>, std::size_t> pos;
    for (int k = 1; k <= K; ++k)
        for (int l = 0; l <= k; ++l)
            for (int m = 0; m <= (with_v ? k - l : 0); ++m) {
                pos.emplace(std::make_tuple(k, l, m), idx.size());
                idx.emplace_back(k, l, m);
            }
    if (idx.empty()) return out;

    if (t == 0.0) {
        for (const auto& key : idx)
            out.emplace(key, zero_operator(ms.modes, p + std::get<0>(key) -
                                                         std::get<1>(key) -
                                                         std::get<2>(key)));
        return out;
    }

    OdeState y0(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto& [k, l, m] = idx[i];
        const int d = sector_dim(ms.modes, p + k - l - m);
        y0[i] = Eigen::MatrixXcd::Zero(d, d);
    }

    // With sigma measuring distance below the observable time, the partially
    // integrated kernels satisfy a coupled linear system driven by the
    // conjugated vertices at time t - sigma; integrating sigma from 0 to t
    // reproduces every nested simplex integral at once.
    const OdeRhs rhs = [&](double sigma, const OdeState& y) -> OdeState {
        const SectorOperator wt(ms.modes, 2, ev.conjugate(ms.W, 2, t - sigma));
        std::optional<SectorOperator> vt;
        if (with_v) vt.emplace(ms.modes, 1, ev.conjugate(*ms.V, 1, t - sigma));

        OdeState dy(y.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const auto& [k, l, m] = idx[i];
            const int s = p + k - l - m;
            Eigen::MatrixXcd acc =
                Eigen::MatrixXcd::Zero(y[i].rows(), y[i].cols());
            const auto child = [&](int l2, int m2) -> const Eigen::MatrixXcd* {
                if (l2 < 0 || m2 < 0 || l2 + m2 > k - 1) return nullptr;
                if (k == 1) return (l2 == 0 && m2 == 0) ? &a_t : nullptr;
                return &y[pos.at(std::make_tuple(k - 1, l2, m2))];
            };
            if (s >= 2)
                if (const auto* c = child(l, m))
                    acc += (kI * double(s - 1)) *
                           comm_mat(wt, SectorOperator(ms.modes, s - 1, *c), 1);
            if (s >= 2 && l >= 1)
                if (const auto* c = child(l - 1, m))
                    acc += (kI * (0.5 * s * (s - 1))) *
                           comm_mat(wt, SectorOperator(ms.modes, s, *c), 2);
            if (s >= 1 && m >= 1)
                if (const auto* c = child(l, m - 1))
                    acc += (kI * double(s)) *
                           comm_mat(*vt, SectorOperator(ms.modes, s, *c), 1);
            dy[i] = std::move(acc);
        }
        return dy;
    };

    OdeOptions opts;
    opts.rel_tol = tol;
    opts.abs_tol = tol * 1e-2;
    OdeState yt = integrate_dp54(rhs, std::move(y0), 0.0, t, opts);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const auto& [k, l, m] = idx[i];
        out.emplace(idx[i], SectorOperator(ms.modes, p + k - l - m, std::move(yt[i])));
    }
    return out;
}

Eigen::MatrixXcd heisenberg_exact(const ModeSpace& ms, const SectorOperator& a,
                                  const QuantizationParams& q, double t,
                                  int dim_budget) {
    const int dim = sector_dim(ms.modes, q.n);
    if (dim > dim_budget)
        throw budget_error("heisenberg_exact: sector dimension " + std::to_string(dim) +
                           " exceeds budget " + std::to_string(dim_budget));
    const SectorOperator ham = build_hamiltonian(ms, q);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ham.mat);
    Eigen::VectorXcd phase(dim);
    for (int i = 0; i < dim; ++i)
        phase[i] = std::exp(kI * (t * es.eigenvalues()[i]));
    const Eigen::MatrixXcd u =
        es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
    return u * quantize(a, q).mat * u.adjoint();
}

RadiusReport radius(double coupling, double nu, double t) {
    if (!(coupling > 0.0)) throw config_error("radius: coupling must be positive");
    if (!(nu > 0.0)) throw config_error("radius: density must be positive");
    if (t < 0.0) throw config_error("radius: negative time");
    RadiusReport r;
    r.bounded_threshold = 1.0 / (8.0 * nu * coupling);
    r.coulomb_radius =
        1.0 / (128.0 * std::numbers::pi * coupling * coupling * nu * nu);
    r.smallness = std::sqrt(t / r.coulomb_radius);
    r.above_threshold = t >= r.bounded_threshold;
    return r;
}

std::pair<Eigen::MatrixXcd, ExpansionReport> loop_expansion(
    const ModeSpace& ms, const SectorOperator& a, const QuantizationParams& q,
    double t, const ExpansionOrder& order) {
    if (order.K < 0) throw config_error("loop_expansion: depth must be nonnegative");
    if (order.L < 1 || order.L > order.K + 1)
        throw config_error("loop_expansion: loop cutoff must satisfy 1 <= L <= K + 1");
    if (order.quad_order < 2)
        throw config_error("loop_expansion: quadrature order must be at least 2");
    if (!(q.N > 0.0)) throw config_error("loop_expansion: N must be positive");

    const int p = a.particles;
    const double nu = q.nu();
    auto terms = integrated_g_terms(ms, a, order.K, t);

    ExpansionReport rep;
    rep.order = order;
    rep.N = q.N;
    rep.n = q.n;
    rep.t = t;
    if (ms.w_sup > 0.0 && nu > 0.0) {
        rep.radius = radius(ms.w_sup, nu, t);
    } else {
        rep.radius.bounded_threshold = std::numeric_limits<double>::infinity();
        rep.radius.coulomb_radius = std::numeric_limits<double>::infinity();
    }

    const int dim = sector_dim(ms.modes, q.n);
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& [key, op] : terms) {
        const auto& [k, l, m] = key;
        if (l > order.L - 1) continue;
        const Eigen::MatrixXcd weighted =
            std::pow(q.N, -double(l)) * quantize(op, q).mat;
        sum += weighted;
        rep.term_norms.push_back({k, l, m, spectral_norm(weighted)});
    }

    const double x = 8.0 * nu * ms.w_sup * t;
    const double anorm = spectral_norm(a.mat);
    if (x < 1.0)
        rep.tail_estimate = std::pow(2.0 * nu, double(p)) * anorm *
                            std::pow(x, double(order.K + 1)) / (1.0 - x);
    else
        rep.tail_estimate = std::numeric_limits<double>::infinity();

    return {std::move(sum), std::move(rep)};
}

std::string expansion_report_json(const ExpansionReport& report) {
    nlohmann::json doc;
    doc["K"] = report.order.K;
    doc["L"] = report.order.L;
    doc["N"] = report.N;
    doc["n"] = report.n;
    doc["t"] = report.t;
    doc["thresholds"] = {
        {"bounded_threshold", report.radius.bounded_threshold},
        {"coulomb_radius", report.radius.coulomb_radius},
        {"smallness", report.radius.smallness},
        {"above_threshold", report.radius.above_threshold},
    };
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& tn : report.term_norms)
        terms.push_back({{"k", tn.k}, {"l", tn.l}, {"m", tn.m}, {"norm", tn.norm}});
    doc["terms"] = std::move(terms);
    if (std::isfinite(report.tail_estimate))
        doc["tail_estimate"] = report.tail_estimate;
    else
        doc["tail_estimate"] = nullptr;
    if (report.error_vs_exact)
        doc["error_vs_exact"] = *report.error_vs_exact;
    else
        doc["error_vs_exact"] = nullptr;
    return doc.dump(2);
}

} // namespace mfl
