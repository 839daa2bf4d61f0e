#include "mfl/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfl {

namespace {

// Dormand-Prince 5(4) coefficients.  The last stage row doubles as the
// fifth-order weights; the separate d row gives the embedded fourth-order
// solution used for the error estimate.
constexpr double kC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};

constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};

constexpr double kB5[7] = {35.0 / 384,      0.0,          500.0 / 1113,
                           125.0 / 192,     -2187.0 / 6784, 11.0 / 84,
                           0.0};

constexpr double kB4[7] = {5179.0 / 57600,  0.0,           7571.0 / 16695,
                           393.0 / 640,     -92097.0 / 339200, 187.0 / 2100,
                           1.0 / 40};

double max_abs(const OdeState& y) {
    double m = 0.0;
    for (const auto& mat : y) {
        if (mat.size() > 0) m = std::max(m, mat.cwiseAbs().maxCoeff());
    }
    return m;
}

} // namespace

OdeState integrate_dp54(const OdeRhs& f, OdeState y0, double t0, double t1,
                        const OdeOptions& opts) {
    const double span = t1 - t0;
    if (span == 0.0) return y0;
    const double dir = span > 0.0 ? 1.0 : -1.0;
    const double span_abs = std::abs(span);
    const double h_min = span_abs * opts.min_step_factor;

    double t = t0;
    OdeState y = std::move(y0);
    double h = opts.first_step > 0.0 ? opts.first_step * span_abs
                                     : span_abs / 64.0;

    std::vector<OdeState> k(7);
    for (long step = 0; step < opts.max_steps; ++step) {
        const double remaining = std::abs(t1 - t);
        if (remaining <= span_abs * 1e-15) return y;
        h = std::min(h, remaining);
        if (h < h_min) throw std::runtime_error("ode step size underflow");

        const double hs = dir * h;
        k[0] = f(t, y);
        OdeState stage(y.size());
        for (int s = 1; s < 7; ++s) {
            for (std::size_t i = 0; i < y.size(); ++i) {
                Eigen::MatrixXcd acc = y[i];
                for (int j = 0; j < s; ++j) {
                    if (kA[s][j] != 0.0) acc.noalias() += (hs * kA[s][j]) * k[j][i];
                }
                stage[i] = std::move(acc);
            }
            k[s] = f(t + hs * kC[s], stage);
        }

        OdeState y5(y.size());
        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < y.size(); ++i) {
            Eigen::MatrixXcd next = y[i];
            Eigen::MatrixXcd diff = Eigen::MatrixXcd::Zero(y[i].rows(), y[i].cols());
            for (int s = 0; s < 7; ++s) {
                if (kB5[s] != 0.0) next.noalias() += (hs * kB5[s]) * k[s][i];
                const double db = kB5[s] - kB4[s];
                if (db != 0.0) diff.noalias() += (hs * db) * k[s][i];
            }
            if (!next.allFinite() || !diff.allFinite()) finite = false;
            if (finite && diff.size() > 0)
                err = std::max(err, diff.cwiseAbs().maxCoeff());
            y5[i] = std::move(next);
        }
        if (!finite) {
            // A non-finite right-hand side rejects the step outright.
            h *= 0.2;
            continue;
        }

        const double scale =
            opts.abs_tol + opts.rel_tol * std::max(max_abs(y), max_abs(y5));
        const double ratio = err / scale;
        if (ratio <= 1.0) {
            t += hs;
            y = std::move(y5);
        }
        const double grow =
            ratio > 0.0 ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
    }
    throw std::runtime_error("ode step budget exhausted");
}

} // namespace mfl
