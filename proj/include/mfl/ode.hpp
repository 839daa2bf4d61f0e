#pragma once

// Adaptive Dormand-Prince 5(4) integration for small stacks of dense complex
// matrices.  The expansion sweep and the Hartree flow both reduce to initial
// value problems whose state is a handful of sector matrices; a shared
// embedded Runge-Kutta pair with elementwise error control covers both.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace mfl {

using OdeState = std::vector<Eigen::MatrixXcd>;
using OdeRhs = std::function<OdeState(double, const OdeState&)>;

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    // Initial step as a fraction of the interval; 0 picks a default.
    double first_step = 0.0;
    // Throw once the step falls below |t1 - t0| * min_step_factor.
    double min_step_factor = 1e-14;
    long max_steps = 1000000;
};

// Integrates y' = f(t, y) from t0 to t1 (either direction) and returns y(t1).
// Throws std::runtime_error on step-size underflow or step-count exhaustion.
OdeState integrate_dp54(const OdeRhs& f, OdeState y0, double t0, double t1,
                        const OdeOptions& opts = {});

} // namespace mfl
