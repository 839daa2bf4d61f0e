#pragma once

// Numerical verification of the dispersive inputs: the sharp Kato smoothing
// constant pi/(d-2) for the free flow e^{i t Laplacian} in d >= 3 dimensions,
// its saturation by Gaussian data, the Newton's-theorem angular integral
// g(v), the centre-of-mass pair reduction factor pi kappa^2 / 2, and the
// L^1-in-time Cauchy-Schwarz corollary.  Everything reduces analytically to
// one-dimensional adaptive quadrature before any numerics.

#include <optional>
#include <string>

namespace mfl {

// Surface measure of the unit sphere S^{d-1} in R^d.
double sphere_area(int d);

// Sharp smoothing constant pi/(d-2); requires d >= 3.
double kato_bound(int d);

// || |x|^{-1} e^{i t Laplacian} psi ||^2 for the unit L^2 Gaussian, computed
// by radial quadrature of the spread Gaussian density (variance 1 + 4t^2).
double gaussian_weight_at(int d, double t, double quad_tol = 1e-10);

// Time integral of gaussian_weight_at over (-T, T); the default covers the
// whole line and saturates kato_bound(d).
double gaussian_kato_integral(int d, double quad_tol = 1e-9,
                              double half_width = 0.0);

// Angular integral (1/2) int_{S^{d-1}} de |e - p/sqrt(v)|^{-(d-2)} evaluated
// by Newton's theorem: (1/2)|S^{d-1}| min(v^{(d-2)/2}, 1).
double newton_g(double v, int d);

// int_{S^{d-1}} de |e - p/sqrt(v)|^{-(d-2*gamma)} by quadrature in cos(theta);
// the integrable endpoint singularity at v = 1 is handled by a
// double-exponential rule.
double angular_integral(int d, double gamma, double v, double quad_tol = 1e-9);

// sup over v >= 0 of angular_integral; finite exactly when gamma > 1/2, which
// is what the generalized smoothing estimate needs.  No sharp constant is
// asserted, only finiteness.
double angular_supremum(int d, double gamma, double quad_tol = 1e-9);

// Two-body constant pi kappa^2 / 2: in centre-of-mass coordinates the
// relative Laplacian carries speed 2, which halves the single-particle
// constant pi kappa^2.
double pair_reduction_factor(double kappa);

// int_0^t || |x|^{-1} e^{i s Laplacian} psi || ds for the unit Gaussian.
double l1_time_value(int d, double t, double quad_tol = 1e-9);

// Cauchy-Schwarz majorant sqrt(pi kappa^2 t / 2) of the L^1-in-time value.
double l1_time_bound(double kappa, double t);

struct KatoReport {
    int d = 0;
    std::optional<double> gamma;
    double computed = 0.0;
    std::optional<double> bound;
    std::optional<double> abs_err;
};

// Without gamma: the saturated Gaussian integral against the sharp bound.
// With gamma: the angular supremum of the generalized estimate (reported
// without a target, none is known).
KatoReport kato_check(int d, std::optional<double> gamma = std::nullopt,
                      double quad_tol = 1e-9);

std::string kato_report_json(const KatoReport& report);

} // namespace mfl
