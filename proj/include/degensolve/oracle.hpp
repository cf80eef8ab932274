#pragma once

#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "degensolve/grid.hpp"

namespace degensolve {

/// The implicit example family: w(x,y) is the unique root z of
/// F(x,y,z) = z (x^2 + z^2)^{m - 1/2} + y. Smooth away from the origin, only
/// Holder-1/(2m) across y = 0 at x = 0.
struct SharpnessExample {
    int m = 1;
    double newton_tol = 1e-14;
    int max_iters = 100;

    SharpnessExample() = default;
    explicit SharpnessExample(int m_, double tol = 1e-14, int iters = 100);

    /// Sharpness exponent 1/(4m-2) of the super-subordination power.
    double sharp_exponent() const { return 1.0 / (4.0 * m - 2.0); }

    double F(double x, double y, double z) const;
    double F_z(double x, double y, double z) const;
    double F_x(double x, double y, double z) const;

    /// k(x1, z) = 2m (x1^2 + z^2)^{2m-1}
    double k(double x, double z) const;
};

/// Root of F(x,y,.) by safeguarded Newton on a certified bracket. Residual
/// contract |F(x,y,w)| <= newton_tol * (1 + |y|).
double sharpness_w(const SharpnessExample& ex, double x, double y);

/// (w_x, w_y) by implicit differentiation; throws NumericalError at the
/// singular point x = w = 0 (the origin on y = 0).
std::pair<double, double> sharpness_grad_w(const SharpnessExample& ex, double x, double y);

/// Conjugate function f(x,y) = x (x^2 + w^2)^{m-1/2}.
double sharpness_conjugate_f(const SharpnessExample& ex, double x, double y);

/// Closed-form gradient of the conjugate, by direct differentiation of its
/// formula (an independent route from the identities f_x = -k w_y, f_y = w_x).
std::pair<double, double> sharpness_conjugate_grad(const SharpnessExample& ex, double x, double y);

struct DiagnosticsReport {
    double cr_residual_max = 0.0;
    double energy = 0.0;
    double energy_bound = 0.0;
    double holder_slope = 0.0;
    double holder_target = 0.0;

    nlohmann::json to_json() const;
};

struct DiagnosticsOptions {
    /// Dyadic |y| samples for the Holder fit; defaults to 2^{-4} .. 2^{-20}.
    std::vector<double> holder_ys;
};

/// Finite-difference Cauchy-Riemann residuals outside an excluded disc,
/// trapezoidal degenerate-Sobolev energy against the 3 m^2 |Omega| bound, and
/// the fitted Holder slope of log |w(0,y)| vs log |y|.
DiagnosticsReport oracle_diagnostics(const SharpnessExample& ex,
                                     const StructuredGrid& grid,
                                     double exclusion_radius,
                                     const DiagnosticsOptions& opts = {});

}  // namespace degensolve
