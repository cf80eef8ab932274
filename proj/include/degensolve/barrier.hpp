#pragma once

#include <optional>

#include "degensolve/coefficient_field.hpp"
#include "degensolve/modulus.hpp"
#include "degensolve/principles.hpp"

namespace degensolve {

/// The boundary barrier h(y) = -2 psi(sqrt(rho y_n)) + m1 y_l^2 / 2 + 1/ln y_n
/// in boundary coordinates (y_n inward normal, boundary point at the origin),
/// with psi = sqrt of the concave majorant and rho = (kappa0^{-1/2} + 1)^2.
struct Barrier {
    ConcaveMajorant omega;
    double kappa0 = 1.0;
    double rho = 4.0;
    double m1 = 1.0;
    double t1 = 0.1;
    int ell = 0;  // 0-based axis index of the y_l^2 term
    int dim = 2;
    Eigen::MatrixXd rotation;  // Theta; identity unless the caller pre-rotated
    double r0 = 1.0;           // radius cap of the neighborhood N_t
    double alpha0 = 1.0;
    double nu = 0.5;
    double c1 = 0.0;  // certified lower bound on theta_l A theta_l^t

    double value(const Eigen::VectorXd& y) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& y) const;
    /// Diagonal Hessian entries (all mixed entries vanish).
    Eigen::VectorXd hessian_diagonal(const Eigen::VectorXd& y) const;
    double laplacian(const Eigen::VectorXd& y) const;

    /// div A(x, h + m) grad h with analytic h-derivatives and the field's
    /// analytic x/z matrix derivatives.
    double elliptic_operator(const CoefficientField& field, const Eigen::VectorXd& y, double m) const;

    /// y is inside N_{t1} with the log guard, on the domain side of the
    /// boundary paraboloid kappa0 |y'|^2 <= y_n.
    bool in_validity_region(const Eigen::VectorXd& y, double floor = 1e-10) const;

    nlohmann::json certificate() const;
};

struct BarrierOptions {
    double nu = 0.5;            // outflow level h <= -nu on the face of N_{t1}
    double eta = 0.0;           // neighborhood cap |y| < eta (0 = unconstrained)
    int samples_per_dim = 12;   // sweep density during construction
    double floor = 1e-10;       // y_n log guard
    int m_lattice = 3;          // m samples in [-m0, m0]
};

struct BarrierMargins {
    double h_vs_omega = 0.0;
    double laplacian = 0.0;
    double lm = 0.0;
    double outflow = 0.0;
};

/// Selects the axis ell with the best ellipticity certificate, then sweeps m1
/// upward and t1 downward (deterministic order) until the sampled barrier
/// inequalities hold. Throws NumericalError with the last (m1, t1) and the
/// failing inequality when the budget runs out.
Barrier build_barrier(const ConcaveMajorant& omega,
                      double kappa0,
                      double m0,
                      double K,
                      const CoefficientField& field,
                      int search_budget,
                      const BarrierOptions& opts = {});

/// Re-verifies the four barrier inequalities on a fresh sample sweep; margins
/// ride in the metadata and the report's margin is their minimum.
PrincipleReport verify_barrier(const Barrier& b,
                               const CoefficientField& field,
                               double m0,
                               double K,
                               int samples_per_dim,
                               BarrierMargins* margins_out = nullptr);

struct BoundaryModulusSpec {
    Eigen::VectorXd x0;       // boundary point (on a grid face)
    double sigma = 0.05;      // target oscillation
    double kappa0 = 1.0;      // inscribed paraboloid bound for the box face
    double m0 = 1.0;
    double K = 0.0;
    int search_budget = 4096;
    BarrierOptions options;
};

/// Builds the majorant of the boundary datum's modulus at x0, constructs the
/// barrier there, reads off delta0 (largest sampled radius with -h < sigma on
/// the validity region) and asserts |w_eps(x) - phi(x0)| <= sigma for every
/// ladder rung on all nodes with |x - x0| < delta0.
PrincipleReport boundary_modulus_check(const std::vector<DiscreteSolution>& ladder,
                                       const Eigen::VectorXd& dirichlet,
                                       const CoefficientField& field,
                                       const BoundaryModulusSpec& spec);

}  // namespace degensolve
