#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "degensolve/solver.hpp"

namespace degensolve {

enum class PrincipleName {
    maximum,
    comparison,
    interior_bounds,
    barrier,
    boundary_modulus,
};

std::string to_string(PrincipleName p);

struct PrincipleReport {
    PrincipleName name = PrincipleName::maximum;
    bool holds = false;
    double margin = 0.0;  // worst slack; holds iff margin >= -tol
    Eigen::VectorXd witness;
    nlohmann::json metadata;

    nlohmann::json to_json() const;
};

/// sup_interior |w| <= sup_boundary |phi| + tol with tol = 1e-8 (1 + sup|phi|).
/// When a field is supplied the sign conditions f(x,z) sign z <= 0 and
/// f_z <= 0 are sampled; a violation only annotates the report.
PrincipleReport check_maximum_principle(const DiscreteSolution& sol,
                                        const Eigen::VectorXd& dirichlet,
                                        const CoefficientField* field = nullptr);

/// Solves both Dirichlet problems down the same ladder and checks
/// w0 + kappa >= w1 - tol nodewise at the final rung. Requires ordered
/// boundary data, gamma == 0 and f nonincreasing in z (sampled).
PrincipleReport check_comparison(const CoefficientField& field,
                                 const StructuredGrid& grid,
                                 const Eigen::VectorXd& phi0,
                                 const Eigen::VectorXd& phi1,
                                 double kappa,
                                 const SolverConfig& config);

struct RegularityTable {
    std::vector<double> eps;
    std::vector<double> grad_max;
    std::vector<double> hess_max;
};

/// Max discrete gradient/Hessian norms on the centered subdomain obtained by
/// shrinking the domain by `shrink`; holds iff no rung exceeds `blowup_factor`
/// times the first rung. The raw per-rung table rides in the metadata.
PrincipleReport interior_regularity_report(const std::vector<DiscreteSolution>& ladder,
                                           double shrink,
                                           double blowup_factor = 10.0,
                                           RegularityTable* table_out = nullptr);

}  // namespace degensolve
