#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/SparseCore>

#include "degensolve/coefficient_field.hpp"
#include "degensolve/errors.hpp"
#include "degensolve/grid.hpp"
#include "degensolve/truncation.hpp"

namespace degensolve {

struct SolverConfig {
    std::vector<double> eps_ladder;  // strictly decreasing, all > 0
    double newton_tol = 1e-10;
    int max_newton_iters = 60;
    double damping_factor = 0.5;
    double min_step = 0x1p-30;
    std::optional<double> M;  // truncation level; auto sup|dirichlet| when absent

    static SolverConfig defaults();
    void validate() const;
};

struct DiscreteSolution {
    StructuredGrid grid;
    Eigen::VectorXd values;
    double eps = 0.0;
    double M = 0.0;
    double residual_norm = 0.0;
    int newton_iters = 0;
    std::vector<double> norm_history;
};

struct AssembledSystem {
    Eigen::VectorXd residual;
    Eigen::SparseMatrix<double> jacobian;  // empty unless requested
};

/// Discrete Q_eps^M residual and its exact Jacobian (chi_M chain terms
/// included). Interior rows carry the equation; boundary rows are identity
/// with zero residual. Face coefficients are arithmetic means of the nodal
/// values of A(., chi_M(w(.))); the drift difference direction is chosen per
/// sign so the scheme stays monotone.
AssembledSystem assemble_residual(const CoefficientField& field,
                                  const StructuredGrid& grid,
                                  const Eigen::VectorXd& w,
                                  double eps,
                                  const TruncationProfile& trunc,
                                  bool with_jacobian = true);

struct NewtonFailure : NumericalError {
    NewtonFailure(const std::string& what, Eigen::VectorXd iterate, std::vector<double> history)
        : NumericalError(what), last_iterate(std::move(iterate)), norm_history(std::move(history)) {}
    Eigen::VectorXd last_iterate;
    std::vector<double> norm_history;
};

/// Damped Newton on the discrete system. `dirichlet` is a full nodal vector
/// whose boundary entries supply the data. Without a warm start the initial
/// guess is the linear pre-solve with identity coefficients and eps = 1.
DiscreteSolution newton_solve(const CoefficientField& field,
                              const StructuredGrid& grid,
                              const Eigen::VectorXd& dirichlet,
                              double eps,
                              const TruncationProfile& trunc,
                              const SolverConfig& config,
                              const Eigen::VectorXd* warm_start = nullptr);

struct ContinuationResult {
    std::vector<DiscreteSolution> ladder;
    std::vector<double> rung_diffs;  // sup differences between consecutive rungs
};

/// Solves down the eps ladder, warm-starting each rung from the previous one.
ContinuationResult viscosity_continuation(const CoefficientField& field,
                                          const StructuredGrid& grid,
                                          const Eigen::VectorXd& dirichlet,
                                          const SolverConfig& config);

struct MMatrixReport {
    bool holds = false;
    double worst_offdiag = 0.0;   // most positive off-diagonal of -J (want <= 0)
    double worst_row_slack = 0.0; // min of diag - sum |offdiag| (want >= 0)
    std::int64_t worst_node = -1;
};

/// Sign-pattern and weak-diagonal-dominance check of -J on interior rows.
MMatrixReport check_m_matrix(const AssembledSystem& sys, const StructuredGrid& grid);

/// Evaluates a scalar function of the node coordinates into a nodal vector.
Eigen::VectorXd nodal_values(const StructuredGrid& grid,
                             const std::function<double(const Eigen::VectorXd&)>& f);

}  // namespace degensolve
