#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "degensolve/coefficient_field.hpp"

namespace degensolve {

enum class ConditionName {
    diagonal,
    subordinate,
    super_subordinate,
    subunit,
    drift_super_subordinate,
    wirtinger,
    nondegeneracy,
};

std::string to_string(ConditionName c);

/// Outcome of one structural-condition sweep. best_constant is the smallest
/// constant making the inequality hold over the sampled set; when a
/// user-supplied bound is present, holds means best_constant <= bound.
struct ConditionReport {
    ConditionName condition_name = ConditionName::diagonal;
    bool holds = false;
    double best_constant = 0.0;
    Eigen::VectorXd worst_point;
    double worst_z = 0.0;
    long samples = 0;
    std::optional<double> bound;
    std::string note;

    nlohmann::json to_json() const;
};

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

/// Diagonal condition: sum k^i xi_i^2 <= xi^t A xi <= Lambda sum k^i xi_i^2,
/// discharged per sample by positive semidefiniteness of A - diag(k) and
/// Lambda diag(k) - A. Reports the smallest feasible Lambda found.
ConditionReport check_diagonal_equivalence(const CoefficientField& field,
                                           const BoxRegion& region,
                                           Interval z_range,
                                           double lambda_bound,
                                           int sample_density);

struct SubordinationOptions {
    /// Exponent on k in the scalar reduction |d_z k| <= B k^theta of the
    /// super-subordination weight; 1 is the paper's condition.
    double super_exponent = 1.0;
    std::optional<double> bound;
    int sample_density = 8;
};

/// Sweeps the requested quadratic-form conditions over a region x z lattice.
/// Flags: subordinate, super_subordinate, subunit, drift_super_subordinate,
/// wirtinger.
std::vector<ConditionReport> check_subordination_suite(const CoefficientField& field,
                                                       const BoxRegion& region,
                                                       Interval z_range,
                                                       const std::set<ConditionName>& flags,
                                                       const SubordinationOptions& opts = {});

/// Search result for the nondegeneracy box. On failure `box` is empty and the
/// report carries the best candidate with its failing face sample.
struct NondegeneracyResult {
    std::optional<BoxRegion> box;
    ConditionReport report;
};

/// Looks for a box R with half-lengths < epsilon, x in (1/3)R, and k^i > 0 on
/// every sampled point of the i-wrap T_i(R) for all sampled z. Deterministic
/// sweep: half-lengths {eps/2, eps/4, eps/8}, center offsets on a step-eps/8
/// lattice ordered by distance from x; first success wins.
NondegeneracyResult check_nondegeneracy_box(const CoefficientField& field,
                                            const Eigen::VectorXd& x,
                                            double epsilon,
                                            Interval z_range,
                                            int search_budget,
                                            int face_density = 5);

}  // namespace degensolve
