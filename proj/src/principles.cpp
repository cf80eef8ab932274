#include "degensolve/principles.hpp"

#include <cmath>
#include <limits>

namespace degensolve {

std::string to_string(PrincipleName p) {
    switch (p) {
        case PrincipleName::maximum: return "maximum";
        case PrincipleName::comparison: return "comparison";
        case PrincipleName::interior_bounds: return "interior_bounds";
        case PrincipleName::barrier: return "barrier";
        case PrincipleName::boundary_modulus: return "boundary_modulus";
    }
    return "unknown";
}

nlohmann::json PrincipleReport::to_json() const {
    nlohmann::json j;
    j["name"] = to_string(name);
    j["holds"] = holds;
    j["margin"] = margin;
    j["witness"] = std::vector<double>(witness.data(), witness.data() + witness.size());
    if (!metadata.is_null()) j["metadata"] = metadata;
    return j;
}

PrincipleReport check_maximum_principle(const DiscreteSolution& sol,
                                        const Eigen::VectorXd& dirichlet,
                                        const CoefficientField* field) {
    const StructuredGrid& grid = sol.grid;
    if (dirichlet.size() != grid.num_nodes())
        throw ParameterError("maximum principle: dirichlet size does not match solution grid");

    PrincipleReport rep;
    rep.name = PrincipleName::maximum;
    rep.metadata["eps"] = sol.eps;

    if (field) {
        bool sign_ok = true;
        const Eigen::VectorXd c = grid.center();
        for (int s = -4; s <= 4; ++s) {
            const double z = 0.25 * s * (1.0 + sol.M);
            const double fv = field->zero(c, z);
            if (fv * (z > 0 ? 1.0 : z < 0 ? -1.0 : 0.0) > 1e-12) sign_ok = false;
            if (field->zero_dz(c, z) > 1e-12) sign_ok = false;
        }
        if (!sign_ok)
            rep.metadata["warning"] = "zero-order term violates f(x,z) sign z <= 0 or f_z <= 0 on samples";
    }

    double sup_phi = 0.0, sup_int = 0.0;
    std::int64_t worst = 0;
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
        if (grid.is_boundary(i)) {
            sup_phi = std::max(sup_phi, std::abs(dirichlet[i]));
        } else if (std::abs(sol.values[i]) > sup_int) {
            sup_int = std::abs(sol.values[i]);
            worst = i;
        }
    }
    const double tol = 1e-8 * (1.0 + sup_phi);
    rep.margin = sup_phi + tol - sup_int;
    rep.holds = rep.margin >= 0.0;
    rep.witness = grid.node(worst);
    rep.metadata["sup_boundary"] = sup_phi;
    rep.metadata["sup_interior"] = sup_int;
    return rep;
}

PrincipleReport check_comparison(const CoefficientField& field,
                                 const StructuredGrid& grid,
                                 const Eigen::VectorXd& phi0,
                                 const Eigen::VectorXd& phi1,
                                 double kappa,
                                 const SolverConfig& config) {
    if (kappa < 0.0) throw ParameterError("comparison: kappa must be >= 0");
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i)
        if (grid.is_boundary(i) && phi0[i] + kappa < phi1[i] - 1e-14 * (1.0 + std::abs(phi1[i])))
            throw ParameterError("comparison: boundary ordering phi0 + kappa >= phi1 violated at node " +
                                 std::to_string(i));

    PrincipleReport rep;
    rep.name = PrincipleName::comparison;
    const Eigen::VectorXd c = grid.center();
    if (field.drift(c, 0.0).cwiseAbs().maxCoeff() > 0.0)
        rep.metadata["warning"] = "field has nonzero drift; comparison lemma assumes gamma == 0";

    const auto run0 = viscosity_continuation(field, grid, phi0, config);
    const auto run1 = viscosity_continuation(field, grid, phi1, config);
    const Eigen::VectorXd& w0 = run0.ladder.back().values;
    const Eigen::VectorXd& w1 = run1.ladder.back().values;

    const double tol = 1e-8 * (1.0 + phi1.cwiseAbs().maxCoeff());
    double worst = std::numeric_limits<double>::infinity();
    std::int64_t worst_node = 0;
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
        const double slack = w0[i] + kappa - w1[i];
        if (slack < worst) {
            worst = slack;
            worst_node = i;
        }
    }
    rep.margin = worst;
    rep.holds = worst >= -tol;
    rep.witness = grid.node(worst_node);
    rep.metadata["kappa"] = kappa;
    rep.metadata["final_eps"] = run0.ladder.back().eps;
    return rep;
}

namespace {

struct DerivativeNorms {
    double grad = 0.0;
    double hess = 0.0;
};

DerivativeNorms interior_norms(const DiscreteSolution& sol, double shrink) {
    const StructuredGrid& g = sol.grid;
    const int dim = g.dim();
    DerivativeNorms out;
    for (std::int64_t j = 0; j < g.num_nodes(); ++j) {
        const auto m = g.multi_index(j);
        bool inside = true;
        for (int d = 0; d < dim; ++d) {
            const double half = 0.5 * (g.high(d) - g.low(d));
            const double cd = 0.5 * (g.high(d) + g.low(d));
            if (std::abs(g.coordinate(d, m[d]) - cd) > shrink * half) inside = false;
            if (m[d] == 0 || m[d] == g.count(d) - 1) inside = false;
        }
        if (!inside) continue;
        for (int d = 0; d < dim; ++d) {
            const double h = g.spacing(d);
            const double gp = sol.values[g.neighbor(j, d, +1)];
            const double gm = sol.values[g.neighbor(j, d, -1)];
            out.grad = std::max(out.grad, std::abs((gp - gm) / (2.0 * h)));
            out.hess = std::max(out.hess, std::abs((gp - 2.0 * sol.values[j] + gm) / (h * h)));
            for (int e = d + 1; e < dim; ++e) {
                const auto me = g.multi_index(j);
                if (me[e] == 0 || me[e] == g.count(e) - 1) continue;
                const double he = g.spacing(e);
                const double pp = sol.values[g.neighbor(g.neighbor(j, d, +1), e, +1)];
                const double pm = sol.values[g.neighbor(g.neighbor(j, d, +1), e, -1)];
                const double mp = sol.values[g.neighbor(g.neighbor(j, d, -1), e, +1)];
                const double mm = sol.values[g.neighbor(g.neighbor(j, d, -1), e, -1)];
                out.hess = std::max(out.hess, std::abs((pp - pm - mp + mm) / (4.0 * h * he)));
            }
        }
    }
    return out;
}

}  // namespace

PrincipleReport interior_regularity_report(const std::vector<DiscreteSolution>& ladder,
                                           double shrink,
                                           double blowup_factor,
                                           RegularityTable* table_out) {
    if (!(shrink > 0.0 && shrink < 1.0)) throw ParameterError("interior regularity: shrink must be in (0,1)");
    if (ladder.size() < 3) throw ParameterError("interior regularity: ladder must have at least 3 rungs");

    RegularityTable table;
    for (const auto& sol : ladder) {
        const auto n = interior_norms(sol, shrink);
        table.eps.push_back(sol.eps);
        table.grad_max.push_back(n.grad);
        table.hess_max.push_back(n.hess);
    }
    if (table_out) *table_out = table;

    PrincipleReport rep;
    rep.name = PrincipleName::interior_bounds;
    const double g0 = table.grad_max.front(), h0 = table.hess_max.front();
    double worst = std::numeric_limits<double>::infinity();
    std::size_t worst_rung = 0;
    for (std::size_t r = 0; r < table.eps.size(); ++r) {
        const double slack =
            std::min(blowup_factor * g0 - table.grad_max[r], blowup_factor * h0 - table.hess_max[r]);
        if (slack < worst) {
            worst = slack;
            worst_rung = r;
        }
    }
    const double scale = 1e-12 * (1.0 + std::max(g0, h0));
    rep.margin = worst + scale;
    rep.holds = rep.margin >= 0.0;
    rep.witness = Eigen::VectorXd::Constant(1, table.eps[worst_rung]);
    rep.metadata["eps"] = table.eps;
    rep.metadata["grad_max"] = table.grad_max;
    rep.metadata["hess_max"] = table.hess_max;
    rep.metadata["blowup_factor"] = blowup_factor;
    rep.metadata["shrink"] = shrink;
    return rep;
}

}  // namespace degensolve
