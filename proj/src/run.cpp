#include "degensolve/run.hpp"

#include <cmath>

#include "degensolve/barrier.hpp"
#include "degensolve/conditions.hpp"
#include "degensolve/expr.hpp"
#include "degensolve/oracle.hpp"
#include "degensolve/parallel.hpp"
#include "degensolve/principles.hpp"

namespace degensolve {

namespace {

using nlohmann::json;
using Vec = Eigen::VectorXd;

ConcaveMajorant named_majorant(const BarrierSpec& spec) {
    const double a = spec.omega_coeff;
    if (spec.omega == "linear")
        return ConcaveMajorant::analytic([a](double r) { return a * r; }, [a](double) { return a; },
                                         [](double) { return 0.0; }, spec.rbar);
    const double p = spec.omega == "sqrt" ? 0.5 : spec.omega_power;
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("barrier.omega_power must lie in (0,1)");
    return ConcaveMajorant::analytic([a, p](double r) { return a * std::pow(r, p); },
                                     [a, p](double r) { return a * p * std::pow(r, p - 1.0); },
                                     [a, p](double r) { return a * p * (p - 1.0) * std::pow(r, p - 2.0); },
                                     spec.rbar);
}

json condition_results(const RunConfig& cfg, bool* all_hold) {
    const CoefficientField field = make_builtin_family(cfg.family.name, cfg.family.params);
    const auto& c = cfg.conditions;
    if (static_cast<int>(c.region_center.size()) != field.dim ||
        static_cast<int>(c.region_half.size()) != field.dim)
        throw ConfigError("conditions.region_center/region_half must match the family dimension");
    Vec center(field.dim), half(field.dim);
    for (int d = 0; d < field.dim; ++d) {
        center[d] = c.region_center[static_cast<std::size_t>(d)];
        half[d] = c.region_half[static_cast<std::size_t>(d)];
    }
    const BoxRegion region(center, half);
    const Interval z{c.z_lo, c.z_hi};

    json out = json::array();
    for (const std::string& flag : c.flags) {
        ConditionReport rep;
        if (flag == "diagonal") {
            rep = check_diagonal_equivalence(field, region, z, c.lambda_bound, c.sample_density);
        } else {
            SubordinationOptions opts;
            opts.sample_density = c.sample_density;
            opts.super_exponent = c.super_exponent;
            opts.bound = c.bound;
            std::set<ConditionName> flags;
            if (flag == "subordinate") flags.insert(ConditionName::subordinate);
            else if (flag == "super_subordinate") flags.insert(ConditionName::super_subordinate);
            else if (flag == "subunit") flags.insert(ConditionName::subunit);
            else if (flag == "drift_super_subordinate") flags.insert(ConditionName::drift_super_subordinate);
            else if (flag == "wirtinger") flags.insert(ConditionName::wirtinger);
            else throw ConfigError("conditions.flags: unknown condition '" + flag + "'");
            rep = check_subordination_suite(field, region, z, flags, opts).front();
        }
        if (!rep.holds) *all_hold = false;
        out.push_back(rep.to_json());
    }
    return out;
}

}  // namespace

std::function<double(const Vec&)> resolve_dirichlet(const DirichletSpec& spec, const FamilySpec& family) {
    if (!spec.expr.empty()) {
        const Expression e = Expression::parse(spec.expr);
        return [e](const Vec& x) { return e(x); };
    }
    if (spec.name == "zero") return [](const Vec&) { return 0.0; };
    if (spec.name == "constant") {
        const double v = spec.value;
        return [v](const Vec&) { return v; };
    }
    if (spec.name == "sine") {
        const double pi = std::acos(-1.0);
        return [pi](const Vec& x) { return std::sin(pi * x[0]) + std::cos(pi * x[1]); };
    }
    if (spec.name == "saddle") return [](const Vec& x) { return x[0] * x[0] - x[1] * x[1]; };
    if (spec.name == "cubic_harmonic")
        return [](const Vec& x) { return x[0] * x[0] * x[0] - 3.0 * x[0] * x[1] * x[1]; };
    if (spec.name == "oracle") {
        const int m = family.params.empty() ? 1 : static_cast<int>(family.params[0]);
        const SharpnessExample ex(m);
        return [ex](const Vec& x) { return sharpness_w(ex, x[0], x[1]); };
    }
    throw ConfigError("dirichlet: unknown datum '" + spec.name + "'");
}

RunResult execute_run(const RunConfig& cfg) {
    set_threads(cfg.threads);
    RunResult result;
    json& m = result.manifest;
    m["config"] = cfg.echo();

    switch (cfg.command) {
        case Command::solve: {
            const CoefficientField field = make_builtin_family(cfg.family.name, cfg.family.params);
            const StructuredGrid grid = cfg.grid.build();
            const auto phi = resolve_dirichlet(cfg.dirichlet, cfg.family);
            const Vec dirichlet = nodal_values(grid, phi);
            const ContinuationResult run = viscosity_continuation(field, grid, dirichlet, cfg.solver);
            json ladder = json::array();
            for (const auto& sol : run.ladder)
                ladder.push_back({{"eps", sol.eps},
                                  {"residual_norm", sol.residual_norm},
                                  {"newton_iters", sol.newton_iters},
                                  {"sup_norm", sol.values.lpNorm<Eigen::Infinity>()}});
            m["solve"] = {{"ladder", ladder}, {"rung_diffs", run.rung_diffs}, {"M", run.ladder.front().M}};
            result.files["solution.csv"] = solution_csv(grid, run.ladder.back().values);
            break;
        }
        case Command::check_conditions: {
            m["conditions"] = condition_results(cfg, &result.all_hold);
            break;
        }
        case Command::oracle: {
            const SharpnessExample ex(cfg.oracle.m);
            const StructuredGrid grid = cfg.grid.build();
            const DiagnosticsReport rep = oracle_diagnostics(ex, grid, cfg.oracle.exclusion_radius);
            m["oracle"] = rep.to_json();
            if (rep.energy > rep.energy_bound) result.all_hold = false;
            Vec w(grid.num_nodes());
            for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
                const Vec x = grid.node(i);
                w[i] = sharpness_w(ex, x[0], x[1]);
            }
            result.files["oracle_w.csv"] = solution_csv(grid, w);
            break;
        }
        case Command::barrier: {
            const CoefficientField field = make_builtin_family(cfg.family.name, cfg.family.params);
            const ConcaveMajorant omega = named_majorant(cfg.barrier);
            BarrierOptions opts;
            opts.nu = cfg.barrier.nu;
            const Barrier b =
                build_barrier(omega, cfg.barrier.kappa0, cfg.barrier.m0, cfg.barrier.K, field,
                              cfg.barrier.budget, opts);
            BarrierMargins margins;
            const PrincipleReport rep =
                verify_barrier(b, field, cfg.barrier.m0, cfg.barrier.K, cfg.barrier.verify_samples, &margins);
            m["barrier"] = rep.to_json();
            if (!rep.holds) result.all_hold = false;
            break;
        }
        case Command::convergence: {
            if (cfg.family.name != "sharpness")
                throw ConfigError("convergence: requires the sharpness family (oracle ground truth)");
            const CoefficientField field = make_builtin_family(cfg.family.name, cfg.family.params);
            const SharpnessExample ex(cfg.family.params.empty() ? 1 : static_cast<int>(cfg.family.params[0]));
            json table = json::array();
            double prev_err = 0.0;
            bool decreasing = true;
            for (std::size_t level = 0; level < cfg.convergence.grid_counts.size(); ++level) {
                GridSpec gs = cfg.grid;
                gs.counts.assign(gs.counts.size(), cfg.convergence.grid_counts[level]);
                const StructuredGrid grid = gs.build();
                const Vec exact =
                    nodal_values(grid, [&](const Vec& x) { return sharpness_w(ex, x[0], x[1]); });
                const ContinuationResult run = viscosity_continuation(field, grid, exact, cfg.solver);
                const double err = (run.ladder.back().values - exact).lpNorm<Eigen::Infinity>();
                json row = {{"counts", cfg.convergence.grid_counts[level]}, {"sup_error", err}};
                if (level > 0) {
                    row["order"] = std::log2(prev_err / err);
                    if (err >= prev_err) decreasing = false;
                }
                prev_err = err;
                table.push_back(row);
            }
            m["convergence"] = table;
            if (!decreasing) result.all_hold = false;
            break;
        }
        case Command::report: {
            const CoefficientField field = make_builtin_family(cfg.family.name, cfg.family.params);
            const StructuredGrid grid = cfg.grid.build();
            const auto phi = resolve_dirichlet(cfg.dirichlet, cfg.family);
            const Vec dirichlet = nodal_values(grid, phi);
            const ContinuationResult run = viscosity_continuation(field, grid, dirichlet, cfg.solver);
            json reports = json::array();
            if (cfg.checks.maximum) {
                for (const auto& sol : run.ladder) {
                    const PrincipleReport rep = check_maximum_principle(sol, dirichlet, &field);
                    if (!rep.holds) result.all_hold = false;
                    if (&sol == &run.ladder.back()) reports.push_back(rep.to_json());
                }
            }
            if (cfg.checks.comparison) {
                if (cfg.checks.dirichlet1_expr.empty())
                    throw ConfigError("checks.comparison needs checks.dirichlet1_expr");
                const Expression e1 = Expression::parse(cfg.checks.dirichlet1_expr);
                const Vec phi1 = nodal_values(grid, [&](const Vec& x) { return e1(x); });
                const PrincipleReport rep =
                    check_comparison(field, grid, dirichlet, phi1, cfg.checks.kappa, cfg.solver);
                if (!rep.holds) result.all_hold = false;
                reports.push_back(rep.to_json());
            }
            if (cfg.checks.interior) {
                RegularityTable table;
                const PrincipleReport rep = interior_regularity_report(run.ladder, cfg.checks.shrink, 10.0, &table);
                if (!rep.holds) result.all_hold = false;
                reports.push_back(rep.to_json());
                std::string csv = "eps,grad_max,hess_max\n";
                for (std::size_t r = 0; r < table.eps.size(); ++r)
                    csv += format_double(table.eps[r]) + "," + format_double(table.grad_max[r]) + "," +
                           format_double(table.hess_max[r]) + "\n";
                result.files["regularity.csv"] = csv;
            }
            if (cfg.checks.boundary) {
                BoundaryModulusSpec spec;
                if (static_cast<int>(cfg.barrier.x0.size()) == grid.dim()) {
                    spec.x0 = Vec(grid.dim());
                    for (int d = 0; d < grid.dim(); ++d) spec.x0[d] = cfg.barrier.x0[static_cast<std::size_t>(d)];
                } else {
                    spec.x0 = grid.center();
                    spec.x0[grid.dim() - 1] = grid.low(grid.dim() - 1);  // mid-face point
                }
                spec.sigma = cfg.barrier.sigma;
                spec.kappa0 = cfg.barrier.kappa0;
                spec.m0 = cfg.barrier.m0;
                spec.K = cfg.barrier.K;
                spec.search_budget = cfg.barrier.budget;
                spec.options.nu = cfg.barrier.nu;
                const PrincipleReport rep = boundary_modulus_check(run.ladder, dirichlet, field, spec);
                if (!rep.holds) result.all_hold = false;
                reports.push_back(rep.to_json());
            }
            json ladder = json::array();
            for (const auto& sol : run.ladder)
                ladder.push_back({{"eps", sol.eps},
                                  {"residual_norm", sol.residual_norm},
                                  {"newton_iters", sol.newton_iters},
                                  {"sup_norm", sol.values.lpNorm<Eigen::Infinity>()}});
            m["solve"] = {{"ladder", ladder}, {"rung_diffs", run.rung_diffs}};
            m["reports"] = reports;
            result.files["solution.csv"] = solution_csv(grid, run.ladder.back().values);
            break;
        }
    }

    m["all_hold"] = result.all_hold;
    result.files["manifest.json"] = manifest_text(m);
    return result;
}

void emit_report(const RunResult& result, const std::filesystem::path& out_dir) {
    try {
        write_files(out_dir, result.files);
    } catch (const EmissionError&) {
        throw;
    } catch (const std::exception& e) {
        throw EmissionError(e.what());
    }
}

}  // namespace degensolve
