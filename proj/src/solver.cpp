#include "degensolve/solver.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>

namespace degensolve {

SolverConfig SolverConfig::defaults() {
    SolverConfig c;
    for (int k = 0; k <= 20; ++k) c.eps_ladder.push_back(std::ldexp(1.0, -k));
    return c;
}

void SolverConfig::validate() const {
    if (eps_ladder.empty()) throw ParameterError("solver.eps_ladder must be nonempty");
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        if (!(eps_ladder[i] > 0.0)) throw ParameterError("solver.eps_ladder entries must be positive");
        if (i > 0 && !(eps_ladder[i] < eps_ladder[i - 1]))
            throw ParameterError("solver.eps_ladder must be strictly decreasing");
    }
    if (!(newton_tol > 0.0)) throw ParameterError("solver.newton_tol must be positive");
    if (max_newton_iters < 1) throw ParameterError("solver.max_newton_iters must be >= 1");
    if (!(damping_factor > 0.0 && damping_factor < 1.0)) throw ParameterError("solver.damping must be in (0,1)");
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Triplet = Eigen::Triplet<double>;

struct NodeData {
    std::vector<Mat> a;      // A(x, chi(w))
    std::vector<Mat> a_dz;   // dA/dz at (x, chi(w))
    std::vector<Vec> gamma;
    std::vector<Vec> gamma_dz;
    std::vector<double> f;
    std::vector<double> f_dz;
    std::vector<double> chi;
    std::vector<double> chi_d;
    bool has_drift = false;
    bool has_zero = false;
};

NodeData evaluate_nodes(const CoefficientField& field,
                        const StructuredGrid& grid,
                        const Vec& w,
                        const TruncationProfile& trunc,
                        bool with_jacobian) {
    const std::int64_t total = grid.num_nodes();
    NodeData d;
    d.a.resize(static_cast<std::size_t>(total));
    if (with_jacobian) d.a_dz.resize(static_cast<std::size_t>(total));
    d.gamma.resize(static_cast<std::size_t>(total));
    if (with_jacobian) d.gamma_dz.resize(static_cast<std::size_t>(total));
    d.f.resize(static_cast<std::size_t>(total));
    if (with_jacobian) d.f_dz.resize(static_cast<std::size_t>(total));
    d.chi.resize(static_cast<std::size_t>(total));
    d.chi_d.resize(static_cast<std::size_t>(total));

    for (std::int64_t i = 0; i < total; ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        const Vec x = grid.node(i);
        const double z = trunc.value(w[i]);
        d.chi[s] = z;
        d.chi_d[s] = trunc.derivative(w[i]);
        d.a[s] = field.matrix(x, z);
        if (!d.a[s].allFinite())
            throw DataError("NaN/inf in coefficient matrix at node " + std::to_string(i));
        if (with_jacobian) d.a_dz[s] = field.matrix_dz(x, z);
        d.gamma[s] = field.drift(x, z);
        if (with_jacobian) d.gamma_dz[s] = field.drift_dz(x, z);
        d.f[s] = field.zero(x, z);
        if (!std::isfinite(d.f[s])) throw DataError("NaN/inf in zero-order term at node " + std::to_string(i));
        if (with_jacobian) d.f_dz[s] = field.zero_dz(x, z);
        if (d.gamma[s].cwiseAbs().maxCoeff() != 0.0) d.has_drift = true;
        if (d.f[s] != 0.0) d.has_zero = true;
    }
    return d;
}

bool field_is_diagonal(const CoefficientField& field, const NodeData& d) {
    if (field.family != "custom") return true;  // all built-ins are diagonal
    for (const Mat& a : d.a) {
        const double s = std::max(1.0, a.cwiseAbs().maxCoeff());
        for (int i = 0; i < a.rows(); ++i)
            for (int j = 0; j < a.cols(); ++j)
                if (i != j && std::abs(a(i, j)) > 1e-14 * s) return false;
    }
    return true;
}

}  // namespace

AssembledSystem assemble_residual(const CoefficientField& field,
                                  const StructuredGrid& grid,
                                  const Vec& w,
                                  double eps,
                                  const TruncationProfile& trunc,
                                  bool with_jacobian) {
    if (w.size() != grid.num_nodes()) throw ParameterError("assemble: w size does not match grid");
    const int dim = grid.dim();
    const std::int64_t total = grid.num_nodes();
    const NodeData nd = evaluate_nodes(field, grid, w, trunc, with_jacobian);
    const bool diagonal = field_is_diagonal(field, nd);

    AssembledSystem sys;
    sys.residual = Vec::Zero(total);
    std::vector<Triplet> trip;
    if (with_jacobian) trip.reserve(static_cast<std::size_t>(total) * (2 * dim + 1 + (diagonal ? 0 : 8 * dim)));

    auto centered = [&](std::int64_t p, int axis) {
        return (w[grid.neighbor(p, axis, +1)] - w[grid.neighbor(p, axis, -1)]) / (2.0 * grid.spacing(axis));
    };

    for (std::int64_t j = 0; j < total; ++j) {
        if (grid.is_boundary(j)) {
            if (with_jacobian) trip.emplace_back(static_cast<int>(j), static_cast<int>(j), 1.0);
            continue;
        }
        const std::size_t js = static_cast<std::size_t>(j);
        double r = 0.0;
        double diag = 0.0;

        for (int i = 0; i < dim; ++i) {
            const double h = grid.spacing(i);
            const double h2 = h * h;
            const std::int64_t jp = grid.neighbor(j, i, +1);
            const std::int64_t jm = grid.neighbor(j, i, -1);
            const std::size_t ps = static_cast<std::size_t>(jp), ms = static_cast<std::size_t>(jm);
            const double ap = 0.5 * (nd.a[js](i, i) + nd.a[ps](i, i));
            const double am = 0.5 * (nd.a[js](i, i) + nd.a[ms](i, i));
            const double dp = w[jp] - w[j];
            const double dm = w[j] - w[jm];
            r += (ap * dp - am * dm) / h2 + eps * (dp - dm) / h2;

            if (with_jacobian) {
                const double dap_dj = 0.5 * nd.a_dz[js](i, i) * nd.chi_d[js];
                const double dap_dp = 0.5 * nd.a_dz[ps](i, i) * nd.chi_d[ps];
                const double dam_dj = dap_dj;
                const double dam_dm = 0.5 * nd.a_dz[ms](i, i) * nd.chi_d[ms];
                diag += (dap_dj * dp - ap - dam_dj * dm - am) / h2 - 2.0 * eps / h2;
                trip.emplace_back(static_cast<int>(j), static_cast<int>(jp), (dap_dp * dp + ap + eps) / h2);
                trip.emplace_back(static_cast<int>(j), static_cast<int>(jm), (-dam_dm * dm + am + eps) / h2);
            }

            if (!diagonal) {
                for (int l = 0; l < dim; ++l) {
                    if (l == i) continue;
                    const double hl = grid.spacing(l);
                    const double gp = nd.a[ps](i, l) * centered(jp, l);
                    const double gm = nd.a[ms](i, l) * centered(jm, l);
                    r += (gp - gm) / (2.0 * h);
                    if (with_jacobian) {
                        const double cp = 1.0 / (2.0 * h);
                        trip.emplace_back(static_cast<int>(j), static_cast<int>(jp),
                                          cp * nd.a_dz[ps](i, l) * nd.chi_d[ps] * centered(jp, l));
                        trip.emplace_back(static_cast<int>(j), static_cast<int>(jm),
                                          -cp * nd.a_dz[ms](i, l) * nd.chi_d[ms] * centered(jm, l));
                        trip.emplace_back(static_cast<int>(j), static_cast<int>(grid.neighbor(jp, l, +1)),
                                          cp * nd.a[ps](i, l) / (2.0 * hl));
                        trip.emplace_back(static_cast<int>(j), static_cast<int>(grid.neighbor(jp, l, -1)),
                                          -cp * nd.a[ps](i, l) / (2.0 * hl));
                        trip.emplace_back(static_cast<int>(j), static_cast<int>(grid.neighbor(jm, l, +1)),
                                          -cp * nd.a[ms](i, l) / (2.0 * hl));
                        trip.emplace_back(static_cast<int>(j), static_cast<int>(grid.neighbor(jm, l, -1)),
                                          cp * nd.a[ms](i, l) / (2.0 * hl));
                    }
                }
            }

            if (nd.has_drift) {
                const double g = nd.gamma[js][i];
                const std::int64_t up = g >= 0.0 ? jp : jm;
                const double sign = g >= 0.0 ? 1.0 : -1.0;
                const double diff = sign * (w[up] - w[j]) / h;
                r += g * diff;
                if (with_jacobian) {
                    diag += nd.gamma_dz[js][i] * nd.chi_d[js] * diff - g * sign / h;
                    trip.emplace_back(static_cast<int>(j), static_cast<int>(up), g * sign / h);
                }
            }
        }

        r += nd.f[js];
        if (with_jacobian) {
            diag += nd.f_dz[js] * nd.chi_d[js];
            trip.emplace_back(static_cast<int>(j), static_cast<int>(j), diag);
        }
        sys.residual[j] = r;
    }

    if (with_jacobian) {
        sys.jacobian.resize(static_cast<int>(total), static_cast<int>(total));
        sys.jacobian.setFromTriplets(trip.begin(), trip.end());
    }
    return sys;
}

MMatrixReport check_m_matrix(const AssembledSystem& sys, const StructuredGrid& grid) {
    MMatrixReport rep;
    rep.worst_offdiag = -std::numeric_limits<double>::infinity();
    rep.worst_row_slack = std::numeric_limits<double>::infinity();
    // Column-major storage: transpose once so the inner loops scan rows of -J.
    Eigen::SparseMatrix<double> K = Eigen::SparseMatrix<double>((-sys.jacobian).transpose());
    for (int col = 0; col < K.outerSize(); ++col) {
        if (grid.is_boundary(col)) continue;
        double diag = 0.0, off_sum = 0.0, max_off = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(K, col); it; ++it) {
            if (it.row() == col)
                diag = it.value();
            else {
                off_sum += std::abs(it.value());
                max_off = std::max(max_off, it.value());
            }
        }
        if (max_off > rep.worst_offdiag) rep.worst_offdiag = max_off;
        const double slack = diag - off_sum;
        if (slack < rep.worst_row_slack) {
            rep.worst_row_slack = slack;
            rep.worst_node = col;
        }
    }
    const double tol = 1e-9;
    rep.holds = rep.worst_offdiag <= tol && rep.worst_row_slack >= -tol;
    return rep;
}

namespace {

Vec linear_presolve(const StructuredGrid& grid, const Vec& dirichlet, const TruncationProfile& trunc) {
    const CoefficientField id = make_builtin_family("identity", {static_cast<double>(grid.dim())});
    Vec w0 = Vec::Zero(grid.num_nodes());
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i)
        if (grid.is_boundary(i)) w0[i] = dirichlet[i];
    AssembledSystem sys = assemble_residual(id, grid, w0, 1.0, trunc, true);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys.jacobian);
    if (lu.info() != Eigen::Success) throw NumericalError("pre-solve factorization failed");
    Vec delta = lu.solve(-sys.residual);
    return w0 + delta;
}

}  // namespace

DiscreteSolution newton_solve(const CoefficientField& field,
                              const StructuredGrid& grid,
                              const Vec& dirichlet,
                              double eps,
                              const TruncationProfile& trunc,
                              const SolverConfig& config,
                              const Vec* warm_start) {
    if (!(eps > 0.0)) throw ParameterError("newton_solve: eps must be positive (strict ellipticity)");
    if (dirichlet.size() != grid.num_nodes()) throw ParameterError("newton_solve: dirichlet size mismatch");
    if (!dirichlet.allFinite()) throw ParameterError("newton_solve: dirichlet data must be finite");

    Vec w = warm_start ? *warm_start : linear_presolve(grid, dirichlet, trunc);
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i)
        if (grid.is_boundary(i)) w[i] = dirichlet[i];

    std::vector<double> history;
    int iters = 0;
    AssembledSystem sys = assemble_residual(field, grid, w, eps, trunc, true);
    double norm = sys.residual.lpNorm<Eigen::Infinity>();
    history.push_back(norm);

    while (norm > config.newton_tol) {
        if (iters >= config.max_newton_iters)
            throw NewtonFailure("newton: iteration cap reached at eps=" + std::to_string(eps) +
                                    " (residual " + std::to_string(norm) + ")",
                                w, history);
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys.jacobian);
        if (lu.info() != Eigen::Success)
            throw NewtonFailure("newton: singular Jacobian at eps=" + std::to_string(eps), w, history);
        const Vec delta = lu.solve(-sys.residual);

        double step = 1.0;
        Vec w_trial;
        double trial_norm = 0.0;
        bool accepted = false;
        while (step >= config.min_step) {
            w_trial = w + step * delta;
            const Vec r_trial = assemble_residual(field, grid, w_trial, eps, trunc, false).residual;
            trial_norm = r_trial.lpNorm<Eigen::Infinity>();
            if (trial_norm < (1.0 - 1e-4 * step) * norm) {
                accepted = true;
                break;
            }
            step *= config.damping_factor;
        }
        if (!accepted)
            throw NewtonFailure("newton: damping floor reached at eps=" + std::to_string(eps) +
                                    " (residual " + std::to_string(norm) + ")",
                                w, history);
        w = w_trial;
        ++iters;
        sys = assemble_residual(field, grid, w, eps, trunc, true);
        norm = sys.residual.lpNorm<Eigen::Infinity>();
        history.push_back(norm);
    }

    DiscreteSolution sol{grid, w, eps, trunc.M(), norm, iters, history};
    return sol;
}

ContinuationResult viscosity_continuation(const CoefficientField& field,
                                          const StructuredGrid& grid,
                                          const Vec& dirichlet,
                                          const SolverConfig& config) {
    config.validate();
    double sup_phi = 0.0;
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i)
        if (grid.is_boundary(i)) sup_phi = std::max(sup_phi, std::abs(dirichlet[i]));
    double M = config.M.value_or(std::max(sup_phi, 1.0));
    if (M < sup_phi) throw ParameterError("solver.M must be >= sup |dirichlet|");
    const TruncationProfile trunc(M);

    ContinuationResult out;
    const Vec* warm = nullptr;
    for (double eps : config.eps_ladder) {
        try {
            DiscreteSolution sol = newton_solve(field, grid, dirichlet, eps, trunc, config, warm);
            out.ladder.push_back(std::move(sol));
        } catch (NewtonFailure& e) {
            throw NewtonFailure("continuation rung eps=" + std::to_string(eps) + " failed: " + e.what(),
                                e.last_iterate, e.norm_history);
        }
        const std::size_t n = out.ladder.size();
        if (n >= 2)
            out.rung_diffs.push_back(
                (out.ladder[n - 1].values - out.ladder[n - 2].values).lpNorm<Eigen::Infinity>());
        warm = &out.ladder.back().values;
    }
    return out;
}

Vec nodal_values(const StructuredGrid& grid, const std::function<double(const Eigen::VectorXd&)>& f) {
    Vec v(grid.num_nodes());
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i) v[i] = f(grid.node(i));
    return v;
}

}  // namespace degensolve
