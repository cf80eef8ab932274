#include "degensolve/barrier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degensolve/errors.hpp"

namespace degensolve {

namespace {
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
}  // namespace

double Barrier::value(const Vec& y) const {
    const double yn = y[dim - 1];
    const double quad = 0.5 * m1 * y[ell] * y[ell];
    if (yn <= 0.0) return y.isZero(0.0) ? 0.0 : quad;  // continuous extension to y_n = 0
    return -2.0 * omega.psi(std::sqrt(rho * yn)) + quad + 1.0 / std::log(yn);
}

Vec Barrier::gradient(const Vec& y) const {
    const double yn = y[dim - 1];
    if (!(yn > 0.0)) throw ParameterError("barrier gradient: y_n must be positive");
    const double u = std::sqrt(rho * yn);
    const double ln = std::log(yn);
    const double G = std::sqrt(rho / yn) * omega.psi_prime(u) + 1.0 / (ln * ln * yn);
    Vec g = Vec::Zero(dim);
    g[ell] += m1 * y[ell];
    g[dim - 1] += -G;
    return g;
}

Vec Barrier::hessian_diagonal(const Vec& y) const {
    const double yn = y[dim - 1];
    if (!(yn > 0.0)) throw ParameterError("barrier hessian: y_n must be positive");
    const double u = std::sqrt(rho * yn);
    const double ln = std::log(yn);
    const double base = (std::sqrt(rho / yn) * omega.psi_prime(u) - rho * omega.psi_second(u)) / (2.0 * yn) +
                        (1.0 + 2.0 / ln) / (ln * ln * yn * yn);
    Vec d = Vec::Zero(dim);
    d[dim - 1] += base;
    d[ell] += m1;
    return d;
}

double Barrier::laplacian(const Vec& y) const { return hessian_diagonal(y).sum(); }

double Barrier::elliptic_operator(const CoefficientField& field, const Vec& y, double m) const {
    const double z = value(y) + m;
    const Mat a = field.matrix(y, z);
    const Mat az = field.matrix_dz(y, z);
    const Vec g = gradient(y);
    const Vec hd = hessian_diagonal(y);
    double out = 0.0;
    for (int j = 0; j < dim; ++j) {
        double divj = 0.0;
        for (int i = 0; i < dim; ++i) divj += field.matrix_dx(y, z, i)(i, j);
        out += divj * g[j];
    }
    out += g.dot(az * g);
    for (int i = 0; i < dim; ++i) out += a(i, i) * hd[i];
    return out;
}

bool Barrier::in_validity_region(const Vec& y, double floor) const {
    const double yn = y[dim - 1];
    if (!(yn >= floor && yn < t1)) return false;
    if (!(y.norm() < r0)) return false;
    const double tang2 = y.squaredNorm() - yn * yn;
    return kappa0 * tang2 <= yn * (1.0 + 1e-12);
}

nlohmann::json Barrier::certificate() const {
    return nlohmann::json{{"kappa0", kappa0}, {"rho", rho},       {"m1", m1}, {"t1", t1},
                          {"ell", ell + 1},  {"r0", r0},          {"nu", nu}, {"c1", c1},
                          {"alpha0", alpha0}, {"dim", dim}};
}

namespace {

struct SweepResult {
    BarrierMargins margins;
    bool ok = false;
    std::string failing;
    Vec worst;
};

/// Pocket lattice: y_n geometric+linear levels in [floor, t1], tangential
/// coordinates on the slice kappa0 |y'|^2 <= y_n (and |y| < r0).
std::vector<Vec> pocket_samples(const Barrier& b, int per_dim, double floor) {
    std::vector<Vec> out;
    std::vector<double> levels;
    for (int i = 1; i <= per_dim; ++i) levels.push_back(b.t1 * i / (per_dim + 1.0));
    for (int q = 1; q <= per_dim; ++q) {
        const double v = b.t1 * std::pow(0.25, q);
        if (v > floor) levels.push_back(v);
    }
    std::sort(levels.begin(), levels.end());
    const int tang_dims = b.dim - 1;
    for (double yn : levels) {
        const double reach = std::min(std::sqrt(yn / b.kappa0), std::sqrt(std::max(b.r0 * b.r0 - yn * yn, 0.0)));
        std::vector<int> idx(static_cast<std::size_t>(tang_dims), 0);
        while (true) {
            Vec y = Vec::Zero(b.dim);
            for (int d = 0; d < tang_dims; ++d)
                y[d] = per_dim == 1 ? 0.0 : -reach + 2.0 * reach * idx[static_cast<std::size_t>(d)] / (per_dim - 1);
            y[b.dim - 1] = yn;
            const double tang2 = y.squaredNorm() - yn * yn;
            if (b.kappa0 * tang2 <= yn && y.norm() < b.r0) out.push_back(y);
            int d = tang_dims - 1;
            while (d >= 0 && ++idx[d] == per_dim) { idx[d] = 0; --d; }
            if (d < 0) break;
        }
    }
    return out;
}

/// Outflow face of N_{t1} inside the pocket: the slice y_n = t1 plus the
/// sphere cap |y| = r0 (often empty for small t1).
std::vector<Vec> outflow_samples(const Barrier& b, int per_dim) {
    std::vector<Vec> out;
    const int tang_dims = b.dim - 1;
    const double yn = b.t1 * (1.0 - 1e-12);
    const double reach = std::min(std::sqrt(yn / b.kappa0), std::sqrt(std::max(b.r0 * b.r0 - yn * yn, 0.0)));
    std::vector<int> idx(static_cast<std::size_t>(tang_dims), 0);
    while (true) {
        Vec y = Vec::Zero(b.dim);
        for (int d = 0; d < tang_dims; ++d)
            y[d] = per_dim == 1 ? 0.0 : -reach + 2.0 * reach * idx[static_cast<std::size_t>(d)] / (per_dim - 1);
        y[b.dim - 1] = yn;
        const double tang2 = y.squaredNorm() - yn * yn;
        if (b.kappa0 * tang2 <= yn) out.push_back(y);
        int d = tang_dims - 1;
        while (d >= 0 && ++idx[d] == per_dim) { idx[d] = 0; --d; }
        if (d < 0) break;
    }
    // side cap: y_n below t1 with |y| = r0, inside the paraboloid
    for (int i = 1; i <= per_dim; ++i) {
        const double yn_side = b.t1 * i / (per_dim + 1.0);
        const double tang2 = b.r0 * b.r0 - yn_side * yn_side;
        if (tang2 <= 0.0 || b.kappa0 * tang2 > yn_side) continue;
        Vec y = Vec::Zero(b.dim);
        y[0] = std::sqrt(tang2);  // representative direction
        y[b.dim - 1] = yn_side;
        out.push_back(y);
    }
    return out;
}

SweepResult sweep_barrier(const Barrier& b,
                          const CoefficientField& field,
                          double m0,
                          double K,
                          int per_dim,
                          int m_lattice,
                          double floor) {
    SweepResult res;
    auto& mg = res.margins;
    mg.h_vs_omega = mg.laplacian = mg.lm = mg.outflow = std::numeric_limits<double>::infinity();
    res.ok = true;

    std::vector<double> ms;
    if (m_lattice <= 1)
        ms.push_back(0.0);
    else
        for (int i = 0; i < m_lattice; ++i) ms.push_back(-m0 + 2.0 * m0 * i / (m_lattice - 1));

    for (const Vec& y : pocket_samples(b, per_dim, floor)) {
        const double h = b.value(y);
        const double slack_omega = -b.omega.value(y.norm()) - h;
        if (slack_omega < mg.h_vs_omega) {
            mg.h_vs_omega = slack_omega;
            if (slack_omega < 0.0 && res.failing.empty()) {
                res.failing = "h <= -omega";
                res.worst = y;
            }
        }
        const double lap = b.laplacian(y);
        if (lap < mg.laplacian) {
            mg.laplacian = lap;
            if (lap <= 0.0 && res.failing.empty()) {
                res.failing = "laplacian > 0";
                res.worst = y;
            }
        }
        for (double m : ms) {
            const double lm = b.elliptic_operator(field, y, m) - K;
            if (lm < mg.lm) {
                mg.lm = lm;
                if (lm < 0.0 && res.failing.empty()) {
                    res.failing = "L_m h >= K";
                    res.worst = y;
                }
            }
        }
    }
    for (const Vec& y : outflow_samples(b, per_dim)) {
        const double slack = -b.nu - b.value(y);
        if (slack < mg.outflow) {
            mg.outflow = slack;
            if (slack < 0.0 && res.failing.empty()) {
                res.failing = "outflow h <= -nu";
                res.worst = y;
            }
        }
    }
    res.ok = mg.h_vs_omega >= 0.0 && mg.laplacian > 0.0 && mg.lm >= 0.0 && mg.outflow >= 0.0;
    return res;
}

}  // namespace

Barrier build_barrier(const ConcaveMajorant& omega,
                      double kappa0,
                      double m0,
                      double K,
                      const CoefficientField& field,
                      int search_budget,
                      const BarrierOptions& opts) {
    if (!(kappa0 > 0.0)) throw ParameterError("build_barrier: kappa0 must be positive");
    const int dim = field.dim;

    Barrier b;
    b.omega = omega;
    b.kappa0 = kappa0;
    b.rho = std::pow(1.0 / std::sqrt(kappa0) + 1.0, 2.0);
    b.dim = dim;
    b.rotation = Mat::Identity(dim, dim);
    b.nu = opts.nu;
    b.alpha0 = 1.0;

    const double rbar = omega.rbar();
    // r0: largest radius with omega <= alpha0 (bisection on the monotone majorant).
    double r0 = rbar;
    if (omega.value(rbar) > b.alpha0) {
        double lo = 0.0, hi = rbar;
        for (int i = 0; i < 80; ++i) {
            const double mid = 0.5 * (lo + hi);
            (omega.value(mid) <= b.alpha0 ? lo : hi) = mid;
        }
        r0 = lo;
    }
    if (opts.eta > 0.0) r0 = std::min(r0, opts.eta);
    b.r0 = r0;

    // Axis certificate c1 = min theta_l A theta_l over the boundary paraboloid.
    const double t_probe = std::min(0.1, r0 * r0 / b.rho);
    double best_c1 = -1.0;
    int best_ell = 0;
    for (int cand = 0; cand < dim; ++cand) {
        double c1 = std::numeric_limits<double>::infinity();
        const int nz = 5, ns = 7;
        for (int zi = 0; zi < nz; ++zi) {
            const double z = -2.0 * m0 + 4.0 * m0 * zi / (nz - 1);
            for (int si = 0; si < ns; ++si) {
                const double reach = std::sqrt(t_probe / kappa0);
                Vec y = Vec::Zero(dim);
                y[0] = -reach + 2.0 * reach * si / (ns - 1);
                y[dim - 1] = kappa0 * y.head(dim - 1).squaredNorm();
                c1 = std::min(c1, field.matrix(y, z)(cand, cand));
            }
        }
        if (c1 > best_c1) {
            best_c1 = c1;
            best_ell = cand;
        }
    }
    if (!(best_c1 > 0.0))
        throw NumericalError("build_barrier: no axis with theta_l A theta_l^t bounded below (c1 <= 0)");
    b.ell = best_ell;
    b.c1 = best_c1;

    const double t_max = std::min({0.1, rbar * rbar / b.rho * (1.0 - 1e-9), 0.99});
    std::string last_fail = "no candidates tried";
    double last_m1 = 0.0, last_t1 = 0.0;
    int tried = 0;
    for (int jm = 0; jm < 40; ++jm) {
        b.m1 = std::max(1.0, K) * std::ldexp(1.0, jm);
        for (int jt = 0; jt < 40; ++jt) {
            b.t1 = t_max * std::ldexp(1.0, -jt);
            if (b.t1 <= 4.0 * opts.floor) break;
            if (tried++ >= search_budget)
                throw NumericalError("build_barrier: search budget exhausted; last (m1=" + std::to_string(last_m1) +
                                     ", t1=" + std::to_string(last_t1) + ") failed '" + last_fail + "'");
            const SweepResult res =
                sweep_barrier(b, field, m0, K, opts.samples_per_dim, opts.m_lattice, opts.floor);
            if (res.ok) return b;
            last_fail = res.failing.empty() ? "unknown inequality" : res.failing;
            last_m1 = b.m1;
            last_t1 = b.t1;
            // A failing L_m margin needs a bigger m1, not a smaller t1.
            if (res.failing == "L_m h >= K") break;
        }
    }
    throw NumericalError("build_barrier: sweep ranges exhausted; last (m1=" + std::to_string(last_m1) +
                         ", t1=" + std::to_string(last_t1) + ") failed '" + last_fail + "'");
}

PrincipleReport verify_barrier(const Barrier& b,
                               const CoefficientField& field,
                               double m0,
                               double K,
                               int samples_per_dim,
                               BarrierMargins* margins_out) {
    const SweepResult res = sweep_barrier(b, field, m0, K, samples_per_dim, 3, 1e-10);
    if (margins_out) *margins_out = res.margins;

    PrincipleReport rep;
    rep.name = PrincipleName::barrier;
    rep.margin = std::min({res.margins.h_vs_omega, res.margins.laplacian, res.margins.lm, res.margins.outflow});
    rep.holds = res.ok && std::abs(b.value(Vec::Zero(b.dim))) == 0.0;
    rep.witness = res.worst.size() ? res.worst : Vec::Zero(b.dim);
    rep.metadata["margins"] = {{"h_vs_omega", res.margins.h_vs_omega},
                               {"laplacian", res.margins.laplacian},
                               {"Lm", res.margins.lm},
                               {"outflow", res.margins.outflow}};
    rep.metadata["certificate"] = b.certificate();
    return rep;
}

namespace {

/// Signed-permutation pushforward of the field into boundary coordinates:
/// y_n is the inward normal along `axis`, tangential axes keep their order.
CoefficientField boundary_frame_field(const CoefficientField& field,
                                      const Vec& x0,
                                      int axis,
                                      double inward_sign) {
    const int n = field.dim;
    std::vector<int> perm;  // perm[j] = original axis of local axis j
    for (int d = 0; d < n; ++d)
        if (d != axis) perm.push_back(d);
    perm.push_back(axis);
    std::vector<double> sign(static_cast<std::size_t>(n), 1.0);
    sign[static_cast<std::size_t>(n - 1)] = inward_sign;

    auto to_x = [x0, perm, sign, n](const Vec& y) {
        Vec x = x0;
        for (int j = 0; j < n; ++j) x[perm[static_cast<std::size_t>(j)]] += sign[static_cast<std::size_t>(j)] * y[j];
        return x;
    };
    auto push_matrix = [perm, sign, n](const Mat& a) {
        Mat out(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out(i, j) = sign[static_cast<std::size_t>(i)] * sign[static_cast<std::size_t>(j)] *
                            a(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        return out;
    };

    CoefficientField local = field;
    local.matrix = [field, to_x, push_matrix](const Vec& y, double z) { return push_matrix(field.matrix(to_x(y), z)); };
    local.matrix_dz = [field, to_x, push_matrix](const Vec& y, double z) {
        return push_matrix(field.matrix_dz(to_x(y), z));
    };
    local.matrix_dx = [field, to_x, push_matrix, perm, sign](const Vec& y, double z, int i) {
        const Mat d = field.matrix_dx(to_x(y), z, perm[static_cast<std::size_t>(i)]);
        return Mat(sign[static_cast<std::size_t>(i)] * push_matrix(d));
    };
    local.k = [field, to_x, perm](const Vec& y, double z) {
        const Vec k = field.k(to_x(y), z);
        Vec out(k.size());
        for (int j = 0; j < k.size(); ++j) out[j] = k[perm[static_cast<std::size_t>(j)]];
        return out;
    };
    return local;
}

}  // namespace

PrincipleReport boundary_modulus_check(const std::vector<DiscreteSolution>& ladder,
                                       const Vec& dirichlet,
                                       const CoefficientField& field,
                                       const BoundaryModulusSpec& spec) {
    if (ladder.empty()) throw ParameterError("boundary modulus check: empty ladder");
    if (!(spec.sigma > 0.0)) throw ParameterError("boundary modulus check: sigma must be positive");
    const StructuredGrid& grid = ladder.front().grid;
    const int dim = grid.dim();
    if (spec.x0.size() != dim) throw ParameterError("boundary modulus check: x0 dimension mismatch");

    // Locate the face: x0 must sit on exactly one face plane of the box.
    int axis = -1;
    double inward = 1.0;
    for (int d = 0; d < dim; ++d) {
        const double tol = 1e-12 * (1.0 + std::abs(grid.high(d) - grid.low(d)));
        if (std::abs(spec.x0[d] - grid.low(d)) < tol) {
            axis = d;
            inward = 1.0;
        } else if (std::abs(spec.x0[d] - grid.high(d)) < tol) {
            axis = d;
            inward = -1.0;
        }
    }
    if (axis < 0) throw ParameterError("boundary modulus check: x0 is not on a grid face");

    // phi(x0): value at the nearest boundary node.
    double phi0 = 0.0, best = std::numeric_limits<double>::infinity();
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
        if (!grid.is_boundary(i)) continue;
        const double d = (grid.node(i) - spec.x0).norm();
        if (d < best) {
            best = d;
            phi0 = dirichlet[i];
        }
    }

    // Sampled modulus of the datum at x0: running max of |phi - phi0| by distance.
    std::vector<std::pair<double, double>> pts{{0.0, 0.0}};
    for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
        if (!grid.is_boundary(i)) continue;
        const double d = (grid.node(i) - spec.x0).norm();
        if (d > 1e-14) pts.emplace_back(d, std::abs(dirichlet[i] - phi0));
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> radii, vals;
    double run = 0.0;
    for (const auto& [d, v] : pts) {
        run = std::max(run, v);
        if (!radii.empty() && d - radii.back() < 1e-12) {
            vals.back() = std::max(vals.back(), run);
            continue;
        }
        radii.push_back(d);
        vals.push_back(run);
    }
    const ConcaveMajorant majorant = concave_majorant(Modulus(std::move(radii), std::move(vals)));

    BoundaryModulusSpec s = spec;
    const CoefficientField local = boundary_frame_field(field, spec.x0, axis, inward);
    const Barrier b = build_barrier(majorant, spec.kappa0, spec.m0, spec.K, local, spec.search_budget, s.options);

    // delta0: largest sampled radius with -h < sigma on the validity region.
    double delta0 = b.r0;
    for (const Vec& y : pocket_samples(b, 64, s.options.floor))
        if (-b.value(y) >= spec.sigma) delta0 = std::min(delta0, y.norm());

    PrincipleReport rep;
    rep.name = PrincipleName::boundary_modulus;
    rep.metadata["delta0"] = delta0;
    rep.metadata["sigma"] = spec.sigma;
    rep.metadata["phi_x0"] = phi0;
    rep.metadata["barrier"] = b.certificate();

    double margin = std::numeric_limits<double>::infinity();
    Vec worst = spec.x0;
    long checked = 0;
    for (const auto& sol : ladder) {
        for (std::int64_t i = 0; i < grid.num_nodes(); ++i) {
            const Vec x = grid.node(i);
            if ((x - spec.x0).norm() >= delta0) continue;
            ++checked;
            const double slack = spec.sigma - std::abs(sol.values[i] - phi0);
            if (slack < margin) {
                margin = slack;
                worst = x;
            }
        }
    }
    rep.metadata["nodes_checked_per_rung"] = checked / static_cast<long>(ladder.size());
    rep.margin = std::isfinite(margin) ? margin : spec.sigma;
    rep.holds = rep.margin >= 0.0;
    rep.witness = worst;
    return rep;
}

}  // namespace degensolve
