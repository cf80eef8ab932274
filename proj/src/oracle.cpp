#include "degensolve/oracle.hpp"

#include <cmath>

#include "degensolve/errors.hpp"
#include "degensolve/parallel.hpp"

namespace degensolve {

SharpnessExample::SharpnessExample(int m_, double tol, int iters) : m(m_), newton_tol(tol), max_iters(iters) {
    if (m < 1) throw ParameterError("sharpness example: m must be a positive integer");
    if (!(newton_tol > 0.0)) throw ParameterError("sharpness example: newton_tol must be positive");
}

double SharpnessExample::F(double x, double y, double z) const {
    return z * std::pow(x * x + z * z, m - 0.5) + y;
}

double SharpnessExample::F_z(double x, double /*y*/, double z) const {
    const double s = x * x + z * z;
    if (s == 0.0) return 0.0;
    return std::pow(s, m - 1.5) * (x * x + 2.0 * m * z * z);
}

double SharpnessExample::F_x(double x, double /*y*/, double z) const {
    const double s = x * x + z * z;
    if (s == 0.0) return 0.0;
    return (2.0 * m - 1.0) * x * z * std::pow(s, m - 1.5);
}

double SharpnessExample::k(double x, double z) const {
    return 2.0 * m * std::pow(x * x + z * z, 2.0 * m - 1.0);
}

double sharpness_w(const SharpnessExample& ex, double x, double y) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw ParameterError("sharpness_w: arguments must be finite");
    if (y == 0.0) return 0.0;  // F(x,0,0) = 0 and F is strictly increasing in z

    // Certified bracket: |root| <= 1 + |y|^{1/2m}.
    const double r = 1.0 + std::pow(std::abs(y), 1.0 / (2.0 * ex.m));
    double lo = -r, hi = r;
    double flo = ex.F(x, y, lo);
    if (!(flo <= 0.0)) throw NumericalError("sharpness_w: bracket lost at lower end");

    double z = -y * std::min(1.0, std::pow(std::abs(y), 1.0 / (2.0 * ex.m)) / std::abs(y));
    if (!(z > lo && z < hi)) z = 0.0;
    const double tol = ex.newton_tol * (1.0 + std::abs(y));

    double f = ex.F(x, y, z);
    int it = 0;
    for (; it < ex.max_iters; ++it) {
        if (std::abs(f) <= tol) break;
        if (f > 0.0) hi = z; else lo = z;
        const double fz = ex.F_z(x, y, z);
        double znew = z - (fz > 0.0 ? f / fz : 0.0);
        if (!(fz > 0.0) || !(znew > lo && znew < hi)) znew = 0.5 * (lo + hi);
        z = znew;
        f = ex.F(x, y, z);
    }
    if (std::abs(f) > tol)
        throw NumericalError("sharpness_w: no convergence in " + std::to_string(ex.max_iters) +
                             " iterations; bracket [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    // Polish: quadratic convergence takes the residual to rounding level,
    // which the magnitude-law reproduction needs at small |y|.
    for (int p = 0; p < 2; ++p) {
        const double fz = ex.F_z(x, y, z);
        if (!(fz > 0.0)) break;
        const double znew = z - f / fz;
        const double fnew = ex.F(x, y, znew);
        if (std::abs(fnew) >= std::abs(f)) break;
        z = znew;
        f = fnew;
    }
    return z;
}

std::pair<double, double> sharpness_grad_w(const SharpnessExample& ex, double x, double y) {
    const double w = sharpness_w(ex, x, y);
    const double fz = ex.F_z(x, y, w);
    if (!(fz > 0.0))
        throw NumericalError("sharpness_grad_w: singular point (F_z = 0 at x = w = 0)");
    return {-ex.F_x(x, y, w) / fz, -1.0 / fz};
}

double sharpness_conjugate_f(const SharpnessExample& ex, double x, double y) {
    const double w = sharpness_w(ex, x, y);
    return x * std::pow(x * x + w * w, ex.m - 0.5);
}

std::pair<double, double> sharpness_conjugate_grad(const SharpnessExample& ex, double x, double y) {
    const double w = sharpness_w(ex, x, y);
    const auto [wx, wy] = sharpness_grad_w(ex, x, y);
    const double s = x * x + w * w;
    const double p = std::pow(s, ex.m - 1.5);
    const double fx = p * (s + (2.0 * ex.m - 1.0) * x * (x + w * wx));
    const double fy = (2.0 * ex.m - 1.0) * x * w * wy * p;
    return {fx, fy};
}

nlohmann::json DiagnosticsReport::to_json() const {
    return nlohmann::json{{"cr_residual_max", cr_residual_max},
                          {"energy", energy},
                          {"energy_bound", energy_bound},
                          {"holder_slope", holder_slope},
                          {"holder_target", holder_target}};
}

namespace {

/// Second-order first derivative along one grid axis, one-sided at the edges.
double d1(const std::vector<double>& v, int i, int n, double h) {
    if (i == 0) return (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    if (i == n - 1) return (3.0 * v[static_cast<std::size_t>(n - 1)] - 4.0 * v[static_cast<std::size_t>(n - 2)] + v[static_cast<std::size_t>(n - 3)]) / (2.0 * h);
    return (v[static_cast<std::size_t>(i + 1)] - v[static_cast<std::size_t>(i - 1)]) / (2.0 * h);
}

}  // namespace

DiagnosticsReport oracle_diagnostics(const SharpnessExample& ex,
                                     const StructuredGrid& grid,
                                     double exclusion_radius,
                                     const DiagnosticsOptions& opts) {
    if (grid.dim() != 2) throw ParameterError("oracle diagnostics: grid must be 2D");
    if (!(exclusion_radius > 0.0)) throw ParameterError("oracle diagnostics: exclusion_radius must be positive");

    const int nx = grid.count(0), ny = grid.count(1);
    const double hx = grid.spacing(0), hy = grid.spacing(1);
    std::vector<double> w(static_cast<std::size_t>(nx) * ny), f(static_cast<std::size_t>(nx) * ny);
    auto at = [ny](int i, int j) { return static_cast<std::size_t>(i) * ny + j; };

    parallel_for(static_cast<std::size_t>(nx), [&](std::size_t b, std::size_t e) {
        for (std::size_t i = b; i < e; ++i)
            for (int j = 0; j < ny; ++j) {
                const double x = grid.coordinate(0, static_cast<int>(i));
                const double y = grid.coordinate(1, j);
                const double wv = sharpness_w(ex, x, y);
                w[at(static_cast<int>(i), j)] = wv;
                f[at(static_cast<int>(i), j)] = x * std::pow(x * x + wv * wv, ex.m - 0.5);
            }
    });

    DiagnosticsReport rep;

    // Cauchy-Riemann residuals f_x + k(x,w) w_y and f_y - w_x by finite
    // differences, max norm outside the excluded disc.
    double cr = 0.0;
    {
        std::vector<double> col(static_cast<std::size_t>(nx)), row(static_cast<std::size_t>(ny));
        for (int i = 0; i < nx; ++i) {
            const double x = grid.coordinate(0, i);
            for (int j = 0; j < ny; ++j) {
                const double y = grid.coordinate(1, j);
                if (x * x + y * y <= exclusion_radius * exclusion_radius) continue;
                for (int ii = 0; ii < nx; ++ii) col[static_cast<std::size_t>(ii)] = f[at(ii, j)];
                const double fx = d1(col, i, nx, hx);
                for (int ii = 0; ii < nx; ++ii) col[static_cast<std::size_t>(ii)] = w[at(ii, j)];
                const double wx = d1(col, i, nx, hx);
                for (int jj = 0; jj < ny; ++jj) row[static_cast<std::size_t>(jj)] = f[at(i, jj)];
                const double fy = d1(row, j, ny, hy);
                for (int jj = 0; jj < ny; ++jj) row[static_cast<std::size_t>(jj)] = w[at(i, jj)];
                const double wy = d1(row, j, ny, hy);
                cr = std::max(cr, std::abs(fx + ex.k(x, w[at(i, j)]) * wy));
                cr = std::max(cr, std::abs(fy - wx));
            }
        }
    }
    rep.cr_residual_max = cr;

    // Trapezoidal energy of |w_x|^2 + k |w_y|^2 with analytic gradients; the
    // origin node (if on the lattice) contributes zero.
    double energy = 0.0;
    for (int i = 0; i < nx; ++i) {
        const double x = grid.coordinate(0, i);
        const double wxi = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
        for (int j = 0; j < ny; ++j) {
            const double y = grid.coordinate(1, j);
            const double wyj = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
            double integrand = 0.0;
            if (x != 0.0 || y != 0.0) {
                const auto [wx, wy] = sharpness_grad_w(ex, x, y);
                integrand = wx * wx + ex.k(x, w[at(i, j)]) * wy * wy;
            }
            energy += wxi * wyj * integrand;
        }
    }
    energy *= hx * hy;
    rep.energy = energy;
    const double area = (grid.high(0) - grid.low(0)) * (grid.high(1) - grid.low(1));
    rep.energy_bound = 3.0 * ex.m * ex.m * area;

    // Holder slope of log |w(0,y)| against log y on a dyadic sample, with the
    // two extreme samples dropped.
    std::vector<double> ys = opts.holder_ys;
    if (ys.empty())
        for (int kexp = 4; kexp <= 20; ++kexp) ys.push_back(std::ldexp(1.0, -kexp));
    std::sort(ys.begin(), ys.end());
    if (ys.size() >= 5) {
        ys.erase(ys.begin());
        ys.pop_back();
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (double y : ys) {
        const double lw = std::log(std::abs(sharpness_w(ex, 0.0, y)));
        const double ly = std::log(y);
        sx += ly;
        sy += lw;
        sxx += ly * ly;
        sxy += ly * lw;
    }
    const double nfit = static_cast<double>(ys.size());
    rep.holder_slope = (nfit * sxy - sx * sy) / (nfit * sxx - sx * sx);
    rep.holder_target = 1.0 / (2.0 * ex.m);
    return rep;
}

}  // namespace degensolve
