#include "degensolve/coefficient_field.hpp"

#include <cmath>

#include "degensolve/errors.hpp"

namespace degensolve {

BoxRegion::BoxRegion(Eigen::VectorXd c, Eigen::VectorXd r) : center(std::move(c)), half_lengths(std::move(r)) {
    if (center.size() != half_lengths.size()) throw ParameterError("box: center/half_lengths size mismatch");
    for (int i = 0; i < half_lengths.size(); ++i)
        if (!(half_lengths[i] > 0.0)) throw ParameterError("box: half_lengths must be strictly positive");
}

bool BoxRegion::contains(const Eigen::VectorXd& x, double factor) const {
    for (int i = 0; i < center.size(); ++i)
        if (std::abs(x[i] - center[i]) > factor * half_lengths[i]) return false;
    return true;
}

double fedii_k(double t) {
    if (t == 0.0) return 0.0;
    return std::exp(-1.0 / (t * t));
}

double fedii_k_prime(double t) {
    if (t == 0.0) return 0.0;  // smooth extension: all derivatives vanish
    return std::exp(-1.0 / (t * t)) * 2.0 / (t * t * t);
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

int integer_param(const std::vector<double>& params, std::size_t i, int fallback) {
    if (params.size() <= i) return fallback;
    const double v = params[i];
    const int n = static_cast<int>(std::lround(v));
    if (std::abs(v - n) > 1e-12) throw ParameterError("family parameter must be an integer");
    return n;
}

CoefficientField diagonal_field(int n,
                                std::function<Vec(const Vec&, double)> kfun,
                                std::function<Vec(const Vec&, double)> k_dz,
                                std::function<Vec(const Vec&, double, int)> k_dx) {
    CoefficientField f;
    f.dim = n;
    f.k = kfun;
    f.matrix = [kfun](const Vec& x, double z) -> Mat { return kfun(x, z).asDiagonal(); };
    f.matrix_dz = [k_dz](const Vec& x, double z) -> Mat { return k_dz(x, z).asDiagonal(); };
    f.matrix_dx = [k_dx](const Vec& x, double z, int i) -> Mat { return k_dx(x, z, i).asDiagonal(); };
    f.drift = [n](const Vec&, double) { return Vec::Zero(n); };
    f.drift_dz = [n](const Vec&, double) { return Vec::Zero(n); };
    f.zero = [](const Vec&, double) { return 0.0; };
    f.zero_dz = [](const Vec&, double) { return 0.0; };
    return f;
}

}  // namespace

CoefficientField make_builtin_family(const std::string& name, const std::vector<double>& params) {
    CoefficientField f;
    if (name == "identity") {
        const int n = integer_param(params, 0, 2);
        if (n < 2 || n > 3) throw ParameterError("identity family: dimension must be 2 or 3");
        f = diagonal_field(
            n, [n](const Vec&, double) { return Vec::Ones(n); },
            [n](const Vec&, double) { return Vec::Zero(n); },
            [n](const Vec&, double, int) { return Vec::Zero(n); });
    } else if (name == "fedii") {
        const int n = 2;
        f = diagonal_field(
            n,
            [](const Vec& x, double) { return Vec{{1.0, fedii_k(x[0])}}; },
            [n](const Vec&, double) { return Vec::Zero(n); },
            [](const Vec& x, double, int i) {
                Vec d = Vec::Zero(2);
                if (i == 0) d[1] = fedii_k_prime(x[0]);
                return d;
            });
    } else if (name == "sharpness") {
        const int m = integer_param(params, 0, 1);
        if (m < 1) throw ParameterError("sharpness family: m must be a positive integer");
        const double dm = static_cast<double>(m);
        // k(x1,z) = 2m (x1^2+z^2)^{2m-1}
        auto kval = [dm](double x1, double z) { return 2.0 * dm * std::pow(x1 * x1 + z * z, 2.0 * dm - 1.0); };
        auto kdz = [dm](double x1, double z) {
            return 4.0 * dm * (2.0 * dm - 1.0) * z * std::pow(x1 * x1 + z * z, 2.0 * dm - 2.0);
        };
        auto kdx = [dm](double x1, double z) {
            return 4.0 * dm * (2.0 * dm - 1.0) * x1 * std::pow(x1 * x1 + z * z, 2.0 * dm - 2.0);
        };
        f = diagonal_field(
            2,
            [kval](const Vec& x, double z) { return Vec{{1.0, kval(x[0], z)}}; },
            [kdz](const Vec& x, double z) { return Vec{{0.0, kdz(x[0], z)}}; },
            [kdx](const Vec& x, double z, int i) {
                Vec d = Vec::Zero(2);
                if (i == 0) d[1] = kdx(x[0], z);
                return d;
            });
    } else if (name == "axis") {
        const int n = integer_param(params, 0, 2);
        if (n < 2 || n > 3) throw ParameterError("axis family: dimension must be 2 or 3");
        // k^i = sum_{j != i} x_j^2 for i >= 2: vanishes exactly on the i-th axis.
        f = diagonal_field(
            n,
            [n](const Vec& x, double) {
                Vec k = Vec::Ones(n);
                const double s = x.squaredNorm();
                for (int i = 1; i < n; ++i) k[i] = s - x[i] * x[i];
                return k;
            },
            [n](const Vec&, double) { return Vec::Zero(n); },
            [n](const Vec& x, double, int j) {
                Vec d = Vec::Zero(n);
                for (int i = 1; i < n; ++i)
                    if (i != j) d[i] = 2.0 * x[j];
                return d;
            });
    } else if (name == "power") {
        const int p = integer_param(params, 0, 1);
        if (p < 1) throw ParameterError("power family: p must be a positive integer");
        const double e = 2.0 * p;
        f = diagonal_field(
            2,
            [e](const Vec& x, double) { return Vec{{1.0, std::pow(x[0], e)}}; },
            [](const Vec&, double) { return Vec::Zero(2); },
            [e](const Vec& x, double, int i) {
                Vec d = Vec::Zero(2);
                if (i == 0) d[1] = e * std::pow(x[0], e - 1.0);
                return d;
            });
    } else {
        throw ParameterError("unknown coefficient family: " + name);
    }
    f.family = name;
    f.params = params;
    return f;
}

}  // namespace degensolve
