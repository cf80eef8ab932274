#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace degensolve {

/// Axis-aligned box: center and per-axis half edge lengths.
struct BoxRegion {
    Eigen::VectorXd center;
    Eigen::VectorXd half_lengths;

    BoxRegion() = default;
    BoxRegion(Eigen::VectorXd c, Eigen::VectorXd r);

    int dim() const { return static_cast<int>(center.size()); }

    /// gamma*R scales the half lengths only, keeping the center.
    BoxRegion scaled(double gamma) const { return BoxRegion(center, gamma * half_lengths); }

    /// x lies in factor*R (closed box).
    bool contains(const Eigen::VectorXd& x, double factor = 1.0) const;
};

/// Problem coefficients: matrix A(x,z), vector of diagonal weights k(x,z),
/// drift gamma(x,z), zero-order f(x,z), with the analytic partial derivatives
/// the solver and the condition checks consume.
struct CoefficientField {
    int dim = 2;
    std::string family = "custom";
    std::vector<double> params;

    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)> matrix;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double)> matrix_dz;
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&, double, int)> matrix_dx;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> k;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> drift;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&, double)> drift_dz;
    std::function<double(const Eigen::VectorXd&, double)> zero;
    std::function<double(const Eigen::VectorXd&, double)> zero_dz;

    double kstar(const Eigen::VectorXd& x, double z) const { return k(x, z).minCoeff(); }
};

/// Built-in families: identity, fedii, sharpness (integer m >= 1 parameter),
/// axis (optional dimension), power (integer p >= 1 exponent of x1^{2p}).
CoefficientField make_builtin_family(const std::string& name, const std::vector<double>& params = {});

/// Fedii-type profile exp(-1/t^2) extended by 0 at t = 0, and its derivative.
double fedii_k(double t);
double fedii_k_prime(double t);

}  // namespace degensolve
