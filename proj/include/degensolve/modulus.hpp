#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

namespace degensolve {

/// Sampled modulus of continuity on [0, rbar]: increasing radii, omega(0) = 0,
/// nondecreasing values; evaluated by monotone (piecewise-linear) interpolation.
struct Modulus {
    std::vector<double> r;
    std::vector<double> w;

    Modulus(std::vector<double> radii, std::vector<double> values);

    static Modulus from_function(const std::function<double(double)>& f, double rbar, int n);

    double rbar() const { return r.back(); }
    double operator()(double radius) const;
};

/// Concave, strictly increasing majorant of a modulus. Either carries an
/// analytic closed form (with derivatives) or the sampled output of the
/// discrete construction pipeline.
class ConcaveMajorant {
  public:
    ConcaveMajorant() = default;  // empty; fill via analytic() or sampled()

    /// Analytic majorant: omega with derivatives, already concave and
    /// strictly increasing (checked on a sample sweep at construction).
    static ConcaveMajorant analytic(std::function<double(double)> w,
                                    std::function<double(double)> w1,
                                    std::function<double(double)> w2,
                                    double rbar);

    /// Sampled majorant from the construction pipeline (see concave_majorant).
    static ConcaveMajorant sampled(std::vector<double> r, std::vector<double> w, nlohmann::json provenance);

    double rbar() const { return rbar_; }
    bool is_analytic() const { return static_cast<bool>(w1_); }

    double value(double r) const;
    /// One-sided (segment) derivatives for the sampled form; exact for analytic.
    double derivative(double r) const;
    double second_derivative(double r) const;

    /// psi = sqrt(omega) and its derivatives; refuses r < 1e-8 rbar where
    /// psi' blows up.
    double psi(double r) const;
    double psi_prime(double r) const;
    double psi_second(double r) const;

    const std::vector<double>& sample_r() const { return r_; }
    const std::vector<double>& sample_w() const { return w_; }
    const nlohmann::json& provenance() const { return provenance_; }

  private:
    std::vector<double> r_, w_;
    std::function<double(double)> w0_, w1_, w2_;
    double rbar_ = 1.0;
    nlohmann::json provenance_;

    std::size_t segment(double r) const;
};

/// Discrete form of the constructive proof: running maximum, smoothing by
/// averaging over a window proportional to the distance from 0, addition of
/// the linear term, then replacement of the convex part by its chord. A
/// monotone repair (running max plus a 1e-11 linear slope) pins the
/// strictly-increasing invariant, which the chord replacement alone does not
/// guarantee for steep mid segments.
ConcaveMajorant concave_majorant(const Modulus& mod);

}  // namespace degensolve
