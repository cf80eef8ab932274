#include "degensolve/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degensolve/errors.hpp"

namespace degensolve {

Modulus::Modulus(std::vector<double> radii, std::vector<double> values) : r(std::move(radii)), w(std::move(values)) {
    if (r.empty() || r.size() != w.size()) throw DataError("modulus: empty or mismatched samples");
    if (r.front() != 0.0) throw DataError("modulus: first sample must be at r = 0");
    if (w.front() != 0.0) throw DataError("modulus: omega(0) must be 0");
    for (std::size_t i = 1; i < r.size(); ++i) {
        if (!(r[i] > r[i - 1])) throw DataError("modulus: radii must be strictly increasing");
        if (w[i] < w[i - 1]) throw DataError("modulus: omega must be nondecreasing");
    }
}

Modulus Modulus::from_function(const std::function<double(double)>& f, double rbar, int n) {
    if (!(rbar > 0.0) || n < 2) throw ParameterError("modulus: rbar > 0 and n >= 2 required");
    std::vector<double> r(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        r[static_cast<std::size_t>(i)] = rbar * i / (n - 1);
        w[static_cast<std::size_t>(i)] = f(r[static_cast<std::size_t>(i)]);
    }
    return Modulus(std::move(r), std::move(w));
}

double Modulus::operator()(double radius) const {
    if (radius <= 0.0) return w.front();
    if (radius >= r.back()) return w.back();
    const auto it = std::upper_bound(r.begin(), r.end(), radius);
    const std::size_t i = static_cast<std::size_t>(it - r.begin());
    const double t = (radius - r[i - 1]) / (r[i] - r[i - 1]);
    return w[i - 1] + t * (w[i] - w[i - 1]);
}

ConcaveMajorant ConcaveMajorant::analytic(std::function<double(double)> w,
                                          std::function<double(double)> w1,
                                          std::function<double(double)> w2,
                                          double rbar) {
    if (!(rbar > 0.0)) throw ParameterError("majorant: rbar must be positive");
    ConcaveMajorant m;
    m.w0_ = std::move(w);
    m.w1_ = std::move(w1);
    m.w2_ = std::move(w2);
    m.rbar_ = rbar;
    if (std::abs(m.w0_(0.0)) > 1e-14) throw DataError("majorant: omega(0) must be 0");
    for (int i = 1; i <= 64; ++i) {
        const double r = rbar * i / 64.0;
        if (!(m.w1_(r) > 0.0)) throw DataError("majorant: analytic form must be strictly increasing");
        if (m.w2_(r) > 1e-12 * (1.0 + std::abs(m.w0_(r)))) throw DataError("majorant: analytic form must be concave");
    }
    m.provenance_ = {{"kind", "analytic"}};
    return m;
}

ConcaveMajorant ConcaveMajorant::sampled(std::vector<double> r, std::vector<double> w, nlohmann::json provenance) {
    if (r.size() < 2 || r.size() != w.size()) throw DataError("majorant: bad sample arrays");
    ConcaveMajorant m;
    m.r_ = std::move(r);
    m.w_ = std::move(w);
    m.rbar_ = m.r_.back();
    m.provenance_ = std::move(provenance);
    return m;
}

std::size_t ConcaveMajorant::segment(double r) const {
    const auto it = std::upper_bound(r_.begin(), r_.end(), r);
    std::size_t i = static_cast<std::size_t>(it - r_.begin());
    if (i == 0) i = 1;
    if (i >= r_.size()) i = r_.size() - 1;
    return i;
}

double ConcaveMajorant::value(double r) const {
    if (w0_) return w0_(std::clamp(r, 0.0, rbar_));
    if (r <= 0.0) return w_.front();
    if (r >= rbar_) return w_.back();
    const std::size_t i = segment(r);
    const double t = (r - r_[i - 1]) / (r_[i] - r_[i - 1]);
    return w_[i - 1] + t * (w_[i] - w_[i - 1]);
}

double ConcaveMajorant::derivative(double r) const {
    if (r < 1e-8 * rbar_)
        throw ParameterError("majorant: derivative evaluation refused below 1e-8 rbar (psi' blow-up)");
    if (w1_) return w1_(std::min(r, rbar_));
    const std::size_t i = segment(std::min(r, rbar_));
    return (w_[i] - w_[i - 1]) / (r_[i] - r_[i - 1]);
}

double ConcaveMajorant::second_derivative(double r) const {
    if (r < 1e-8 * rbar_)
        throw ParameterError("majorant: derivative evaluation refused below 1e-8 rbar (psi' blow-up)");
    if (w2_) return w2_(std::min(r, rbar_));
    return 0.0;  // piecewise linear between samples
}

double ConcaveMajorant::psi(double r) const { return std::sqrt(std::max(value(r), 0.0)); }

double ConcaveMajorant::psi_prime(double r) const {
    const double p = psi(r);
    if (!(p > 0.0)) throw NumericalError("majorant: psi' undefined where omega = 0");
    return derivative(r) / (2.0 * p);
}

double ConcaveMajorant::psi_second(double r) const {
    const double om = std::max(value(r), 0.0);
    if (!(om > 0.0)) throw NumericalError("majorant: psi'' undefined where omega = 0");
    const double d1 = derivative(r), d2 = second_derivative(r);
    return (2.0 * d2 * om - d1 * d1) / (4.0 * std::pow(om, 1.5));
}

ConcaveMajorant concave_majorant(const Modulus& mod) {
    const double rbar = mod.rbar();
    if (!(rbar > 0.0)) throw DataError("concave majorant: modulus needs rbar > 0");

    // Work on the input radii with each gap subdivided toward a target
    // spacing, so the lattice contains every input sample and has no
    // near-duplicate nodes (those would turn slope changes into noise).
    std::vector<double> grid{0.0};
    const double target = rbar / 256.0;
    for (std::size_t i = 0; i + 1 < mod.r.size(); ++i) {
        const double gap = mod.r[i + 1] - mod.r[i];
        const int pieces = std::max(1, static_cast<int>(std::ceil(gap / target)));
        for (int j = 1; j <= pieces; ++j) grid.push_back(mod.r[i] + gap * j / pieces);
        grid.back() = mod.r[i + 1];
    }
    const std::size_t n = grid.size();

    // Stage 1: running maximum.
    std::vector<double> umax(n);
    double run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        run = std::max(run, mod(grid[i]));
        umax[i] = run;
    }
    auto umax_at = [&](double x) {
        if (x <= grid.front()) return umax.front();
        if (x >= grid.back()) return umax.back();
        const auto it = std::upper_bound(grid.begin(), grid.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - grid.begin());
        const double t = (x - grid[i - 1]) / (grid[i] - grid[i - 1]);
        return umax[i - 1] + t * (umax[i] - umax[i - 1]);
    };

    // Stage 2: average of the running maximum over [1.5 x, 2.5 x] (window
    // width proportional to the distance from 0), evaluated by composite
    // trapezoid on the interpolant; constant extension beyond rbar.
    std::vector<double> v(n);
    v[0] = umax[0];
    for (std::size_t i = 1; i < n; ++i) {
        const double a = 1.5 * grid[i], b = 2.5 * grid[i];
        const int q = 16;
        double acc = 0.0;
        for (int s = 0; s <= q; ++s) {
            const double x = a + (b - a) * s / q;
            acc += (s == 0 || s == q ? 0.5 : 1.0) * umax_at(x);
        }
        v[i] = acc / q;
    }

    // Stage 3: running max again (discrete safety) plus the linear term.
    std::vector<double> vt(n);
    run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        run = std::max(run, v[i]);
        vt[i] = run + grid[i];
    }

    // Stage 4: split the slope changes of vt into convex/concave parts and
    // replace the convex part by its chord. Build W+ and W- backwards with
    // terminal value and terminal slope zero so their slope changes match the
    // positive/negative parts exactly.
    std::vector<double> slope(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) slope[i] = (vt[i + 1] - vt[i]) / (grid[i + 1] - grid[i]);
    std::vector<double> wp(n, 0.0);
    {
        double s = 0.0;
        for (std::size_t i = n - 1; i-- > 0;) {
            if (i + 1 <= n - 2) {
                const double change = slope[i + 1] - slope[i];
                if (change > 0.0) s -= change;
            }
            wp[i] = wp[i + 1] - s * (grid[i + 1] - grid[i]);
        }
    }
    std::vector<double> wout(n);
    const double wp0 = wp[0];
    for (std::size_t i = 0; i < n; ++i) {
        const double chord = wp0 * (grid.back() - grid[i]) / (grid.back() - grid.front());
        wout[i] = vt[i] - wp[i] + chord;
    }

    // Monotone repair: running max keeps concavity and the values above the
    // input; the tiny linear slope pins strict increase.
    bool repaired = false;
    run = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
        if (wout[i] < run) repaired = true;
        run = std::max(run, wout[i]);
        wout[i] = run + 1e-11 * grid[i];
    }

    nlohmann::json prov;
    prov["kind"] = "pipeline";
    prov["nodes"] = n;
    prov["monotone_repair"] = repaired;
    prov["vt_end"] = vt.back();
    prov["wplus0"] = wp0;
    return ConcaveMajorant::sampled(std::move(grid), std::move(wout), std::move(prov));
}

}  // namespace degensolve
