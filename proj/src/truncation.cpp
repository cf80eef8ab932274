#include "degensolve/truncation.hpp"

#include <cmath>

#include "degensolve/errors.hpp"

namespace degensolve {

namespace {
// quintic smoothstep: s(0)=0, s(1)=1, s'(0)=s'(1)=s''(0)=s''(1)=0
double smoothstep(double t) { return t * t * t * (10.0 + t * (-15.0 + 6.0 * t)); }
// integral of smoothstep from 0 to t
double smoothstep_int(double t) {
    const double t4 = t * t * t * t;
    return t4 * (2.5 + t * (-3.0 + t));
}
}  // namespace

TruncationProfile::TruncationProfile(double M) : m_(M) {
    if (!(M > 0.0)) throw ParameterError("truncation: M must be positive");
}

double TruncationProfile::value(double z) const {
    const double a = std::abs(z);
    const double s = z < 0.0 ? -1.0 : 1.0;
    if (a <= m_) return z;
    if (a >= 2.0 * m_) return s * 1.5 * m_;
    const double t = (a - m_) / m_;
    // chi' = 1 - smoothstep on the blend, integrated from chi(M) = M
    return s * (m_ + m_ * (t - smoothstep_int(t)));
}

double TruncationProfile::derivative(double z) const {
    const double a = std::abs(z);
    if (a <= m_) return 1.0;
    if (a >= 2.0 * m_) return 0.0;
    return 1.0 - smoothstep((a - m_) / m_);
}

}  // namespace degensolve
