#pragma once

namespace degensolve {

/// Smooth clamp chi_M: identity on |z| <= M, saturating at +/- 1.5 M beyond
/// |z| >= 2M, odd, with |chi'| <= 1. The blend over [M, 2M] is a quintic
/// smoothstep on the derivative, so chi is C^2.
class TruncationProfile {
  public:
    explicit TruncationProfile(double M);

    double M() const { return m_; }
    double value(double z) const;
    double derivative(double z) const;

  private:
    double m_;
};

inline TruncationProfile build_truncation(double M) { return TruncationProfile(M); }

}  // namespace degensolve
