#ifndef SLOPEGYRE_MUNK_ROOTS_HPP
#define SLOPEGYRE_MUNK_ROOTS_HPP

#include <array>

#include "slopegyre/poly.hpp"
#include "slopegyre/regime.hpp"

namespace slopegyre {

struct Xi {
    double x = 0.0, y = 0.0;
    double norm() const { return std::sqrt(x * x + y * y); }
};

// The four roots of the boundary-layer characteristic quartic at one mode,
// sign-classified, with closed-form reference values when the frequency
// regime provides them.
struct RootSet {
    std::array<cplx, 2> mu_plus{};   // Re > 0, ordered Re(mu1) <= Re(mu2)
    std::array<cplx, 2> mu_minus{};  // Re < 0, ordered Re(mu1) >= Re(mu2)
    FrequencyRegime regime = FrequencyRegime::OutOfRange;
    bool refs_available = false;
    std::array<cplx, 2> ref_plus{};
    std::array<cplx, 2> ref_minus{};
    double separation = 0.0;         // min pairwise distance / max modulus
    double max_rel_residual = 0.0;   // worst |P(mu)| / sum|monomials|
};

// Characteristic quartic in mu for the decaying-exponential ansatz.
Poly munk_quartic(Xi xi, double omega, const DerivedScales& sc);

// Exact roots via companion matrix, classified by sign of the real part.
// Throws PureImaginaryRoot / SignSplitViolation on degenerate inputs.
RootSet quartic_roots(Xi xi, double omega, const DerivedScales& sc);

// Three reference roots of the rescaled low-frequency cubic
//   i (omega / (beta^{2/3} nu_eff^{1/3})) M + s - s^2 M^3 = 0,
// returned as {M1+, M2+, M2-}. Throws RegimeError outside LowFreq.
std::array<cplx, 3> munk_cubic(double omega, const DerivedScales& sc);

struct MidfreqRefs {
    cplx mu1_plus, mu2_plus, mu1_minus, mu2_minus;
    double re_mu2_plus;  // refined real-part estimate for mu2+
};
// Mid-frequency closed-form references; requires the regime and the
// smallness bound |xi| <= 0.1 beta^3 nu_eff / omega^4.
MidfreqRefs midfreq_asymptotics(Xi xi, double omega, const DerivedScales& sc);

// min pairwise distance over max modulus.
double check_separation(const RootSet& r);
inline constexpr double kSeparationFlag = 1e-3;
inline bool near_crossing(const RootSet& r) { return r.separation < kSeparationFlag; }

// Regime classification for an explicit frequency (quartic_roots may be
// called with a frequency different from the run frequency).
FrequencyRegime classify_frequency_for(double omega, const DerivedScales& sc);

} // namespace slopegyre

#endif
