#ifndef SLOPEGYRE_REGIME_HPP
#define SLOPEGYRE_REGIME_HPP

#include <string>

namespace slopegyre {

// Input parameters: the Rossby number epsilon plus the exponent tuple that
// generates every physical coefficient. Parameters are kept as exponents so
// convergence studies can sweep epsilon with the exponents fixed.
struct Parameters {
    double epsilon = 1e-2;  // Rossby number
    double a = 0.5;         // beta = epsilon^{-a}
    double b = 0.0;         // omega = epsilon^{-b}
    double d = 1.0;         // nu_h = epsilon^d
    double e = 2.0;         // nu_3 = epsilon^e
    double alpha = -0.7853981633974483;  // bottom slope angle (radians)
    int M = 2;              // aspect ratio delta = epsilon^{M/2}
    // The stated admissibility bound is b <= (2a-d)/3. The relaxed variant
    // b <= (3a-d)/4 is opt-in and produces a warning in the derived scales.
    bool relaxed_b_bound = false;
    double theta_lo = 1.0;  // low-frequency classification threshold
    double theta_hi = 0.1;  // mid-frequency classification threshold
};

enum class FrequencyRegime { LowFreq, MidFreq, OutOfRange };

std::string to_string(FrequencyRegime r);

// Everything derived from Parameters. Valid instances only come out of
// validate().
struct DerivedScales {
    double epsilon = 0;
    double a = 0, b = 0, d = 0, e = 0;  // exponents echoed from Parameters
    double beta = 0;      // epsilon^{-a}
    double omega = 0;     // epsilon^{-b}
    double nu_h = 0;      // epsilon^{d}
    double nu_3 = 0;      // epsilon^{e}
    double delta = 0;     // epsilon^{M/2}
    double s = 0, c = 0;  // sin(alpha), cos(alpha)
    double alpha = 0;
    int M = 2;
    double nu_eff = 0;        // nu_h s^2 + nu_3 c^2
    double munk_scale = 0;    // (beta/nu_eff)^{1/3}
    double ekman_scale = 0;   // |tan alpha| / (nu_eff^{1/2} epsilon |omega|^{1/2})
    double theta_lo = 1.0, theta_hi = 0.1;
    bool used_relaxed_bound = false;
};

// Checks every admissibility inequality by name and derives all coefficients.
// Throws RegimeViolation carrying the first violated inequality.
DerivedScales validate(const Parameters& p);

// Classification of |omega| against the two boundary-layer thresholds:
//   LowFreq   : |omega| <= theta_lo * beta^{2/3} nu_eff^{1/3}
//   MidFreq   : otherwise, if |omega| <= theta_hi * beta^{3/4} nu_eff^{1/4}
//   OutOfRange: otherwise
FrequencyRegime classify_frequency(const DerivedScales& sc);

} // namespace slopegyre

#endif
