#include "slopegyre/regime.hpp"

#include <cmath>

#include "slopegyre/errors.hpp"

namespace slopegyre {

std::string to_string(FrequencyRegime r) {
    switch (r) {
        case FrequencyRegime::LowFreq: return "LowFreq";
        case FrequencyRegime::MidFreq: return "MidFreq";
        case FrequencyRegime::OutOfRange: return "OutOfRange";
    }
    return "?";
}

DerivedScales validate(const Parameters& p) {
    if (!(p.epsilon > 0.0)) throw RegimeViolation("epsilon>0");
    if (!(p.a > 0.0)) throw RegimeViolation("a>0");
    if (!(p.a < 1.0)) throw RegimeViolation("a<1");
    if (!(p.d >= 0.0)) throw RegimeViolation("d>=0");
    if (!(p.e >= p.d)) throw RegimeViolation("e>=d");
    const double b_bound = p.relaxed_b_bound ? (3.0 * p.a - p.d) / 4.0
                                             : (2.0 * p.a - p.d) / 3.0;
    if (!(p.b <= b_bound + 1e-14)) {
        throw RegimeViolation(p.relaxed_b_bound ? "b <= (3a-d)/4" : "b <= (2a-d)/3");
    }
    const double s = std::sin(p.alpha), c = std::cos(p.alpha);
    if (s == 0.0) throw RegimeViolation("sin(alpha) != 0");
    if (c == 0.0) throw RegimeViolation("cos(alpha) != 0");
    if (!(p.alpha > -1.5707963267948966 && p.alpha < 1.5707963267948966))
        throw RegimeViolation("alpha in (-pi/2, pi/2)");
    if (p.M < 1) throw RegimeViolation("M>=1");

    DerivedScales sc;
    sc.epsilon = p.epsilon;
    sc.a = p.a;
    sc.b = p.b;
    sc.d = p.d;
    sc.e = p.e;
    sc.beta = std::pow(p.epsilon, -p.a);
    sc.omega = std::pow(p.epsilon, -p.b);
    sc.nu_h = std::pow(p.epsilon, p.d);
    sc.nu_3 = std::pow(p.epsilon, p.e);
    sc.delta = std::pow(p.epsilon, 0.5 * double(p.M));
    sc.s = s;
    sc.c = c;
    sc.alpha = p.alpha;
    sc.M = p.M;
    sc.nu_eff = sc.nu_h * s * s + sc.nu_3 * c * c;
    sc.munk_scale = std::cbrt(sc.beta / sc.nu_eff);
    sc.ekman_scale =
        std::abs(std::tan(p.alpha)) / (std::sqrt(sc.nu_eff) * p.epsilon * std::sqrt(std::abs(sc.omega)));
    sc.theta_lo = p.theta_lo;
    sc.theta_hi = p.theta_hi;
    sc.used_relaxed_bound = p.relaxed_b_bound;
    return sc;
}

FrequencyRegime classify_frequency(const DerivedScales& sc) {
    const double w = std::abs(sc.omega);
    const double lo = sc.theta_lo * std::pow(sc.beta, 2.0 / 3.0) * std::cbrt(sc.nu_eff);
    const double hi = sc.theta_hi * std::pow(sc.beta, 0.75) * std::pow(sc.nu_eff, 0.25);
    if (w <= lo) return FrequencyRegime::LowFreq;
    if (w <= hi) return FrequencyRegime::MidFreq;
    return FrequencyRegime::OutOfRange;
}

} // namespace slopegyre
