#include "slopegyre/munk_roots.hpp"

#include <algorithm>
#include <cmath>

#include "slopegyre/errors.hpp"

namespace slopegyre {

FrequencyRegime classify_frequency_for(double omega, const DerivedScales& sc) {
    DerivedScales tmp = sc;
    tmp.omega = omega;
    return classify_frequency(tmp);
}

Poly munk_quartic(Xi xi, double omega, const DerivedScales& sc) {
    const cplx A(0.0, sc.c * xi.x);
    const Poly L1({A, cplx(sc.s)});             // A + s mu
    const Poly L2({cplx(0.0, sc.s * xi.x), cplx(-sc.c)});  // i s xi_x - c mu
    const Poly Q1 = L1 * L1 - Poly::constant(xi.y * xi.y);
    const Poly iw({cplx(0, -omega) * (xi.norm() * xi.norm()), cplx(0), cplx(0, omega)});
    return iw + L1 * cplx(sc.beta) - (Q1 * sc.nu_h + L2 * L2 * sc.nu_3) * Q1;
}

namespace {

// Best assignment of two reference values to two roots (two permutations).
void match_pair(std::array<cplx, 2>& roots, std::array<cplx, 2>& refs) {
    auto rel = [](cplx a, cplx b) {
        const double s = std::max({std::abs(a), std::abs(b), 1e-300});
        return std::abs(a - b) / s;
    };
    const double keep = rel(roots[0], refs[0]) + rel(roots[1], refs[1]);
    const double swap = rel(roots[0], refs[1]) + rel(roots[1], refs[0]);
    if (swap < keep) std::swap(refs[0], refs[1]);
}

} // namespace

std::array<cplx, 3> munk_cubic(double omega, const DerivedScales& sc) {
    if (classify_frequency_for(omega, sc) != FrequencyRegime::LowFreq)
        throw RegimeError("munk_cubic requires the low-frequency regime");
    const double wt = omega / (std::pow(sc.beta, 2.0 / 3.0) * std::cbrt(sc.nu_eff));
    // i wt M + s - s^2 M^3 = 0
    Poly cubic({cplx(sc.s), cplx(0, wt), cplx(0), cplx(-sc.s * sc.s)});
    std::vector<cplx> rs = cubic.roots();
    // classification: for s<0 two roots decay on the fluid side (Re > 0)
    std::vector<cplx> plus, minus;
    for (cplx m : rs) (m.real() > 0 ? plus : minus).push_back(m);
    if (plus.size() != 2 || minus.size() != 1)
        throw RegimeError("unexpected sign pattern of rescaled cubic roots");
    std::sort(plus.begin(), plus.end(), [](cplx a, cplx b) { return a.real() < b.real(); });
    return {plus[0], plus[1], minus[0]};
}

MidfreqRefs midfreq_asymptotics(Xi xi, double omega, const DerivedScales& sc) {
    if (classify_frequency_for(omega, sc) != FrequencyRegime::MidFreq)
        throw RegimeError("midfreq_asymptotics requires the mid-frequency regime");
    const double bound = 0.1 * std::pow(sc.beta, 3) * sc.nu_eff / std::pow(std::abs(omega), 4);
    if (!(xi.norm() <= bound))
        throw RegimeError("midfreq_asymptotics requires |xi| <= 0.1 beta^3 nu_eff / omega^4");
    const double sgn = omega >= 0 ? 1.0 : -1.0;
    MidfreqRefs r;
    r.mu1_plus = std::sqrt(std::abs(omega / (sc.nu_eff * sc.s * sc.s))) *
                 std::exp(cplx(0, sgn * M_PI / 4.0));
    r.mu2_plus = -sc.beta * sc.s / cplx(0, omega);
    r.mu1_minus = -cplx(0, sc.c * xi.x) / sc.s;
    r.mu2_minus = -r.mu1_plus;
    r.re_mu2_plus = -sc.nu_eff * std::pow(sc.s, 5) * std::pow(sc.beta, 3) / std::pow(omega, 4);
    return r;
}

double check_separation(const RootSet& r) {
    const cplx all[4] = {r.mu_plus[0], r.mu_plus[1], r.mu_minus[0], r.mu_minus[1]};
    double maxmod = 0.0, mind = 0.0;
    bool first = true;
    for (int i = 0; i < 4; ++i) {
        maxmod = std::max(maxmod, std::abs(all[i]));
        for (int j = i + 1; j < 4; ++j) {
            const double dij = std::abs(all[i] - all[j]);
            mind = first ? dij : std::min(mind, dij);
            first = false;
        }
    }
    return maxmod > 0 ? mind / maxmod : 0.0;
}

RootSet quartic_roots(Xi xi, double omega, const DerivedScales& sc) {
    if (xi.y == 0.0 && omega == 0.0)
        throw PureImaginaryRoot("(xi_y, omega) = (0,0) is outside the solvable set");
    if (xi.norm() == 0.0)
        throw PureImaginaryRoot("xi = 0 is outside the solvable set");

    const Poly P = munk_quartic(xi, omega, sc);
    std::vector<cplx> rs = P.roots();

    RootSet out;
    std::vector<cplx> plus, minus;
    double worst = 0.0;
    for (cplx mu : rs) {
        if (std::abs(mu.real()) < 1e-10 * std::abs(mu))
            throw PureImaginaryRoot("root with vanishing real part");
        worst = std::max(worst, std::abs(P.eval(mu)) / P.eval_abs(mu));
        (mu.real() > 0 ? plus : minus).push_back(mu);
    }
    if (plus.size() != 2 || minus.size() != 2)
        throw SignSplitViolation("expected two decaying and two growing roots, got " +
                                 std::to_string(plus.size()) + "/" + std::to_string(minus.size()));
    std::sort(plus.begin(), plus.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    std::sort(minus.begin(), minus.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
    out.mu_plus = {plus[0], plus[1]};
    out.mu_minus = {minus[0], minus[1]};
    out.max_rel_residual = worst;
    if (worst > 1e-9)
        throw IllConditioned("quartic root residual " + std::to_string(worst));

    out.regime = classify_frequency_for(omega, sc);
    if (out.regime == FrequencyRegime::LowFreq && sc.s < 0 && sc.beta > 0) {
        const auto M = munk_cubic(omega, sc);
        out.ref_plus = {sc.munk_scale * M[0], sc.munk_scale * M[1]};
        out.ref_minus = {-cplx(0, sc.c * xi.x) / sc.s, sc.munk_scale * M[2]};
        match_pair(out.mu_plus, out.ref_plus);
        match_pair(out.mu_minus, out.ref_minus);
        out.refs_available = true;
    } else if (out.regime == FrequencyRegime::MidFreq && sc.s < 0) {
        const double bound =
            0.1 * std::pow(sc.beta, 3) * sc.nu_eff / std::pow(std::abs(omega), 4);
        if (xi.norm() <= bound) {
            const MidfreqRefs r = midfreq_asymptotics(xi, omega, sc);
            out.ref_plus = {r.mu1_plus, r.mu2_plus};
            out.ref_minus = {r.mu1_minus, r.mu2_minus};
            match_pair(out.mu_plus, out.ref_plus);
            match_pair(out.mu_minus, out.ref_minus);
            out.refs_available = true;
        }
    }
    out.separation = check_separation(out);
    return out;
}

} // namespace slopegyre
