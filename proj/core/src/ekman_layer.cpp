#include "slopegyre/ekman_layer.hpp"

#include <algorithm>
#include <cmath>

#include "slopegyre/errors.hpp"

namespace slopegyre {

std::string to_string(DiscardReason r) {
    return r == DiscardReason::RedundantWithMunk ? "RedundantWithMunk" : "BetaDominates";
}

cplx ekman_r(cplx lambda, Xi xi, double omega, const DerivedScales& sc) {
    return cplx(0, omega) - sc.nu_eff * lambda * lambda +
           cplx(0, 2.0 * sc.c * sc.s * xi.x) * (sc.nu_3 - sc.nu_h) * lambda +
           sc.nu_h * (sc.c * sc.c * xi.x * xi.x + xi.y * xi.y) +
           sc.nu_3 * sc.s * sc.s * xi.x * xi.x;
}

Matrix5c ekman_matrix(cplx lambda, Xi xi, double omega, const DerivedScales& sc) {
    const double eps = sc.epsilon, del = sc.delta, s = sc.s, c = sc.c;
    const cplx r = ekman_r(lambda, xi, omega, sc);
    const cplx ls = lambda * s + cplx(0, c * xi.x);   // lambda * stilde
    const cplx lc = lambda * c - cplx(0, s * xi.x);   // lambda * ctilde
    Matrix5c A = Matrix5c::Zero();
    // x-momentum
    A(0, 0) = r;
    A(0, 1) = -c / eps;
    A(0, 3) = ls * c / eps - lc * s / (eps * del * del);
    A(0, 4) = s / (eps * del * del);
    // y-momentum
    A(1, 0) = c / eps;
    A(1, 1) = r;
    A(1, 2) = -s / eps;
    A(1, 3) = cplx(0, xi.y) / eps;
    // z-momentum
    A(2, 1) = s / eps;
    A(2, 2) = r;
    A(2, 3) = -ls * s / eps - lc * c / (eps * del * del);
    A(2, 4) = c / (eps * del * del);
    // divergence-free
    A(3, 0) = cplx(0, xi.x);
    A(3, 1) = cplx(0, xi.y);
    A(3, 2) = -lambda;
    // conservation of mass
    A(4, 0) = -s / eps;
    A(4, 2) = -c / eps;
    A(4, 4) = cplx(0, omega);
    return A;
}

cplx exact_determinant(cplx lambda, Xi xi, double omega, const DerivedScales& sc) {
    if (lambda == cplx(0)) throw DegenerateTilt("lambda = 0");
    const cplx st = sc.s + cplx(0, xi.x * sc.c) / lambda;
    const cplx ct = sc.c - cplx(0, xi.x * sc.s) / lambda;
    if (std::abs(ct) < 1e-12) throw DegenerateTilt("|ctilde| < 1e-12");
    const cplx r = ekman_r(lambda, xi, omega, sc);
    const double eps2 = sc.epsilon * sc.epsilon;
    const double del2 = sc.delta * sc.delta;
    return r * r + 1.0 / eps2 +
           del2 * r * (r + 1.0 / (cplx(0, omega) * eps2 * del2)) *
               (st * st / (ct * ct) - xi.y * xi.y / (lambda * lambda * ct * ct));
}

Poly ekman_char_poly(Xi xi, double omega, const DerivedScales& sc) {
    const double eps2 = sc.epsilon * sc.epsilon;
    const double del2 = sc.delta * sc.delta;
    const Poly rp({cplx(0, omega) + sc.nu_h * (sc.c * sc.c * xi.x * xi.x + xi.y * xi.y) +
                       sc.nu_3 * sc.s * sc.s * xi.x * xi.x,
                   cplx(0, 2.0 * sc.c * sc.s * xi.x) * (sc.nu_3 - sc.nu_h),
                   cplx(-sc.nu_eff)});
    const Poly C({cplx(0, -sc.s * xi.x), cplx(sc.c)});  // lambda*ctilde
    const Poly S({cplx(0, sc.c * xi.x), cplx(sc.s)});   // lambda*stilde
    const Poly Sy = S * S - Poly::constant(xi.y * xi.y);
    // eps^2 lambda^2 ctilde^2 * exact_determinant
    return rp * rp * (C * C * eps2 + Sy * (eps2 * del2)) + C * C +
           rp * Sy * (1.0 / cplx(0, omega));
}

Eigen::Matrix2cd reduced_system(cplx lambda, Xi xi, double omega, const DerivedScales& sc) {
    const double eps = sc.epsilon, s = sc.s, c = sc.c;
    const double del2 = sc.delta * sc.delta;
    const cplx st = s + cplx(0, xi.x * c) / lambda;
    const cplx ct = c - cplx(0, xi.x * s) / lambda;
    const cplx r = ekman_r(lambda, xi, omega, sc);
    const cplx big = r + 1.0 / (cplx(0, omega) * eps * eps * del2);
    Eigen::Matrix2cd A;
    A(0, 0) = r * (1.0 - s * st) + st * st * (c * del2 / ct) * big;
    A(0, 1) = -c / eps +
              cplx(0, c * xi.y) / lambda * (-s * r + (del2 * c * st / ct) * big);
    A(1, 0) = ct / eps + cplx(0, xi.y) * del2 * st / (lambda * ct) * big;
    A(1, 1) = r - cplx(0, s * xi.y) / (eps * lambda) -
              del2 * xi.y * xi.y * c / (lambda * lambda * ct) * big;
    return A;
}

LayerRoots layer_roots(Xi xi, double omega, const DerivedScales& sc) {
    if (omega == 0.0) throw RegimeError("layer_roots requires omega != 0");
    if (!(std::abs(omega * sc.epsilon) <= 0.1))
        throw RegimeError("layer_roots requires |omega epsilon| <= 0.1");
    if (!(xi.norm() <= 0.1 * std::sqrt(std::abs(omega) / sc.nu_eff)))
        throw RegimeError("layer_roots requires |xi| <= 0.1 sqrt(|omega|/nu_eff)");

    LayerRoots out;
    const double sgn = omega >= 0 ? 1.0 : -1.0;
    out.lambda1_ref = std::exp(cplx(0, -sgn * M_PI / 4.0)) * std::abs(std::tan(sc.alpha)) /
                      (std::sqrt(sc.nu_eff) * sc.epsilon * std::sqrt(std::abs(omega)));
    out.lambda2_ref = std::exp(cplx(0, sgn * M_PI / 4.0)) * std::sqrt(std::abs(omega)) /
                      (std::sqrt(sc.nu_eff) * std::abs(sc.s));

    out.all_roots = ekman_char_poly(xi, omega, sc).roots();

    std::vector<cplx> decaying;
    for (cplx l : out.all_roots)
        if (l.real() > 0) decaying.push_back(l);
    auto rel = [](cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
    auto best_for = [&](cplx ref) {
        cplx best{};
        double d = 1e300;
        for (cplx l : decaying)
            if (rel(l, ref) < d) {
                d = rel(l, ref);
                best = l;
            }
        if (d > 0.30)
            throw MatchFailure("no decaying root within 30% of reference |" +
                               std::to_string(std::abs(ref)) + "|, best " + std::to_string(d));
        return best;
    };
    const cplx l1 = best_for(out.lambda1_ref);
    const cplx l2 = best_for(out.lambda2_ref);
    if (l1 == l2) throw MatchFailure("layer references matched the same root");

    out.mode1.lambda = l1;
    out.mode1.r = ekman_r(l1, xi, omega, sc);
    out.mode1.discard = false;
    out.lambda2 = l2;
    return out;
}

EkmanMode eigenvector_lambda1(const EkmanMode& mode, Xi xi, double omega,
                              const DerivedScales& sc) {
    const cplx l = mode.lambda;
    const Eigen::Matrix2cd A = reduced_system(l, xi, omega, sc);
    const double row1 = std::sqrt(std::norm(A(0, 0)) + std::norm(A(0, 1)));
    const double row2 = std::sqrt(std::norm(A(1, 0)) + std::norm(A(1, 1)));
    const cplx det = A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
    if (std::abs(det) > 1e-3 * row1 * row2)
        throw NullspaceFailure("reduced determinant not small: |det|/rows = " +
                               std::to_string(std::abs(det) / (row1 * row2)));

    EkmanMode out = mode;
    const double eps = sc.epsilon, s = sc.s, c = sc.c;
    const double del2 = sc.delta * sc.delta;
    const cplx st = s + cplx(0, xi.x * c) / l;
    const cplx ct = c - cplx(0, xi.x * s) / l;
    const cplx Ux = 1.0;
    const cplx Uy = -A(1, 0) / A(1, 1);
    const cplx Uz = (cplx(0, xi.x) * Ux + cplx(0, xi.y) * Uy) / l;
    const cplx R = (st * Ux + cplx(0, xi.y) * c / l * Uy) / (cplx(0, omega) * eps);
    const cplx P = (eps * del2 / (l * ct)) *
                   (mode.r + 1.0 / (cplx(0, omega) * eps * eps * del2)) *
                   (st * Ux + cplx(0, xi.y) / l * c * Uy);
    out.U = {Ux, Uy, Uz, P, R};

    const double sgn = omega >= 0 ? 1.0 : -1.0;
    out.U_ref = {cplx(1.0),
                 cplx(0, 1) * (c * c * c / (s * s)) * omega * eps,
                 cplx(0, xi.x) / l,
                 std::exp(cplx(0, -sgn * M_PI / 4.0)) * std::sqrt(sc.nu_eff / std::abs(omega)) *
                     (sc.alpha >= 0 ? 1.0 : -1.0),
                 s / (cplx(0, omega) * eps)};
    return out;
}

DiscardReason discard_rule(cplx lambda2, const RootSet& munk, const DerivedScales& sc) {
    (void)sc;
    switch (munk.regime) {
        case FrequencyRegime::LowFreq:
            return DiscardReason::BetaDominates;
        case FrequencyRegime::MidFreq: {
            // the oscillatory large-modulus decaying root is the one lambda2
            // duplicates; the sign-ordered slot it lands in depends on omega
            const double dev = std::min(std::abs(lambda2 / munk.mu_plus[0] - 1.0),
                                        std::abs(lambda2 / munk.mu_plus[1] - 1.0));
            if (dev > 0.30)
                throw InconsistentRegime(
                    "lambda2 does not coincide with mu1+ in the mid-frequency regime: dev = " +
                    std::to_string(dev));
            return DiscardReason::RedundantWithMunk;
        }
        case FrequencyRegime::OutOfRange:
            throw InconsistentRegime("discard_rule requires a classified regime");
    }
    throw InconsistentRegime("unreachable");
}

} // namespace slopegyre
