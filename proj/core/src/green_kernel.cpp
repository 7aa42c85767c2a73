#include "slopegyre/green_kernel.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "slopegyre/errors.hpp"

namespace slopegyre {

GreenKernel build_kernel(const RootSet& roots, const DerivedScales& sc) {
    if (near_crossing(roots))
        throw IllConditioned("near-crossing roots, separation " + std::to_string(roots.separation));

    GreenKernel k;
    k.roots = roots;
    k.nu_eff_s2 = sc.nu_eff * sc.s * sc.s;

    const cplx all[4] = {roots.mu_plus[0], roots.mu_plus[1], roots.mu_minus[0],
                         roots.mu_minus[1]};
    auto lagrange = [&](cplx mu_j, double sign) {
        cplx prod(1.0);
        for (const cplx& mu : all)
            if (mu != mu_j) prod *= 1.0 / (mu_j - mu);
        return sign / k.nu_eff_s2 * prod;
    };
    k.Cp = {lagrange(roots.mu_plus[0], +1.0), lagrange(roots.mu_plus[1], +1.0)};
    k.Cm = {lagrange(roots.mu_minus[0], -1.0), lagrange(roots.mu_minus[1], -1.0)};

    // cross-validation: dense solve of the jump system
    Eigen::Matrix<cplx, 4, 4> M;
    for (int r = 0; r < 4; ++r) {
        M(r, 0) = std::pow(roots.mu_plus[0], r);
        M(r, 1) = -std::pow(roots.mu_minus[0], r);
        M(r, 2) = std::pow(roots.mu_plus[1], r);
        M(r, 3) = -std::pow(roots.mu_minus[1], r);
    }
    Eigen::Vector4cd rhs;
    rhs << cplx(0), cplx(0), cplx(0), cplx(1.0 / k.nu_eff_s2);
    Eigen::PartialPivLU<Eigen::Matrix<cplx, 4, 4>> lu(M);
    Eigen::Vector4cd x = lu.solve(rhs);
    x += lu.solve(rhs - M * x);  // one refinement step

    double res = 0.0, rscale = 0.0;
    Eigen::Vector4cd r4 = M * x - rhs;
    for (int i = 0; i < 4; ++i) {
        res = std::max(res, std::abs(r4[i]));
        for (int j = 0; j < 4; ++j) rscale = std::max(rscale, std::abs(M(i, j) * x[j]));
    }
    if (res > 1e-8 * std::max(rscale, 1e-300))
        throw IllConditioned("jump-system solve residual " + std::to_string(res / rscale));

    const cplx lag[4] = {k.Cp[0], k.Cm[0], k.Cp[1], k.Cm[1]};
    double agree = 0.0, cscale = 0.0;
    for (int i = 0; i < 4; ++i) {
        agree = std::max(agree, std::abs(lag[i] - x[i]));
        cscale = std::max(cscale, std::abs(lag[i]));
    }
    k.lagrange_vs_solve = cscale > 0 ? agree / cscale : 0.0;
    return k;
}

namespace {

// Antiderivative helper: Q(z) with  ∫_0^z t^n e^{a t} dt = e^{a z} Q(z) - Q(0),
// valid for a != 0. Coefficients of Q as polynomial in z.
std::vector<cplx> antiderivative_poly(int n, cplx a) {
    std::vector<cplx> q(n + 1, cplx(0));
    // Q(z) = sum_{m=0..n} (-1)^m n!/(n-m)! z^{n-m} / a^{m+1}
    double fact = 1.0;  // n!/(n-m)!
    cplx apow = a;      // a^{m+1}
    double sign = 1.0;
    for (int m = 0; m <= n; ++m) {
        q[n - m] = sign * fact / apow;
        fact *= double(n - m);
        apow *= a;
        sign = -sign;
    }
    return q;
}

bool confluent(cplx a, cplx mu, cplx gamma) {
    const double scale = std::max(std::abs(mu), std::abs(gamma));
    return std::abs(a) <= ExpPolyProfile::confluence_rtol() * std::max(scale, 1e-300);
}

} // namespace

ExpPolyProfile convolve(const GreenKernel& k, const ExpPolyProfile& source) {
    ExpPolyProfile out;
    for (const auto& t : source.terms()) {
        const cplx gamma = t.rate;
        for (size_t n = 0; n < t.coef.size(); ++n) {
            const cplx s_n = t.coef[n];
            if (s_n == cplx(0)) continue;
            // fluid-side integrals over (0, z)
            for (int j = 0; j < 2; ++j) {
                const cplx mu = k.roots.mu_plus[j];
                const cplx C = k.Cp[j];
                const cplx a = mu - gamma;
                if (confluent(a, mu, gamma)) {
                    // exact limit: C e^{-mu z} z^{n+1}/(n+1)
                    std::vector<cplx> c(n + 2, cplx(0));
                    c[n + 1] = C * s_n / double(n + 1);
                    out.add_term(mu, std::move(c));
                } else {
                    std::vector<cplx> q = antiderivative_poly(int(n), a);
                    const cplx q0 = q[0];
                    std::vector<cplx> cg(q.size());
                    for (size_t i = 0; i < q.size(); ++i) cg[i] = C * s_n * q[i];
                    out.add_term(gamma, std::move(cg));
                    out.add_term(mu, {-C * s_n * q0});
                }
            }
            // far-side integrals over (z, infinity): rate difference has
            // negative real part, never confluent
            for (int j = 0; j < 2; ++j) {
                const cplx mu = k.roots.mu_minus[j];
                const cplx C = k.Cm[j];
                const cplx b = mu - gamma;
                std::vector<cplx> q = antiderivative_poly(int(n), b);
                std::vector<cplx> cg(q.size());
                for (size_t i = 0; i < q.size(); ++i) cg[i] = -C * s_n * q[i];
                out.add_term(gamma, std::move(cg));
            }
        }
    }
    return out;
}

ExpPolyProfile green_plus_profile(const GreenKernel& k) {
    ExpPolyProfile g;
    g.add_term(k.roots.mu_plus[0], {k.Cp[0]});
    g.add_term(k.roots.mu_plus[1], {k.Cp[1]});
    return g;
}

cplx green_eval(const GreenKernel& k, double z) {
    cplx acc(0);
    if (z >= 0.0) {
        for (int j = 0; j < 2; ++j) acc += k.Cp[j] * std::exp(-k.roots.mu_plus[j] * z);
    } else {
        for (int j = 0; j < 2; ++j) acc += k.Cm[j] * std::exp(-k.roots.mu_minus[j] * z);
    }
    return acc;
}

cplx green_deriv0(const GreenKernel& k, int m, bool plus_side) {
    cplx acc(0);
    for (int j = 0; j < 2; ++j) {
        const cplx mu = plus_side ? k.roots.mu_plus[j] : k.roots.mu_minus[j];
        const cplx C = plus_side ? k.Cp[j] : k.Cm[j];
        acc += C * std::pow(-mu, m);
    }
    return acc;
}

ExpPolyProfile boundary_derivative(const GreenKernel& k, const ExpPolyProfile& source,
                                   int korder) {
    ExpPolyProfile out = convolve(k, source.dz(korder + 1));
    for (int m = 0; m <= korder; ++m) {
        const cplx trace = source.dz(m).value0();
        if (trace == cplx(0)) continue;
        out += green_plus_profile(k).dz(korder - m) * trace;
    }
    return out;
}

double exp_decay_bound(const GreenKernel& k, double gamma) {
    const double mu_min =
        std::min(k.roots.mu_plus[0].real(), k.roots.mu_plus[1].real());
    if (!(gamma <= 0.5 * mu_min))
        throw GammaTooLarge("gamma " + std::to_string(gamma) + " exceeds min Re(mu+)/2 = " +
                            std::to_string(0.5 * mu_min));
    double cmax = 0.0;
    for (int j = 0; j < 2; ++j)
        cmax = std::max({cmax, std::abs(k.Cp[j]), std::abs(k.Cm[j])});
    return cmax * 4.0 / gamma;
}

ExpPolyProfile apply_qg_operator(const ExpPolyProfile& f, Xi xi, double omega,
                                 const DerivedScales& sc) {
    // per-mode symbols: d1 -> i c xi_x - s dz ; d3 -> i s xi_x + c dz
    const cplx icx(0, sc.c * xi.x);
    const cplx isx(0, sc.s * xi.x);
    auto D1 = [&](const ExpPolyProfile& g) { return g * icx - g.dz() * sc.s; };
    auto D3 = [&](const ExpPolyProfile& g) { return g * isx + g.dz() * sc.c; };
    auto LapH = [&](const ExpPolyProfile& g) {
        return D1(D1(g)) - g * cplx(xi.y * xi.y);
    };
    ExpPolyProfile lap_f = f.dz(2) - f * cplx(xi.norm() * xi.norm());
    ExpPolyProfile lh = LapH(f);
    ExpPolyProfile lapnu_lh = LapH(lh) * sc.nu_h + D3(D3(lh)) * sc.nu_3;
    return lap_f * cplx(0, omega) + D1(f) * sc.beta - lapnu_lh;
}

} // namespace slopegyre
