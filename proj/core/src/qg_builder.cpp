#include "slopegyre/qg_builder.hpp"

#include <cmath>

#include "slopegyre/errors.hpp"
#include "slopegyre/parallel.hpp"

namespace slopegyre {

KernelTable build_kernel_table(const ModeGrid& grid, const DerivedScales& sc) {
    KernelTable t;
    t.grid = grid;
    t.omega = sc.omega;
    t.active.assign(grid.size(), 0);
    t.roots.resize(grid.size());
    t.kernels.resize(grid.size());
    std::vector<int> flagged(grid.size(), 0), degenerate(grid.size(), 0);

    parallel_for(grid.Nx, [&](int ix) {
        for (int iy = 0; iy < grid.Ny; ++iy) {
            const int idx = grid.index(ix, iy);
            const bool nyquist =
                (grid.kx(ix) == -grid.Nx / 2) || (grid.ky(iy) == -grid.Ny / 2);
            // the slow-ky row is outside the admissible sector: the layer
            // closure has no east-west degree of freedom there
            const bool slow_ky = grid.ky(iy) == 0;
            if (nyquist || slow_ky) {
                degenerate[idx] = 1;
                continue;
            }
            const Xi xi{grid.xi_x(ix), grid.xi_y(iy)};
            try {
                RootSet r = quartic_roots(xi, sc.omega, sc);
                if (near_crossing(r)) {
                    flagged[idx] = 1;
                    continue;
                }
                t.kernels[idx] = build_kernel(r, sc);
                t.roots[idx] = r;
                t.active[idx] = 1;
            } catch (const SolverError&) {
                flagged[idx] = 1;
            }
        }
    });
    for (int i = 0; i < grid.size(); ++i) {
        t.n_flagged += flagged[i];
        t.n_degenerate += degenerate[i];
    }
    return t;
}

SpectralField green_convolve_field(const KernelTable& table, const SpectralField& src,
                                   double* dropped_energy) {
    SpectralField out(src.grid(), src.omega());
    std::vector<double> dropped(src.grid().Nx, 0.0);
    const ModeGrid& g = src.grid();
    parallel_for(g.Nx, [&](int ix) {
        for (int iy = 0; iy < g.Ny; ++iy) {
            const int idx = g.index(ix, iy);
            const auto& a = src.at(idx);
            if (a.is_zero()) continue;
            if (!table.is_active(idx)) {
                dropped[ix] += a.l2sq();
                continue;
            }
            out.at(idx) = convolve(table.at(idx), a);
        }
    });
    if (dropped_energy) {
        *dropped_energy = 0.0;
        for (double d : dropped) *dropped_energy += d;
    }
    return out;
}

FamilyFields FamilyFields::zeros(const ModeGrid& g, double omega) {
    FamilyFields f;
    f.u.c1 = SpectralField(g, omega);
    f.u.c2 = SpectralField(g, omega);
    f.u.c3 = SpectralField(g, omega);
    f.p = SpectralField(g, omega);
    f.rho = SpectralField(g, omega);
    return f;
}

Vec3Field ExpansionTerm::total_u() const {
    Vec3Field t;
    t.c1 = interior.u.c1 + munk.u.c1 + ekman.u.c1;
    t.c2 = interior.u.c2 + munk.u.c2 + ekman.u.c2;
    t.c3 = interior.u.c3 + munk.u.c3 + ekman.u.c3;
    return t;
}
SpectralField ExpansionTerm::total_p() const { return interior.p + munk.p + ekman.p; }
SpectralField ExpansionTerm::total_rho() const { return interior.rho + munk.rho + ekman.rho; }

std::pair<cplx, cplx> solve_layer_coeffs(const std::array<cplx, 2>& mu, Xi xi,
                                         const DerivedScales& sc, cplx trace1, cplx trace2,
                                         double trace_scale) {
    const cplx A(0, sc.c * xi.x);
    const cplx P1 = A + sc.s * mu[0];
    const cplx P2 = A + sc.s * mu[1];
    if (xi.y == 0.0) {
        if (std::abs(trace1) > 1e-8 * std::max(trace_scale, 1e-300))
            throw SingularTraceSystem("xi_y = 0 mode with non-gradient horizontal trace");
        // single-exponential lift of the second component
        return {-trace2 / P1, cplx(0)};
    }
    const cplx det = cplx(0, xi.y) * sc.s * (mu[1] - mu[0]);
    if (std::abs(det) < 1e-12 * (std::abs(P1) + std::abs(P2)) * std::abs(xi.y))
        throw SingularTraceSystem("layer system near singular");
    const cplx c1 = (P2 * trace1 + cplx(0, xi.y) * trace2) / det;
    const cplx c2 = (-P1 * trace1 - cplx(0, xi.y) * trace2) / det;
    return {c1, c2};
}

namespace {

// layer stream function c1 e^{-mu1 z} + c2 e^{-mu2 z} and its velocity
ExpPolyProfile layer_psi(const std::array<cplx, 2>& mu, cplx c1, cplx c2) {
    ExpPolyProfile p;
    if (c1 != cplx(0)) p.add_term(mu[0], {c1});
    if (c2 != cplx(0)) p.add_term(mu[1], {c2});
    return p;
}

} // namespace

ExpansionTerm build_order0(const Forcing& f, const KernelTable& table,
                           const DerivedScales& sc) {
    const ModeGrid& g = table.grid;
    ExpansionTerm term;
    term.k = 0;
    term.interior = FamilyFields::zeros(g, sc.omega);
    term.munk = FamilyFields::zeros(g, sc.omega);
    term.ekman = FamilyFields::zeros(g, sc.omega);
    term.coeffs.assign(g.size(), ModeCoeffs{});

    // interior stream function: G * (beta curl_h f)
    SpectralField source = curl_h(f.fh, sc) * cplx(sc.beta);
    term.interior.p = green_convolve_field(table, source);

    Vec2Field ui = grad_h_perp(term.interior.p, sc);
    term.interior.u.c1 = ui.c1;
    term.interior.u.c2 = ui.c2;
    term.interior.rho = d3(term.interior.p, sc) * cplx(-1.0);

    // Munk closure: psi_M(0) = -psi_i(0), dz psi_M(0) = -dz psi_i(0)
    parallel_for(g.Nx, [&](int ix) {
        for (int iy = 0; iy < g.Ny; ++iy) {
            const int idx = g.index(ix, iy);
            if (!table.is_active(idx)) continue;
            const auto& psi = term.interior.p.at(idx);
            if (psi.is_zero()) continue;
            const cplx tau = psi.value0();
            const cplx taup = psi.dz().value0();
            const auto& mu = table.roots[idx].mu_plus;
            const cplx den = mu[1] - mu[0];
            const cplx c1 = (-tau * mu[1] - taup) / den;
            const cplx c2 = (tau * mu[0] + taup) / den;
            term.coeffs[idx].c1 = c1;
            term.coeffs[idx].c2 = c2;
            term.munk.p.at(idx) = layer_psi(mu, c1, c2);
        }
    });
    Vec2Field um = grad_h_perp(term.munk.p, sc);
    term.munk.u.c1 = um.c1;
    term.munk.u.c2 = um.c2;
    term.munk.rho = d3(term.munk.p, sc) * cplx(-1.0);
    return term;
}

SpectralField corrector_rhs(const SpectralField& p0_total, const Forcing& f,
                            const DerivedScales& sc, Diagnostics& diag) {
    // equals beta (dt-Dnu) div f - beta^2 y curl f + beta^2 f1
    //        + 2 beta y L2~ p0 + 2 beta (dt-Dnu) d2 p0 - 2 nu_h beta d2 lap_h p0;
    // the planetary vorticity pair is kept in its commutator form
    //   (dt-Dnu)(y lap_h p0) + y (dt-Dnu) lap_h p0
    // so that the discrete y-product enters exactly as in the order
    // recurrence (the two agree in the continuum through the Leibniz rule)
    const double beta = sc.beta;
    SpectralField rhs = dt_minus_lapnu(div_h(f.fh, sc), sc) * cplx(beta);
    rhs += multiply_by_y(curl_h(f.fh, sc), diag) * cplx(-beta * beta);
    rhs += f.fh.c1 * cplx(beta * beta);
    const SpectralField lhp = lap_h(p0_total, sc);
    rhs += dt_minus_lapnu(multiply_by_y(lhp, diag), sc) * cplx(beta);
    rhs += multiply_by_y(dt_minus_lapnu(lhp, sc), diag) * cplx(beta);
    rhs += multiply_by_y(d1(p0_total, sc), diag) * cplx(2.0 * beta * beta);
    rhs += dt_minus_lapnu(d2(p0_total), sc) * cplx(2.0 * beta);
    return rhs;
}

ExpansionTerm build_order1(const ExpansionTerm& order0, const Forcing& f,
                           const KernelTable& table, const DerivedScales& sc,
                           Diagnostics& diag) {
    const ModeGrid& g = table.grid;
    ExpansionTerm term;
    term.k = 1;
    term.interior = FamilyFields::zeros(g, sc.omega);
    term.munk = FamilyFields::zeros(g, sc.omega);
    term.ekman = FamilyFields::zeros(g, sc.omega);
    term.coeffs.assign(g.size(), ModeCoeffs{});

    const SpectralField p0 = order0.total_p();
    SpectralField rhs = project_slow_ky(corrector_rhs(p0, f, sc, diag));
    double dropped = 0.0;
    term.interior.p = green_convolve_field(table, rhs, &dropped);
    if (dropped > 0.0) diag.warn("DroppedRhs: corrector source on inactive modes, energy " +
                                 std::to_string(dropped));

    // ubar1_h = -beta f_h^perp - L1 grad_h p0 + grad_h^perp pbar1
    Vec2Field gradp0{d1(p0, sc), d2(p0)};
    Vec2Field l1gp0 = l1_op(gradp0, sc, diag);
    Vec2Field fperp = perp(f.fh);
    Vec2Field ub;
    ub.c1 = fperp.c1 * cplx(-sc.beta) - l1gp0.c1;
    ub.c2 = fperp.c2 * cplx(-sc.beta) - l1gp0.c2;
    Vec2Field gpp = grad_h_perp(term.interior.p, sc);
    ub.c1 += gpp.c1;
    ub.c2 += gpp.c2;
    ub.c1 = project_slow_ky(ub.c1);
    ub.c2 = project_slow_ky(ub.c2);

    term.interior.u.c1 = ub.c1;
    term.interior.u.c2 = ub.c2;
    term.interior.u.c3 = d3(p0, sc) * cplx(0, -sc.omega);  // -dt d3 p0
    term.interior.rho = d3(term.interior.p, sc) * cplx(-1.0);

    // vertical trace must vanish because psi0 = dz psi0 = 0 at z = 0
    {
        double worst = 0.0;
        for (int idx = 0; idx < g.size(); ++idx) {
            const auto& a = term.interior.u.c3.at(idx);
            if (a.is_zero()) continue;
            const double scale = a.max_abs_sampled(0.0, 2.0, 9);
            if (scale > 0) worst = std::max(worst, std::abs(a.value0()) / scale);
        }
        if (worst > 1e-8)
            throw VerticalTraceNonzero("corrector vertical trace defect " +
                                       std::to_string(worst));
    }

    // Munk coefficients from the explicit 2x2 inverse
    std::vector<int> unliftable(g.Nx, 0);
    parallel_for(g.Nx, [&](int ix) {
        for (int iy = 0; iy < g.Ny; ++iy) {
            const int idx = g.index(ix, iy);
            if (!table.is_active(idx)) continue;
            const cplx t1 = ub.c1.at(idx).value0();
            const cplx t2 = ub.c2.at(idx).value0();
            if (t1 == cplx(0) && t2 == cplx(0)) continue;
            const Xi xi{g.xi_x(ix), g.xi_y(iy)};
            const double scale =
                std::max(ub.c1.at(idx).max_abs_sampled(0.0, 2.0, 9),
                         ub.c2.at(idx).max_abs_sampled(0.0, 2.0, 9));
            try {
                const auto [c1, c2] =
                    solve_layer_coeffs(table.roots[idx].mu_plus, xi, sc, t1, t2, scale);
                term.coeffs[idx].c1 = c1;
                term.coeffs[idx].c2 = c2;
                term.munk.p.at(idx) = layer_psi(table.roots[idx].mu_plus, c1, c2);
            } catch (const SingularTraceSystem&) {
                // slow-ky mode outside the liftable class: skipped and counted
                ++unliftable[ix];
            }
        }
    });
    int n_unliftable = 0;
    for (int v : unliftable) n_unliftable += v;
    if (n_unliftable > 0)
        diag.warn("UnliftedTrace: " + std::to_string(n_unliftable) +
                  " slow-ky modes outside the layer-closure class");
    Vec2Field um = grad_h_perp(term.munk.p, sc);
    term.munk.u.c1 = um.c1;
    term.munk.u.c2 = um.c2;
    term.munk.rho = d3(term.munk.p, sc) * cplx(-1.0);

    return term;
}

std::vector<TraceRecord> effective_traces_p1(const ExpansionTerm& order0,
                                             const ExpansionTerm& order1, const Forcing& f,
                                             const KernelTable& table,
                                             const DerivedScales& sc) {
    const double bound = 0.1 * std::pow(sc.nu_h, 4.0 / 3.0) * std::pow(sc.beta, -1.0 / 3.0);
    if (!(sc.nu_3 <= bound))
        throw HypothesisViolated("nu_3 must be << nu_h^{4/3} beta^{-1/3}");

    const ModeGrid& g = table.grid;
    const double norm = std::pow(sc.beta, 2.0 / 3.0) * std::cbrt(sc.nu_eff);
    const SpectralField p1 = order1.interior.p + order1.munk.p;
    const SpectralField d1p1 = d1(p1, sc);
    const SpectralField curlf = curl_h(f.fh, sc);

    std::vector<TraceRecord> out;
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int iy = 0; iy < g.Ny; ++iy) {
            const int idx = g.index(ix, iy);
            if (!table.is_active(idx)) continue;
            const auto& pi0 = order0.interior.p.at(idx);
            if (pi0.is_zero() && p1.at(idx).is_zero()) continue;
            TraceRecord r;
            r.ix = ix;
            r.iy = iy;
            r.lhs1 = d1p1.at(idx).value0();
            r.rhs1 = sc.beta * f.fh.c1.at(idx).value0();
            r.gap1 = std::abs(r.lhs1 - r.rhs1) / norm;

            const Xi xi{g.xi_x(ix), g.xi_y(iy)};
            const auto& mu = table.roots[idx].mu_plus;
            r.lhs2 = cplx(0, xi.y) * p1.at(idx).value0();
            r.rhs2 = sc.beta * f.fh.c2.at(idx).value0() - sc.beta * pi0.value0() +
                     cplx(0, sc.omega) / sc.s * pi0.dz().value0() +
                     3.0 * sc.s * sc.s * sc.c * sc.nu_h * mu[0] * mu[1] * cplx(0, xi.x) *
                         pi0.value0() +
                     sc.s * sc.s * sc.nu_h * green_deriv0(table.at(idx), 2, true) * sc.beta *
                         curlf.at(idx).value0();
            r.gap2 = std::abs(r.lhs2 - r.rhs2) / norm;
            out.push_back(r);
        }
    return out;
}

} // namespace slopegyre
