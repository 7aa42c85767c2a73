#include "slopegyre/cascade.hpp"

#include <cmath>

#include "slopegyre/errors.hpp"
#include "slopegyre/parallel.hpp"

namespace slopegyre {

namespace {

using PolyC = std::vector<cplx>;

void ptrim(PolyC& p) {
    while (!p.empty() && p.back() == cplx(0)) p.pop_back();
}

PolyC padd(PolyC a, const PolyC& b) {
    if (a.size() < b.size()) a.resize(b.size(), cplx(0));
    for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    ptrim(a);
    return a;
}

PolyC pscale(PolyC a, cplx s) {
    for (auto& c : a) c *= s;
    return a;
}

PolyC pderiv(const PolyC& a) {
    if (a.size() <= 1) return {};
    PolyC d(a.size() - 1);
    for (size_t j = 1; j < a.size(); ++j) d[j - 1] = a[j] * double(j);
    return d;
}

// T[q] = q'' - 2 q' + q ; unique polynomial solution of T[q] = p
PolyC solve_T(const PolyC& p) {
    PolyC q(p.size(), cplx(0));
    for (int j = int(p.size()) - 1; j >= 0; --j) {
        cplx v = p[j];
        if (j + 1 < int(q.size())) v += 2.0 * double(j + 1) * q[j + 1];
        if (j + 2 < int(q.size())) v -= double(j + 2) * double(j + 1) * q[j + 2];
        q[j] = v;
    }
    ptrim(q);
    return q;
}

// (1 - d/dZ) q = r
PolyC solve_one_minus_D(const PolyC& r) {
    PolyC q(r.size(), cplx(0));
    for (int j = int(r.size()) - 1; j >= 0; --j) {
        cplx v = r[j];
        if (j + 1 < int(q.size())) v += double(j + 1) * q[j + 1];
        q[j] = v;
    }
    ptrim(q);
    return q;
}

// c q' + kappa q = r
PolyC solve_W(const PolyC& r, cplx kappa, double c) {
    PolyC q(r.size(), cplx(0));
    for (int j = int(r.size()) - 1; j >= 0; --j) {
        cplx v = r[j];
        if (j + 1 < int(q.size())) v -= c * double(j + 1) * q[j + 1];
        q[j] = v / kappa;
    }
    ptrim(q);
    return q;
}

cplx pval0(const PolyC& p) { return p.empty() ? cplx(0) : p[0]; }

} // namespace

Cascade::Cascade(const Forcing& f, const KernelTable& table, const DerivedScales& sc,
                 const CascadeOptions& opt, Diagnostics& diag)
    : f_(f), table_(table), sc_(sc), opt_(opt), diag_(diag) {
    const ModeGrid& g = table_.grid;
    lambda1_.assign(g.size(), cplx(0));
    ekman_ok_.assign(g.size(), 0);
    ekman_eig_.resize(g.size());
    if (opt_.build_ekman && sc_.omega != 0.0) {
        std::vector<int> ok(g.size(), 0);
        parallel_for(g.Nx, [&](int ix) {
            for (int iy = 0; iy < g.Ny; ++iy) {
                const int idx = g.index(ix, iy);
                if (!table_.is_active(idx)) continue;
                const Xi xi{g.xi_x(ix), g.xi_y(iy)};
                try {
                    LayerRoots lr = layer_roots(xi, sc_.omega, sc_);
                    const cplx l = lr.mode1.lambda;
                    lambda1_[idx] = l;
                    EkmanPoly eig;
                    eig.qx = {cplx(1.0)};
                    eig.qy = {cplx(0, 1) * std::pow(sc_.c, 3) / (sc_.s * sc_.s)};
                    eig.qz = solve_one_minus_D(
                        padd(pscale(eig.qx, cplx(0, xi.x)),
                             pscale(eig.qy, cplx(0, xi.y) * sc_.omega * sc_.epsilon)));
                    eig.qr = padd(pscale(eig.qx, sc_.s), pscale(eig.qz, sc_.c / l));
                    // vertical momentum: W[qp] = -qr - i w eps^2 delta^2 rtilde[qr]
                    const cplx kappa = cplx(0, sc_.s * xi.x) / l - sc_.c;
                    const cplx r0 = ekman_r(l, xi, sc_.omega, sc_);
                    const cplx r1 = 2.0 * sc_.nu_eff * l * l +
                                    cplx(0, 2.0 * sc_.c * sc_.s * xi.x) * (sc_.nu_h - sc_.nu_3) * l;
                    const cplx r2 = -sc_.nu_eff * l * l;
                    auto rtilde = [&](const PolyC& p) {
                        PolyC out = pscale(p, r0);
                        out = padd(out, pscale(pderiv(p), r1));
                        out = padd(out, pscale(pderiv(pderiv(p)), r2));
                        return out;
                    };
                    const cplx iwe2d2 = cplx(0, sc_.omega) * sc_.epsilon * sc_.epsilon *
                                        sc_.delta * sc_.delta;
                    PolyC rhs = pscale(padd(pscale(eig.qr, 1.0), pscale(rtilde(eig.qr), iwe2d2)),
                                       cplx(-1.0));
                    eig.qp = solve_W(rhs, kappa, sc_.c);
                    ekman_eig_[idx] = std::move(eig);
                    ok[idx] = 1;
                } catch (const SolverError&) {
                    // no admissible layer root at this mode
                }
            }
        });
        for (int i = 0; i < g.size(); ++i) {
            ekman_ok_[i] = char(ok[i]);
            n_ekman_active_ += ok[i];
        }
    }
}

SpectralField Cascade::family_source(int k, const std::vector<FamilyFields>& hist,
                                     bool with_forcing) const {
    const ModeGrid& g = table_.grid;
    SpectralField F(g, sc_.omega);
    const double beta = sc_.beta;
    if (k == 0) {
        if (with_forcing) F = curl_h(f_.fh, sc_) * cplx(beta);
        return F;
    }
    const FamilyFields& prev = hist[k - 1];
    Vec2Field uh{prev.u.c1, prev.u.c2};
    SpectralField divu = div_h(uh, sc_);
    SpectralField zeta = curl_h(uh, sc_);

    F = dt_minus_lapnu(dt_minus_lapnu(divu, sc_), sc_) * cplx(-1.0);
    F += dt_minus_lapnu(multiply_by_y(zeta, diag_) * cplx(beta), sc_);
    F += multiply_by_y(dt_minus_lapnu(zeta, sc_), diag_) * cplx(beta);
    F += dt_minus_lapnu(prev.u.c1, sc_) * cplx(-2.0 * beta);
    F += multiply_by_y(prev.u.c2, diag_) * cplx(2.0 * beta * beta);
    F += multiply_by_y(divu, diag_, /*power=*/2) * cplx(beta * beta);

    const int j3 = k - sc_.M - 1;
    if (j3 >= 0) {
        F += d3(dt_minus_lapnu(hist[j3].u.c3, sc_), sc_) * cplx(0, -sc_.omega);
    }
    if (with_forcing && k == 1) {
        F += dt_minus_lapnu(div_h(f_.fh, sc_), sc_) * cplx(beta);
        F += f_.fh.c1 * cplx(beta * beta);
        F += multiply_by_y(curl_h(f_.fh, sc_), diag_) * cplx(-beta * beta);
    }
    return F;
}

FamilyFields Cascade::family_step(int k, const std::vector<FamilyFields>& hist,
                                  bool with_forcing) const {
    const ModeGrid& g = table_.grid;
    FamilyFields out = FamilyFields::zeros(g, sc_.omega);
    SpectralField F = project_slow_ky(family_source(k, hist, with_forcing));
    double dropped = 0.0;
    out.p = green_convolve_field(table_, F, &dropped);
    if (dropped > 1e-300)
        diag_.warn("DroppedRhs: order-" + std::to_string(k) + " source on inactive modes");

    Vec2Field uh = grad_h_perp(out.p, sc_);
    if (k >= 1) {
        const FamilyFields& prev = hist[k - 1];
        uh.c1 += dt_minus_lapnu(prev.u.c2, sc_) * cplx(-1.0);
        uh.c2 += dt_minus_lapnu(prev.u.c1, sc_);
        uh.c1 += multiply_by_y(prev.u.c1, diag_) * cplx(-sc_.beta);
        uh.c2 += multiply_by_y(prev.u.c2, diag_) * cplx(-sc_.beta);
        out.u.c3 = prev.rho * cplx(0, sc_.omega);
    }
    if (with_forcing && k == 1) {
        Vec2Field fperp = perp(f_.fh);
        uh.c1 += fperp.c1 * cplx(-sc_.beta);
        uh.c2 += fperp.c2 * cplx(-sc_.beta);
    }
    out.u.c1 = project_slow_ky(uh.c1);
    out.u.c2 = project_slow_ky(uh.c2);
    out.rho = d3(out.p, sc_) * cplx(-1.0);
    const int j3 = k - sc_.M - 1;
    if (j3 >= 0) out.rho += dt_minus_lapnu(hist[j3].u.c3, sc_) * cplx(-1.0);

    if (opt_.trim_rel > 0) {
        out.p = out.p.compressed(opt_.trim_rel);
        out.u.c1 = out.u.c1.compressed(opt_.trim_rel);
        out.u.c2 = out.u.c2.compressed(opt_.trim_rel);
        out.u.c3 = out.u.c3.compressed(opt_.trim_rel);
        out.rho = out.rho.compressed(opt_.trim_rel);
    }
    return out;
}

SpectralField Cascade::interior_source(int k) const {
    return family_source(k, interior_hist_, true);
}
SpectralField Cascade::munk_source(int k) const {
    return family_source(k, munk_hist_, false);
}

ExpPolyProfile Cascade::ekman_component_profile(int idx, const PolyC& q, cplx prefactor) const {
    // q(Z) e^{-Z} with Z = lambda1 z, scaled by prefactor
    ExpPolyProfile p;
    if (q.empty()) return p;
    const cplx l = lambda1_[idx];
    std::vector<cplx> coef(q.size());
    cplx lp(1.0);
    for (size_t j = 0; j < q.size(); ++j) {
        coef[j] = prefactor * q[j] * lp;
        lp *= l;
    }
    p.add_term(l, std::move(coef));
    return p;
}

void Cascade::ekman_step(int k) {
    const ModeGrid& g = table_.grid;
    ekman_hist_.push_back(FamilyFields::zeros(g, sc_.omega));
    ekman_polys_.push_back(std::vector<EkmanPoly>(g.size()));
    if (k < 2 || !opt_.build_ekman || sc_.omega == 0.0) return;

    auto& polys = ekman_polys_[k];
    const auto& prev = ekman_polys_[k - 1];
    parallel_for(g.Nx, [&](int ix) {
        for (int iy = 0; iy < g.Ny; ++iy) {
            const int idx = g.index(ix, iy);
            if (!ekman_ok_[idx]) continue;
            const PolyC& src = prev[idx].qx;
            if (src.empty()) continue;  // empty recurrence source
            const Xi xi{g.xi_x(ix), g.xi_y(iy)};
            const cplx l = lambda1_[idx];
            EkmanPoly q;
            // (i s^2/c^2) T[qy] + c qx = beta qx_prev  with qbar_x = 0
            q.qy = pscale(solve_T(pscale(src, sc_.beta)),
                          cplx(0, -1) * (sc_.c * sc_.c) / (sc_.s * sc_.s));
            q.qz = solve_one_minus_D(pscale(q.qy, cplx(0, xi.y) * sc_.omega * sc_.epsilon));
            q.qr = pscale(q.qz, sc_.c / l);
            const cplx kappa = cplx(0, sc_.s * xi.x) / l - sc_.c;
            const cplx r0 = ekman_r(l, xi, sc_.omega, sc_);
            const cplx r1 = 2.0 * sc_.nu_eff * l * l +
                            cplx(0, 2.0 * sc_.c * sc_.s * xi.x) * (sc_.nu_h - sc_.nu_3) * l;
            const cplx r2 = -sc_.nu_eff * l * l;
            const cplx iwe2d2 =
                cplx(0, sc_.omega) * sc_.epsilon * sc_.epsilon * sc_.delta * sc_.delta;
            PolyC rt = pscale(q.qr, r0);
            rt = padd(rt, pscale(pderiv(q.qr), r1));
            rt = padd(rt, pscale(pderiv(pderiv(q.qr)), r2));
            PolyC rhs = pscale(padd(q.qr, pscale(rt, iwe2d2)), cplx(-1.0));
            q.qp = solve_W(rhs, kappa, sc_.c);
            polys[idx] = std::move(q);
        }
    });
    // materialize the pre-coefficient fields
    FamilyFields& e = ekman_hist_[k];
    for (int idx = 0; idx < g.size(); ++idx) {
        const auto& q = polys[idx];
        if (q.qy.empty() && q.qx.empty()) continue;
        const cplx l = lambda1_[idx];
        const double we = sc_.omega * sc_.epsilon;
        // local -> global: u1 = c ux - s uz, u2 = uy, u3 = s ux + c uz
        ExpPolyProfile ux = ekman_component_profile(idx, q.qx, 1.0);
        ExpPolyProfile uy = ekman_component_profile(idx, q.qy, we);
        ExpPolyProfile uz = ekman_component_profile(idx, q.qz, 1.0 / l);
        e.u.c1.at(idx) = ux * sc_.c - uz * sc_.s;
        e.u.c2.at(idx) = uy;
        e.u.c3.at(idx) = ux * sc_.s + uz * sc_.c;
        e.rho.at(idx) =
            ekman_component_profile(idx, q.qr, 1.0 / (cplx(0, sc_.omega) * sc_.epsilon));
        e.p.at(idx) = ekman_component_profile(
            idx, q.qp, 1.0 / (cplx(0, sc_.epsilon * sc_.omega) * l));
    }
}

void Cascade::close_boundary(int k) {
    const ModeGrid& g = table_.grid;
    ExpansionTerm& term = terms_[k];
    FamilyFields& mk = munk_hist_[k];
    FamilyFields& ek = ekman_hist_[k];
    auto& polys = ekman_polys_[k];
    OrderLedger led;
    led.k = k;
    int n_unliftable = 0;

    for (int ix = 0; ix < g.Nx; ++ix)
        for (int iy = 0; iy < g.Ny; ++iy) {
            const int idx = g.index(ix, iy);
            if (!table_.is_active(idx)) continue;
            const Xi xi{g.xi_x(ix), g.xi_y(iy)};
            ModeCoeffs& mc = term.coeffs[idx];

            // vertical trace of the non-layer parts
            const cplx tr3 = interior_hist_[k].u.c3.at(idx).value0() +
                             mk.u.c3.at(idx).value0() + ek.u.c3.at(idx).value0();
            const double vscale =
                std::max({interior_hist_[k].u.c3.at(idx).max_abs_sampled(0, 2, 9),
                          mk.u.c3.at(idx).max_abs_sampled(0, 2, 9), 1e-300});
            if (k <= 1 && std::abs(tr3) > 1e-8 * vscale && vscale > 1e-290)
                throw VerticalTraceNonzero("order " + std::to_string(k) +
                                           " vertical trace should vanish structurally");
            if (tr3 != cplx(0)) {
                if (k >= 2 && ekman_ok_[idx] && opt_.build_ekman) {
                    const cplx l = lambda1_[idx];
                    const cplx u3_eig = sc_.s * pval0(ekman_eig_[idx].qx) +
                                        sc_.c / l * pval0(ekman_eig_[idx].qz);
                    mc.cE = -tr3 / u3_eig;
                    // fold cE * eigenvector into the polynomials and fields
                    EkmanPoly& q = polys[idx];
                    q.qx = padd(q.qx, pscale(ekman_eig_[idx].qx, mc.cE));
                    q.qy = padd(q.qy, pscale(ekman_eig_[idx].qy, mc.cE));
                    q.qz = padd(q.qz, pscale(ekman_eig_[idx].qz, mc.cE));
                    q.qr = padd(q.qr, pscale(ekman_eig_[idx].qr, mc.cE));
                    q.qp = padd(q.qp, pscale(ekman_eig_[idx].qp, mc.cE));
                    const double we = sc_.omega * sc_.epsilon;
                    ExpPolyProfile ux = ekman_component_profile(idx, ekman_eig_[idx].qx, mc.cE);
                    ExpPolyProfile uy =
                        ekman_component_profile(idx, ekman_eig_[idx].qy, mc.cE * we);
                    ExpPolyProfile uz =
                        ekman_component_profile(idx, ekman_eig_[idx].qz, mc.cE / l);
                    ek.u.c1.at(idx) += ux * sc_.c - uz * sc_.s;
                    ek.u.c2.at(idx) += uy;
                    ek.u.c3.at(idx) += ux * sc_.s + uz * sc_.c;
                    ek.rho.at(idx) += ekman_component_profile(
                        idx, ekman_eig_[idx].qr, mc.cE / (cplx(0, sc_.omega) * sc_.epsilon));
                    ek.p.at(idx) += ekman_component_profile(
                        idx, ekman_eig_[idx].qp, mc.cE / (cplx(0, sc_.epsilon * sc_.omega) * l));
                    ++led.n_ekman_modes;
                } else {
                    led.unlifted_vertical =
                        std::max(led.unlifted_vertical, std::abs(tr3) / vscale);
                }
            }

            // horizontal closure with the Ekman layer included
            const cplx t1 = interior_hist_[k].u.c1.at(idx).value0() +
                            mk.u.c1.at(idx).value0() + ek.u.c1.at(idx).value0();
            const cplx t2 = interior_hist_[k].u.c2.at(idx).value0() +
                            mk.u.c2.at(idx).value0() + ek.u.c2.at(idx).value0();
            if (t1 != cplx(0) || t2 != cplx(0)) {
                const double hscale =
                    std::max({interior_hist_[k].u.c1.at(idx).max_abs_sampled(0, 2, 9),
                              interior_hist_[k].u.c2.at(idx).max_abs_sampled(0, 2, 9), 1e-300});
                try {
                    const auto [c1, c2] =
                        solve_layer_coeffs(table_.roots[idx].mu_plus, xi, sc_, t1, t2, hscale);
                    mc.c1 = c1;
                    mc.c2 = c2;
                    const auto& mu = table_.roots[idx].mu_plus;
                    ExpPolyProfile psi;
                    if (c1 != cplx(0)) psi.add_term(mu[0], {c1});
                    if (c2 != cplx(0)) psi.add_term(mu[1], {c2});
                    const cplx A(0, sc_.c * xi.x);
                    mk.p.at(idx) += psi;
                    mk.u.c1.at(idx) += psi * cplx(0, -xi.y);
                    mk.u.c2.at(idx) += psi * A - psi.dz() * sc_.s;
                    mk.rho.at(idx) +=
                        (psi * cplx(0, sc_.s * xi.x) + psi.dz() * sc_.c) * cplx(-1.0);
                } catch (const SingularTraceSystem&) {
                    ++n_unliftable;
                    continue;  // slow-ky mode left unlifted and counted
                }
            }

            // no-slip defect after closure
            const cplx d1v = interior_hist_[k].u.c1.at(idx).value0() +
                             mk.u.c1.at(idx).value0() + ek.u.c1.at(idx).value0();
            const cplx d2v = interior_hist_[k].u.c2.at(idx).value0() +
                             mk.u.c2.at(idx).value0() + ek.u.c2.at(idx).value0();
            const cplx d3v = interior_hist_[k].u.c3.at(idx).value0() +
                             mk.u.c3.at(idx).value0() + ek.u.c3.at(idx).value0();
            double scale = 1e-300;
            for (const SpectralField* f :
                 {&interior_hist_[k].u.c1, &interior_hist_[k].u.c2, &mk.u.c1, &mk.u.c2})
                scale = std::max(scale, f->at(idx).max_abs_sampled(0, 2, 9));
            if (scale > 1e-290) {
                led.trace_defect = std::max(
                    led.trace_defect,
                    std::max({std::abs(d1v), std::abs(d2v), std::abs(d3v)}) / scale);
            }
            led.max_c1 = std::max(led.max_c1, std::abs(mc.c1));
            led.max_c2 = std::max(led.max_c2, std::abs(mc.c2));
            led.max_cE = std::max(led.max_cE, std::abs(mc.cE));
        }

    if (n_unliftable > 0)
        diag_.warn("UnliftedTrace: order " + std::to_string(k) + " left " +
                   std::to_string(n_unliftable) + " slow-ky modes unlifted");
    term.interior = interior_hist_[k];
    term.munk = munk_hist_[k];
    term.ekman = ekman_hist_[k];
    order_ledgers_.push_back(led);
}

void Cascade::build_to(int k) {
    if (5 * (k + 1) > opt_.smoothness_budget)
        throw DepthExhausted("order " + std::to_string(k) + " needs " +
                             std::to_string(5 * (k + 1)) + " derivatives, budget " +
                             std::to_string(opt_.smoothness_budget));
    while (built() < k) {
        const int kk = built() + 1;
        terms_.push_back(ExpansionTerm{});
        terms_[kk].k = kk;
        terms_[kk].coeffs.assign(table_.grid.size(), ModeCoeffs{});
        interior_hist_.push_back(family_step(kk, interior_hist_, true));
        munk_hist_.push_back(family_step(kk, munk_hist_, false));
        ekman_step(kk);
        close_boundary(kk);
    }
}

ApproximateSolution Cascade::assemble(int K) {
    build_to(K);
    const ModeGrid& g = table_.grid;
    ApproximateSolution sol;
    sol.K = K;
    sol.epsilon = sc_.epsilon;
    sol.u.c1 = SpectralField(g, sc_.omega);
    sol.u.c2 = SpectralField(g, sc_.omega);
    sol.u.c3 = SpectralField(g, sc_.omega);
    sol.p = SpectralField(g, sc_.omega);
    sol.rho = SpectralField(g, sc_.omega);
    double ek = 1.0;
    for (int k = 0; k <= K; ++k, ek *= sc_.epsilon) {
        const ExpansionTerm& t = terms_[k];
        sol.u.c1 += t.total_u().c1 * cplx(ek);
        sol.u.c2 += t.total_u().c2 * cplx(ek);
        sol.u.c3 += t.total_u().c3 * cplx(ek);
        sol.p += t.total_p() * cplx(ek);
        sol.rho += t.total_rho() * cplx(ek);

        OrderLedger led = order_ledgers_.at(k);
        led.interior_u1 = std::sqrt(t.interior.u.c1.h1xy_l2z_sq());
        led.interior_u2 = std::sqrt(t.interior.u.c2.h1xy_l2z_sq());
        led.interior_u3 = std::sqrt(t.interior.u.c3.h1xy_l2z_sq());
        led.munk_u1 = std::sqrt(t.munk.u.c1.h1xy_l2z_sq());
        led.munk_u2 = std::sqrt(t.munk.u.c2.h1xy_l2z_sq());
        led.munk_u3 = std::sqrt(t.munk.u.c3.h1xy_l2z_sq());
        led.ekman_u1 = std::sqrt(t.ekman.u.c1.h1xy_l2z_sq());
        led.ekman_u2 = std::sqrt(t.ekman.u.c2.h1xy_l2z_sq());
        led.ekman_u3 = std::sqrt(t.ekman.u.c3.h1xy_l2z_sq());
        sol.ledger.push_back(led);
    }
    return sol;
}

namespace {

struct EqFields {
    SpectralField gh1, gh2, g3, grho, gdiv;
};

ResidualNorms weighted_norms(const EqFields& e, double delta) {
    ResidualNorms n;
    double h = 0, v = 0, m = 0, d = 0;
    const ModeGrid& g = e.gh1.grid();
    for (int idx = 0; idx < g.size(); ++idx) {
        if (!e.gh1.at(idx).is_zero()) h += e.gh1.at(idx).weighted_l2sq();
        if (!e.gh2.at(idx).is_zero()) h += e.gh2.at(idx).weighted_l2sq();
        if (!e.g3.at(idx).is_zero()) v += e.g3.at(idx).weighted_l2sq();
        if (!e.grho.at(idx).is_zero()) m += e.grho.at(idx).weighted_l2sq();
        if (!e.gdiv.at(idx).is_zero()) d += e.gdiv.at(idx).weighted_l2sq();
    }
    n.horizontal = std::sqrt(h);
    n.vertical = std::sqrt(v);
    n.mass = std::sqrt(m);
    n.divergence = std::sqrt(d);
    n.combined = std::sqrt(h + delta * delta * delta * delta * v + m);
    return n;
}

} // namespace

double ResidualNorms::total() const { return combined; }

ResidualReport Cascade::residual(const ApproximateSolution& sol) const {
    auto eval = [&](const Vec3Field& u, const SpectralField& p, const SpectralField& rho,
                    bool with_forcing) {
        EqFields e;
        const double inv_eps = 1.0 / sc_.epsilon;
        const double inv_ed2 = 1.0 / (sc_.epsilon * sc_.delta * sc_.delta);
        e.gh1 = u.c1 * cplx(0, sc_.omega) - lap_nu(u.c1, sc_) - u.c2 * cplx(inv_eps) -
                multiply_by_y(u.c2, diag_) * cplx(sc_.beta) + d1(p, sc_) * cplx(inv_eps);
        e.gh2 = u.c2 * cplx(0, sc_.omega) - lap_nu(u.c2, sc_) + u.c1 * cplx(inv_eps) +
                multiply_by_y(u.c1, diag_) * cplx(sc_.beta) + d2(p) * cplx(inv_eps);
        if (with_forcing) {
            e.gh1 += f_.fh.c1 * cplx(-sc_.beta);
            e.gh2 += f_.fh.c2 * cplx(-sc_.beta);
        }
        e.g3 = u.c3 * cplx(0, sc_.omega) - lap_nu(u.c3, sc_) +
               (d3(p, sc_) + rho) * cplx(inv_ed2);
        e.grho = rho * cplx(0, sc_.omega) - u.c3 * cplx(inv_eps);
        e.gdiv = d1(u.c1, sc_) + d2(u.c2) + d3(u.c3, sc_);
        return e;
    };

    ResidualReport rep;
    rep.delta = sc_.delta;
    EqFields tot = eval(sol.u, sol.p, sol.rho, true);
    rep.total = weighted_norms(tot, sc_.delta);

    // per-origin decomposition
    Vec3Field ui, um, ue;
    SpectralField pi(table_.grid, sc_.omega), pm = pi, pe = pi, ri = pi, rm = pi, re = pi;
    ui.c1 = pi; ui.c2 = pi; ui.c3 = pi;
    um = ui; ue = ui;
    double ek = 1.0;
    for (int k = 0; k <= sol.K; ++k, ek *= sc_.epsilon) {
        const ExpansionTerm& t = terms_.at(k);
        ui.c1 += t.interior.u.c1 * cplx(ek); ui.c2 += t.interior.u.c2 * cplx(ek);
        ui.c3 += t.interior.u.c3 * cplx(ek);
        pi += t.interior.p * cplx(ek); ri += t.interior.rho * cplx(ek);
        um.c1 += t.munk.u.c1 * cplx(ek); um.c2 += t.munk.u.c2 * cplx(ek);
        um.c3 += t.munk.u.c3 * cplx(ek);
        pm += t.munk.p * cplx(ek); rm += t.munk.rho * cplx(ek);
        ue.c1 += t.ekman.u.c1 * cplx(ek); ue.c2 += t.ekman.u.c2 * cplx(ek);
        ue.c3 += t.ekman.u.c3 * cplx(ek);
        pe += t.ekman.p * cplx(ek); re += t.ekman.rho * cplx(ek);
    }
    EqFields gi = eval(ui, pi, ri, true);
    EqFields gm = eval(um, pm, rm, false);
    EqFields ge = eval(ue, pe, re, false);
    rep.interior = weighted_norms(gi, sc_.delta);
    rep.munk = weighted_norms(gm, sc_.delta);
    rep.ekman = weighted_norms(ge, sc_.delta);

    // linearity self-check on the horizontal component
    EqFields sum;
    sum.gh1 = gi.gh1 + gm.gh1 + ge.gh1 - tot.gh1;
    sum.gh2 = gi.gh2 + gm.gh2 + ge.gh2 - tot.gh2;
    sum.g3 = gi.g3 + gm.g3 + ge.g3 - tot.g3;
    sum.grho = gi.grho + gm.grho + ge.grho - tot.grho;
    sum.gdiv = gi.gdiv + gm.gdiv + ge.gdiv - tot.gdiv;
    const double defect = weighted_norms(sum, sc_.delta).combined;
    rep.linearity_defect = rep.total.combined > 0 ? defect / rep.total.combined : 0.0;
    return rep;
}

} // namespace slopegyre
