#include <doctest.h>

#include <memory>

#include "slopegyre/cascade.hpp"
#include "slopegyre/errors.hpp"
#include "test_support.hpp"

using namespace slopegyre;
using sgtest::rel;

namespace {

struct Rig {
    DerivedScales sc;
    ModeGrid grid;
    Forcing f;
    KernelTable table;
    Diagnostics diag;
    std::unique_ptr<Cascade> cascade;

    Rig(double eps, int n, int K, bool ekman = true) {
        sc = validate(sgtest::lowfreq_params(eps));
        grid = sgtest::small_grid(n);
        IngestOptions opt;
        opt.kappa = 0.18;  // keeps retained modes inside the layer-root envelope
        f = ingest_forcing(sgtest::compact_recipe(), grid, sc, opt);
        table = build_kernel_table(grid, sc);
        CascadeOptions copt;
        copt.K = K;
        copt.build_ekman = ekman;
        cascade = std::make_unique<Cascade>(f, table, sc, copt, diag);
        cascade->build_to(K);
    }
};

// shared fixtures (doctest re-enters test bodies per subcase; these build once)
Rig& rig_coarse() {
    static Rig r(1e-2, 24, 1);
    return r;
}
Rig& rig_deep() {
    static Rig r(1e-3, 24, 3);
    return r;
}
Rig& rig_munk() {
    static Rig r(1e-3, 24, 2, false);
    return r;
}

double mode_scale(const ExpPolyProfile& a) { return a.max_abs_sampled(0.0, 3.0, 13); }

double field_rel_diff(const SpectralField& a, const SpectralField& b) {
    double worst = 0.0, scale = 0.0;
    for (int idx = 0; idx < a.grid().size(); ++idx)
        for (double z : {0.0, 0.3, 1.2}) {
            const cplx va = a.at(idx).eval(z), vb = b.at(idx).eval(z);
            worst = std::max(worst, std::abs(va - vb));
            scale = std::max({scale, std::abs(va), std::abs(vb)});
        }
    return scale > 0 ? worst / scale : 0.0;
}

} // namespace

TEST_CASE("order 0 of the cascade reproduces the direct geostrophic build") {
    Rig& rig = rig_coarse();
    ExpansionTerm direct = build_order0(rig.f, rig.table, rig.sc);
    const ExpansionTerm& t0 = rig.cascade->term(0);
    CHECK(field_rel_diff(t0.total_p(), direct.total_p()) < 1e-12);
    CHECK(field_rel_diff(t0.total_u().c2, direct.total_u().c2) < 1e-12);
    CHECK(field_rel_diff(t0.total_rho(), direct.total_rho()) < 1e-12);
}

TEST_CASE("interior source at k=1 matches the corrector right-hand side") {
    Rig& rig = rig_coarse();
    // the interior + Munk family sources together equal the corrector formula
    // applied to the full order-0 pressure (both are linear in the history)
    SpectralField F1 = rig.cascade->interior_source(1) + rig.cascade->munk_source(1);
    Diagnostics diag;
    SpectralField rhs = corrector_rhs(rig.cascade->term(0).total_p(), rig.f, rig.sc, diag);
    CHECK(field_rel_diff(F1, rhs) < 1e-9);
}

TEST_CASE("K=1 assembly matches the two-term builder") {
    Rig& rig = rig_coarse();
    ExpansionTerm d0 = build_order0(rig.f, rig.table, rig.sc);
    Diagnostics diag;
    ExpansionTerm d1t = build_order1(d0, rig.f, rig.table, rig.sc, diag);
    ApproximateSolution sol = rig.cascade->assemble(1);

    SpectralField want_p = d0.total_p() + d1t.total_p() * cplx(rig.sc.epsilon);
    CHECK(field_rel_diff(sol.p, want_p) < 1e-10);
    SpectralField want_u2 = d0.total_u().c2 + d1t.total_u().c2 * cplx(rig.sc.epsilon);
    CHECK(field_rel_diff(sol.u.c2, want_u2) < 1e-10);
    SpectralField want_u3 = d0.total_u().c3 + d1t.total_u().c3 * cplx(rig.sc.epsilon);
    CHECK(field_rel_diff(sol.u.c3, want_u3) < 1e-10);
}

TEST_CASE("index shift of the vertical-history coupling with M=4") {
    // with delta = eps^{M/2}, M=4, the u3 history enters at k-M-1 = k-5, so
    // the k=2 interior source carries no u3 contribution; for the interior
    // family the M=2 and M=4 recurrences then coincide up to k=2
    Parameters p2 = sgtest::lowfreq_params(1e-2);
    Parameters p4 = p2;
    p4.M = 4;
    DerivedScales sc2 = validate(p2);
    DerivedScales sc4 = validate(p4);
    ModeGrid g = sgtest::small_grid(16);
    IngestOptions opt;
    opt.kappa = 0.18;
    Forcing f2 = ingest_forcing(sgtest::compact_recipe(), g, sc2, opt);
    KernelTable t2 = build_kernel_table(g, sc2);
    KernelTable t4 = build_kernel_table(g, sc4);
    Diagnostics dA, dB;
    CascadeOptions copt;
    copt.K = 2;
    copt.build_ekman = false;
    Cascade c2(f2, t2, sc2, copt, dA);
    Cascade c4(f2, t4, sc4, copt, dB);
    c2.build_to(2);
    c4.build_to(2);
    CHECK(field_rel_diff(c2.interior_source(2), c4.interior_source(2)) < 1e-12);
}

TEST_CASE("Munk family: k=0 is the pure coefficient layer") {
    Rig& rig = rig_coarse();
    const ExpansionTerm& t0 = rig.cascade->term(0);
    for (int idx = 0; idx < rig.grid.size(); ++idx) {
        const auto& prof = t0.munk.p.at(idx);
        if (prof.is_zero()) continue;
        CHECK(prof.term_count() <= 2);
        for (const auto& t : prof.terms()) {
            const double d1v = std::abs(t.rate - rig.table.roots[idx].mu_plus[0]);
            const double d2v = std::abs(t.rate - rig.table.roots[idx].mu_plus[1]);
            CHECK(std::min(d1v, d2v) < 1e-9 * rig.sc.munk_scale);
        }
    }
}

TEST_CASE("Munk layer profiles stay exponentially localized") {
    Rig& rig = rig_munk();
    for (int k = 1; k <= 2; ++k) {
        const ExpansionTerm& t = rig.cascade->term(k);
        double worst = 0.0;
        for (int idx = 0; idx < rig.grid.size(); ++idx) {
            const auto& prof = t.munk.u.c2.at(idx);
            if (prof.is_zero()) continue;
            const double mu1 = rig.table.roots[idx].mu_plus[0].real();
            const double at0 = std::max(std::abs(prof.eval(0.0)), mode_scale(prof));
            const double far = std::abs(prof.eval(6.0 / mu1));
            if (at0 > 0) worst = std::max(worst, far / (at0 * std::exp(-3.0)));
        }
        CHECK(worst <= 1.0 + 1e-9);
    }
}

TEST_CASE("Munk z-polynomial degree grows at most linearly in the order") {
    Rig& rig = rig_munk();
    for (int k = 0; k <= 2; ++k) {
        const ExpansionTerm& t = rig.cascade->term(k);
        int deg = 0;
        for (int idx = 0; idx < rig.grid.size(); ++idx)
            deg = std::max(deg, t.munk.p.at(idx).max_degree());
        CHECK(deg <= 2 * k + 1);
    }
}

TEST_CASE("depth budget guard") {
    Rig& rig = rig_coarse();
    CascadeOptions copt;
    copt.K = 5;
    copt.smoothness_budget = 12;  // allows 5*(k+1) <= 12, i.e. k <= 1
    Diagnostics diag;
    Cascade c(rig.f, rig.table, rig.sc, copt, diag);
    c.build_to(1);
    CHECK_THROWS_AS(c.build_to(2), DepthExhausted);
}

TEST_CASE("Ekman steps") {
    Rig& rig = rig_deep();
    REQUIRE(rig.cascade->ekman_active_count() > 0);

    SUBCASE("k=2 is the pure eigenvector layer") {
        const auto& polys = rig.cascade->ekman_polys(2);
        for (const auto& q : polys) {
            if (q.qx.empty()) continue;
            CHECK(q.qx.size() == 1);
            CHECK(q.qy.size() == 1);
        }
        const ExpansionTerm& t2 = rig.cascade->term(2);
        for (int idx = 0; idx < rig.grid.size(); ++idx) {
            if (!rig.table.is_active(idx)) continue;
            const cplx tr = t2.interior.u.c3.at(idx).value0() +
                            t2.munk.u.c3.at(idx).value0() +
                            t2.ekman.u.c3.at(idx).value0();
            const double scale =
                std::max({mode_scale(t2.interior.u.c3.at(idx)),
                          mode_scale(t2.munk.u.c3.at(idx)), 1e-300});
            if (scale > 1e-290) CHECK(std::abs(tr) <= 1e-10 * scale);
        }
    }
    SUBCASE("upslope-momentum relation solved degree by degree") {
        const auto& p3 = rig.cascade->ekman_polys(3);
        const auto& p2 = rig.cascade->ekman_polys(2);
        const double s = rig.sc.s, c = rig.sc.c;
        int checked = 0;
        for (size_t i = 0; i < p3.size(); ++i) {
            if (p3[i].qy.empty() || p2[i].qx.empty()) continue;
            const auto& qy = p3[i].qy;
            auto at = [&](const std::vector<cplx>& v, size_t j) {
                return j < v.size() ? v[j] : cplx(0);
            };
            size_t n = std::max({p3[i].qx.size(), qy.size(), p2[i].qx.size()});
            double scale = 0.0;
            for (size_t j = 0; j < n; ++j)
                scale = std::max({scale, std::abs(at(p2[i].qx, j)) * rig.sc.beta,
                                  std::abs(at(qy, j))});
            for (size_t j = 0; j < n; ++j) {
                const cplx T = double((j + 2) * (j + 1)) * at(qy, j + 2) -
                               2.0 * double(j + 1) * at(qy, j + 1) + at(qy, j);
                const cplx lhs = cplx(0, 1) * (s * s) / (c * c) * T + c * at(p3[i].qx, j);
                const cplx rhs = rig.sc.beta * at(p2[i].qx, j);
                CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(scale, 1e-300));
            }
            ++checked;
        }
        CHECK(checked > 0);
    }
    SUBCASE("divergence relation holds exactly on the assembled polynomials") {
        for (int k : {2, 3}) {
            const auto& ps = rig.cascade->ekman_polys(k);
            int checked = 0;
            for (int idx = 0; idx < rig.grid.size(); ++idx) {
                const auto& q = ps[idx];
                if (q.qz.empty()) continue;
                const Xi xi{rig.grid.xi_x(idx / rig.grid.Ny),
                            rig.grid.xi_y(idx % rig.grid.Ny)};
                auto at = [&](const std::vector<cplx>& v, size_t j) {
                    return j < v.size() ? v[j] : cplx(0);
                };
                const double we = rig.sc.omega * rig.sc.epsilon;
                size_t n = std::max(q.qz.size(), std::max(q.qx.size(), q.qy.size()));
                for (size_t j = 0; j < n; ++j) {
                    // (1 - d/dZ) qz = i xi_x qx + i xi_y (omega eps) qy
                    const cplx lhs = at(q.qz, j) - double(j + 1) * at(q.qz, j + 1);
                    const cplx rhs = cplx(0, xi.x) * at(q.qx, j) +
                                     cplx(0, xi.y) * we * at(q.qy, j);
                    CHECK(std::abs(lhs - rhs) <=
                          1e-12 * std::max({std::abs(lhs), std::abs(rhs), 1e-300}));
                }
                ++checked;
            }
            CHECK(checked > 0);
        }
    }
}

TEST_CASE("boundary closure across orders") {
    Rig& rig = rig_deep();
    SUBCASE("no-slip holds at every order") {
        for (int k = 0; k <= 3; ++k) {
            const ExpansionTerm& t = rig.cascade->term(k);
            Vec3Field u = t.total_u();
            for (int idx = 0; idx < rig.grid.size(); ++idx) {
                if (!rig.table.is_active(idx)) continue;
                double scale = 1e-300;
                for (const SpectralField* f :
                     {&t.interior.u.c1, &t.interior.u.c2, &t.munk.u.c1, &t.munk.u.c2})
                    scale = std::max(scale, mode_scale(f->at(idx)));
                if (scale < 1e-280) continue;
                CHECK(std::abs(u.c1.at(idx).value0()) <= 1e-10 * scale);
                CHECK(std::abs(u.c2.at(idx).value0()) <= 1e-10 * scale);
                CHECK(std::abs(u.c3.at(idx).value0()) <= 1e-10 * scale);
            }
        }
    }
    SUBCASE("zero traces give zero coefficients") {
        ForcingRecipe r0 = sgtest::compact_recipe();
        r0.amplitude = 0.0;
        Forcing f0 = ingest_forcing(r0, rig.grid, rig.sc);
        Diagnostics d;
        CascadeOptions copt;
        copt.K = 2;
        Cascade c(f0, rig.table, rig.sc, copt, d);
        c.build_to(2);
        for (int k = 0; k <= 2; ++k)
            for (const auto& mc : c.term(k).coeffs) {
                CHECK(mc.c1 == cplx(0));
                CHECK(mc.c2 == cplx(0));
                CHECK(mc.cE == cplx(0));
            }
    }
    SUBCASE("Ekman coefficients vanish automatically below order 2") {
        for (int k = 0; k <= 1; ++k) {
            double worst = 0.0, c1max = 0.0;
            for (const auto& mc : rig.cascade->term(k).coeffs) {
                worst = std::max(worst, std::abs(mc.cE));
                c1max = std::max(c1max, std::abs(mc.c1));
            }
            CHECK(worst <= 1e-12 * std::max(c1max, 1e-300));
        }
    }
    SUBCASE("layer coefficients grow like beta^k") {
        double cap = 0.0;
        for (int k = 0; k <= 3; ++k) {
            double cmax = 0.0;
            for (const auto& mc : rig.cascade->term(k).coeffs)
                cmax = std::max({cmax, std::abs(mc.c1), std::abs(mc.c2)});
            const double ratio = cmax / std::pow(rig.sc.beta, k);
            if (k == 0) cap = ratio;
            CHECK(ratio <= 60.0 * std::max(cap, 1e-300));
        }
    }
}

TEST_CASE("divergence-free at every order per mode") {
    Rig& rig = rig_deep();
    for (int k = 0; k <= 2; ++k) {
        const ExpansionTerm& t = rig.cascade->term(k);
        Vec3Field u = t.total_u();
        SpectralField div = d1(u.c1, rig.sc) + d2(u.c2) + d3(u.c3, rig.sc);
        for (int idx = 0; idx < rig.grid.size(); ++idx) {
            if (div.at(idx).is_zero()) continue;
            double scale = std::max({mode_scale(u.c1.at(idx)), mode_scale(u.c2.at(idx))});
            const double rate =
                k >= 2 ? std::abs(rig.cascade->ekman_lambda1()[idx]) : rig.sc.munk_scale;
            const double bound = 1e-10 * std::max(scale, 1e-300) * std::max(rate, 1.0);
            CHECK(div.at(idx).max_abs_sampled(0.0, 1.0, 11) <= bound);
        }
    }
}

TEST_CASE("assembled solution: geometric decay of the order ledger") {
    Rig& rig = rig_deep();
    ApproximateSolution sol = rig.cascade->assemble(3);
    const double epsbeta = rig.sc.epsilon * rig.sc.beta;
    double prev = 0.0;
    for (int k = 0; k <= 3; ++k) {
        const auto& l = sol.ledger[k];
        const double norm = std::pow(rig.sc.epsilon, k) *
                            std::sqrt(l.interior_u1 * l.interior_u1 +
                                      l.interior_u2 * l.interior_u2 +
                                      l.munk_u1 * l.munk_u1 + l.munk_u2 * l.munk_u2 +
                                      l.ekman_u1 * l.ekman_u1 + l.ekman_u2 * l.ekman_u2);
        if (k >= 1) CHECK(norm <= 2.0 * epsbeta * prev);
        prev = norm;
    }
}

TEST_CASE("northward intensification persists order by order") {
    Rig& rig = rig_munk();
    ApproximateSolution sol = rig.cascade->assemble(2);
    for (int k = 0; k <= 2; ++k) {
        const auto& l = sol.ledger[k];
        if (l.munk_u1 == 0.0) continue;
        const double ratio = l.munk_u2 / l.munk_u1;
        CHECK(ratio > 0.1 * rig.sc.munk_scale);
        CHECK(ratio < 10.0 * rig.sc.munk_scale);
    }
}

TEST_CASE("residual evaluation") {
    Rig& rig = rig_deep();
    static ApproximateSolution sol = rig.cascade->assemble(2);
    static ResidualReport rep = rig.cascade->residual(sol);

    SUBCASE("zero forcing gives zero residual") {
        ForcingRecipe r0 = sgtest::compact_recipe();
        r0.amplitude = 0.0;
        Forcing f0 = ingest_forcing(r0, rig.grid, rig.sc);
        Diagnostics d;
        CascadeOptions copt;
        copt.K = 1;
        Cascade c(f0, rig.table, rig.sc, copt, d);
        ApproximateSolution s0 = c.assemble(1);
        ResidualReport r = c.residual(s0);
        CHECK(r.total.combined == 0.0);
    }
    SUBCASE("residual decomposes linearly by origin") {
        CHECK(rep.linearity_defect < 1e-10);
    }
    SUBCASE("divergence residual is round-off level") {
        CHECK(rep.total.divergence <= 1e-8 * std::max(rep.total.combined, 1e-300));
    }
    SUBCASE("Ekman parts source no vertical, mass, or divergence residual") {
        const double scale = std::max(rep.ekman.horizontal, 1e-300);
        CHECK(rep.ekman.mass <= 1e-8 * scale);
        CHECK(rep.ekman.divergence <= 1e-8 * scale);
        CHECK(rep.delta * rep.delta * rep.ekman.vertical <= 1e-6 * scale);
    }
}

TEST_CASE("residual ladder contracts by eps*beta per order") {
    Rig& rig = rig_deep();
    const double epsbeta = rig.sc.epsilon * rig.sc.beta;
    double prev = -1.0;
    for (int K = 0; K <= 2; ++K) {
        ApproximateSolution sol = rig.cascade->assemble(K);
        ResidualReport rep = rig.cascade->residual(sol);
        if (K >= 1) CHECK(rep.total.combined <= 2.0 * epsbeta * prev);
        prev = rep.total.combined;
    }
}
