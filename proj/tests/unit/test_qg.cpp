#include <doctest.h>

#include <random>

#include "slopegyre/errors.hpp"
#include "slopegyre/qg_builder.hpp"
#include "test_support.hpp"

using namespace slopegyre;
using sgtest::rel;

namespace {

struct MiniRun {
    DerivedScales sc;
    ModeGrid grid;
    Forcing f;
    KernelTable table;
};

// small end-to-end fixture shared by most cases (built once)
const MiniRun& fixture() {
    static MiniRun m = [] {
        MiniRun r;
        r.sc = validate(sgtest::lowfreq_params(1e-2));
        r.grid = sgtest::small_grid(32);
        IngestOptions opt;
        opt.kappa = 0.18;
        r.f = ingest_forcing(sgtest::compact_recipe(), r.grid, r.sc, opt);
        r.table = build_kernel_table(r.grid, r.sc);
        return r;
    }();
    return m;
}

double mode_scale(const ExpPolyProfile& a) { return a.max_abs_sampled(0.0, 3.0, 13); }

} // namespace

TEST_CASE("zero forcing gives the zero order-0 term") {
    const MiniRun& m = fixture();
    ForcingRecipe r = sgtest::compact_recipe();
    r.amplitude = 0.0;
    Forcing f0 = ingest_forcing(r, m.grid, m.sc);
    ExpansionTerm t = build_order0(f0, m.table, m.sc);
    CHECK(t.total_p().l2sq() == 0.0);
    CHECK(t.total_u().c1.l2sq() == 0.0);
}

TEST_CASE("order-0 structure: geostrophy, hydrostatics, vanishing traces") {
    const MiniRun& m = fixture();
    ExpansionTerm t = build_order0(m.f, m.table, m.sc);
    const SpectralField p0 = t.total_p();

    SUBCASE("u_h = grad_h^perp p and u3 = 0 exactly") {
        Vec2Field want = grad_h_perp(p0, m.sc);
        double worst = 0.0, scale = 0.0;
        for (int idx = 0; idx < m.grid.size(); ++idx)
            for (double z : {0.0, 0.5}) {
                const cplx got =
                    t.interior.u.c1.at(idx).eval(z) + t.munk.u.c1.at(idx).eval(z);
                worst = std::max(worst, std::abs(got - want.c1.at(idx).eval(z)));
                scale = std::max(scale, std::abs(want.c1.at(idx).eval(z)));
            }
        CHECK(worst <= 1e-12 * scale);
        CHECK(t.total_u().c3.l2sq() == 0.0);
    }
    SUBCASE("rho = -d3 p exactly") {
        SpectralField want = d3(p0, m.sc) * cplx(-1.0);
        SpectralField got = t.total_rho();
        double worst = 0.0, scale = 0.0;
        for (int idx = 0; idx < m.grid.size(); ++idx)
            for (double z : {0.0, 0.7}) {
                worst = std::max(worst, std::abs(got.at(idx).eval(z) - want.at(idx).eval(z)));
                scale = std::max(scale, std::abs(want.at(idx).eval(z)));
            }
        CHECK(worst <= 1e-12 * scale);
    }
    SUBCASE("p0 and dz p0 vanish at z=0 per mode") {
        for (int idx = 0; idx < m.grid.size(); ++idx) {
            const auto prof = p0.at(idx);
            if (prof.is_zero()) continue;
            const double scale = mode_scale(prof);
            CHECK(std::abs(prof.value0()) <= 1e-10 * scale);
            CHECK(std::abs(prof.dz().value0()) <= 1e-10 * scale * m.sc.munk_scale);
        }
    }
    SUBCASE("divergence-free per mode") {
        Vec3Field u = t.total_u();
        SpectralField div = d1(u.c1, m.sc) + d2(u.c2) + d3(u.c3, m.sc);
        for (int idx = 0; idx < m.grid.size(); ++idx) {
            const double scale =
                std::max({mode_scale(u.c1.at(idx)) * m.sc.munk_scale, 1e-300});
            CHECK(div.at(idx).max_abs_sampled(0.0, 2.0, 9) <= 1e-10 * scale);
        }
    }
}

TEST_CASE("layer coefficients reconstruct a prescribed boundary trace") {
    DerivedScales sc = validate(sgtest::lowfreq_params(1e-2));
    const Xi xi{1.0, 1.0};
    const std::array<cplx, 2> mu = {cplx(1.0, 1.0), cplx(2.0, 0.0)};
    const auto [c1, c2] = solve_layer_coeffs(mu, xi, sc, cplx(1.0), cplx(0.0), 1.0);
    // back-substitution into the layer system: sum_j c_j col_j = -(1, 0)
    const cplx A(0, sc.c * xi.x);
    const cplx r1 = c1 * cplx(0, -xi.y) + c2 * cplx(0, -xi.y);
    const cplx r2 = c1 * (A + sc.s * mu[0]) + c2 * (A + sc.s * mu[1]);
    CHECK(std::abs(r1 - cplx(-1.0)) < 1e-12);
    CHECK(std::abs(r2 - cplx(0.0)) < 1e-12);
}

TEST_CASE("western intensification of the northward layer velocity") {
    MiniRun m;
    m.sc = validate(sgtest::lowfreq_params(1e-3));
    m.grid = sgtest::small_grid(32);
    IngestOptions opt;
    opt.kappa = 0.12;
    m.f = ingest_forcing(sgtest::compact_recipe(), m.grid, m.sc, opt);
    m.table = build_kernel_table(m.grid, m.sc);
    ExpansionTerm t = build_order0(m.f, m.table, m.sc);
    int checked = 0;
    double peak_trace = 0.0;
    for (int idx = 0; idx < m.grid.size(); ++idx)
        peak_trace = std::max(peak_trace, std::abs(t.interior.u.c2.at(idx).value0()));
    for (int idx = 0; idx < m.grid.size(); ++idx) {
        if (!m.table.is_active(idx)) continue;
        const auto& ui2 = t.interior.u.c2.at(idx);
        if (ui2.is_zero()) continue;
        const double interior_at_wall = std::abs(ui2.value0());
        if (interior_at_wall < 0.3 * peak_trace) continue;  // order-one traces only
        const double layer_max = (t.munk.u.c2.at(idx) + ui2)
                                     .max_abs_sampled(0.0, 6.0 / m.sc.munk_scale, 60);
        CHECK(layer_max >= 5.0 * interior_at_wall);
        ++checked;
    }
    CHECK(checked > 0);
}

TEST_CASE("corrector right-hand side special cases") {
    const MiniRun& m = fixture();
    Diagnostics diag;
    SUBCASE("zero inputs give zero") {
        SpectralField zp(m.grid, m.sc.omega);
        ForcingRecipe r0 = sgtest::compact_recipe();
        r0.amplitude = 0.0;
        Forcing f0 = ingest_forcing(r0, m.grid, m.sc);
        CHECK(corrector_rhs(zp, f0, m.sc, diag).l2sq() == 0.0);
    }
    SUBCASE("f1 depending on y only leaves the planetary term alone") {
        // f = (f1(y), 0): div_h f = 0 and f1's first component enters only
        // through beta^2 f1 and the planetary curl term; with p0 = 0 the rhs
        // must equal beta^2 (f1 - y curl_h f)
        Forcing f;
        f.gamma = 0.5;
        f.fh.c1 = SpectralField(m.grid, m.sc.omega);
        f.fh.c2 = SpectralField(m.grid, m.sc.omega);
        f.fh.c1.at(0, 3) = ExpPolyProfile::exponential(1.0, 0.5);
        f.fh.c1.at(0, m.grid.Ny - 3) = ExpPolyProfile::exponential(1.0, 0.5);
        SpectralField zp(m.grid, m.sc.omega);
        SpectralField rhs = corrector_rhs(zp, f, m.sc, diag);
        // d1 carries a -s dz part, so div_h f is nonzero through the z-profile
        SpectralField want =
            multiply_by_y(curl_h(f.fh, m.sc), diag) * cplx(-m.sc.beta * m.sc.beta);
        want += f.fh.c1 * cplx(m.sc.beta * m.sc.beta);
        want += dt_minus_lapnu(div_h(f.fh, m.sc), m.sc) * cplx(m.sc.beta);
        double worst = 0.0, scale = 0.0;
        for (int idx = 0; idx < m.grid.size(); ++idx)
            for (double z : {0.0, 0.8}) {
                worst =
                    std::max(worst, std::abs(rhs.at(idx).eval(z) - want.at(idx).eval(z)));
                scale = std::max(scale, std::abs(want.at(idx).eval(z)));
            }
        CHECK(worst <= 1e-12 * scale);
    }
}

TEST_CASE("corrector rhs equals the operator composition on random fields") {
    DerivedScales sc = validate(sgtest::lowfreq_params(1e-2));
    std::mt19937_64 rng(53);
    ModeGrid g = sgtest::small_grid(96, 50.0);
    for (int it = 0; it < 3; ++it) {
        SpectralField p0 = sgtest::random_localized_field(g, sc.omega, rng);
        Forcing f;
        f.gamma = 0.5;
        f.fh.c1 = sgtest::random_localized_field(g, sc.omega, rng, 0);
        f.fh.c2 = sgtest::random_localized_field(g, sc.omega, rng, 0);
        Diagnostics diag;
        SpectralField lhs = corrector_rhs(p0, f, sc, diag);
        Vec2Field inner = l1_op({d1(p0, sc), d2(p0)}, sc, diag);
        Vec2Field fperp = perp(f.fh);
        inner.c1 += fperp.c1 * cplx(sc.beta);
        inner.c2 += fperp.c2 * cplx(sc.beta);
        SpectralField rhs = curl_h(l1_op(inner, sc, diag), sc);
        double worst = 0.0, scale = 0.0;
        for (int idx = 0; idx < g.size(); ++idx)
            for (double z : {0.0, 0.5, 1.5}) {
                const cplx a = lhs.at(idx).eval(z), b = rhs.at(idx).eval(z);
                worst = std::max(worst, std::abs(a - b));
                scale = std::max({scale, std::abs(a), std::abs(b)});
            }
        CHECK(worst / scale < 1e-9);
    }
}

TEST_CASE("order-1 structure") {
    const MiniRun& m = fixture();
    ExpansionTerm t0 = build_order0(m.f, m.table, m.sc);
    Diagnostics diag;
    ExpansionTerm t1 = build_order1(t0, m.f, m.table, m.sc, diag);

    SUBCASE("the Ekman family is structurally empty") {
        CHECK(t1.ekman.p.l2sq() == 0.0);
        CHECK(t1.ekman.u.c1.l2sq() == 0.0);
    }
    SUBCASE("vertical velocity trace vanishes per mode") {
        for (int idx = 0; idx < m.grid.size(); ++idx) {
            const auto& u3 = t1.interior.u.c3.at(idx);
            if (u3.is_zero()) continue;
            CHECK(std::abs(u3.value0()) <= 1e-10 * mode_scale(u3));
        }
    }
    SUBCASE("horizontal boundary closure") {
        Vec3Field u = t1.total_u();
        for (int idx = 0; idx < m.grid.size(); ++idx) {
            if (!m.table.is_active(idx)) continue;
            const double scale =
                std::max({mode_scale(t1.interior.u.c1.at(idx)),
                          mode_scale(t1.interior.u.c2.at(idx)), 1e-300});
            if (scale < 1e-280) continue;
            CHECK(std::abs(u.c1.at(idx).value0()) <= 1e-10 * scale);
            CHECK(std::abs(u.c2.at(idx).value0()) <= 1e-10 * scale);
        }
    }
    SUBCASE("pressure equation residual per mode") {
        SpectralField rhs = corrector_rhs(t0.total_p(), m.f, m.sc, diag);
        SpectralField p1 = t1.total_p();
        SpectralField lhs = l2_full(p1, m.sc);
        for (int idx = 0; idx < m.grid.size(); ++idx) {
            if (!m.table.is_active(idx) || rhs.at(idx).is_zero()) continue;
            const double scale = rhs.at(idx).max_abs_sampled(0.1, 2.0, 9);
            const ExpPolyProfile diff = lhs.at(idx) - rhs.at(idx);
            CHECK(diff.max_abs_sampled(0.1, 2.0, 9) <= 1e-8 * std::max(scale, 1e-300));
        }
    }
    SUBCASE("omega = 0 kills the corrector vertical velocity") {
        DerivedScales sc0 = m.sc;
        sc0.omega = 0.0;
        IngestOptions opt0;
        opt0.kappa = 0.18;
        Forcing f0 = ingest_forcing(sgtest::compact_recipe(), m.grid, sc0, opt0);
        KernelTable table0 = build_kernel_table(m.grid, sc0);
        ExpansionTerm s0 = build_order0(f0, table0, sc0);
        Diagnostics d0;
        ExpansionTerm s1 = build_order1(s0, f0, table0, sc0, d0);
        CHECK(s1.total_u().c3.l2sq() == 0.0);
    }
}

TEST_CASE("Sverdrup interior balance improves along the epsilon ladder") {
    double prev = 1e300;
    for (double eps : {1e-2, 1e-3}) {
        DerivedScales sc = validate(sgtest::lowfreq_params(eps));
        ModeGrid g = sgtest::small_grid(32);
        IngestOptions opt;
        opt.kappa = 0.18;
        Forcing f = ingest_forcing(sgtest::compact_recipe(), g, sc, opt);
        KernelTable table = build_kernel_table(g, sc);
        ExpansionTerm t = build_order0(f, table, sc);
        SpectralField S = curl_h(f.fh, sc) * cplx(sc.beta);
        SpectralField bal = d1(t.interior.p, sc) * cplx(sc.beta) - S;
        double worst = 0.0;
        for (int idx = 0; idx < g.size(); ++idx) {
            if (!table.is_active(idx) || S.at(idx).is_zero()) continue;
            const double z0 = 5.0 / table.roots[idx].mu_plus[0].real();
            const double defect = bal.at(idx).max_abs_sampled(z0, z0 + 4.0, 40);
            const double layer_scale = bal.at(idx).max_abs_sampled(0.0, z0, 40);
            if (layer_scale > 0) worst = std::max(worst, defect / layer_scale);
        }
        CHECK(worst < prev);
        prev = worst;
    }
}

TEST_CASE("effective corrector traces") {
    const MiniRun& m = fixture();
    ExpansionTerm t0 = build_order0(m.f, m.table, m.sc);
    Diagnostics diag;
    ExpansionTerm t1 = build_order1(t0, m.f, m.table, m.sc, diag);

    SUBCASE("zero forcing gives zero traces") {
        ForcingRecipe r0 = sgtest::compact_recipe();
        r0.amplitude = 0.0;
        Forcing f0 = ingest_forcing(r0, m.grid, m.sc);
        ExpansionTerm z0 = build_order0(f0, m.table, m.sc);
        Diagnostics d0;
        ExpansionTerm z1 = build_order1(z0, f0, m.table, m.sc, d0);
        auto recs = effective_traces_p1(z0, z1, f0, m.table, m.sc);
        for (const auto& r : recs) {
            CHECK(std::abs(r.lhs1) == 0.0);
            CHECK(std::abs(r.rhs1) == 0.0);
        }
    }
    SUBCASE("normalized gap of the x1 trace stays bounded on the ladder") {
        for (double eps : {1e-2, 1e-3}) {
            DerivedScales sc = validate(sgtest::lowfreq_params(eps));
            ModeGrid g = sgtest::small_grid(32);
            IngestOptions opt;
            opt.kappa = 0.18;
            Forcing f = ingest_forcing(sgtest::compact_recipe(), g, sc, opt);
            KernelTable table = build_kernel_table(g, sc);
            ExpansionTerm a0 = build_order0(f, table, sc);
            Diagnostics dd;
            ExpansionTerm a1 = build_order1(a0, f, table, sc, dd);
            auto recs = effective_traces_p1(a0, a1, f, table, sc);
            REQUIRE(!recs.empty());
            double fscale = 0.0;
            for (int idx = 0; idx < g.size(); ++idx)
                fscale = std::max(fscale, std::abs(f.fh.c1.at(idx).value0()));
            double worst = 0.0;
            for (const auto& r : recs) worst = std::max(worst, r.gap1 / fscale);
            CHECK(worst <= 10.0);
        }
    }
    SUBCASE("hypothesis violation detected") {
        Parameters p = sgtest::lowfreq_params(1e-2);
        p.e = 1.1;  // nu_3 no longer small against nu_h^{4/3} beta^{-1/3}
        DerivedScales sc = validate(p);
        CHECK_THROWS_AS(effective_traces_p1(t0, t1, m.f, m.table, sc), HypothesisViolated);
    }
}
