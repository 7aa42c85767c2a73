#include <doctest.h>

#include <algorithm>
#include <random>

#include "slopegyre/errors.hpp"
#include "slopegyre/munk_roots.hpp"
#include "test_support.hpp"

using namespace slopegyre;
using sgtest::rel;

namespace {

// scales with directly prescribed coefficients (bypassing the power laws)
DerivedScales raw_scales(double beta, double nu_h, double nu_3, double alpha) {
    DerivedScales sc;
    sc.epsilon = 1e-2;
    sc.beta = beta;
    sc.nu_h = nu_h;
    sc.nu_3 = nu_3;
    sc.alpha = alpha;
    sc.s = std::sin(alpha);
    sc.c = std::cos(alpha);
    sc.nu_eff = nu_h * sc.s * sc.s + nu_3 * sc.c * sc.c;
    sc.munk_scale = std::cbrt(std::max(beta, 1e-300) / sc.nu_eff);
    sc.theta_lo = 1.0;
    sc.theta_hi = 0.1;
    return sc;
}

} // namespace

TEST_CASE("closed-form special case nu=1, beta=omega=0, alpha=-pi/4, xi=(0,1)") {
    DerivedScales sc = raw_scales(0.0, 1.0, 1.0, -M_PI / 4.0);
    RootSet r = quartic_roots({0.0, 1.0}, 0.0, sc);
    const double rt2 = std::sqrt(2.0);
    CHECK(rel(r.mu_plus[0], cplx(1.0)) < 1e-12);
    CHECK(rel(r.mu_plus[1], cplx(rt2)) < 1e-12);
    CHECK(rel(r.mu_minus[0], cplx(-1.0)) < 1e-12);
    CHECK(rel(r.mu_minus[1], cplx(-rt2)) < 1e-12);
}

TEST_CASE("conjugation symmetry: roots(-xi,-omega) = conj(roots(xi,omega))") {
    std::mt19937_64 rng(17);
    for (int it = 0; it < 30; ++it) {
        sgtest::RootDraw d = sgtest::random_western_draw(rng);
        RootSet r1 = quartic_roots(d.xi, d.omega, d.sc);
        RootSet r2 = quartic_roots({-d.xi.x, -d.xi.y}, -d.omega, d.sc);
        // as sets: conj maps plus to plus
        std::array<cplx, 2> conj_p = {std::conj(r1.mu_plus[0]), std::conj(r1.mu_plus[1])};
        std::sort(conj_p.begin(), conj_p.end(),
                  [](cplx a, cplx b) { return a.real() < b.real() ||
                                              (a.real() == b.real() && a.imag() < b.imag()); });
        std::array<cplx, 2> got_p = r2.mu_plus;
        std::sort(got_p.begin(), got_p.end(),
                  [](cplx a, cplx b) { return a.real() < b.real() ||
                                              (a.real() == b.real() && a.imag() < b.imag()); });
        CHECK(rel(conj_p[0], got_p[0]) < 1e-10);
        CHECK(rel(conj_p[1], got_p[1]) < 1e-10);
    }
}

TEST_CASE("low-frequency asymptotic references at the eps=1e-3 preset") {
    DerivedScales sc = validate(sgtest::lowfreq_params(1e-3));
    REQUIRE(classify_frequency(sc) == FrequencyRegime::LowFreq);
    RootSet r = quartic_roots({1.0, 1.0}, sc.omega, sc);
    REQUIRE(r.refs_available);
    CHECK(rel(r.mu_plus[0], r.ref_plus[0]) < 0.15);
    CHECK(rel(r.mu_plus[1], r.ref_plus[1]) < 0.15);
    CHECK(rel(r.mu_minus[0], r.ref_minus[0]) < 0.15);
    // the small root reference is -i c xi_x / s
    CHECK(rel(r.ref_minus[0], -cplx(0, sc.c * 1.0) / sc.s) < 1e-12);
}

TEST_CASE("rescaled cubic: omega=0 gives cube roots of 1/s") {
    SUBCASE("s = -1") {
        DerivedScales sc = raw_scales(10.0, 1e-3, 1e-3, -M_PI / 2.0 + 1e-9);
        sc.s = -1.0;
        sc.c = 1e-9;
        sc.nu_eff = 1e-3;
        sc.omega = 0.0;
        auto M = munk_cubic(0.0, sc);
        // roots of M^3 = -1 classified: e^{+-i pi/3} decaying, -1 growing
        CHECK(rel(M[0], std::polar(1.0, -M_PI / 3.0)) < 1e-12);
        CHECK(rel(M[1], std::polar(1.0, M_PI / 3.0)) < 1e-12);
        CHECK(rel(M[2], cplx(-1.0)) < 1e-12);
    }
    SUBCASE("s = -1/2 scales the radius by 2^{1/3}") {
        DerivedScales sc = raw_scales(10.0, 1e-3, 1e-3, -M_PI / 6.0);
        sc.s = -0.5;
        sc.omega = 0.0;
        auto M = munk_cubic(0.0, sc);
        const double rad = std::cbrt(2.0);
        for (const cplx& m : M) CHECK(std::abs(std::abs(m) - rad) < 1e-12);
    }
}

TEST_CASE("rescaled cubic: generic reduced frequency has tiny residual") {
    DerivedScales sc = raw_scales(10.0, 1e-2, 1e-4, -M_PI / 4.0);
    // choose omega so the reduced frequency is 0.5
    const double womega = 0.5 * std::pow(sc.beta, 2.0 / 3.0) * std::cbrt(sc.nu_eff);
    sc.omega = womega;
    auto M = munk_cubic(womega, sc);
    const double wt = 0.5;
    for (const cplx& m : M) {
        const cplx res = cplx(0, wt) * m + sc.s - sc.s * sc.s * m * m * m;
        const double scale = std::abs(wt * m) + std::abs(sc.s) + std::abs(sc.s * sc.s * m * m * m);
        CHECK(std::abs(res) / scale < 1e-12);
    }
    CHECK_THROWS_AS(munk_cubic(10.0 * womega, sc), RegimeError);
}

TEST_CASE("mid-frequency references satisfy the quartic approximately") {
    DerivedScales sc = validate(sgtest::midfreq_params());
    REQUIRE(classify_frequency(sc) == FrequencyRegime::MidFreq);
    const Xi xi{0.05, 0.05};
    MidfreqRefs refs = midfreq_asymptotics(xi, sc.omega, sc);
    const Poly q = munk_quartic(xi, sc.omega, sc);
    for (cplx mu : {refs.mu1_plus, refs.mu2_plus, refs.mu2_minus}) {
        CHECK(std::abs(q.eval(mu)) / q.eval_abs(mu) < 0.2);
    }
    SUBCASE("sign flip conjugates the references") {
        MidfreqRefs r2 = midfreq_asymptotics(xi, -sc.omega, sc);
        CHECK(rel(r2.mu1_plus, std::conj(refs.mu1_plus)) < 1e-12);
        CHECK(rel(r2.mu2_plus, std::conj(refs.mu2_plus)) < 1e-12);
    }
    SUBCASE("xi_x = 0 nulls the small-root reference") {
        MidfreqRefs r3 = midfreq_asymptotics({0.0, 0.05}, sc.omega, sc);
        CHECK(std::abs(r3.mu1_minus) == 0.0);
        RootSet ex = quartic_roots({0.0, 0.05}, sc.omega, sc);
        const double others = std::min({std::abs(ex.mu_plus[0]), std::abs(ex.mu_plus[1]),
                                        std::abs(ex.mu_minus[1])});
        CHECK(std::abs(ex.mu_minus[0]) <= 0.1 * others);
    }
    SUBCASE("out-of-bound xi rejected") {
        CHECK_THROWS_AS(midfreq_asymptotics({50.0, 50.0}, sc.omega, sc), RegimeError);
    }
}

TEST_CASE("mid-frequency exact roots track the references") {
    DerivedScales sc = validate(sgtest::midfreq_params());
    const Xi xi{0.05, 0.05};
    RootSet r = quartic_roots(xi, sc.omega, sc);
    REQUIRE(r.refs_available);
    CHECK(rel(r.mu_plus[0], r.ref_plus[0]) < 0.2);
    CHECK(rel(r.mu_plus[1], r.ref_plus[1]) < 0.2);
    // refined real-part estimate for the slow decaying root
    MidfreqRefs refs = midfreq_asymptotics(xi, sc.omega, sc);
    const cplx slow = (rel(r.mu_plus[0], refs.mu2_plus) < rel(r.mu_plus[1], refs.mu2_plus))
                          ? r.mu_plus[0]
                          : r.mu_plus[1];
    CHECK(std::abs(slow.real() / refs.re_mu2_plus - 1.0) < 0.5);
}

TEST_CASE("separation ratio and flag") {
    RootSet r;
    r.mu_plus = {cplx(1.0), cplx(2.0)};
    r.mu_minus = {cplx(-1.0), cplx(-2.0)};
    CHECK(check_separation(r) == doctest::Approx(0.5));

    // artificially collided roots raise the flag
    r.mu_plus = {cplx(1.0), cplx(1.0 + 1e-4)};
    r.separation = check_separation(r);
    CHECK(near_crossing(r));

    // low-frequency steady case: gap bounded below by the root-of-unity gap
    DerivedScales sc = validate(sgtest::lowfreq_params(1e-3));
    sc.omega = 0.0;
    RootSet rs = quartic_roots({1.0, 1.0}, 0.0, sc);
    rs.separation = check_separation(rs);
    CHECK(rs.separation > 0.1);  // sqrt(3)/2 up to the small-root correction
    CHECK(!near_crossing(rs));
}

TEST_CASE("property: 2/2 split with tiny residual over random western draws") {
    std::mt19937_64 rng(29);
    for (int it = 0; it < 300; ++it) {
        sgtest::RootDraw d = sgtest::random_western_draw(rng);
        RootSet r = quartic_roots(d.xi, d.omega, d.sc);  // throws on violation
        CHECK(r.max_rel_residual <= 1e-9);
        CHECK(r.mu_plus[0].real() > 0);
        CHECK(r.mu_plus[1].real() >= r.mu_plus[0].real());
        CHECK(r.mu_minus[0].real() < 0);
        CHECK(r.mu_minus[1].real() <= r.mu_minus[0].real());
    }
}

TEST_CASE("low-frequency reference convergence along the epsilon ladder") {
    double prev_gap = 1e300;
    double first_gap = 0, last_gap = 0;
    bool first = true;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
        DerivedScales sc = validate(sgtest::lowfreq_params(eps));
        RootSet r = quartic_roots({1.0, 1.0}, sc.omega, sc);
        REQUIRE(r.refs_available);
        double gap = 0.0;
        for (int j = 0; j < 2; ++j) {
            gap = std::max(gap, rel(r.mu_plus[j], r.ref_plus[j]));
            gap = std::max(gap, rel(r.mu_minus[j], r.ref_minus[j]));
        }
        if (first) first_gap = gap;
        CHECK(gap <= prev_gap * 1.2);  // monotone within 20% slack
        prev_gap = gap;
        last_gap = gap;
        first = false;
    }
    CHECK(last_gap < first_gap);
    CHECK(last_gap <= 0.15);
}

TEST_CASE("east/west dissymmetry in the count of strong decaying roots") {
    std::mt19937_64 rng(31);
    int checked = 0;
    while (checked < 100) {
        sgtest::RootDraw d = sgtest::random_dissymmetry_draw(rng);
        REQUIRE(classify_frequency(d.sc) == FrequencyRegime::LowFreq);
        ++checked;
        const double strong = 0.5 * d.sc.munk_scale;
        RootSet west = quartic_roots(d.xi, d.omega, d.sc);
        int nwest = 0;
        for (const cplx& mu : west.mu_plus)
            if (mu.real() >= strong) ++nwest;
        CHECK(nwest == 2);

        DerivedScales east = d.sc;
        east.s = -d.sc.s;
        east.alpha = -d.sc.alpha;
        RootSet er = quartic_roots(d.xi, d.omega, east);
        int neast = 0;
        for (const cplx& mu : er.mu_plus)
            if (mu.real() >= strong) ++neast;
        CHECK(neast == 1);
    }
    CHECK(checked == 100);  // dedicated interior draws always classify LowFreq
}
