#include <doctest.h>

#include <random>

#include "slopegyre/exppoly.hpp"
#include "test_support.hpp"

using namespace slopegyre;

TEST_CASE("derivative of z exp(-2z) is (1-2z) exp(-2z) exactly") {
    ExpPolyProfile p = ExpPolyProfile::term(2.0, {cplx(0), cplx(1)});
    ExpPolyProfile d = p.dz();
    REQUIRE(d.term_count() == 1);
    const auto& t = d.terms()[0];
    CHECK(t.rate == cplx(2.0));
    REQUIRE(t.coef.size() == 2);
    CHECK(t.coef[0] == cplx(1.0));
    CHECK(t.coef[1] == cplx(-2.0));
    for (double z : {0.0, 0.3, 1.7}) {
        CHECK(std::abs(d.eval(z) - (1.0 - 2.0 * z) * std::exp(-2.0 * z)) < 1e-15);
    }
}

TEST_CASE("closure: n-fold differentiation keeps degree and term count") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ExpPolyProfile p;
    p.add_term(cplx(1.0, 0.5), {cplx(u(rng), u(rng)), cplx(u(rng), u(rng)), cplx(u(rng))});
    p.add_term(cplx(3.0, -2.0), {cplx(u(rng), u(rng))});
    const int deg0 = p.max_degree();
    const size_t n0 = p.term_count();
    ExpPolyProfile d = p;
    for (int n = 0; n < 6; ++n) {
        d = d.dz();
        CHECK(d.max_degree() <= deg0);
        CHECK(d.term_count() <= n0);
    }
}

TEST_CASE("evaluation decays and stays finite") {
    ExpPolyProfile p = ExpPolyProfile::term(cplx(0.5, 3.0), {cplx(1), cplx(2), cplx(1)});
    double prev = std::abs(p.eval(10.0));
    CHECK(std::isfinite(prev));
    for (double z : {40.0, 120.0, 700.0}) {
        const double v = std::abs(p.eval(z));
        CHECK(std::isfinite(v));
        CHECK(v <= prev + 1e-300);
        prev = v;
    }
}

TEST_CASE("confluence merge bumps the polynomial instead of splitting rates") {
    ExpPolyProfile p;
    p.add_term(cplx(2.0), {cplx(1.0)});
    p.add_term(cplx(2.0) * (1.0 + 1e-12), {cplx(0), cplx(1.0)});  // within tolerance
    CHECK(p.term_count() == 1);
    CHECK(p.max_degree() == 1);
    p.add_term(cplx(2.1), {cplx(1.0)});  // outside tolerance
    CHECK(p.term_count() == 2);
}

TEST_CASE("half-line integrals are exact") {
    // \int_0^\infty z e^{-2z} = 1/4 ; \int_0^\infty e^{-(1+i)z} = 1/(1+i)
    ExpPolyProfile p = ExpPolyProfile::term(2.0, {cplx(0), cplx(1)});
    CHECK(std::abs(p.integral0inf() - cplx(0.25)) < 1e-15);
    ExpPolyProfile q = ExpPolyProfile::exponential(1.0, cplx(1.0, 1.0));
    CHECK(std::abs(q.integral0inf() - 1.0 / cplx(1.0, 1.0)) < 1e-15);
    // L2^2 of e^{-z} is 1/2 ; the (1+z^2) weight adds 1/4
    ExpPolyProfile e = ExpPolyProfile::exponential(1.0, 1.0);
    CHECK(e.l2sq() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(e.weighted_l2sq() == doctest::Approx(0.75).epsilon(1e-14));
}

TEST_CASE("product and conjugate agree with pointwise evaluation") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    ExpPolyProfile a, b;
    a.add_term(cplx(0.7, 1.1), {cplx(u(rng), u(rng)), cplx(u(rng), u(rng))});
    a.add_term(cplx(2.0, -0.4), {cplx(u(rng), u(rng))});
    b.add_term(cplx(1.3, 0.2), {cplx(u(rng), u(rng)), cplx(u(rng)), cplx(u(rng))});
    ExpPolyProfile ab = a * b;
    ExpPolyProfile ac = a.conjugated();
    for (double z : {0.0, 0.21, 1.4, 3.0}) {
        CHECK(std::abs(ab.eval(z) - a.eval(z) * b.eval(z)) < 1e-13);
        CHECK(std::abs(ac.eval(z) - std::conj(a.eval(z))) < 1e-14);
    }
}

TEST_CASE("times_exp shifts every rate") {
    ExpPolyProfile a = ExpPolyProfile::exponential(2.0, cplx(1.0, -1.0));
    ExpPolyProfile s = a.times_exp(cplx(0.5));
    REQUIRE(s.term_count() == 1);
    CHECK(s.terms()[0].rate == cplx(1.5, -1.0));
}
