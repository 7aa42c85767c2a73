#ifndef SLOPEGYRE_EXPPOLY_HPP
#define SLOPEGYRE_EXPPOLY_HPP

#include <complex>
#include <vector>

#include "slopegyre/poly.hpp"

namespace slopegyre {

// One term P(z)·exp(-rate·z); coef[j] multiplies z^j.
struct ExpTerm {
    cplx rate;
    std::vector<cplx> coef;
};

// A z-profile that is a finite sum of polynomial-times-decaying-exponential
// terms. The class is closed under differentiation, addition, products,
// multiplication by exp(-gamma z), and carries exact half-line integrals.
// All vertical structure in the solver lives in this class, which is what
// makes residual evaluation analytic in z.
class ExpPolyProfile {
public:
    ExpPolyProfile() = default;

    static ExpPolyProfile zero() { return {}; }
    // amp * exp(-rate z)
    static ExpPolyProfile exponential(cplx amp, cplx rate);
    // (coef[0] + coef[1] z + ...) * exp(-rate z)
    static ExpPolyProfile term(cplx rate, std::vector<cplx> coef);

    bool is_zero() const { return terms_.empty(); }
    const std::vector<ExpTerm>& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    int max_degree() const;

    cplx eval(double z) const;
    cplx value0() const;                    // exact value at z = 0

    ExpPolyProfile dz() const;              // exact d/dz
    ExpPolyProfile dz(int n) const;
    ExpPolyProfile conjugated() const;      // complex conjugate profile
    ExpPolyProfile times_exp(cplx gamma) const;   // multiply by exp(-gamma z)
    ExpPolyProfile times_zpow(int n) const;       // multiply by z^n

    ExpPolyProfile& operator+=(const ExpPolyProfile& o);
    ExpPolyProfile operator+(const ExpPolyProfile& o) const;
    ExpPolyProfile operator-(const ExpPolyProfile& o) const;
    ExpPolyProfile operator*(cplx s) const;
    ExpPolyProfile operator*(const ExpPolyProfile& o) const;

    // Exact ∫_0^∞ f(z) dz. Requires Re(rate) > 0 on every term.
    cplx integral0inf() const;
    // Exact ∫_0^∞ |f|^2 dz and ∫_0^∞ (1+z^2)|f|^2 dz.
    double l2sq() const;
    double weighted_l2sq() const;
    // Upper bound for ∫_0^∞ |f| dz (triangle inequality per term).
    double l1_bound() const;

    double max_abs_sampled(double z0, double z1, int n) const;

    // Adds a term, merging into an existing rate when the two rates differ by
    // less than confluence_rtol() * max(|rates|).
    void add_term(cplx rate, std::vector<cplx> coef);

    // Drop terms whose coefficients all fall below rel_floor times the
    // largest coefficient magnitude in the profile.
    ExpPolyProfile compressed(double rel_floor) const;

    static double confluence_rtol() { return 1e-8; }

private:
    void sort_terms();
    std::vector<ExpTerm> terms_;
};

} // namespace slopegyre

#endif
