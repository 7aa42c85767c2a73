#ifndef SLOPEGYRE_POLY_HPP
#define SLOPEGYRE_POLY_HPP

#include <complex>
#include <vector>

namespace slopegyre {

using cplx = std::complex<double>;

// Dense complex polynomial, coef[k] multiplies x^k. Used for the Munk
// characteristic quartic, the rescaled cubic, and the Ekman degree-6
// determinant polynomial.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cplx> coef) : coef_(std::move(coef)) { trim(); }
    static Poly constant(cplx c) { return Poly({c}); }
    static Poly linear(cplx c0, cplx c1) { return Poly({c0, c1}); }

    int degree() const { return static_cast<int>(coef_.size()) - 1; }
    const std::vector<cplx>& coef() const { return coef_; }
    cplx operator[](int k) const {
        return (k >= 0 && k < static_cast<int>(coef_.size())) ? coef_[k] : cplx(0);
    }

    cplx eval(cplx x) const;
    // Sum of |c_k x^k|, the natural scale for relative residuals.
    double eval_abs(cplx x) const;
    Poly derivative() const;

    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly operator*(cplx s) const;

    // All complex roots via balanced companion-matrix eigensolve, each polished
    // by a few Newton steps in extended precision.
    std::vector<cplx> roots() const;

private:
    void trim();
    std::vector<cplx> coef_;
};

} // namespace slopegyre

#endif
