#include "slopegyre/poly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace slopegyre {

void Poly::trim() {
    while (coef_.size() > 1 && coef_.back() == cplx(0)) coef_.pop_back();
}

cplx Poly::eval(cplx x) const {
    cplx acc(0);
    for (int k = degree(); k >= 0; --k) acc = acc * x + coef_[k];
    return acc;
}

double Poly::eval_abs(cplx x) const {
    double acc = 0.0, ax = std::abs(x), p = 1.0;
    for (const cplx& c : coef_) {
        acc += std::abs(c) * p;
        p *= ax;
    }
    return acc;
}

Poly Poly::derivative() const {
    if (coef_.size() <= 1) return Poly::constant(0.0);
    std::vector<cplx> d(coef_.size() - 1);
    for (size_t k = 1; k < coef_.size(); ++k) d[k - 1] = coef_[k] * double(k);
    return Poly(std::move(d));
}

Poly Poly::operator+(const Poly& o) const {
    std::vector<cplx> r(std::max(coef_.size(), o.coef_.size()), cplx(0));
    for (size_t k = 0; k < coef_.size(); ++k) r[k] += coef_[k];
    for (size_t k = 0; k < o.coef_.size(); ++k) r[k] += o.coef_[k];
    return Poly(std::move(r));
}

Poly Poly::operator-(const Poly& o) const { return *this + o * cplx(-1.0); }

Poly Poly::operator*(const Poly& o) const {
    std::vector<cplx> r(coef_.size() + o.coef_.size() - 1, cplx(0));
    for (size_t i = 0; i < coef_.size(); ++i)
        for (size_t j = 0; j < o.coef_.size(); ++j) r[i + j] += coef_[i] * o.coef_[j];
    return Poly(std::move(r));
}

Poly Poly::operator*(cplx s) const {
    std::vector<cplx> r(coef_);
    for (cplx& c : r) c *= s;
    return Poly(std::move(r));
}

namespace {

// One Newton polish pass in long double precision; bails out when the step
// stops shrinking the residual.
std::complex<long double> polish(const std::vector<cplx>& coef, std::complex<long double> x) {
    auto evalp = [&](std::complex<long double> z, std::complex<long double>& dp) {
        std::complex<long double> p(0), d(0);
        for (int k = static_cast<int>(coef.size()) - 1; k >= 0; --k) {
            d = d * z + p;
            p = p * z + std::complex<long double>(coef[k].real(), coef[k].imag());
        }
        dp = d;
        return p;
    };
    for (int it = 0; it < 8; ++it) {
        std::complex<long double> dp;
        std::complex<long double> p = evalp(x, dp);
        if (std::abs(dp) == 0.0L) break;
        std::complex<long double> step = p / dp;
        if (std::abs(step) <= 1e-22L * (1.0L + std::abs(x))) break;
        x -= step;
    }
    return x;
}

} // namespace

std::vector<cplx> Poly::roots() const {
    const int n = degree();
    std::vector<cplx> out;
    if (n < 1) return out;
    // Scale out the leading coefficient, then companion matrix.
    std::vector<cplx> monic(coef_);
    cplx lead = monic.back();
    for (cplx& c : monic) c /= lead;

    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(n, n);
    for (int i = 1; i < n; ++i) C(i, i - 1) = 1.0;
    for (int i = 0; i < n; ++i) C(i, n - 1) = -monic[i];

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        std::complex<long double> r(es.eigenvalues()[i].real(), es.eigenvalues()[i].imag());
        r = polish(coef_, r);
        out.emplace_back(static_cast<double>(r.real()), static_cast<double>(r.imag()));
    }
    // Deterministic order: by real part, then imaginary part.
    std::sort(out.begin(), out.end(), [](const cplx& a, const cplx& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

} // namespace slopegyre
