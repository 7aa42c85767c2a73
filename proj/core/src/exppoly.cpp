#include "slopegyre/exppoly.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace slopegyre {

namespace {

void trim_coef(std::vector<cplx>& c) {
    while (!c.empty() && c.back() == cplx(0)) c.pop_back();
}

bool rates_close(cplx a, cplx b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= ExpPolyProfile::confluence_rtol() * std::max(scale, 1e-300);
}

// ∫_0^∞ z^j exp(-mu z) dz = j! / mu^{j+1}
cplx halfline_moment(int j, cplx mu) {
    cplx r = 1.0 / mu;
    for (int k = 1; k <= j; ++k) r *= double(k) / mu;
    return r;
}

} // namespace

ExpPolyProfile ExpPolyProfile::exponential(cplx amp, cplx rate) {
    ExpPolyProfile p;
    if (amp != cplx(0)) p.add_term(rate, {amp});
    return p;
}

ExpPolyProfile ExpPolyProfile::term(cplx rate, std::vector<cplx> coef) {
    ExpPolyProfile p;
    p.add_term(rate, std::move(coef));
    return p;
}

int ExpPolyProfile::max_degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, static_cast<int>(t.coef.size()) - 1);
    return d;
}

cplx ExpPolyProfile::eval(double z) const {
    cplx acc(0);
    for (const auto& t : terms_) {
        cplx p(0);
        for (int k = static_cast<int>(t.coef.size()) - 1; k >= 0; --k) p = p * z + t.coef[k];
        acc += p * std::exp(-t.rate * z);
    }
    return acc;
}

cplx ExpPolyProfile::value0() const {
    cplx acc(0);
    for (const auto& t : terms_)
        if (!t.coef.empty()) acc += t.coef[0];
    return acc;
}

ExpPolyProfile ExpPolyProfile::dz() const {
    ExpPolyProfile out;
    for (const auto& t : terms_) {
        // d/dz [P e^{-mu z}] = (P' - mu P) e^{-mu z}
        std::vector<cplx> c(t.coef.size(), cplx(0));
        for (size_t j = 0; j + 1 < t.coef.size(); ++j) c[j] = t.coef[j + 1] * double(j + 1);
        for (size_t j = 0; j < t.coef.size(); ++j) c[j] -= t.rate * t.coef[j];
        out.add_term(t.rate, std::move(c));
    }
    return out;
}

ExpPolyProfile ExpPolyProfile::dz(int n) const {
    ExpPolyProfile out = *this;
    for (int i = 0; i < n; ++i) out = out.dz();
    return out;
}

ExpPolyProfile ExpPolyProfile::conjugated() const {
    ExpPolyProfile out;
    for (const auto& t : terms_) {
        std::vector<cplx> c(t.coef.size());
        for (size_t j = 0; j < t.coef.size(); ++j) c[j] = std::conj(t.coef[j]);
        out.add_term(std::conj(t.rate), std::move(c));
    }
    return out;
}

ExpPolyProfile ExpPolyProfile::times_exp(cplx gamma) const {
    ExpPolyProfile out;
    for (const auto& t : terms_) out.add_term(t.rate + gamma, t.coef);
    return out;
}

ExpPolyProfile ExpPolyProfile::times_zpow(int n) const {
    ExpPolyProfile out;
    for (const auto& t : terms_) {
        std::vector<cplx> c(t.coef.size() + n, cplx(0));
        for (size_t j = 0; j < t.coef.size(); ++j) c[j + n] = t.coef[j];
        out.add_term(t.rate, std::move(c));
    }
    return out;
}

ExpPolyProfile& ExpPolyProfile::operator+=(const ExpPolyProfile& o) {
    for (const auto& t : o.terms_) add_term(t.rate, t.coef);
    return *this;
}

ExpPolyProfile ExpPolyProfile::operator+(const ExpPolyProfile& o) const {
    ExpPolyProfile out = *this;
    out += o;
    return out;
}

ExpPolyProfile ExpPolyProfile::operator-(const ExpPolyProfile& o) const {
    return *this + o * cplx(-1.0);
}

ExpPolyProfile ExpPolyProfile::operator*(cplx s) const {
    if (s == cplx(0)) return {};
    ExpPolyProfile out;
    for (const auto& t : terms_) {
        std::vector<cplx> c(t.coef);
        for (auto& x : c) x *= s;
        out.add_term(t.rate, std::move(c));
    }
    return out;
}

ExpPolyProfile ExpPolyProfile::operator*(const ExpPolyProfile& o) const {
    // bulk build + one merge pass (pairwise add_term would be quadratic)
    std::vector<ExpTerm> raw;
    raw.reserve(terms_.size() * o.terms_.size());
    for (const auto& a : terms_)
        for (const auto& b : o.terms_) {
            std::vector<cplx> c(a.coef.size() + b.coef.size() - 1, cplx(0));
            for (size_t i = 0; i < a.coef.size(); ++i)
                for (size_t j = 0; j < b.coef.size(); ++j) c[i + j] += a.coef[i] * b.coef[j];
            raw.push_back({a.rate + b.rate, std::move(c)});
        }
    std::sort(raw.begin(), raw.end(), [](const ExpTerm& x, const ExpTerm& y) {
        if (x.rate.real() != y.rate.real()) return x.rate.real() < y.rate.real();
        return x.rate.imag() < y.rate.imag();
    });
    ExpPolyProfile out;
    for (auto& t : raw) {
        if (!out.terms_.empty() && rates_close(out.terms_.back().rate, t.rate)) {
            auto& dst = out.terms_.back();
            if (dst.coef.size() < t.coef.size()) dst.coef.resize(t.coef.size(), cplx(0));
            for (size_t j = 0; j < t.coef.size(); ++j) dst.coef[j] += t.coef[j];
        } else {
            out.terms_.push_back(std::move(t));
        }
    }
    for (auto& t : out.terms_) trim_coef(t.coef);
    out.terms_.erase(std::remove_if(out.terms_.begin(), out.terms_.end(),
                                    [](const ExpTerm& t) { return t.coef.empty(); }),
                     out.terms_.end());
    return out;
}

cplx ExpPolyProfile::integral0inf() const {
    cplx acc(0);
    for (const auto& t : terms_) {
        assert(t.rate.real() > 0.0);
        for (size_t j = 0; j < t.coef.size(); ++j) acc += t.coef[j] * halfline_moment(int(j), t.rate);
    }
    return acc;
}

namespace {

// sum over term pairs of  c_a conj(c_b) (m_{a+b} + w2 m_{a+b+2}) with
// m_k = k!/(mu_a + conj(mu_b))^{k+1}; avoids materializing |f|^2
double pair_integral(const std::vector<ExpTerm>& terms, bool with_z2) {
    cplx acc(0);
    for (const auto& ta : terms)
        for (const auto& tb : terms) {
            const cplx mu = ta.rate + std::conj(tb.rate);
            for (size_t a = 0; a < ta.coef.size(); ++a)
                for (size_t b = 0; b < tb.coef.size(); ++b) {
                    const cplx w = ta.coef[a] * std::conj(tb.coef[b]);
                    acc += w * halfline_moment(int(a + b), mu);
                    if (with_z2) acc += w * halfline_moment(int(a + b + 2), mu);
                }
        }
    return acc.real();
}

} // namespace

double ExpPolyProfile::l2sq() const { return pair_integral(terms_, false); }

double ExpPolyProfile::weighted_l2sq() const { return pair_integral(terms_, true); }

double ExpPolyProfile::l1_bound() const {
    double acc = 0.0;
    for (const auto& t : terms_) {
        const double re = t.rate.real();
        assert(re > 0.0);
        for (size_t j = 0; j < t.coef.size(); ++j)
            acc += std::abs(t.coef[j]) * std::abs(halfline_moment(int(j), cplx(re, 0.0)));
    }
    return acc;
}

double ExpPolyProfile::max_abs_sampled(double z0, double z1, int n) const {
    double m = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = z0 + (z1 - z0) * double(i) / double(std::max(1, n - 1));
        m = std::max(m, std::abs(eval(z)));
    }
    return m;
}

void ExpPolyProfile::add_term(cplx rate, std::vector<cplx> coef) {
    trim_coef(coef);
    if (coef.empty()) return;
    for (auto& t : terms_) {
        if (rates_close(t.rate, rate)) {
            if (t.coef.size() < coef.size()) t.coef.resize(coef.size(), cplx(0));
            for (size_t j = 0; j < coef.size(); ++j) t.coef[j] += coef[j];
            trim_coef(t.coef);
            if (t.coef.empty()) {
                terms_.erase(terms_.begin() + (&t - terms_.data()));
            }
            return;
        }
    }
    terms_.push_back({rate, std::move(coef)});
    sort_terms();
}

ExpPolyProfile ExpPolyProfile::compressed(double rel_floor) const {
    if (rel_floor <= 0.0 || terms_.empty()) return *this;
    double peak = 0.0;
    for (const auto& t : terms_)
        for (const auto& c : t.coef) peak = std::max(peak, std::abs(c));
    const double floor = peak * rel_floor;
    ExpPolyProfile out;
    for (const auto& t : terms_) {
        double m = 0.0;
        for (const auto& c : t.coef) m = std::max(m, std::abs(c));
        if (m > floor) out.terms_.push_back(t);
    }
    return out;
}

void ExpPolyProfile::sort_terms() {
    std::sort(terms_.begin(), terms_.end(), [](const ExpTerm& a, const ExpTerm& b) {
        if (a.rate.real() != b.rate.real()) return a.rate.real() < b.rate.real();
        return a.rate.imag() < b.rate.imag();
    });
}

} // namespace slopegyre
