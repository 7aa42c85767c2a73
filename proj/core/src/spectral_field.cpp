#include "slopegyre/spectral_field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <ostream>

#include "fft_internal.hpp"
#include "slopegyre/errors.hpp"
#include "slopegyre/parallel.hpp"

namespace slopegyre {

namespace {
std::atomic<int> g_threads{2};
}
void set_num_threads(int n) { g_threads = std::max(1, n); }
int num_threads() { return g_threads.load(); }

bool Diagnostics::has(const std::string& kind) const {
    for (const auto& w : warnings)
        if (w.rfind(kind, 0) == 0) return true;
    return false;
}

// ---- fft plumbing ----------------------------------------------------------
namespace fft {

// Cached unaligned in-place plans per size; plan creation is serialized,
// execution through the new-array interface is thread-safe.
struct PlanPair {
    fftw_plan fwd = nullptr, bwd = nullptr;
};

PlanPair& plans_for(int n) {
    static std::mutex mtx;
    static std::map<int, PlanPair> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<std::complex<double>> dummy(n);
    auto* p = reinterpret_cast<fftw_complex*>(dummy.data());
    PlanPair pp;
    pp.fwd = fftw_plan_dft_1d(n, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    pp.bwd = fftw_plan_dft_1d(n, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    return cache.emplace(n, pp).first->second;
}

void forward(std::vector<cplx>& buf) {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plans_for(int(buf.size())).fwd, p, p);
}
void backward(std::vector<cplx>& buf) {
    auto* p = reinterpret_cast<fftw_complex*>(buf.data());
    fftw_execute_dft(plans_for(int(buf.size())).bwd, p, p);
}

} // namespace fft

// ---- SpectralField basics --------------------------------------------------

SpectralField SpectralField::operator+(const SpectralField& o) const {
    SpectralField r = *this;
    r += o;
    return r;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
    if (empty()) {
        *this = o;
        return *this;
    }
    if (o.empty()) return *this;
    for (int i = 0; i < grid_.size(); ++i) amp_[i] += o.amp_[i];
    return *this;
}

SpectralField SpectralField::operator-(const SpectralField& o) const {
    return *this + o * cplx(-1.0);
}

SpectralField SpectralField::operator*(cplx s) const {
    SpectralField r = *this;
    for (auto& a : r.amp_) a = a * s;
    return r;
}

double SpectralField::reality_defect() const {
    double worst = 0.0, scale = 0.0;
    const double zs[] = {0.0, 0.5, 1.3};
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int iy = 0; iy < grid_.Ny; ++iy) {
            const int i = grid_.index(ix, iy), j = grid_.conj_index(ix, iy);
            for (double z : zs) {
                const cplx v = amp_[i].eval(z);
                const cplx w = amp_[j].eval(z);
                worst = std::max(worst, std::abs(v - std::conj(w)));
                scale = std::max(scale, std::abs(v));
            }
        }
    return scale > 0 ? worst / scale : 0.0;
}

double SpectralField::outer_third_fraction_y() const {
    double outer = 0.0, total = 0.0;
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int iy = 0; iy < grid_.Ny; ++iy) {
            const auto& a = amp_[grid_.index(ix, iy)];
            if (a.is_zero()) continue;
            const double e = a.l2sq();
            total += e;
            if (std::abs(grid_.ky(iy)) > grid_.Ny / 3) outer += e;
        }
    return total > 0 ? outer / total : 0.0;
}

double SpectralField::l2sq() const {
    double acc = 0.0;
    for (const auto& a : amp_) acc += a.is_zero() ? 0.0 : a.l2sq();
    return acc;
}

double SpectralField::h1xy_l2z_sq() const {
    double acc = 0.0;
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int iy = 0; iy < grid_.Ny; ++iy) {
            const auto& a = amp_[grid_.index(ix, iy)];
            if (a.is_zero()) continue;
            const double xx = grid_.xi_x(ix), yy = grid_.xi_y(iy);
            acc += (1.0 + xx * xx + yy * yy) * a.l2sq();
        }
    return acc;
}

SpectralField SpectralField::map(
    const std::function<ExpPolyProfile(int, const ExpPolyProfile&)>& fn) const {
    SpectralField out(grid_, omega_);
    parallel_for(grid_.size(), [&](int i) { out.amp_[i] = fn(i, amp_[i]); });
    return out;
}

SpectralField SpectralField::compressed(double rel_floor) const {
    SpectralField out(grid_, omega_);
    for (int i = 0; i < grid_.size(); ++i) out.amp_[i] = amp_[i].compressed(rel_floor);
    return out;
}

void SpectralField::write_columnar(std::ostream& os, const std::string& name) const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "# field=%s Lx=%.17g Ly=%.17g Nx=%d Ny=%d omega=%.17g\n",
                  name.c_str(), grid_.Lx, grid_.Ly, grid_.Nx, grid_.Ny, omega_);
    os << buf << "# xi_x xi_y term re_mu im_mu coeffs(re im ...)\n";
    for (int ix = 0; ix < grid_.Nx; ++ix)
        for (int iy = 0; iy < grid_.Ny; ++iy) {
            const auto& a = amp_[grid_.index(ix, iy)];
            int ti = 0;
            for (const auto& t : a.terms()) {
                std::snprintf(buf, sizeof buf, "%.17g %.17g %d %.17g %.17g", grid_.xi_x(ix),
                              grid_.xi_y(iy), ti++, t.rate.real(), t.rate.imag());
                os << buf;
                for (const auto& c : t.coef) {
                    std::snprintf(buf, sizeof buf, " %.17g %.17g", c.real(), c.imag());
                    os << buf;
                }
                os << "\n";
            }
        }
}

// ---- differential operators ------------------------------------------------

namespace {

template <typename Fn>
SpectralField per_mode(const SpectralField& f, Fn&& fn) {
    SpectralField out(f.grid(), f.omega());
    const ModeGrid& g = f.grid();
    parallel_for(g.Nx, [&](int ix) {
        for (int iy = 0; iy < g.Ny; ++iy) {
            const auto& a = f.at(ix, iy);
            if (a.is_zero()) continue;
            out.at(ix, iy) = fn(g.xi_x(ix), g.xi_y(iy), a);
        }
    });
    return out;
}

} // namespace

SpectralField dx(const SpectralField& f) {
    return per_mode(f, [](double xx, double, const ExpPolyProfile& a) {
        return a * cplx(0, xx);
    });
}

SpectralField dy(const SpectralField& f) {
    return per_mode(f, [](double, double yy, const ExpPolyProfile& a) {
        return a * cplx(0, yy);
    });
}

SpectralField dzf(const SpectralField& f) {
    return per_mode(f, [](double, double, const ExpPolyProfile& a) { return a.dz(); });
}

SpectralField d1(const SpectralField& f, const DerivedScales& sc) {
    return per_mode(f, [&sc](double xx, double, const ExpPolyProfile& a) {
        return a * cplx(0, sc.c * xx) - a.dz() * sc.s;
    });
}

SpectralField d2(const SpectralField& f) { return dy(f); }

SpectralField d3(const SpectralField& f, const DerivedScales& sc) {
    return per_mode(f, [&sc](double xx, double, const ExpPolyProfile& a) {
        return a * cplx(0, sc.s * xx) + a.dz() * sc.c;
    });
}

SpectralField lap_h(const SpectralField& f, const DerivedScales& sc) {
    // d1^2 + d2^2 expanded per mode: (i c xx - s dz)^2 - yy^2
    return per_mode(f, [&sc](double xx, double yy, const ExpPolyProfile& a) {
        const cplx icx(0, sc.c * xx);
        ExpPolyProfile r = a * (icx * icx - cplx(yy * yy));
        r += a.dz() * (-2.0 * sc.s * icx);
        r += a.dz(2) * (sc.s * sc.s);
        return r;
    });
}

SpectralField lap(const SpectralField& f) {
    return per_mode(f, [](double xx, double yy, const ExpPolyProfile& a) {
        return a.dz(2) - a * cplx(xx * xx + yy * yy);
    });
}

SpectralField lap_nu(const SpectralField& f, const DerivedScales& sc) {
    return per_mode(f, [&sc](double xx, double yy, const ExpPolyProfile& a) {
        const cplx icx(0, sc.c * xx);
        const cplx isx(0, sc.s * xx);
        // nu_h ((i c xx - s dz)^2 - yy^2) + nu_3 (i s xx + c dz)^2
        ExpPolyProfile r = a * (sc.nu_h * (icx * icx - cplx(yy * yy)) + sc.nu_3 * isx * isx);
        r += a.dz() * (-2.0 * sc.nu_h * sc.s * icx + 2.0 * sc.nu_3 * sc.c * isx);
        r += a.dz(2) * (sc.nu_h * sc.s * sc.s + sc.nu_3 * sc.c * sc.c);
        return r;
    });
}

SpectralField dt_minus_lapnu(const SpectralField& f, const DerivedScales& sc) {
    return f * cplx(0, sc.omega) - lap_nu(f, sc);
}

SpectralField apply_diff(const SpectralField& f, DiffOp op, const DerivedScales& sc) {
    switch (op) {
        case DiffOp::Dx: return dx(f);
        case DiffOp::Dy: return dy(f);
        case DiffOp::Dz: return dzf(f);
        case DiffOp::D1: return d1(f, sc);
        case DiffOp::D2: return d2(f);
        case DiffOp::D3: return d3(f, sc);
        case DiffOp::LapH: return lap_h(f, sc);
        case DiffOp::Lap: return lap(f);
        case DiffOp::LapNu: return lap_nu(f, sc);
        case DiffOp::L2Tilde: return l2_tilde(f, sc);
        case DiffOp::L2: return l2_full(f, sc);
    }
    return f;
}

Vec2Field l1_op(const Vec2Field& v, const DerivedScales& sc, Diagnostics& diag) {
    Vec2Field out;
    out.c1 = dt_minus_lapnu(v.c1, sc) + multiply_by_y(v.c2, diag) * cplx(-sc.beta);
    out.c2 = dt_minus_lapnu(v.c2, sc) + multiply_by_y(v.c1, diag) * cplx(sc.beta);
    return out;
}

SpectralField l2_tilde(const SpectralField& f, const DerivedScales& sc) {
    return lap_h(f, sc) * cplx(0, sc.omega) + d1(f, sc) * cplx(sc.beta) -
           lap_nu(lap_h(f, sc), sc);
}

SpectralField l2_full(const SpectralField& f, const DerivedScales& sc) {
    return lap(f) * cplx(0, sc.omega) + d1(f, sc) * cplx(sc.beta) - lap_nu(lap_h(f, sc), sc);
}

Vec2Field grad_h_perp(const SpectralField& f, const DerivedScales& sc) {
    return {d2(f) * cplx(-1.0), d1(f, sc)};
}

SpectralField curl_h(const Vec2Field& v, const DerivedScales& sc) {
    return d1(v.c2, sc) - d2(v.c1);
}

SpectralField div_h(const Vec2Field& v, const DerivedScales& sc) {
    return d1(v.c1, sc) + d2(v.c2);
}

Vec2Field perp(const Vec2Field& v) { return {v.c2 * cplx(-1.0), v.c1}; }

// ---- multiply_by_y ----------------------------------------------------------

namespace {

struct RateBucket {
    cplx rate;
    int max_deg = 0;
};

// Merge a rate into the bucket list under the profile confluence tolerance.
int bucket_for(std::vector<RateBucket>& buckets, cplx rate) {
    for (size_t i = 0; i < buckets.size(); ++i) {
        const double scale = std::max(std::abs(buckets[i].rate), std::abs(rate));
        if (std::abs(buckets[i].rate - rate) <=
            ExpPolyProfile::confluence_rtol() * std::max(scale, 1e-300))
            return int(i);
    }
    buckets.push_back({rate, 0});
    return int(buckets.size()) - 1;
}

} // namespace

SpectralField multiply_by_y(const SpectralField& f, Diagnostics& diag, int power) {
    const ModeGrid& g = f.grid();
    if (f.outer_third_fraction_y() > kAliasWarnFraction) {
        diag.warn("AliasWarning: ky spectrum occupies the outer third before y-multiply");
    }

    SpectralField out(g, f.omega());
    parallel_for(g.Nx, [&](int ix) {
        // Collect the union of z-structure (rate, degree) over the ky row.
        std::vector<RateBucket> buckets;
        std::vector<std::vector<int>> mode_bucket(g.Ny);  // per iy, bucket id per term
        bool any = false;
        for (int iy = 0; iy < g.Ny; ++iy) {
            const auto& a = f.at(ix, iy);
            mode_bucket[iy].reserve(a.terms().size());
            for (const auto& t : a.terms()) {
                const int b = bucket_for(buckets, t.rate);
                buckets[b].max_deg =
                    std::max(buckets[b].max_deg, int(t.coef.size()) - 1);
                mode_bucket[iy].push_back(b);
                any = true;
            }
        }
        if (!any) return;

        std::vector<cplx> line(g.Ny);
        for (size_t b = 0; b < buckets.size(); ++b) {
            for (int deg = 0; deg <= buckets[b].max_deg; ++deg) {
                bool nonzero = false;
                std::fill(line.begin(), line.end(), cplx(0));
                for (int iy = 0; iy < g.Ny; ++iy) {
                    const auto& a = f.at(ix, iy);
                    const auto& tb = mode_bucket[iy];
                    for (size_t ti = 0; ti < tb.size(); ++ti) {
                        if (tb[ti] != int(b)) continue;
                        const auto& t = a.terms()[ti];
                        if (deg < int(t.coef.size()) && t.coef[deg] != cplx(0)) {
                            line[iy] += t.coef[deg];
                            nonzero = true;
                        }
                    }
                }
                if (!nonzero) continue;
                // to samples: raw DFT coefs carry the (-1)^l phase of the
                // box-centered coordinate convention
                for (int iy = 0; iy < g.Ny; ++iy)
                    if (g.ky(iy) & 1) line[iy] = -line[iy];
                fft::backward(line);
                for (int j = 0; j < g.Ny; ++j) line[j] *= std::pow(g.y_sample(j), power);
                fft::forward(line);
                const double inv = 1.0 / g.Ny;
                for (int iy = 0; iy < g.Ny; ++iy) {
                    cplx v = line[iy] * inv;
                    if (g.ky(iy) & 1) v = -v;
                    if (v != cplx(0)) {
                        std::vector<cplx> coef(deg + 1, cplx(0));
                        coef[deg] = v;
                        out.at(ix, iy).add_term(buckets[b].rate, std::move(coef));
                    }
                }
            }
        }
    });
    return out;
}

SpectralField project_slow_ky(const SpectralField& f) {
    SpectralField out = f;
    const ModeGrid& g = f.grid();
    for (int ix = 0; ix < g.Nx; ++ix) out.at(ix, 0) = ExpPolyProfile::zero();
    return out;
}

SpectralField slow_ky_part(const SpectralField& f) {
    const ModeGrid& g = f.grid();
    SpectralField out(g, f.omega());
    for (int ix = 0; ix < g.Nx; ++ix) out.at(ix, 0) = f.at(ix, 0);
    return out;
}

std::vector<cplx> physical_samples(const SpectralField& f, double z) {
    const ModeGrid& g = f.grid();
    std::vector<cplx> vals(size_t(g.Nx) * g.Ny, cplx(0));
    // evaluate profiles, then 2D inverse transform (rows then columns)
    std::vector<cplx> modes(size_t(g.Nx) * g.Ny, cplx(0));
    for (int ix = 0; ix < g.Nx; ++ix)
        for (int iy = 0; iy < g.Ny; ++iy) {
            cplx v = f.at(ix, iy).eval(z);
            if ((g.kx(ix) + g.ky(iy)) & 1) v = -v;
            modes[size_t(ix) * g.Ny + iy] = v;
        }
    // inverse over y per row
    std::vector<cplx> line(g.Ny);
    for (int ix = 0; ix < g.Nx; ++ix) {
        std::copy_n(modes.begin() + size_t(ix) * g.Ny, g.Ny, line.begin());
        fft::backward(line);
        std::copy_n(line.begin(), g.Ny, vals.begin() + size_t(ix) * g.Ny);
    }
    // inverse over x per column
    std::vector<cplx> col(g.Nx);
    for (int iy = 0; iy < g.Ny; ++iy) {
        for (int ix = 0; ix < g.Nx; ++ix) col[ix] = vals[size_t(ix) * g.Ny + iy];
        fft::backward(col);
        for (int ix = 0; ix < g.Nx; ++ix) vals[size_t(ix) * g.Ny + iy] = col[ix];
    }
    return vals;
}

} // namespace slopegyre
