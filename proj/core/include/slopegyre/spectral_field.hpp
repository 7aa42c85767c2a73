#ifndef SLOPEGYRE_SPECTRAL_FIELD_HPP
#define SLOPEGYRE_SPECTRAL_FIELD_HPP

#include <cmath>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "slopegyre/exppoly.hpp"
#include "slopegyre/regime.hpp"

namespace slopegyre {

// Discrete tangential Fourier grid over the periodic box
// [-Lx/2, Lx/2) x [-Ly/2, Ly/2) with wavenumbers xi = (2 pi k / Lx, 2 pi l / Ly).
struct ModeGrid {
    double Lx = 40.0, Ly = 40.0;
    int Nx = 64, Ny = 64;

    int size() const { return Nx * Ny; }
    int index(int ix, int iy) const { return ix * Ny + iy; }
    int kx(int ix) const { return ix <= Nx / 2 - 1 ? ix : ix - Nx; }
    int ky(int iy) const { return iy <= Ny / 2 - 1 ? iy : iy - Ny; }
    double xi_x(int ix) const { return 2.0 * M_PI * kx(ix) / Lx; }
    double xi_y(int iy) const { return 2.0 * M_PI * ky(iy) / Ly; }
    double x_sample(int i) const { return -0.5 * Lx + Lx * double(i) / Nx; }
    double y_sample(int j) const { return -0.5 * Ly + Ly * double(j) / Ny; }
    // index of the conjugate mode (-kx, -ky); Nyquist rows map to themselves
    int conj_index(int ix, int iy) const {
        const int cx = ix == 0 ? 0 : Nx - ix;
        const int cy = iy == 0 ? 0 : Ny - iy;
        return index(cx, cy);
    }
    bool operator==(const ModeGrid& o) const {
        return Lx == o.Lx && Ly == o.Ly && Nx == o.Nx && Ny == o.Ny;
    }
};

// Accumulates non-fatal diagnostics (aliasing, skipped modes, ...).
struct Diagnostics {
    std::vector<std::string> warnings;
    void warn(const std::string& w) { warnings.push_back(w); }
    bool has(const std::string& kind) const;
};

// A scalar field at one time frequency: per-mode complex amplitude carrying an
// exponential-polynomial profile in z. Immutable value semantics; copying is
// deep.
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(const ModeGrid& g, double omega)
        : grid_(g), omega_(omega), amp_(g.size()) {}

    const ModeGrid& grid() const { return grid_; }
    double omega() const { return omega_; }

    const ExpPolyProfile& at(int ix, int iy) const { return amp_[grid_.index(ix, iy)]; }
    ExpPolyProfile& at(int ix, int iy) { return amp_[grid_.index(ix, iy)]; }
    const ExpPolyProfile& at(int idx) const { return amp_[idx]; }
    ExpPolyProfile& at(int idx) { return amp_[idx]; }

    bool empty() const { return amp_.empty(); }

    SpectralField operator+(const SpectralField& o) const;
    SpectralField operator-(const SpectralField& o) const;
    SpectralField operator*(cplx s) const;
    SpectralField& operator+=(const SpectralField& o);

    // max over modes of the per-mode relative deviation from
    // amp(-xi) = conj(amp(xi)), measured at sampled z.
    double reality_defect() const;

    // Fraction of spectral energy with |ky index| in the outer third.
    double outer_third_fraction_y() const;

    double l2sq() const;           // sum over modes of profile L2^2 (box factor omitted)
    double h1xy_l2z_sq() const;    // sum of (1+|xi|^2) * profile L2^2

    SpectralField map(const std::function<ExpPolyProfile(int, const ExpPolyProfile&)>& fn) const;
    SpectralField compressed(double rel_floor) const;

    // Columnar text export: one row per retained term.
    void write_columnar(std::ostream& os, const std::string& name) const;

private:
    ModeGrid grid_;
    double omega_ = 0.0;
    std::vector<ExpPolyProfile> amp_;
};

struct Vec2Field {
    SpectralField c1, c2;  // components along e1 (east) and e2 (north)
};
struct Vec3Field {
    SpectralField c1, c2, c3;  // global frame components
};

// ---- differential operators (exact per-mode symbolic action) --------------
// Global-frame derivatives expressed in local tangential modes:
//   d1 = c dx - s dz,   d2 = dy,   d3 = c dz + s dx
SpectralField dx(const SpectralField& f);
SpectralField dy(const SpectralField& f);
SpectralField dzf(const SpectralField& f);
SpectralField d1(const SpectralField& f, const DerivedScales& sc);
SpectralField d2(const SpectralField& f);
SpectralField d3(const SpectralField& f, const DerivedScales& sc);
SpectralField lap_h(const SpectralField& f, const DerivedScales& sc);   // d1^2 + d2^2
SpectralField lap(const SpectralField& f);                              // dx^2+dy^2+dz^2
SpectralField lap_nu(const SpectralField& f, const DerivedScales& sc);  // nu_h lap_h + nu_3 d3^2

// dt - Delta_nu with dt acting as multiplication by i*omega
SpectralField dt_minus_lapnu(const SpectralField& f, const DerivedScales& sc);

enum class DiffOp { Dx, Dy, Dz, D1, D2, D3, LapH, Lap, LapNu, L2Tilde, L2 };
SpectralField apply_diff(const SpectralField& f, DiffOp op, const DerivedScales& sc);

// L1 v_h = (dt - Delta_nu) v_h + beta y v_h^perp   (vector operator)
Vec2Field l1_op(const Vec2Field& v, const DerivedScales& sc, Diagnostics& diag);
// L2~ phi = (dt Delta_h + beta d1 - Delta_nu Delta_h) phi
SpectralField l2_tilde(const SpectralField& f, const DerivedScales& sc);
// L2 phi = (dt Delta + beta d1 - Delta_nu Delta_h) phi
SpectralField l2_full(const SpectralField& f, const DerivedScales& sc);

// grad_h^perp phi = (-d2 phi, d1 phi)
Vec2Field grad_h_perp(const SpectralField& f, const DerivedScales& sc);
// curl_h v = d1 v2 - d2 v1 ;  div_h v = d1 v1 + d2 v2
SpectralField curl_h(const Vec2Field& v, const DerivedScales& sc);
SpectralField div_h(const Vec2Field& v, const DerivedScales& sc);
Vec2Field perp(const Vec2Field& v);  // (-v2, v1)

// Pseudo-spectral multiplication by the periodic sawtooth box coordinate y:
// per fixed (kx row, z-structure term) inverse transform in y, multiply by the
// sampled coordinate (raised to `power`), transform forward. Records
// AliasWarning in diag when the input occupies the outer third of the ky range.
SpectralField multiply_by_y(const SpectralField& f, Diagnostics& diag, int power = 1);

// Dense complex samples on the (x, y) grid of the amplitude at fixed z.
std::vector<cplx> physical_samples(const SpectralField& f, double z);

// Zero the ky = 0 row: the solver state lives in the sector with nonzero
// northward wavenumber (the admissible class of the small-ky hypothesis);
// y-products regenerate slow content, which the pipeline projects out and
// the residual report accounts for separately.
SpectralField project_slow_ky(const SpectralField& f);
// Restriction to the ky = 0 row (the complement of the projection).
SpectralField slow_ky_part(const SpectralField& f);

// alias-check threshold (relative outer-third energy)
inline constexpr double kAliasWarnFraction = 1e-10;

} // namespace slopegyre

#endif
