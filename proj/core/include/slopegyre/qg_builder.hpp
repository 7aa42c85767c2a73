#ifndef SLOPEGYRE_QG_BUILDER_HPP
#define SLOPEGYRE_QG_BUILDER_HPP

#include <optional>

#include "slopegyre/forcing.hpp"
#include "slopegyre/green_kernel.hpp"

namespace slopegyre {

// Root sets and Green kernels for every solvable mode of the grid. Modes can
// be out of the solvable set (mean mode, Nyquist rows, (xi_y, omega) = (0,0))
// or flagged by the separation check; both kinds are skipped and counted.
struct KernelTable {
    ModeGrid grid;
    double omega = 0.0;
    std::vector<char> active;
    std::vector<RootSet> roots;
    std::vector<GreenKernel> kernels;
    int n_flagged = 0;     // near-crossing, excluded from solves
    int n_degenerate = 0;  // outside the solvable set

    bool is_active(int idx) const { return active[idx] != 0; }
    const GreenKernel& at(int idx) const { return kernels[idx]; }
};

KernelTable build_kernel_table(const ModeGrid& grid, const DerivedScales& sc);

// Convolve the kernel with the per-mode profiles of a source field.
SpectralField green_convolve_field(const KernelTable& table, const SpectralField& src,
                                   double* dropped_energy = nullptr);

// Per-mode boundary-layer coefficients of one expansion order.
struct ModeCoeffs {
    cplx c1{}, c2{}, cE{};
};

struct FamilyFields {
    Vec3Field u;
    SpectralField p, rho;
    static FamilyFields zeros(const ModeGrid& g, double omega);
};

// One order of the expansion: interior + Munk layer + Ekman layer families
// with their pressure/density companions and layer coefficients.
struct ExpansionTerm {
    int k = 0;
    FamilyFields interior, munk, ekman;
    std::vector<ModeCoeffs> coeffs;

    Vec3Field total_u() const;
    SpectralField total_p() const;
    SpectralField total_rho() const;
};

// Geostrophic order: interior stream function from the Green convolution of
// the forcing curl, plus the two-exponential layer closing psi = dz psi = 0.
ExpansionTerm build_order0(const Forcing& f, const KernelTable& table,
                           const DerivedScales& sc);

// Explicit right-hand side of the first-corrector pressure equation
// (equals curl_h L1 (beta f_h^perp + L1 grad_h p0), which tests verify).
SpectralField corrector_rhs(const SpectralField& p0_total, const Forcing& f,
                            const DerivedScales& sc, Diagnostics& diag);

// First corrector: pressure from the Green convolution of corrector_rhs,
// velocity from the order-balance formulas, Munk coefficients from the
// explicit 2x2 inverse. The Ekman part is structurally empty at this order.
ExpansionTerm build_order1(const ExpansionTerm& order0, const Forcing& f,
                           const KernelTable& table, const DerivedScales& sc,
                           Diagnostics& diag);

struct TraceRecord {
    int ix = 0, iy = 0;
    cplx lhs1{}, rhs1{};
    double gap1 = 0.0;  // |lhs1-rhs1| / (beta^{2/3} nu_eff^{1/3})
    cplx lhs2{}, rhs2{};
    double gap2 = 0.0;
};

// Effective boundary traces of the corrector pressure against their
// closed-form main-order values, gap normalized by beta^{2/3} nu_eff^{1/3}.
// Throws HypothesisViolated when nu_3 exceeds 0.1 nu_h^{4/3} beta^{-1/3}.
std::vector<TraceRecord> effective_traces_p1(const ExpansionTerm& order0,
                                             const ExpansionTerm& order1, const Forcing& f,
                                             const KernelTable& table,
                                             const DerivedScales& sc);

// Shared helper: solve the 2x2 layer system
//   sum_j c_j (-i xi_y, i c xi_x + s mu_j)^T = -trace
// by the explicit inverse; xi_y = 0 falls back to the single-exponential lift
// and throws SingularTraceSystem when the first trace component is not
// negligible.
std::pair<cplx, cplx> solve_layer_coeffs(const std::array<cplx, 2>& mu, Xi xi,
                                         const DerivedScales& sc, cplx trace1, cplx trace2,
                                         double trace_scale);

} // namespace slopegyre

#endif
