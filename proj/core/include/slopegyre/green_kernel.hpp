#ifndef SLOPEGYRE_GREEN_KERNEL_HPP
#define SLOPEGYRE_GREEN_KERNEL_HPP

#include "slopegyre/exppoly.hpp"
#include "slopegyre/munk_roots.hpp"

namespace slopegyre {

// Per-mode Green function of the quasi-geostrophic operator: a pair of
// two-exponential branches matched across z = 0 by jump conditions on the
// first three derivatives, with the third-derivative jump -1/(s^2 nu_eff).
struct GreenKernel {
    RootSet roots;
    std::array<cplx, 2> Cp{};  // coefficients of exp(-mu_plus z), z > 0
    std::array<cplx, 2> Cm{};  // coefficients of exp(-mu_minus z), z < 0
    double nu_eff_s2 = 0.0;
    double lagrange_vs_solve = 0.0;  // relative agreement of the two routes
};

// Coefficients by the closed-form product, cross-validated against a dense
// solve of the 4x4 jump system. Throws IllConditioned when the dense solve
// residual exceeds 1e-8 or the roots are flagged as near-crossing.
GreenKernel build_kernel(const RootSet& roots, const DerivedScales& sc);

// Closed-form convolution (G * S)(z) for z >= 0 with an exponential-polynomial
// source; confluent source/root rates produce polynomial-degree bumps.
ExpPolyProfile convolve(const GreenKernel& k, const ExpPolyProfile& source);

// d^{k+1}/dz^{k+1} (G*S) via the trace identity
//   dz^{k+1}(G*S) = G * dz^{k+1}S + sum_m dz^{k-m}G(z) * dz^m S(0).
ExpPolyProfile boundary_derivative(const GreenKernel& k, const ExpPolyProfile& source, int korder);

// Computable constant c with |(G*e^{-gamma z})(z)| <= c e^{-gamma z};
// throws GammaTooLarge unless gamma <= min Re(mu_plus)/2.
double exp_decay_bound(const GreenKernel& k, double gamma);

// z>0 branch of the kernel as a profile (for trace identities and exports).
ExpPolyProfile green_plus_profile(const GreenKernel& k);
// kernel value at any z (both branches)
cplx green_eval(const GreenKernel& k, double z);
// m-th z-derivative one-sided limits at 0
cplx green_deriv0(const GreenKernel& k, int m, bool plus_side);

// The per-mode quasi-geostrophic operator
//   i w (dz^2-|xi|^2) + beta (i c xi_x - s dz) - Delta_nu Delta_h
// applied symbolically to a profile; the defining property of the kernel.
ExpPolyProfile apply_qg_operator(const ExpPolyProfile& f, Xi xi, double omega,
                                 const DerivedScales& sc);

} // namespace slopegyre

#endif
