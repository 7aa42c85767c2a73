#ifndef SLOPEGYRE_EKMAN_LAYER_HPP
#define SLOPEGYRE_EKMAN_LAYER_HPP

#include <Eigen/Dense>

#include "slopegyre/munk_roots.hpp"

namespace slopegyre {

using Matrix5c = Eigen::Matrix<std::complex<double>, 5, 5>;

// One wave mode exp(i(omega t + xi.x x + xi.y y) - lambda z) of the f-plane
// system, with local-frame amplitude vector U = (U'_x, U'_y, U'_z, P, R).
struct EkmanMode {
    cplx lambda{};
    cplx r{};                     // viscous symbol at lambda
    std::array<cplx, 5> U{};      // exact amplitudes (U'_x normalized to 1)
    std::array<cplx, 5> U_ref{};  // leading-order reference amplitudes
    bool discard = false;
};

struct LayerRoots {
    EkmanMode mode1;     // boundary-layer root lambda1 (retained)
    cplx lambda2{};      // second layer root (always discarded)
    cplx lambda1_ref{}, lambda2_ref{};
    std::vector<cplx> all_roots;  // all six characteristic roots
};

enum class DiscardReason { RedundantWithMunk, BetaDominates };
std::string to_string(DiscardReason r);

// Viscous symbol r = i omega - nu_eff l^2 + 2 i c s xi_x (nu_3 - nu_h) l
//                    + nu_h (c^2 xi_x^2 + xi_y^2) + nu_3 s^2 xi_x^2.
cplx ekman_r(cplx lambda, Xi xi, double omega, const DerivedScales& sc);

// The full 5x5 mode matrix of the f-plane system in local coordinates.
Matrix5c ekman_matrix(cplx lambda, Xi xi, double omega, const DerivedScales& sc);

// Exact characteristic relation; multiplied by lambda^2 ctilde^2 epsilon^2 it
// becomes the degree-6 polynomial returned by ekman_char_poly.
cplx exact_determinant(cplx lambda, Xi xi, double omega, const DerivedScales& sc);
Poly ekman_char_poly(Xi xi, double omega, const DerivedScales& sc);

// Reduced 2x2 system on (U'_x, U'_y) after eliminating U'_z, P, R.
Eigen::Matrix2cd reduced_system(cplx lambda, Xi xi, double omega, const DerivedScales& sc);

// Solves the degree-6 polynomial exactly and matches the two large decaying
// roots against the closed-form layer scales. Throws RegimeError when the
// preconditions fail and MatchFailure when no root is within 30% of a
// reference.
LayerRoots layer_roots(Xi xi, double omega, const DerivedScales& sc);

// Exact nullspace of the reduced system at lambda1 with U'_x = 1, remaining
// amplitudes reconstructed from divergence, mass, and vertical momentum.
EkmanMode eigenvector_lambda1(const EkmanMode& mode, Xi xi, double omega,
                              const DerivedScales& sc);

// Why lambda2 is dropped in the given regime; throws InconsistentRegime when
// the mid-frequency coincidence check fails.
DiscardReason discard_rule(cplx lambda2, const RootSet& munk, const DerivedScales& sc);

} // namespace slopegyre

#endif
