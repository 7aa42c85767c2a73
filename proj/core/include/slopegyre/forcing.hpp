#ifndef SLOPEGYRE_FORCING_HPP
#define SLOPEGYRE_FORCING_HPP

#include "slopegyre/spectral_field.hpp"

namespace slopegyre {

// Analytic forcing recipe: f = (f1, f2, 0) with
//   f1(x,y,z) = amplitude * env_x(x) * osc_y(y) * exp(-gamma z)
// where env_x is a Gaussian or two-sided exponential envelope, optionally
// modulated by cos(mod_kx x), and osc_y is sin(2 pi y / y_wavelength) times a
// Gaussian or exponential envelope in y. f2 is zero unless amplitude2 is set,
// in which case it uses the same spatial shape.
struct ForcingRecipe {
    enum class Envelope { Gaussian, Exponential };
    double amplitude = 1.0;
    double amplitude2 = 0.0;
    Envelope env_x = Envelope::Gaussian;
    double width_x = 2.0;
    double center_x = 0.0;
    double mod_kx = 0.0;
    Envelope env_y = Envelope::Gaussian;
    double width_y = 5.0;
    double y_wavelength = 4.0;  // 0 disables the oscillating factor
    double y_phase = 0.0;       // sin(2 pi y / wavelength + phase)
    double gamma = 0.5;
};

struct IngestOptions {
    double kappa = -1.0;      // truncation radius R = epsilon^{-kappa}; <0 -> (a-b)/2
    double tail_budget_N = 2.0;  // tail must stay below epsilon^N (relative energy)
    double Q = 4.0;           // exponent of the small-ky weight in the reported sum
    double zero_threshold = 1e-14;  // relative amplitude below which a mode counts as zero
    // Project out the ky = 0 row regardless of omega; forcing with slow ky
    // content is outside the admissible class, and the higher-order layer
    // closure cannot lift its east-west trace.
    bool drop_ky0 = false;
};

struct IngestReport {
    double R = 0.0;                // truncation radius actually used
    double tail_rel_energy = 0.0;  // discarded |xi|>R energy / total
    double reality_defect = 0.0;
    double h3_constant = 0.0;      // fitted C with per-z L2 <= C exp(-gamma z)
    double h3_worst_ratio = 0.0;   // sup_z L2(z) e^{gamma z} / C
    double h4_sum = 0.0;           // sum over ky!=0 of |ky|^{-Q} |amp|^2 (reported, not gated)
    int n_dropped_modes = 0;       // zeroed by truncation
    int n_ky0_nonzero = 0;         // retained ky=0 modes with nonzero amplitude
    double ky0_dropped_energy = 0.0;  // projected-out slow-ky content (opt-in)
    bool mean_mode_dropped = false;
};

struct Forcing {
    Vec2Field fh;     // horizontal components (global frame)
    double gamma = 0.0;
    IngestReport report;
};

// Tabulates the recipe on the grid, enforces the truncation |xi| <= R,
// excludes the mean mode and Nyquist rows, and checks the admissibility
// proxies. Throws H4Violation / TailTooLarge as documented.
Forcing ingest_forcing(const ForcingRecipe& recipe, const ModeGrid& grid,
                       const DerivedScales& sc, const IngestOptions& opt = {});

} // namespace slopegyre

#endif
