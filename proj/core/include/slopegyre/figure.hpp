#ifndef SLOPEGYRE_FIGURE_HPP
#define SLOPEGYRE_FIGURE_HPP

#include "slopegyre/run.hpp"

namespace slopegyre {

// Main zero-isoline of a slice: for each x1 column, the zero crossing of
// psi(x1, .) closest to x2 = 0 within the central band.
struct Isoline {
    std::vector<double> x1, x2;
    // crossing at the westernmost in-domain column, if any
    bool has_coastal_point = false;
    double coastal_x1 = 0.0, coastal_x2 = 0.0;
};

Isoline trace_main_isoline(const FieldSlice& s);

struct SeparationFigure {
    FieldSlice sloped, reference;
    Isoline iso_sloped, iso_reference;
    // southward shift of the sloped coastal intersection (positive = south)
    double southward_shift = 0.0;
    bool comparable = false;
};

// Two-panel separation diagnostic from two completed runs at the same x3.
// Throws MissingRun when a run lacks an assembled solution.
SeparationFigure emit_separation_figure(const RunArtifacts& sloped,
                                        const RunArtifacts& reference, double x3,
                                        const std::string& out_dir);

} // namespace slopegyre

#endif
