#include "slopegyre/forcing.hpp"

#include <algorithm>
#include <cmath>

#include "fft_internal.hpp"
#include "slopegyre/errors.hpp"

namespace slopegyre {

namespace {

double envelope(ForcingRecipe::Envelope kind, double u, double w) {
    switch (kind) {
        case ForcingRecipe::Envelope::Gaussian: return std::exp(-(u * u) / (w * w));
        case ForcingRecipe::Envelope::Exponential: return std::exp(-std::abs(u) / w);
    }
    return 0.0;
}

double recipe_xy(const ForcingRecipe& r, double x, double y) {
    double v = envelope(r.env_x, x - r.center_x, r.width_x);
    if (r.mod_kx != 0.0) v *= std::cos(r.mod_kx * x);
    v *= envelope(r.env_y, y, r.width_y);
    if (r.y_wavelength != 0.0) v *= std::sin(2.0 * M_PI * y / r.y_wavelength + r.y_phase);
    return v;
}

// Mode amplitudes of the sampled recipe in the box-centered convention:
// A_{k,l} = (-1)^{k+l} DFT2(samples) / (Nx Ny)
std::vector<cplx> tabulate_modes(const ModeGrid& g, const ForcingRecipe& r, double amp) {
    std::vector<cplx> a(size_t(g.Nx) * g.Ny);
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j)
            a[size_t(i) * g.Ny + j] = amp * recipe_xy(r, g.x_sample(i), g.y_sample(j));

    std::vector<cplx> line(g.Ny), col(g.Nx);
    for (int i = 0; i < g.Nx; ++i) {
        std::copy_n(a.begin() + size_t(i) * g.Ny, g.Ny, line.begin());
        fft::forward(line);
        std::copy_n(line.begin(), g.Ny, a.begin() + size_t(i) * g.Ny);
    }
    for (int j = 0; j < g.Ny; ++j) {
        for (int i = 0; i < g.Nx; ++i) col[i] = a[size_t(i) * g.Ny + j];
        fft::forward(col);
        for (int i = 0; i < g.Nx; ++i) a[size_t(i) * g.Ny + j] = col[i];
    }
    const double norm = 1.0 / (double(g.Nx) * g.Ny);
    for (int i = 0; i < g.Nx; ++i)
        for (int j = 0; j < g.Ny; ++j) {
            cplx v = a[size_t(i) * g.Ny + j] * norm;
            if ((g.kx(i) + g.ky(j)) & 1) v = -v;
            a[size_t(i) * g.Ny + j] = v;
        }
    return a;
}

} // namespace

Forcing ingest_forcing(const ForcingRecipe& recipe, const ModeGrid& grid,
                       const DerivedScales& sc, const IngestOptions& opt) {
    if (!(recipe.gamma > 0.0)) throw ConfigError("forcing gamma must be positive");
    if (grid.Nx % 2 || grid.Ny % 2) throw ConfigError("mode counts must be even");

    const double kappa = opt.kappa >= 0.0 ? opt.kappa : 0.5 * (sc.a - sc.b);
    const double R = std::pow(sc.epsilon, -kappa);

    std::vector<cplx> a1 = tabulate_modes(grid, recipe, recipe.amplitude);
    std::vector<cplx> a2;
    if (recipe.amplitude2 != 0.0) a2 = tabulate_modes(grid, recipe, recipe.amplitude2);

    Forcing out;
    out.gamma = recipe.gamma;
    out.report.R = R;

    // reality of the sampled recipe: conj symmetry of the DFT
    double defect = 0.0, scale = 0.0;
    for (int ix = 0; ix < grid.Nx; ++ix)
        for (int iy = 0; iy < grid.Ny; ++iy) {
            const cplx v = a1[size_t(ix) * grid.Ny + iy];
            const cplx w = a1[grid.conj_index(ix, iy)];
            defect = std::max(defect, std::abs(v - std::conj(w)));
            scale = std::max(scale, std::abs(v));
        }
    out.report.reality_defect = scale > 0 ? defect / scale : 0.0;

    double kept = 0.0, dropped = 0.0;
    double peak = scale;
    out.fh.c1 = SpectralField(grid, sc.omega);
    out.fh.c2 = SpectralField(grid, sc.omega);

    for (int ix = 0; ix < grid.Nx; ++ix)
        for (int iy = 0; iy < grid.Ny; ++iy) {
            const size_t idx = size_t(ix) * grid.Ny + iy;
            const double xx = grid.xi_x(ix), yy = grid.xi_y(iy);
            const double e1 = std::norm(a1[idx]);
            const double e2 = a2.empty() ? 0.0 : std::norm(a2[idx]);
            const bool nyquist = (grid.kx(ix) == -grid.Nx / 2) || (grid.ky(iy) == -grid.Ny / 2);
            const bool mean_mode = (grid.kx(ix) == 0 && grid.ky(iy) == 0);
            const bool ky0_drop = opt.drop_ky0 && grid.ky(iy) == 0;
            const bool in_ball = std::sqrt(xx * xx + yy * yy) <= R;
            const bool nonzero =
                std::sqrt(e1 + e2) > opt.zero_threshold * std::max(peak, 1e-300);

            if (!in_ball || nyquist || mean_mode || ky0_drop) {
                if (ky0_drop)
                    out.report.ky0_dropped_energy += e1 + e2;
                else
                    dropped += e1 + e2;
                if (nonzero) {
                    ++out.report.n_dropped_modes;
                    if (mean_mode) out.report.mean_mode_dropped = true;
                }
                continue;
            }
            if (!nonzero) {  // round-off dust: drop before it seeds whole rows
                a1[idx] = cplx(0);
                if (!a2.empty()) a2[idx] = cplx(0);
                continue;
            }
            kept += e1 + e2;
            if (grid.ky(iy) == 0) {
                if (sc.omega == 0.0)
                    throw H4Violation("retained ky=0 mode with nonzero amplitude at omega=0");
                ++out.report.n_ky0_nonzero;
            }
            if (a1[idx] != cplx(0))
                out.fh.c1.at(ix, iy) = ExpPolyProfile::exponential(a1[idx], recipe.gamma);
            if (!a2.empty() && a2[idx] != cplx(0))
                out.fh.c2.at(ix, iy) = ExpPolyProfile::exponential(a2[idx], recipe.gamma);
        }

    const double total = kept + dropped;
    out.report.tail_rel_energy = total > 0 ? dropped / total : 0.0;
    const double budget = std::pow(sc.epsilon, opt.tail_budget_N);
    if (out.report.tail_rel_energy > budget) {
        throw TailTooLarge("discarded tail energy " + std::to_string(out.report.tail_rel_energy) +
                           " exceeds budget " + std::to_string(budget));
    }

    // decay proxy: per-z tangential L2 against C exp(-gamma z)
    {
        const double C0 = std::sqrt(out.fh.c1.l2sq() * 2.0 * recipe.gamma) +
                          std::sqrt(out.fh.c2.l2sq() * 2.0 * recipe.gamma);
        out.report.h3_constant = C0;
        double worst = 0.0;
        for (double z : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
            double l2 = 0.0;
            for (int ix = 0; ix < grid.Nx; ++ix)
                for (int iy = 0; iy < grid.Ny; ++iy) {
                    l2 += std::norm(out.fh.c1.at(ix, iy).eval(z));
                    if (!a2.empty()) l2 += std::norm(out.fh.c2.at(ix, iy).eval(z));
                }
            l2 = std::sqrt(l2);
            if (C0 > 0) worst = std::max(worst, l2 * std::exp(recipe.gamma * z) / C0);
        }
        out.report.h3_worst_ratio = worst;
    }

    // small-ky weighted sum (reported, not gated)
    double h4 = 0.0;
    for (int ix = 0; ix < grid.Nx; ++ix)
        for (int iy = 0; iy < grid.Ny; ++iy) {
            const double yy = grid.xi_y(iy);
            if (yy == 0.0) continue;
            double e = out.fh.c1.at(ix, iy).is_zero() ? 0.0 : out.fh.c1.at(ix, iy).l2sq();
            if (!a2.empty() && !out.fh.c2.at(ix, iy).is_zero()) e += out.fh.c2.at(ix, iy).l2sq();
            h4 += std::pow(std::abs(yy), -opt.Q) * e;
        }
    out.report.h4_sum = h4;

    return out;
}

} // namespace slopegyre
