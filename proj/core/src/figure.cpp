#include "slopegyre/figure.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "slopegyre/errors.hpp"

namespace slopegyre {

namespace fs = std::filesystem;

Isoline trace_main_isoline(const FieldSlice& s) {
    Isoline iso;
    const double band = 0.25 * (s.x2.back() - s.x2.front());
    for (int i = 0; i < s.nx; ++i) {
        // zero crossing closest to x2 = 0 within the central band
        double best_x2 = 0.0;
        bool found = false;
        for (int j = 0; j + 1 < s.ny; ++j) {
            const double a = s.psi[size_t(i) * s.ny + j];
            const double b = s.psi[size_t(i) * s.ny + j + 1];
            if (a == 0.0 && b == 0.0) continue;  // outside-domain padding
            if ((a < 0 && b >= 0) || (a >= 0 && b < 0)) {
                const double t = a / (a - b);
                const double xc = s.x2[j] + t * (s.x2[j + 1] - s.x2[j]);
                if (std::abs(xc) > band) continue;
                if (!found || std::abs(xc) < std::abs(best_x2)) {
                    best_x2 = xc;
                    found = true;
                }
            }
        }
        if (found) {
            iso.x1.push_back(s.x1[i]);
            iso.x2.push_back(best_x2);
            if (!iso.has_coastal_point) {
                iso.has_coastal_point = true;
                iso.coastal_x1 = s.x1[i];
                iso.coastal_x2 = best_x2;
            }
        }
    }
    return iso;
}

namespace {

void write_isoline(const Isoline& iso, const std::string& path) {
    std::ofstream out(path);
    out << "# x1 x2\n";
    char buf[96];
    for (size_t i = 0; i < iso.x1.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g %.17g\n", iso.x1[i], iso.x2[i]);
        out << buf;
    }
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Two-panel stream-function plot from slice files written next to this script."""
import numpy as np
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

def load_slice(path):
    with open(path) as f:
        header = f.readline().split()
    meta = {k: float(v) for k, v in (tok.split("=") for tok in header[1:])}
    data = np.loadtxt(path)
    nx, ny = int(meta["nx"]), int(meta["ny"])
    x1 = data[::ny, 0]
    x2 = data[:ny, 1]
    psi = data[:, 2].reshape(nx, ny)
    return x1, x2, psi

def load_iso(path):
    d = np.loadtxt(path)
    return (d[:, 0], d[:, 1]) if d.size else (np.array([]), np.array([]))

fig, axes = plt.subplots(1, 2, figsize=(11, 4.6), sharey=True)
for ax, tag, title in [(axes[0], "reference", "near-flat bottom"),
                       (axes[1], "sloped", "sloped bottom")]:
    x1, x2, psi = load_slice(f"panel_{tag}.txt")
    m = np.max(np.abs(psi)) or 1.0
    cs = ax.contourf(x1, x2, psi.T, levels=21, cmap="RdBu_r", vmin=-m, vmax=m)
    ax.contour(x1, x2, psi.T, levels=[0.0], colors="k", linewidths=0.8)
    ix1, ix2 = load_iso(f"isoline_{tag}.txt")
    if ix1.size:
        ax.plot(ix1, ix2, "g-", lw=2, label="main zero isoline")
    ax.set_title(title)
    ax.set_xlabel("x1")
    fig.colorbar(cs, ax=ax, shrink=0.9)
axes[0].set_ylabel("x2")
fig.tight_layout()
fig.savefig("separation.png", dpi=150)
print("wrote separation.png")
)PY";

} // namespace

SeparationFigure emit_separation_figure(const RunArtifacts& sloped,
                                        const RunArtifacts& reference, double x3,
                                        const std::string& out_dir) {
    if (sloped.solution.p.empty()) throw MissingRun("sloped run has no assembled solution");
    if (reference.solution.p.empty())
        throw MissingRun("reference run has no assembled solution");

    SeparationFigure fig;
    fig.sloped = sample_slice(sloped.solution.p, x3, sloped.scales);
    fig.reference = sample_slice(reference.solution.p, x3, reference.scales);
    fig.iso_sloped = trace_main_isoline(fig.sloped);
    fig.iso_reference = trace_main_isoline(fig.reference);
    if (fig.iso_sloped.has_coastal_point && fig.iso_reference.has_coastal_point) {
        fig.comparable = true;
        fig.southward_shift = fig.iso_reference.coastal_x2 - fig.iso_sloped.coastal_x2;
    }

    const fs::path dir(out_dir);
    fs::create_directories(dir);
    write_slice(fig.sloped, (dir / "panel_sloped.txt").string());
    write_slice(fig.reference, (dir / "panel_reference.txt").string());
    write_isoline(fig.iso_sloped, (dir / "isoline_sloped.txt").string());
    write_isoline(fig.iso_reference, (dir / "isoline_reference.txt").string());
    {
        std::ofstream out(dir / "plot_figure.py");
        out << kPlotScript;
    }
    {
        std::ofstream out(dir / "separation.txt");
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "comparable %d\nsloped_coastal_x2 %.17g\nreference_coastal_x2 %.17g\n"
                      "southward_shift %.17g\n",
                      fig.comparable ? 1 : 0, fig.iso_sloped.coastal_x2,
                      fig.iso_reference.coastal_x2, fig.southward_shift);
        out << buf;
    }
    return fig;
}

} // namespace slopegyre
