// Command-line front end: regime checks, per-mode root/kernel/layer tables,
// the two-term solve, the full cascade, and the two-panel separation figure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "slopegyre/errors.hpp"
#include "slopegyre/figure.hpp"
#include "slopegyre/parallel.hpp"
#include "slopegyre/run.hpp"

using namespace slopegyre;
namespace fs = std::filesystem;

namespace {

struct GlobalArgs {
    std::string config;
    std::string out;
    long seed = 0;
    int threads = 0;
};

RunConfig load_with_overrides(const GlobalArgs& g) {
    RunConfig c = load_config(g.config);
    if (!g.out.empty()) c.output.directory = g.out;
    return c;
}

int cmd_check(const GlobalArgs& g) {
    RunConfig c = load_with_overrides(g);
    DerivedScales sc = validate(c.regime);
    const FrequencyRegime reg = classify_frequency(sc);
    std::printf("regime ok\n");
    std::printf("beta %.6g omega %.6g nu_h %.6g nu_3 %.6g delta %.6g\n", sc.beta, sc.omega,
                sc.nu_h, sc.nu_3, sc.delta);
    std::printf("nu_eff %.6g munk_scale %.6g ekman_scale %.6g\n", sc.nu_eff, sc.munk_scale,
                sc.ekman_scale);
    std::printf("classification %s\n", to_string(reg).c_str());
    if (sc.used_relaxed_bound)
        std::printf("warning: relaxed admissibility bound b <= (3a-d)/4 in use\n");
    return 0;
}

std::ofstream open_out(const GlobalArgs& g, const char* name) {
    fs::path dir(g.out.empty() ? "." : g.out);
    fs::create_directories(dir);
    return std::ofstream(dir / name);
}

int cmd_roots(const GlobalArgs& g) {
    RunConfig c = load_with_overrides(g);
    DerivedScales sc = validate(c.regime);
    KernelTable table = build_kernel_table(c.grid, sc);
    std::ofstream out = open_out(g, "roots.txt");
    out << "# xi_x xi_y re_mu1p im_mu1p re_mu2p im_mu2p re_mu1m im_mu1m re_mu2m im_mu2m "
           "regime separation\n";
    char buf[400];
    for (int ix = 0; ix < c.grid.Nx; ++ix)
        for (int iy = 0; iy < c.grid.Ny; ++iy) {
            const int idx = c.grid.index(ix, iy);
            if (!table.is_active(idx)) continue;
            const RootSet& r = table.roots[idx];
            std::snprintf(buf, sizeof buf,
                          "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %s %.6g\n",
                          c.grid.xi_x(ix), c.grid.xi_y(iy), r.mu_plus[0].real(),
                          r.mu_plus[0].imag(), r.mu_plus[1].real(), r.mu_plus[1].imag(),
                          r.mu_minus[0].real(), r.mu_minus[0].imag(), r.mu_minus[1].real(),
                          r.mu_minus[1].imag(), to_string(r.regime).c_str(), r.separation);
            out << buf;
        }
    std::printf("roots table written (%d flagged, %d degenerate)\n", table.n_flagged,
                table.n_degenerate);
    return 0;
}

int cmd_green(const GlobalArgs& g) {
    RunConfig c = load_with_overrides(g);
    DerivedScales sc = validate(c.regime);
    KernelTable table = build_kernel_table(c.grid, sc);
    std::ofstream out = open_out(g, "green.txt");
    out << "# xi_x xi_y re_C1p im_C1p re_C2p im_C2p re_C1m im_C1m re_C2m im_C2m "
           "lagrange_vs_solve\n";
    char buf[400];
    for (int ix = 0; ix < c.grid.Nx; ++ix)
        for (int iy = 0; iy < c.grid.Ny; ++iy) {
            const int idx = c.grid.index(ix, iy);
            if (!table.is_active(idx)) continue;
            const GreenKernel& k = table.at(idx);
            std::snprintf(buf, sizeof buf,
                          "%.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.3g\n",
                          c.grid.xi_x(ix), c.grid.xi_y(iy), k.Cp[0].real(), k.Cp[0].imag(),
                          k.Cp[1].real(), k.Cp[1].imag(), k.Cm[0].real(), k.Cm[0].imag(),
                          k.Cm[1].real(), k.Cm[1].imag(), k.lagrange_vs_solve);
            out << buf;
        }
    std::printf("green kernel table written\n");
    return 0;
}

int cmd_ekman(const GlobalArgs& g) {
    RunConfig c = load_with_overrides(g);
    DerivedScales sc = validate(c.regime);
    KernelTable table = build_kernel_table(c.grid, sc);
    std::ofstream out = open_out(g, "ekman.txt");
    out << "# xi_x xi_y re_l1 im_l1 re_l2 im_l2 discard Upx_re Upx_im Upy_re Upy_im "
           "Upz_re Upz_im P_re P_im R_re R_im hydro_defect\n";
    char buf[600];
    int n_ok = 0, n_skip = 0;
    for (int ix = 0; ix < c.grid.Nx; ++ix)
        for (int iy = 0; iy < c.grid.Ny; ++iy) {
            const int idx = c.grid.index(ix, iy);
            if (!table.is_active(idx)) continue;
            const Xi xi{c.grid.xi_x(ix), c.grid.xi_y(iy)};
            try {
                LayerRoots lr = layer_roots(xi, sc.omega, sc);
                EkmanMode m = eigenvector_lambda1(lr.mode1, xi, sc.omega, sc);
                const cplx ct = sc.c - cplx(0, xi.x * sc.s) / m.lambda;
                const double hydro =
                    std::abs(m.lambda * ct * m.U[3] - m.U[4]) / std::abs(m.U[4]);
                std::string discard;
                try {
                    discard = to_string(discard_rule(lr.lambda2, table.roots[idx], sc));
                } catch (const SolverError& e) {
                    discard = e.kind();
                }
                std::snprintf(buf, sizeof buf,
                              "%.17g %.17g %.17g %.17g %.17g %.17g %s %.17g %.17g %.17g %.17g "
                              "%.17g %.17g %.17g %.17g %.17g %.17g %.6g\n",
                              xi.x, xi.y, lr.mode1.lambda.real(), lr.mode1.lambda.imag(),
                              lr.lambda2.real(), lr.lambda2.imag(), discard.c_str(),
                              m.U[0].real(), m.U[0].imag(), m.U[1].real(), m.U[1].imag(),
                              m.U[2].real(), m.U[2].imag(), m.U[3].real(), m.U[3].imag(),
                              m.U[4].real(), m.U[4].imag(), hydro);
                out << buf;
                ++n_ok;
            } catch (const SolverError&) {
                ++n_skip;
            }
        }
    std::printf("ekman table written (%d modes, %d outside the layer preconditions)\n", n_ok,
                n_skip);
    return 0;
}

int cmd_solve(const GlobalArgs& g, int order) {
    RunConfig c = load_with_overrides(g);
    if (order >= 0) c.solve.order = order;
    RunArtifacts art = run_pipeline(c, c.solve.order);
    const std::string manifest = write_artifacts(art);
    std::printf("solve order %d done; residual %.6g; manifest %s\n", c.solve.order,
                art.residual.total.combined, manifest.c_str());
    return 0;
}

int cmd_cascade(const GlobalArgs& g, int K) {
    RunConfig c = load_with_overrides(g);
    if (K >= 0) c.solve.K = K;
    RunArtifacts art = run_pipeline(c, c.solve.K);
    const std::string manifest = write_artifacts(art);
    std::printf("cascade K=%d\n", art.solution.K);
    for (const auto& l : art.solution.ledger) {
        std::printf(
            "  k=%d  |u_i|=(%.3g,%.3g,%.3g)  |u_M|=(%.3g,%.3g,%.3g)  |u_E|=(%.3g,%.3g,%.3g)\n",
            l.k, l.interior_u1, l.interior_u2, l.interior_u3, l.munk_u1, l.munk_u2, l.munk_u3,
            l.ekman_u1, l.ekman_u2, l.ekman_u3);
        std::printf("       max|c1|=%.3g max|c2|=%.3g max|cE|=%.3g trace_defect=%.3g\n",
                    l.max_c1, l.max_c2, l.max_cE, l.trace_defect);
    }
    std::printf("residual combined %.6g (budget %.3g)  h=%.3g v=%.3g m=%.3g div=%.3g\n",
                art.residual.total.combined, art.residual.budget, art.residual.total.horizontal,
                art.residual.total.vertical, art.residual.total.mass,
                art.residual.total.divergence);
    std::printf("manifest %s\n", manifest.c_str());
    return 0;
}

int cmd_figure(const GlobalArgs& g, const std::string& reference_config, double x3) {
    if (reference_config.empty() || !fs::exists(reference_config))
        throw MissingRun("reference config not found: " + reference_config);
    RunConfig cs = load_with_overrides(g);
    RunConfig cr = load_config(reference_config);
    RunArtifacts sloped = run_pipeline(cs, std::min(cs.solve.K, 1));
    RunArtifacts reference = run_pipeline(cr, std::min(cr.solve.K, 1));
    const std::string dir = g.out.empty() ? cs.output.directory : g.out;
    SeparationFigure fig = emit_separation_figure(sloped, reference, x3, dir);
    std::printf("figure written to %s\n", dir.c_str());
    if (fig.comparable)
        std::printf("coastal intersection: sloped x2=%.4g reference x2=%.4g shift %.4g\n",
                    fig.iso_sloped.coastal_x2, fig.iso_reference.coastal_x2,
                    fig.southward_shift);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectral boundary-layer solver for rotating stratified flow over a "
                 "tilted bottom"};
    app.require_subcommand(1);

    GlobalArgs g;
    app.add_option("--config", g.config, "configuration file")->required();
    app.add_option("--out", g.out, "output directory override");
    app.add_option("--seed", g.seed, "seed recorded for randomized suites");
    app.add_option("--threads", g.threads, "worker threads for mode loops");

    auto* check = app.add_subcommand("check", "validate parameters and report derived scales");
    auto* roots = app.add_subcommand("roots", "per-mode characteristic quartic roots");
    auto* green = app.add_subcommand("green", "per-mode Green kernel coefficients");
    auto* ekman = app.add_subcommand("ekman", "per-mode layer roots and eigenvectors");
    int order = -1;
    auto* solve = app.add_subcommand("solve", "two-term stream-function solve");
    solve->add_option("--order", order, "expansion order (0 or 1)");
    int K = -1;
    auto* cascade = app.add_subcommand("cascade", "iterative construction to order K");
    cascade->add_option("--K", K, "expansion depth");
    std::string reference_config;
    double fig_x3 = 0.5;
    auto* figure = app.add_subcommand("figure", "two-panel separation diagnostic");
    figure->add_option("--reference-config", reference_config, "near-flat reference config")
        ->required();
    figure->add_option("--x3", fig_x3, "slice height");

    CLI11_PARSE(app, argc, argv);
    if (g.threads > 0) set_num_threads(g.threads);

    try {
        if (check->parsed()) return cmd_check(g);
        if (roots->parsed()) return cmd_roots(g);
        if (green->parsed()) return cmd_green(g);
        if (ekman->parsed()) return cmd_ekman(g);
        if (solve->parsed()) return cmd_solve(g, order);
        if (cascade->parsed()) return cmd_cascade(g, K);
        if (figure->parsed()) return cmd_figure(g, reference_config, fig_x3);
    } catch (const SolverError& e) {
        std::fprintf(stderr, "error [%s] %s\n", e.kind().c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error %s\n", e.what());
        return 1;
    }
    return 0;
}
