#include "slopegyre/run.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "fft_internal.hpp"
#include "slopegyre/errors.hpp"

namespace slopegyre {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

FieldSlice sample_slice(const SpectralField& psi, double x3, const DerivedScales& sc) {
    const ModeGrid& g = psi.grid();
    FieldSlice s;
    s.x3 = x3;
    s.nx = g.Nx;
    s.ny = g.Ny;
    s.x1.resize(g.Nx);
    s.x2.resize(g.Ny);
    for (int i = 0; i < g.Nx; ++i) s.x1[i] = g.x_sample(i);
    for (int j = 0; j < g.Ny; ++j) s.x2[j] = g.y_sample(j);
    s.psi.assign(size_t(g.Nx) * g.Ny, 0.0);

    std::vector<cplx> row(g.Ny);
    for (int i = 0; i < g.Nx; ++i) {
        const double x1 = s.x1[i];
        const double x = sc.c * x1 + sc.s * x3;   // local tangential coordinate
        const double z = -sc.s * x1 + sc.c * x3;  // distance from the bottom
        if (z < 0.0) continue;                    // outside the fluid
        std::fill(row.begin(), row.end(), cplx(0));
        for (int ix = 0; ix < g.Nx; ++ix) {
            const double xx = g.xi_x(ix);
            const cplx ph = std::exp(cplx(0, xx * x));
            for (int iy = 0; iy < g.Ny; ++iy) {
                const auto& a = psi.at(ix, iy);
                if (a.is_zero()) continue;
                row[iy] += a.eval(z) * ph;
            }
        }
        // sum over xi_y with box-centered phases via one inverse transform
        for (int iy = 0; iy < g.Ny; ++iy)
            if (g.ky(iy) & 1) row[iy] = -row[iy];
        fft::backward(row);
        for (int j = 0; j < g.Ny; ++j) s.psi[size_t(i) * g.Ny + j] = row[j].real();
    }
    return s;
}

void write_slice(const FieldSlice& s, const std::string& path) {
    std::ofstream out(path);
    char buf[160];
    std::snprintf(buf, sizeof buf, "# x3=%.17g nx=%d ny=%d\n", s.x3, s.nx, s.ny);
    out << buf;
    for (int i = 0; i < s.nx; ++i)
        for (int j = 0; j < s.ny; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", s.x1[i], s.x2[j],
                          s.psi[size_t(i) * s.ny + j]);
            out << buf;
        }
}

RunArtifacts run_pipeline(const RunConfig& config, int K) {
    RunArtifacts art;
    art.config = config;
    art.scales = validate(config.regime);
    art.regime = classify_frequency(art.scales);

    // dealiasing margin: truncation must keep the outer third of modes empty
    {
        const double kappa = config.ingest.kappa >= 0.0
                                 ? config.ingest.kappa
                                 : 0.5 * (art.scales.a - art.scales.b);
        const double R = std::pow(art.scales.epsilon, -kappa);
        const double xi_max = 2.0 * M_PI / 3.0 *
                              std::min(config.grid.Nx / config.grid.Lx,
                                       config.grid.Ny / config.grid.Ly);
        if (R > xi_max)
            throw ConfigError("truncation radius " + std::to_string(R) +
                              " violates the 2/3 dealiasing margin " + std::to_string(xi_max));
    }

    art.forcing = ingest_forcing(config.forcing, config.grid, art.scales, config.ingest);
    art.table = std::make_shared<KernelTable>(build_kernel_table(config.grid, art.scales));

    CascadeOptions copt;
    copt.K = K;
    copt.smoothness_budget = config.solve.smoothness_budget;
    copt.trim_rel = config.solve.trim_rel;
    copt.build_ekman = config.solve.build_ekman;
    art.cascade = std::make_shared<Cascade>(art.forcing, *art.table, art.scales, copt, art.diag);
    art.solution = art.cascade->assemble(K);
    art.residual = art.cascade->residual(art.solution);
    art.residual.budget = std::pow(art.scales.epsilon, config.solve.residual_budget_N);
    return art;
}

namespace {

ordered_json norms_json(const ResidualNorms& n) {
    return ordered_json{{"horizontal", n.horizontal},
                        {"vertical", n.vertical},
                        {"mass", n.mass},
                        {"divergence", n.divergence},
                        {"combined", n.combined}};
}

} // namespace

std::string write_artifacts(const RunArtifacts& art) {
    const fs::path dir(art.config.output.directory);
    fs::create_directories(dir);

    // slices of psi = sum eps^k p^k at requested heights
    for (double x3 : art.config.solve.x3_slices) {
        FieldSlice s = sample_slice(art.solution.p, x3, art.scales);
        char name[64];
        std::snprintf(name, sizeof name, "slice_x3_%g.txt", x3);
        write_slice(s, (dir / name).string());
    }

    // per-order, per-mode layer coefficients
    {
        std::ofstream out(dir / "coefficients.txt");
        out << "# k xi_x xi_y re_c1 im_c1 re_c2 im_c2 re_cE im_cE\n";
        char buf[256];
        const ModeGrid& g = art.table->grid;
        for (int k = 0; k <= art.cascade->built(); ++k) {
            const auto& term = art.cascade->term(k);
            for (int ix = 0; ix < g.Nx; ++ix)
                for (int iy = 0; iy < g.Ny; ++iy) {
                    const auto& mc = term.coeffs[g.index(ix, iy)];
                    if (mc.c1 == cplx(0) && mc.c2 == cplx(0) && mc.cE == cplx(0)) continue;
                    std::snprintf(buf, sizeof buf,
                                  "%d %.17g %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n", k,
                                  g.xi_x(ix), g.xi_y(iy), mc.c1.real(), mc.c1.imag(),
                                  mc.c2.real(), mc.c2.imag(), mc.cE.real(), mc.cE.imag());
                    out << buf;
                }
        }
    }

    if (art.config.output.write_fields) {
        std::ofstream out(dir / "psi_modes.txt");
        art.solution.p.write_columnar(out, "psi");
    }

    ordered_json m;
    m["tool"] = "slopegyre";
    m["version"] = "0.1.0";
    m["regime"] = {{"epsilon", art.scales.epsilon},
                   {"a", art.scales.a},
                   {"b", art.scales.b},
                   {"d", art.scales.d},
                   {"e", art.scales.e},
                   {"alpha", art.scales.alpha},
                   {"M", art.scales.M},
                   {"beta", art.scales.beta},
                   {"omega", art.scales.omega},
                   {"nu_h", art.scales.nu_h},
                   {"nu_3", art.scales.nu_3},
                   {"delta", art.scales.delta},
                   {"nu_eff", art.scales.nu_eff},
                   {"munk_scale", art.scales.munk_scale},
                   {"ekman_scale", art.scales.ekman_scale},
                   {"classification", to_string(art.regime)},
                   {"theta_lo", art.scales.theta_lo},
                   {"theta_hi", art.scales.theta_hi},
                   {"relaxed_b_bound", art.scales.used_relaxed_bound}};
    m["grid"] = {{"Lx", art.config.grid.Lx},
                 {"Ly", art.config.grid.Ly},
                 {"Nx", art.config.grid.Nx},
                 {"Ny", art.config.grid.Ny}};
    m["forcing"] = {{"amplitude", art.config.forcing.amplitude},
                    {"gamma", art.config.forcing.gamma},
                    {"width_x", art.config.forcing.width_x},
                    {"width_y", art.config.forcing.width_y},
                    {"y_wavelength", art.config.forcing.y_wavelength},
                    {"truncation_R", art.forcing.report.R},
                    {"tail_rel_energy", art.forcing.report.tail_rel_energy},
                    {"reality_defect", art.forcing.report.reality_defect},
                    {"h4_sum", art.forcing.report.h4_sum},
                    {"h4_Q", art.config.ingest.Q},
                    {"n_dropped_modes", art.forcing.report.n_dropped_modes},
                    {"preset_provenance", "project-defined demonstration parameters"}};
    m["thresholds"] = {{"separation_flag", kSeparationFlag},
                       {"confluence_rtol", ExpPolyProfile::confluence_rtol()},
                       {"alias_warn_fraction", kAliasWarnFraction},
                       {"tail_budget_N", art.config.ingest.tail_budget_N},
                       {"residual_budget_N", art.config.solve.residual_budget_N},
                       {"trim_rel", art.config.solve.trim_rel}};
    m["kernel_table"] = {{"n_flagged", art.table->n_flagged},
                         {"n_degenerate", art.table->n_degenerate},
                         {"n_ekman_active", art.cascade->ekman_active_count()}};
    m["solution"] = {{"K", art.solution.K}};
    ordered_json ledger = ordered_json::array();
    for (const auto& l : art.solution.ledger) {
        ledger.push_back({{"k", l.k},
                          {"interior_u", {l.interior_u1, l.interior_u2, l.interior_u3}},
                          {"munk_u", {l.munk_u1, l.munk_u2, l.munk_u3}},
                          {"ekman_u", {l.ekman_u1, l.ekman_u2, l.ekman_u3}},
                          {"max_c1", l.max_c1},
                          {"max_c2", l.max_c2},
                          {"max_cE", l.max_cE},
                          {"trace_defect", l.trace_defect},
                          {"unlifted_vertical", l.unlifted_vertical},
                          {"n_ekman_modes", l.n_ekman_modes}});
    }
    m["ledger"] = ledger;
    m["residual"] = {{"total", norms_json(art.residual.total)},
                     {"interior", norms_json(art.residual.interior)},
                     {"munk", norms_json(art.residual.munk)},
                     {"ekman", norms_json(art.residual.ekman)},
                     {"linearity_defect", art.residual.linearity_defect},
                     {"budget", art.residual.budget}};
    ordered_json warns = ordered_json::array();
    for (const auto& w : art.diag.warnings) warns.push_back(w);
    m["warnings"] = warns;

    const std::string path = (dir / "manifest.json").string();
    std::ofstream out(path);
    out << m.dump(2) << "\n";
    return path;
}

int run_from_file(const std::string& config_path, const std::string& out_override,
                  int K_override) {
    RunConfig config = load_config(config_path);
    if (!out_override.empty()) config.output.directory = out_override;
    const int K = K_override >= 0 ? K_override : config.solve.K;
    RunArtifacts art = run_pipeline(config, K);
    write_artifacts(art);
    return 0;
}

} // namespace slopegyre
