#ifndef SLOPEGYRE_RUN_HPP
#define SLOPEGYRE_RUN_HPP

#include <memory>

#include "slopegyre/cascade.hpp"
#include "slopegyre/config.hpp"

namespace slopegyre {

// Everything the pipeline produces for one configuration; the file artifacts
// are written under config.output.directory by write_artifacts().
struct RunArtifacts {
    RunConfig config;
    DerivedScales scales;
    FrequencyRegime regime = FrequencyRegime::OutOfRange;
    Forcing forcing;
    std::shared_ptr<KernelTable> table;
    std::shared_ptr<Cascade> cascade;
    ApproximateSolution solution;
    ResidualReport residual;
    Diagnostics diag;
};

// A regular (x1, x2) sample grid of Re(psi) at fixed x3 and t = 0;
// samples outside the fluid (z < 0) are zero.
struct FieldSlice {
    double x3 = 0.0;
    int nx = 0, ny = 0;
    std::vector<double> x1, x2;
    std::vector<double> psi;  // row-major [i1 * ny + i2]
};

FieldSlice sample_slice(const SpectralField& psi, double x3, const DerivedScales& sc);

// regime -> ingest -> roots -> kernels -> cascade(K) -> residual.
RunArtifacts run_pipeline(const RunConfig& config, int K);

// Writes slices, ledgers, the coefficient table, and the manifest; returns
// the manifest path.
std::string write_artifacts(const RunArtifacts& art);

// The run() operation of the orchestration layer: full pipeline from a config
// file, artifacts written, exit status returned (0 on success).
int run_from_file(const std::string& config_path, const std::string& out_override,
                  int K_override = -1);

void write_slice(const FieldSlice& s, const std::string& path);

} // namespace slopegyre

#endif
