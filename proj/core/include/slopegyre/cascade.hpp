#ifndef SLOPEGYRE_CASCADE_HPP
#define SLOPEGYRE_CASCADE_HPP

#include "slopegyre/ekman_layer.hpp"
#include "slopegyre/qg_builder.hpp"

namespace slopegyre {

struct CascadeOptions {
    int K = 3;
    // derivatives available in the forcing; each order consumes five
    int smoothness_budget = 30;
    double trim_rel = 0.0;  // profile compression floor (0 = exact)
    bool build_ekman = true;
};

// Per-order, per-family norm and coefficient bookkeeping for reports.
struct OrderLedger {
    int k = 0;
    // H1_{x,y} L2_z proxy norms by family and component
    double interior_u1 = 0, interior_u2 = 0, interior_u3 = 0;
    double munk_u1 = 0, munk_u2 = 0, munk_u3 = 0;
    double ekman_u1 = 0, ekman_u2 = 0, ekman_u3 = 0;
    double max_c1 = 0, max_c2 = 0, max_cE = 0;   // layer coefficient maxima
    double trace_defect = 0;                     // worst relative no-slip defect
    double unlifted_vertical = 0;                // |e3 trace| left where no Ekman root
    int n_ekman_modes = 0;                       // modes carrying an Ekman corrector
};

struct ApproximateSolution {
    int K = 0;
    double epsilon = 0.0;
    Vec3Field u;
    SpectralField p, rho;
    std::vector<OrderLedger> ledger;
};

// Weighted residual of the full system applied to an assembled solution.
// Norms are sqrt of sum over modes of \int (1+z^2) |g|^2 dz with the energy
// pairing weight delta^2 on the vertical component.
struct ResidualNorms {
    double horizontal = 0, vertical = 0, mass = 0, divergence = 0;
    double total() const;  // sqrt(h^2 + delta^4 v^2 + m^2) is folded in already
    double combined = 0;   // sqrt(h^2 + (delta^2 v)^2 + m^2)
};

struct ResidualReport {
    ResidualNorms total;
    ResidualNorms interior, munk, ekman;
    double delta = 0.0;
    double budget = 0.0;          // epsilon^N target for reference
    double linearity_defect = 0;  // | total - (interior+munk+ekman) | consistency
};

// Iterative constructor: interior recurrence, Munk recurrence, Ekman
// polynomial ansatz, and the three-coefficient boundary closure at each order.
class Cascade {
public:
    Cascade(const Forcing& f, const KernelTable& table, const DerivedScales& sc,
            const CascadeOptions& opt, Diagnostics& diag);

    // Builds terms up to and including order k (idempotent).
    void build_to(int k);
    const ExpansionTerm& term(int k) const { return terms_.at(k); }
    int built() const { return int(terms_.size()) - 1; }

    ApproximateSolution assemble(int K);
    ResidualReport residual(const ApproximateSolution& sol) const;

    // exposed recurrence pieces (tests drive them directly)
    SpectralField interior_source(int k) const;  // F^k of the interior family
    SpectralField munk_source(int k) const;      // F^k of the Munk family

    const std::vector<cplx>& ekman_lambda1() const { return lambda1_; }
    int ekman_active_count() const { return n_ekman_active_; }

    struct EkmanPoly {
        std::vector<cplx> qx, qy, qz, qr, qp;
    };
    // per-mode polynomial data of order k (k >= 2), empty when inactive
    const std::vector<EkmanPoly>& ekman_polys(int k) const { return ekman_polys_.at(k); }

private:
    SpectralField family_source(int k, const std::vector<FamilyFields>& hist,
                                bool with_forcing) const;
    FamilyFields family_step(int k, const std::vector<FamilyFields>& hist,
                             bool with_forcing) const;
    void ekman_step(int k);
    void close_boundary(int k);
    ExpPolyProfile ekman_component_profile(int idx, const std::vector<cplx>& q,
                                           cplx prefactor) const;

    const Forcing& f_;
    const KernelTable& table_;
    DerivedScales sc_;
    CascadeOptions opt_;
    Diagnostics& diag_;

    std::vector<ExpansionTerm> terms_;
    std::vector<OrderLedger> order_ledgers_;
    std::vector<FamilyFields> interior_hist_, munk_hist_, ekman_hist_;
    std::vector<std::vector<EkmanPoly>> ekman_polys_;  // [k][mode]
    std::vector<cplx> lambda1_;       // per mode, 0 when unavailable
    std::vector<EkmanPoly> ekman_eig_;  // eigen-direction polynomials per mode
    std::vector<char> ekman_ok_;
    int n_ekman_active_ = 0;
};

} // namespace slopegyre

#endif
