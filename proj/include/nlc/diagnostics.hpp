#pragma once

#include <string>
#include <vector>

#include "nlc/solver.hpp"

namespace nlc {

struct DiagRecord {
    double t = 0.0;
    double e_kin = 0.0, e_el = 0.0, e_gl = 0.0, e_total = 0.0;
    double diss_v = 0.0, diss_d = 0.0;
    double balance_residual = 0.0, polar_residual = 0.0;
    double v_l2 = 0.0, v_h1 = 0.0;
    double d_h1 = 0.0, d_h2 = 0.0, d_h3 = 0.0;
    double q_abs = 1.0, z_h2 = 0.0;
};

/// Edge-based Dirichlet energy sum_edges (difference)^2 per component; the
/// discrete counterpart of |grad d|_2^2 that sums by parts exactly against
/// the nodal 5-point Laplacian.
double director_grad_l2sq(const DirectorField3& d);

DiagRecord record(const SimState& s, const Params& p, const W0Modes& modes);

std::string diag_csv_header();
std::string diag_csv_row(const DiagRecord& r);

struct EnergyLawReport {
    bool monotone = false;
    double max_increase = 0.0;  // max positive energy jump
    double max_defect = 0.0;    // max |dE + dt * dissipation|
    double e0 = 0.0;
};

/// Verifies the discrete energy law on a noise-free run (throws
/// validation_error if the run had noise enabled).
EnergyLawReport energy_law_check(const std::vector<DiagRecord>& recs, double dt,
                                 bool noise_free);

struct RefinementRow {
    double h = 0.0;
    double residual = 0.0;
};

struct RefinementStudy {
    std::vector<RefinementRow> rows;
    double slope = 0.0;  // least-squares d log(res) / d log(h)
    bool exact = false;  // all residuals at rounding level
};

/// Residual refinement for the balance law ("lemma24") or its polarization
/// ("prop25") on manufactured smooth fields.
RefinementStudy refinement_study(const std::string& identity,
                                 const std::vector<int>& resolutions);
std::string refinement_csv(const RefinementStudy& st);

}  // namespace nlc
