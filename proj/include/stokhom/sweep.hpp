#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stokhom/config.hpp"
#include "stokhom/tensor.hpp"

namespace stokhom {

/// Per-eps metrics of a sweep (one CSV row each).
struct SweepRow {
    double eps = 0.0;
    double l2q_err = 0.0;
    double pairing_zero = 0.0;  // |pairing| for the zero-Y-mean test preset
    double pairing_plain_u = 0.0, pairing_plain_v = 0.0;
    double limit_plain_u = 0.0, limit_plain_v = 0.0;
    double pairing_plain_gap = 0.0;  // |pairing - limit| over components
    double corrector_err = 0.0;
    double plain_grad_err = 0.0;
    double pressure_pair_fine = 0.0, pressure_pair_homog = 0.0, pressure_gap = 0.0;
    double energy_defect = 0.0;
    double h1_spacetime = 0.0, pressure_l2q = 0.0, accel_surrogate = 0.0;
    double apriori_lhs = 0.0, apriori_rhs = 0.0;
    bool apriori_holds = false;
};

struct SweepReport {
    RunConfig cfg;
    double alpha_hat = 0.0;
    double tensor_alpha0 = 0.0;
    double tensor_consistency_gap = 0.0;
    double tensor_major_violation = 0.0;
    double cell_max_residual = 0.0;
    long cell_total_iters = 0;
    double homog_energy_defect = 0.0;
    EffectiveTensor tensor;     // shipped value (direct formula)
    std::vector<SweepRow> rows; // ordered as cfg.eps
    double l2q_slope = 0.0;
    bool slope_degenerate = false;
    bool complete = false;
    std::string failure;
};

/// The standard sweep test functions (pinned; used by the acceptance suite).
struct SweepTestFunctions;

/// Runs the full pipeline: correctors -> tensor (both formulas) -> one
/// homogenized solve -> per-eps fine solves and metrics. Per-eps solves run
/// in parallel up to the STOKES_HOMOG_THREADS worker cap. Solve failures
/// yield a partial report flagged incomplete rather than throwing.
SweepReport epsilon_sweep(const RunConfig& cfg);

/// Worker cap: STOKES_HOMOG_THREADS if set, else the hardware concurrency.
int worker_cap();

void write_sweep_csv(std::ostream& os, const SweepReport& rep);
void write_summary_csv(std::ostream& os, const SweepReport& rep);
void write_plot_script(std::ostream& os, const std::string& csv_name);
std::string sweep_summary_text(const SweepReport& rep);

}  // namespace stokhom
