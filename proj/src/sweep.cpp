#include "stokhom/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "stokhom/report.hpp"
#include "stokhom/twoscale.hpp"

namespace stokhom {

int worker_cap() {
    if (const char* env = std::getenv("STOKES_HOMOG_THREADS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? int(hc) : 1;
}

namespace {

// the pinned sweep test functions
TestFunction zero_ymean_preset(double T) {
    TestFunction psi;
    psi.w = TestFunction::YFactor::Cos2;
    psi.chi = TestFunction::TauFactor::One;
    psi.T = T;
    return psi;
}

TestFunction plain_preset(double T) {
    TestFunction psi;
    psi.w = TestFunction::YFactor::One;
    psi.chi = TestFunction::TauFactor::One;
    psi.T = T;
    return psi;
}

}  // namespace

SweepReport epsilon_sweep(const RunConfig& cfg) {
    SweepReport rep;
    rep.cfg = cfg;

    CoefficientField field = make_preset(cfg.preset, cfg.preset_params);
    CellSampling sampling(cfg.n_cell);
    auto ell = ellipticity_estimate(field, sampling);
    if (!ell.ok) throw std::invalid_argument("epsilon_sweep: coefficient field rejected (alpha <= 0)");
    rep.alpha_hat = ell.alpha;

    Forcing forcing = Forcing::from_name(cfg.forcing, cfg.amplitude);
    MacGrid grid(cfg.n);

    CellSolveConfig ccfg;
    ccfg.n_cell = cfg.n_cell;
    ccfg.tol = cfg.cell_tol;
    ccfg.max_iter = cfg.cell_max_iter;

    CorrectorSet correctors;
    EffectiveTensor q_direct, q_energy;
    try {
        correctors = solve_all_correctors(field, ccfg);
        for (int i = 1; i <= 2; ++i)
            for (int k = 1; k <= 2; ++k) {
                rep.cell_max_residual = std::max(rep.cell_max_residual, correctors.info_at(i, k).residual);
                rep.cell_total_iters += correctors.info_at(i, k).iterations;
            }
        q_direct = effective_tensor_direct(field, correctors);
        q_energy = effective_tensor_energy(field, correctors);
        rep.tensor_consistency_gap = tensor_consistency_gap(q_direct, q_energy);
        q_direct.consistency_gap = rep.tensor_consistency_gap;
        rep.tensor_major_violation = tensor_symmetry_report(q_direct).max_major_violation;
        rep.tensor_alpha0 = tensor_ellipticity(q_direct);
        rep.tensor = q_direct;
    } catch (const std::exception& e) {
        rep.failure = std::string("cell/tensor stage: ") + e.what();
        return rep;
    }

    Trajectory homog;
    HomogOperator homog_op(grid, q_direct);
    try {
        homog = solve_unsteady(grid, homog_op, forcing, cfg.T, cfg.M);
        rep.homog_energy_defect = energy_balance(homog, homog_op, forcing);
    } catch (const std::exception& e) {
        rep.failure = std::string("homogenized solve: ") + e.what();
        return rep;
    }

    TestFunction psi_zero = zero_ymean_preset(cfg.T);
    TestFunction psi_plain = plain_preset(cfg.T);

    size_t neps = cfg.eps.size();
    rep.rows.assign(neps, SweepRow{});
    std::vector<std::string> errors(neps);
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        while (true) {
            size_t idx = next.fetch_add(1);
            if (idx >= neps) return;
            double eps = cfg.eps[idx];
            SweepRow row;
            row.eps = eps;
            try {
                FineOperator fine_op(grid, field, eps);
                Trajectory fine = solve_unsteady(grid, fine_op, forcing, cfg.T, cfg.M);

                row.l2q_err = l2q_error(fine, homog);
                row.pairing_zero = two_scale_pairing(fine, psi_zero, eps).norm();
                PairingValue pp = two_scale_pairing(fine, psi_plain, eps);
                PairingValue lp = limit_pairing(homog, psi_plain);
                row.pairing_plain_u = pp.u;
                row.pairing_plain_v = pp.v;
                row.limit_plain_u = lp.u;
                row.limit_plain_v = lp.v;
                row.pairing_plain_gap = std::hypot(pp.u - lp.u, pp.v - lp.v);
                row.corrector_err = corrector_error(fine, homog, correctors, eps);
                row.plain_grad_err = plain_gradient_error(fine, homog);
                auto [pf, ph] = pressure_pairing(fine, homog, psi_plain);
                row.pressure_pair_fine = pf;
                row.pressure_pair_homog = ph;
                row.pressure_gap = std::fabs(pf - ph);
                row.energy_defect = energy_balance(fine, fine_op, forcing);
                AprioriReport ap = apriori_bound_check(fine, forcing, rep.alpha_hat);
                row.h1_spacetime = ap.h1_spacetime;
                row.pressure_l2q = ap.pressure_l2q;
                row.accel_surrogate = ap.accel_surrogate;
                row.apriori_lhs = ap.lhs;
                row.apriori_rhs = ap.rhs_surrogate;
                row.apriori_holds = ap.holds;
            } catch (const std::exception& e) {
                errors[idx] = e.what();
            }
            rep.rows[idx] = row;
        }
    };

    int nworkers = std::min<int>(worker_cap(), int(neps));
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (size_t i = 0; i < neps; ++i) {
        if (!errors[i].empty()) {
            rep.failure = "fine solve eps=" + cfg.eps_tokens[i] + ": " + errors[i];
            return rep;
        }
    }

    // log-log slope of the velocity error, skipped for degenerate (constant
    // coefficient) sweeps where the errors sit at solver noise
    bool degenerate = false;
    for (const auto& row : rep.rows)
        if (row.l2q_err <= 1e-9) degenerate = true;
    if (degenerate || neps < 3) {
        rep.slope_degenerate = true;
    } else {
        std::vector<double> errs;
        for (const auto& row : rep.rows) errs.push_back(row.l2q_err);
        rep.l2q_slope = fit_rate(cfg.eps, errs);
    }

    rep.complete = true;
    return rep;
}

void write_sweep_csv(std::ostream& os, const SweepReport& rep) {
    os << "eps,l2q_err,pairing_zero,pairing_plain_u,pairing_plain_v,limit_plain_u,limit_plain_v,"
          "pairing_plain_gap,corrector_err,plain_grad_err,pressure_pair_fine,pressure_pair_homog,"
          "pressure_gap,energy_defect,h1_spacetime,pressure_l2q,accel_surrogate,apriori_lhs,apriori_rhs,"
          "apriori_holds\n";
    for (const auto& r : rep.rows) {
        os << csv_double(r.eps) << "," << csv_double(r.l2q_err) << "," << csv_double(r.pairing_zero) << ","
           << csv_double(r.pairing_plain_u) << "," << csv_double(r.pairing_plain_v) << ","
           << csv_double(r.limit_plain_u) << "," << csv_double(r.limit_plain_v) << ","
           << csv_double(r.pairing_plain_gap) << "," << csv_double(r.corrector_err) << ","
           << csv_double(r.plain_grad_err) << "," << csv_double(r.pressure_pair_fine) << ","
           << csv_double(r.pressure_pair_homog) << "," << csv_double(r.pressure_gap) << ","
           << csv_double(r.energy_defect) << "," << csv_double(r.h1_spacetime) << ","
           << csv_double(r.pressure_l2q) << "," << csv_double(r.accel_surrogate) << ","
           << csv_double(r.apriori_lhs) << "," << csv_double(r.apriori_rhs) << ","
           << (r.apriori_holds ? 1 : 0) << "\n";
    }
}

void write_summary_csv(std::ostream& os, const SweepReport& rep) {
    os << "key,value\n";
    os << "preset," << rep.cfg.preset << "\n";
    os << "n," << rep.cfg.n << "\n";
    os << "n_cell," << rep.cfg.n_cell << "\n";
    os << "T," << csv_double(rep.cfg.T) << "\n";
    os << "M," << rep.cfg.M << "\n";
    os << "forcing," << rep.cfg.forcing << "\n";
    os << "amplitude," << csv_double(rep.cfg.amplitude) << "\n";
    os << "alpha_hat," << csv_double(rep.alpha_hat) << "\n";
    os << "tensor_alpha0," << csv_double(rep.tensor_alpha0) << "\n";
    os << "tensor_consistency_gap," << csv_double(rep.tensor_consistency_gap) << "\n";
    os << "tensor_major_violation," << csv_double(rep.tensor_major_violation) << "\n";
    os << "cell_max_residual," << csv_double(rep.cell_max_residual) << "\n";
    os << "cell_total_iters," << rep.cell_total_iters << "\n";
    os << "homog_energy_defect," << csv_double(rep.homog_energy_defect) << "\n";
    os << "l2q_slope," << csv_double(rep.l2q_slope) << "\n";
    os << "slope_degenerate," << (rep.slope_degenerate ? 1 : 0) << "\n";
    os << "complete," << (rep.complete ? 1 : 0) << "\n";
    os << "failure," << rep.failure << "\n";
}

void write_plot_script(std::ostream& os, const std::string& csv_name) {
    os << "# gnuplot script: velocity error vs eps (log-log)\n";
    os << "set datafile separator \",\"\n";
    os << "set logscale xy\n";
    os << "set xlabel \"eps\"\n";
    os << "set ylabel \"error\"\n";
    os << "set key left top\n";
    os << "plot \"" << csv_name << "\" skip 1 using 1:2 with linespoints title \"||u_eps - u_0||\", \\\n";
    os << "     \"" << csv_name << "\" skip 1 using 1:9 with linespoints title \"corrector error\", \\\n";
    os << "     \"" << csv_name << "\" skip 1 using 1:10 with linespoints title \"plain gradient error\"\n";
}

std::string sweep_summary_text(const SweepReport& rep) {
    std::ostringstream os;
    os << "sweep: preset=" << rep.cfg.preset << " n=" << rep.cfg.n << " n_cell=" << rep.cfg.n_cell
       << " M=" << rep.cfg.M << " T=" << csv_double(rep.cfg.T) << "\n";
    os << "  alpha_hat=" << csv_double(rep.alpha_hat) << "  tensor alpha0=" << csv_double(rep.tensor_alpha0)
       << "  cross-formula gap=" << csv_double(rep.tensor_consistency_gap) << "\n";
    for (const auto& r : rep.rows) {
        os << "  eps=" << csv_double(r.eps) << "  l2q=" << csv_double(r.l2q_err)
           << "  corrector=" << csv_double(r.corrector_err) << "  plain_grad=" << csv_double(r.plain_grad_err)
           << "  energy_defect=" << csv_double(r.energy_defect) << "  apriori=" << (r.apriori_holds ? "ok" : "VIOLATED")
           << "\n";
    }
    if (rep.slope_degenerate)
        os << "  slope: degenerate (errors at solver noise)\n";
    else
        os << "  fitted l2q slope: " << csv_double(rep.l2q_slope) << "\n";
    os << (rep.complete ? "  complete\n" : "  INCOMPLETE: " + rep.failure + "\n");
    return os.str();
}

}  // namespace stokhom
