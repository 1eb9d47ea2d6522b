#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "stokhom/cell.hpp"
#include "stokhom/config.hpp"
#include "stokhom/fielddump.hpp"
#include "stokhom/report.hpp"
#include "stokhom/sweep.hpp"
#include "stokhom/tensor.hpp"
#include "stokhom/twoscale.hpp"

namespace fs = std::filesystem;
using namespace stokhom;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

RunConfig load_cfg(const std::string& path, const std::string& out_override) {
    RunConfig cfg = load_config_file(path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    fs::create_directories(cfg.out_dir);
    return cfg;
}

std::string corrector_path(const RunConfig& cfg, int i, int k, const char* comp) {
    std::ostringstream os;
    os << cfg.out_dir << "/chi_" << i << k << "_" << comp << ".fld";
    return os.str();
}

void dump_correctors(const RunConfig& cfg, const CorrectorSet& set) {
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k) {
            const CorrectorField& c = set.at(i, k);
            std::ostringstream meta;
            meta << "preset=" << cfg.preset << " i=" << i << " k=" << k << " n_cell=" << cfg.n_cell;
            dump_field(corrector_path(cfg, i, k, "u"), {"cell", meta.str(), c.u1});
            dump_field(corrector_path(cfg, i, k, "v"), {"cell", meta.str(), c.u2});
            dump_field(corrector_path(cfg, i, k, "p"), {"cell", meta.str(), c.pressure});
        }
}

bool load_correctors(const RunConfig& cfg, CorrectorSet& set) {
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k)
            for (const char* comp : {"u", "v", "p"})
                if (!fs::exists(corrector_path(cfg, i, k, comp))) return false;
    set.n = cfg.n_cell;
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k) {
            CorrectorField& c = set.at(i, k);
            c.i = i;
            c.k = k;
            auto fu = load_field(corrector_path(cfg, i, k, "u"));
            auto fv = load_field(corrector_path(cfg, i, k, "v"));
            auto fp = load_field(corrector_path(cfg, i, k, "p"));
            if (fu.data.nx != cfg.n_cell || fv.data.nx != cfg.n_cell || fp.data.nx != cfg.n_cell)
                throw std::runtime_error("corrector dump lattice does not match n_cell");
            c.u1 = fu.data;
            c.u2 = fv.data;
            c.pressure = fp.data;
        }
    return true;
}

CorrectorSet correctors_for(const RunConfig& cfg, const CoefficientField& field, bool* loaded = nullptr) {
    CorrectorSet set;
    if (load_correctors(cfg, set)) {
        if (loaded) *loaded = true;
        return set;
    }
    CellSolveConfig ccfg{cfg.n_cell, cfg.cell_tol, cfg.cell_max_iter};
    if (loaded) *loaded = false;
    return solve_all_correctors(field, ccfg);
}

void write_trajectory_outputs(const RunConfig& cfg, const std::string& tag, const Trajectory& traj,
                              const VelocityOperator& op, const Forcing& forcing) {
    MacGrid g(cfg.n);
    double h2 = g.h * g.h;
    FineOperator identity_op(g, make_preset("constant", {1.0}), 1.0);

    std::ofstream norms(cfg.out_dir + "/" + tag + "_norms.csv");
    norms << "step,t,vel_l2,vel_h1,p_l2,div_max\n";
    for (size_t m = 0; m < traj.states.size(); ++m) {
        const State& s = traj.states[m];
        Array2D div;
        mac_divergence(g, s.vel, div);
        norms << m << "," << csv_double(s.t) << "," << csv_double(std::sqrt(h2 * dot(s.vel, s.vel))) << ","
              << csv_double(std::sqrt(identity_op.form(s.vel, s.vel))) << ","
              << csv_double(std::sqrt(h2 * dot(s.p, s.p))) << "," << csv_double(div.max_abs()) << "\n";
        if (cfg.stride > 0 && m % size_t(cfg.stride) == 0) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "_step%04zu", m);
            std::string meta = "t=" + csv_double(s.t);
            dump_field(cfg.out_dir + "/" + tag + buf + "_u.fld", {"mac-u", meta, s.vel.u});
            dump_field(cfg.out_dir + "/" + tag + buf + "_v.fld", {"mac-v", meta, s.vel.v});
            dump_field(cfg.out_dir + "/" + tag + buf + "_p.fld", {"mac-p", meta, s.p});
        }
    }
    const State& fin = traj.states.back();
    std::string meta = "t=" + csv_double(fin.t);
    dump_field(cfg.out_dir + "/" + tag + "_u.fld", {"mac-u", meta, fin.vel.u});
    dump_field(cfg.out_dir + "/" + tag + "_v.fld", {"mac-v", meta, fin.vel.v});
    dump_field(cfg.out_dir + "/" + tag + "_p.fld", {"mac-p", meta, fin.p});

    std::cout << tag << ": " << traj.states.size() - 1 << " steps, energy identity defect "
              << csv_double(energy_balance(traj, op, forcing)) << "\n";
}

EffectiveTensor tensor_pipeline(const RunConfig& cfg, bool write_files) {
    CoefficientField field = make_preset(cfg.preset, cfg.preset_params);
    bool loaded = false;
    CorrectorSet set = correctors_for(cfg, field, &loaded);
    EffectiveTensor qd = effective_tensor_direct(field, set);
    EffectiveTensor qe = effective_tensor_energy(field, set);
    qd.consistency_gap = tensor_consistency_gap(qd, qe);
    double alpha0 = tensor_ellipticity(qd);
    auto rep = tensor_symmetry_report(qd);
    if (write_files) {
        std::ofstream td(cfg.out_dir + "/tensor.csv");
        write_tensor_csv(td, qd);
        std::ofstream te(cfg.out_dir + "/tensor_energy.csv");
        write_tensor_csv(te, qe);
        std::ofstream tr(cfg.out_dir + "/tensor_report.csv");
        tr << "key,value\n";
        tr << "alpha0," << csv_double(alpha0) << "\n";
        tr << "consistency_gap," << csv_double(qd.consistency_gap) << "\n";
        tr << "major_violation," << csv_double(rep.max_major_violation) << "\n";
        tr << "minor_violation," << csv_double(rep.max_minor_violation) << "\n";
        tr << "correctors_loaded," << (loaded ? 1 : 0) << "\n";
    }
    std::cout << "tensor: alpha0=" << csv_double(alpha0) << " cross-formula gap="
              << csv_double(qd.consistency_gap) << " (correctors " << (loaded ? "loaded" : "solved") << ")\n";
    return qd;
}

int run_cell_solve(const RunConfig& cfg) {
    CoefficientField field = make_preset(cfg.preset, cfg.preset_params);
    CellSolveConfig ccfg{cfg.n_cell, cfg.cell_tol, cfg.cell_max_iter};
    CorrectorSet set = solve_all_correctors(field, ccfg);
    dump_correctors(cfg, set);
    std::ofstream meta(cfg.out_dir + "/cell_meta.csv");
    meta << "i,k,iterations,residual\n";
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k)
            meta << i << "," << k << "," << set.info_at(i, k).iterations << ","
                 << csv_double(set.info_at(i, k).residual) << "\n";
    std::cout << "cell-solve: 4 correctors on " << cfg.n_cell << "^2 lattice written to " << cfg.out_dir
              << "\n";
    return 0;
}

int run_solve_fine(const RunConfig& cfg, const std::string& eps_token) {
    double eps = 0.0;
    if (!parse_eps_token(eps_token, eps) || eps <= 0.0 || eps >= 1.0)
        throw ConfigError({"--eps '" + eps_token + "' is not a valid value in (0, 1)"});
    std::string why;
    if (!resonance_compatible(eps_token, eps, cfg.n, &why))
        throw ConfigError({"--eps " + eps_token + " with n = " + std::to_string(cfg.n) +
                           " violates the resonance guard: " + why});
    CoefficientField field = make_preset(cfg.preset, cfg.preset_params);
    Forcing forcing = Forcing::from_name(cfg.forcing, cfg.amplitude);
    MacGrid grid(cfg.n);
    FineOperator op(grid, field, eps);
    Trajectory traj = solve_unsteady(grid, op, forcing, cfg.T, cfg.M);
    write_trajectory_outputs(cfg, "fine", traj, op, forcing);
    return 0;
}

int run_solve_homog(const RunConfig& cfg) {
    EffectiveTensor q = tensor_pipeline(cfg, true);
    Forcing forcing = Forcing::from_name(cfg.forcing, cfg.amplitude);
    MacGrid grid(cfg.n);
    HomogOperator op(grid, q);
    Trajectory traj = solve_unsteady(grid, op, forcing, cfg.T, cfg.M);
    write_trajectory_outputs(cfg, "homog", traj, op, forcing);
    return 0;
}

int run_sweep(const RunConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    SweepReport rep = epsilon_sweep(cfg);
    {
        std::ofstream rcsv(cfg.out_dir + "/report.csv");
        write_sweep_csv(rcsv, rep);
        std::ofstream scsv(cfg.out_dir + "/summary.csv");
        write_summary_csv(scsv, rep);
        std::ofstream plot(cfg.out_dir + "/plot_errors.gp");
        write_plot_script(plot, "report.csv");
        std::ofstream tcsv(cfg.out_dir + "/tensor.csv");
        write_tensor_csv(tcsv, rep.tensor);
    }
    // wall-clock sidecar; timestamps stay out of the CSV bodies
    auto dt = std::chrono::duration_cast<std::chrono::seconds>(std::chrono::steady_clock::now() - t0);
    std::ofstream log(cfg.out_dir + "/sweep.log", std::ios::app);
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    log << "sweep finished at " << now << " after " << dt.count() << " s, complete=" << rep.complete << "\n";

    std::cout << sweep_summary_text(rep);
    if (!rep.complete) {
        std::cerr << "sweep incomplete: " << rep.failure << "\n";
        return kExitSolver;
    }
    return 0;
}

int run_report(const RunConfig& cfg) {
    std::ifstream rcsv(cfg.out_dir + "/report.csv");
    std::ifstream scsv(cfg.out_dir + "/summary.csv");
    if (!rcsv || !scsv)
        throw ConfigError({"no sweep artifacts in '" + cfg.out_dir + "' (run the sweep subcommand first)"});
    std::cout << "summary (" << cfg.out_dir << "/summary.csv):\n";
    std::string line;
    while (std::getline(scsv, line)) std::cout << "  " << line << "\n";
    std::cout << "per-eps report (" << cfg.out_dir << "/report.csv):\n";
    while (std::getline(rcsv, line)) std::cout << "  " << line << "\n";
    std::ofstream plot(cfg.out_dir + "/plot_errors.gp");
    write_plot_script(plot, "report.csv");
    std::cout << "plot script written to " << cfg.out_dir << "/plot_errors.gp\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stokes-homog: periodic homogenization pipeline for unsteady Stokes-type problems"};
    app.require_subcommand(1);

    std::string config_path, out_override, eps_token;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--out", out_override, "output directory (overrides the config)");
    };

    CLI::App* cell = app.add_subcommand("cell-solve", "solve the periodic cell problems and dump correctors");
    add_common(cell);
    CLI::App* tensor = app.add_subcommand("tensor", "assemble the homogenized tensor (loads corrector dumps when present)");
    add_common(tensor);
    CLI::App* fine = app.add_subcommand("solve-fine", "solve the fine-scale problem for one eps");
    add_common(fine);
    fine->add_option("--eps", eps_token, "oscillation scale (fraction like 1/8, or decimal)")->required();
    CLI::App* homog = app.add_subcommand("solve-homog", "solve the homogenized problem");
    add_common(homog);
    CLI::App* sweep = app.add_subcommand("sweep", "run the full eps sweep and write the CSV report");
    add_common(sweep);
    CLI::App* report = app.add_subcommand("report", "summarize an existing sweep report");
    add_common(report);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_cfg(config_path, out_override);
        if (cell->parsed()) return run_cell_solve(cfg);
        if (tensor->parsed()) return tensor_pipeline(cfg, true), 0;
        if (fine->parsed()) return run_solve_fine(cfg, eps_token);
        if (homog->parsed()) return run_solve_homog(cfg);
        if (sweep->parsed()) return run_sweep(cfg);
        if (report->parsed()) return run_report(cfg);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    return 0;
}
