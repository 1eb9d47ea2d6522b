#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "stokhom/fftplan.hpp"
#include "stokhom/mac.hpp"

namespace stokhom {

/// Body force presets. "taylor" is the default smooth, divergence-free field
///   f(x,t) = A (1 - e^{-t}) (sin^2(pi x1) sin(2 pi x2), -sin(2 pi x1) sin^2(pi x2)),
/// vanishing on the boundary and at t = 0.
struct Forcing {
    enum class Kind { Zero, Taylor };
    Kind kind = Kind::Taylor;
    double amplitude = 1.0;

    double fu(double x, double y, double t) const;
    double fv(double x, double y, double t) const;
    void sample(const MacGrid& g, double t, MacField& out) const;

    static Forcing from_name(const std::string& name, double amplitude = 1.0);
    const char* name() const;
};

struct State {
    double t = 0.0;
    MacField vel;
    Array2D p;

    State() = default;
    explicit State(int n) : vel(n), p(n, n) {}
};

struct Trajectory {
    int n = 0;
    double T = 0.0;
    double dt = 0.0;
    std::vector<State> states;  // M+1 states, states[0] at rest
};

struct StepperConfig {
    double div_tol = 1e-10;    // max-norm stopping for the discrete divergence
    double inner_tol = 1e-12;  // relative residual of the inner velocity solves
    long max_outer = 5000;
    long max_inner = 100000;
};

struct StepStats {
    long outer_iters = 0;
    long inner_iters = 0;
    double div_max = 0.0;
};

/// Exact inverse of sigma I - d_x(a(x) d_x) - a(x) d_yy per component, with
/// the grid's boundary stencils: sine transform along y, then one
/// variable-coefficient tridiagonal solve in x per y-mode. Inner CG
/// preconditioner; exact for x-separable coefficients.
class FastDiagPrecond {
public:
    FastDiagPrecond(const MacGrid& g, double sigma, const PrecondHint& hint);
    void apply(const MacField& r, MacField& z) const;

private:
    int n_;
    double h2_;
    double sigma_;
    PrecondHint hint_;
    std::vector<double> lam_;  // (2 - 2 cos(pi k / n)) / h^2, k = 0..n
    std::unique_ptr<BatchR2R> uy_fwd_, uy_inv_, vy_;
    mutable std::vector<double> ubuf_, vbuf_, tri_b_, tri_d_;
};

/// Uzawa / pressure-Schur conjugate gradient stepper for the implicit Euler
/// discretization of du/dt + A u + grad p = f, div u = 0:
///   (I/dt + A) u^{n+1} + G p^{n+1} = u^n/dt + f(t^{n+1}),  D u^{n+1} = 0,
/// with inner preconditioned CG velocity solves and a pressure Poisson /
/// mass preconditioner on the Schur complement.
class ImplicitStepper {
public:
    ImplicitStepper(const MacGrid& g, const VelocityOperator& op, double dt, StepperConfig cfg = {});

    /// Advances the state in place to t + dt. The previous pressure warm-starts
    /// the Schur CG. Throws on non-convergence.
    StepStats step(State& s, const Forcing& f) const;

    double dt() const { return dt_; }

    /// velocity solve (sigma I + A) x = b by preconditioned CG; returns iterations
    long solve_velocity(const MacField& b, MacField& x) const;

private:
    void apply_h(const MacField& z, MacField& out) const;
    void pressure_precondition(const Array2D& r, Array2D& z) const;

    MacGrid grid_;
    const VelocityOperator* op_;
    double dt_, sigma_;
    StepperConfig cfg_;
    FastDiagPrecond vprec_;
    double cbar_;
    std::vector<double> plam_;  // pressure Laplacian eigenvalues per direction
    std::unique_ptr<BatchR2R> px_fwd_, px_inv_, py_fwd_, py_inv_;
    mutable std::vector<double> pbuf_;
};

using StepObserver = std::function<void(int step, const State& s, const StepStats& stats)>;

/// M implicit Euler steps from rest; returns the full trajectory.
Trajectory solve_unsteady(const MacGrid& g, const VelocityOperator& op, const Forcing& f, double T, int M,
                          StepperConfig cfg = {});

/// Streaming variant: states are handed to the observer and not stored.
void solve_unsteady_stream(const MacGrid& g, const VelocityOperator& op, const Forcing& f, double T, int M,
                           StepperConfig cfg, const StepObserver& observe);

/// Relative defect of the discrete energy identity
///   1/2 |u^M|^2 + sum 1/2 |u^{n+1}-u^n|^2 + sum dt a_h(u^{n+1},u^{n+1})
///     = sum dt (f^{n+1}, u^{n+1});
/// exact for implicit Euler up to linear-solver tolerances.
double energy_balance(const Trajectory& traj, const VelocityOperator& op, const Forcing& f);

struct AprioriReport {
    double lhs = 0.0;            // alpha sum dt ||grad u||^2
    double rhs_surrogate = 0.0;  // (1/alpha) C_P^2 sum dt ||f||_{L2}^2
    bool holds = false;
    double h1_spacetime = 0.0;     // (sum dt ||grad u||^2)^{1/2}
    double pressure_l2q = 0.0;     // (sum dt ||p||^2)^{1/2}
    double accel_surrogate = 0.0;  // (sum dt ||(u^{n+1}-u^n)/dt||^2)^{1/2}
};

/// Monitored quantities of the a-priori estimates. The dual norm of f is
/// bounded by the L2 norm times the unit-square Poincare constant 1/(pi sqrt 2).
AprioriReport apriori_bound_check(const Trajectory& traj, const Forcing& f, double alpha);

}  // namespace stokhom
