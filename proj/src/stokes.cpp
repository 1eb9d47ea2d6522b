#include "stokhom/stokes.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace stokhom {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kPoincareUnitSquare = 0.22507907903927651;  // 1 / (pi sqrt 2)
}  // namespace

double Forcing::fu(double x, double y, double t) const {
    if (kind == Kind::Zero) return 0.0;
    double s = std::sin(kPi * x);
    return amplitude * (1.0 - std::exp(-t)) * s * s * std::sin(2.0 * kPi * y);
}

double Forcing::fv(double x, double y, double t) const {
    if (kind == Kind::Zero) return 0.0;
    double s = std::sin(kPi * y);
    return -amplitude * (1.0 - std::exp(-t)) * std::sin(2.0 * kPi * x) * s * s;
}

void Forcing::sample(const MacGrid& g, double t, MacField& out) const {
    int n = g.n;
    out = MacField(n);
    if (kind == Kind::Zero) return;
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) out.u(i, j) = fu(g.xu(i), g.yu(j), t);
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) out.v(i, j) = fv(g.xv(i), g.yv(j), t);
}

Forcing Forcing::from_name(const std::string& name, double amplitude) {
    Forcing f;
    f.amplitude = amplitude;
    if (name == "zero")
        f.kind = Kind::Zero;
    else if (name == "taylor")
        f.kind = Kind::Taylor;
    else
        throw std::invalid_argument("unknown forcing preset '" + name + "'");
    return f;
}

const char* Forcing::name() const { return kind == Kind::Zero ? "zero" : "taylor"; }

// ---------------------------------------------------------------------------
// fast diagonalization preconditioner
// ---------------------------------------------------------------------------

FastDiagPrecond::FastDiagPrecond(const MacGrid& g, double sigma, const PrecondHint& hint)
    : n_(g.n), h2_(g.h * g.h), sigma_(sigma), hint_(hint) {
    int n = n_;
    if (int(hint_.u_flux_x.size()) != n || int(hint_.u_lam_x.size()) != n + 1 ||
        int(hint_.v_flux_x.size()) != n + 1 || int(hint_.v_lam_x.size()) != n)
        throw std::invalid_argument("FastDiagPrecond: profile sizes do not match the grid");
    lam_.resize(n + 1);
    for (int k = 0; k <= n; ++k) lam_[k] = (2.0 - 2.0 * std::cos(kPi * k / n)) / h2_;
    // u interior block: (n-1) x n, layout (i-1)*n + j; DST-II/III along y
    uy_fwd_ = std::make_unique<BatchR2R>(n, n - 1, 1, n, FFTW_RODFT10);
    uy_inv_ = std::make_unique<BatchR2R>(n, n - 1, 1, n, FFTW_RODFT01);
    // v interior block: n x (n-1), layout i*(n-1) + (j-1); DST-I along y
    vy_ = std::make_unique<BatchR2R>(n - 1, n, 1, n - 1, FFTW_RODFT00);
    ubuf_.resize(size_t(n - 1) * n);
    vbuf_.resize(size_t(n) * (n - 1));
    tri_b_.resize(n + 1);
    tri_d_.resize(n + 1);
}

void FastDiagPrecond::apply(const MacField& r, MacField& z) const {
    int n = n_;
    z = MacField(n);
    double ih2 = 1.0 / h2_;

    // --- u component: DST-II along y, tridiagonal solve along x per y-mode.
    // x-part at node i: (-fx[i-1] u(i-1) + (fx[i-1]+fx[i]) u(i) - fx[i] u(i+1)) / h^2
    // with Dirichlet ends; y-part adds u_lam_x[i] * lam(k).
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) ubuf_[size_t(i - 1) * n + j] = r.u(i, j);
    uy_fwd_->execute(ubuf_.data());
    const auto& fxu = hint_.u_flux_x;
    for (int k = 0; k < n; ++k) {
        double lam = lam_[k + 1];
        // assemble and solve (Thomas) over i = 1..n-1
        for (int i = 1; i < n; ++i) {
            tri_d_[i] = sigma_ + (fxu[i - 1] + fxu[i]) * ih2 + hint_.u_lam_x[i] * lam;
            tri_b_[i] = ubuf_[size_t(i - 1) * n + k];
        }
        for (int i = 2; i < n; ++i) {
            double sub = -fxu[i - 1] * ih2;  // coupling between nodes i-1 and i
            double m = sub / tri_d_[i - 1];
            tri_d_[i] -= m * sub;
            tri_b_[i] -= m * tri_b_[i - 1];
        }
        double prev = tri_b_[n - 1] / tri_d_[n - 1];
        ubuf_[size_t(n - 2) * n + k] = prev;
        for (int i = n - 2; i >= 1; --i) {
            double sup = -fxu[i] * ih2;
            prev = (tri_b_[i] - sup * prev) / tri_d_[i];
            ubuf_[size_t(i - 1) * n + k] = prev;
        }
    }
    uy_inv_->execute(ubuf_.data());
    double unorm = 1.0 / (2.0 * n);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) z.u(i, j) = ubuf_[size_t(i - 1) * n + j] * unorm;

    // --- v component: DST-I along y, tridiagonal solve along x per y-mode.
    // x-part with mirror ghosts: row 0 diag gains 2 fx[0], row n-1 gains 2 fx[n].
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) vbuf_[size_t(i) * (n - 1) + (j - 1)] = r.v(i, j);
    vy_->execute(vbuf_.data());
    const auto& fxv = hint_.v_flux_x;
    for (int k = 0; k < n - 1; ++k) {
        double lam = lam_[k + 1];
        for (int i = 0; i < n; ++i) {
            double diag = (i == 0 ? 2.0 * fxv[0] + fxv[1]
                                  : (i == n - 1 ? fxv[n - 1] + 2.0 * fxv[n] : fxv[i] + fxv[i + 1])) *
                          ih2;
            tri_d_[i] = sigma_ + diag + hint_.v_lam_x[i] * lam;
            tri_b_[i] = vbuf_[size_t(i) * (n - 1) + k];
        }
        for (int i = 1; i < n; ++i) {
            double sub = -fxv[i] * ih2;
            double m = sub / tri_d_[i - 1];
            tri_d_[i] -= m * sub;
            tri_b_[i] -= m * tri_b_[i - 1];
        }
        double prev = tri_b_[n - 1] / tri_d_[n - 1];
        vbuf_[size_t(n - 1) * (n - 1) + k] = prev;
        for (int i = n - 2; i >= 0; --i) {
            double sup = -fxv[i + 1] * ih2;
            prev = (tri_b_[i] - sup * prev) / tri_d_[i];
            vbuf_[size_t(i) * (n - 1) + k] = prev;
        }
    }
    vy_->execute(vbuf_.data());
    double vnorm = 1.0 / (2.0 * n);
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) z.v(i, j) = vbuf_[size_t(i) * (n - 1) + (j - 1)] * vnorm;
}

// ---------------------------------------------------------------------------
// implicit stepper
// ---------------------------------------------------------------------------

ImplicitStepper::ImplicitStepper(const MacGrid& g, const VelocityOperator& op, double dt, StepperConfig cfg)
    : grid_(g), op_(&op), dt_(dt), sigma_(1.0 / dt), cfg_(cfg), vprec_(g, 1.0 / dt, op.precond_hint()) {
    if (dt <= 0.0) throw std::invalid_argument("ImplicitStepper: dt must be > 0");
    int n = g.n;
    cbar_ = op.precond_hint().cbar;
    plam_.resize(n);
    for (int k = 0; k < n; ++k) plam_[k] = (2.0 - 2.0 * std::cos(kPi * k / n)) / (g.h * g.h);
    px_fwd_ = std::make_unique<BatchR2R>(n, n, n, 1, FFTW_REDFT10);
    px_inv_ = std::make_unique<BatchR2R>(n, n, n, 1, FFTW_REDFT01);
    py_fwd_ = std::make_unique<BatchR2R>(n, n, 1, n, FFTW_REDFT10);
    py_inv_ = std::make_unique<BatchR2R>(n, n, 1, n, FFTW_REDFT01);
    pbuf_.resize(size_t(n) * n);
}

void ImplicitStepper::apply_h(const MacField& z, MacField& out) const {
    op_->apply(z, out);
    axpy(sigma_, z, out);
    out.zero_pinned();
}

long ImplicitStepper::solve_velocity(const MacField& b, MacField& x) const {
    int n = grid_.n;
    x = MacField(n);
    double bnorm = std::sqrt(dot(b, b));
    if (bnorm == 0.0) return 0;
    MacField r = b, z(n), p(n), q(n);
    vprec_.apply(r, z);
    p = z;
    double rz = dot(r, z);
    long it = 0;
    while (it < cfg_.max_inner) {
        apply_h(p, q);
        double pq = dot(p, q);
        if (pq <= 0.0) break;
        double alpha = rz / pq;
        axpy(alpha, p, x);
        axpy(-alpha, q, r);
        ++it;
        if (std::sqrt(dot(r, r)) <= cfg_.inner_tol * bnorm) return it;
        vprec_.apply(r, z);
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (size_t m = 0; m < p.u.size(); ++m) p.u.a[m] = z.u.a[m] + beta * p.u.a[m];
        for (size_t m = 0; m < p.v.size(); ++m) p.v.a[m] = z.v.a[m] + beta * p.v.a[m];
    }
    std::ostringstream os;
    os << "velocity CG did not converge within " << cfg_.max_inner << " iterations (relative residual "
       << std::sqrt(dot(r, r)) / bnorm << ")";
    throw std::runtime_error(os.str());
}

void ImplicitStepper::pressure_precondition(const Array2D& r, Array2D& z) const {
    // Cahouet-Chabard: M^{-1} = sigma L_N^+ + cbar I, diagonalized by DCT-II
    int n = grid_.n;
    std::copy(r.a.begin(), r.a.end(), pbuf_.begin());
    px_fwd_->execute(pbuf_.data());
    py_fwd_->execute(pbuf_.data());
    double norm = 1.0 / (4.0 * double(n) * double(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double lam = plam_[i] + plam_[j];
            double w = (lam > 0.0) ? (sigma_ / lam + cbar_) : 0.0;
            pbuf_[size_t(i) * n + j] *= w * norm;
        }
    py_inv_->execute(pbuf_.data());
    px_inv_->execute(pbuf_.data());
    z.nx = z.ny = n;
    z.a.assign(pbuf_.begin(), pbuf_.end());
    z.subtract_mean();
}

StepStats ImplicitStepper::step(State& s, const Forcing& f) const {
    int n = grid_.n;
    StepStats stats;
    double tnew = s.t + dt_;

    MacField b(n);
    f.sample(grid_, tnew, b);
    axpy(sigma_, s.vel, b);
    b.zero_pinned();

    Array2D p = s.p;
    MacField gp(n), u(n), w(n), hw(n);
    Array2D r(n, n), z(n, n), pdir(n, n), q(n, n);

    mac_gradient(grid_, p, gp);
    MacField rhsv = b;
    axpy(-1.0, gp, rhsv);
    stats.inner_iters += solve_velocity(rhsv, u);

    auto compute_div_residual = [&](Array2D& out) {
        mac_divergence(grid_, u, out);
        for (auto& val : out.a) val = -val;
    };
    compute_div_residual(r);
    long outer = 0;
    if (r.max_abs() > cfg_.div_tol) {
        pressure_precondition(r, z);
        pdir = z;
        double rz = dot(r, z);
        while (outer < cfg_.max_outer) {
            mac_gradient(grid_, pdir, w);
            stats.inner_iters += solve_velocity(w, hw);
            mac_divergence(grid_, hw, q);
            for (auto& val : q.a) val = -val;  // q = S pdir = -D H^{-1} G pdir
            double pq = dot(pdir, q);
            if (pq <= 0.0) break;
            double alpha = rz / pq;
            axpy(alpha, pdir, p);
            axpy(-alpha, hw, u);
            axpy(-alpha, q, r);
            ++outer;
            if (outer % 25 == 0) compute_div_residual(r);  // residual replacement
            if (r.max_abs() <= cfg_.div_tol) {
                compute_div_residual(r);
                if (r.max_abs() <= cfg_.div_tol) break;
            }
            pressure_precondition(r, z);
            double rz_new = dot(r, z);
            double beta = rz_new / rz;
            rz = rz_new;
            for (size_t m = 0; m < pdir.size(); ++m) pdir.a[m] = z.a[m] + beta * pdir.a[m];
        }
        compute_div_residual(r);
        if (r.max_abs() > cfg_.div_tol) {
            std::ostringstream os;
            os << "pressure Schur CG did not converge: divergence " << r.max_abs() << " > " << cfg_.div_tol
               << " after " << outer << " iterations";
            throw std::runtime_error(os.str());
        }
    }
    stats.outer_iters = outer;
    stats.div_max = r.max_abs();

    p.subtract_mean();
    s.vel = u;
    s.p = p;
    s.t = tnew;
    return stats;
}

// ---------------------------------------------------------------------------
// trajectories and diagnostics
// ---------------------------------------------------------------------------

void solve_unsteady_stream(const MacGrid& g, const VelocityOperator& op, const Forcing& f, double T, int M,
                           StepperConfig cfg, const StepObserver& observe) {
    if (T <= 0.0) throw std::invalid_argument("solve_unsteady: T must be > 0");
    if (M < 8) throw std::invalid_argument("solve_unsteady: M must be >= 8");
    double dt = T / M;
    ImplicitStepper stepper(g, op, dt, cfg);
    State s(g.n);
    for (int step = 1; step <= M; ++step) {
        StepStats st = stepper.step(s, f);
        // keep the time axis exactly uniform
        s.t = dt * step;
        if (observe) observe(step, s, st);
    }
}

Trajectory solve_unsteady(const MacGrid& g, const VelocityOperator& op, const Forcing& f, double T, int M,
                          StepperConfig cfg) {
    Trajectory traj;
    traj.n = g.n;
    traj.T = T;
    traj.dt = T / M;
    traj.states.reserve(M + 1);
    traj.states.push_back(State(g.n));
    solve_unsteady_stream(g, op, f, T, M, cfg,
                          [&](int, const State& s, const StepStats&) { traj.states.push_back(s); });
    return traj;
}

double energy_balance(const Trajectory& traj, const VelocityOperator& op, const Forcing& f) {
    if (traj.states.empty()) return 0.0;
    const MacGrid g(traj.n);
    double h2 = g.h * g.h;
    double dt = traj.dt;
    int M = int(traj.states.size()) - 1;
    double lhs = 0.0, rhs = 0.0;
    MacField fsample(g.n);
    for (int m = 1; m <= M; ++m) {
        const MacField& un = traj.states[m].vel;
        const MacField& uprev = traj.states[m - 1].vel;
        MacField diff = un;
        axpy(-1.0, uprev, diff);
        lhs += 0.5 * h2 * dot(diff, diff);
        lhs += dt * op.form(un, un);
        f.sample(g, traj.states[m].t, fsample);
        rhs += dt * h2 * dot(fsample, un);
    }
    const MacField& ufinal = traj.states[M].vel;
    lhs += 0.5 * h2 * dot(ufinal, ufinal);
    double scale = std::max(std::fabs(lhs), std::fabs(rhs));
    if (scale < 1e-300) return 0.0;
    return std::fabs(lhs - rhs) / scale;
}

AprioriReport apriori_bound_check(const Trajectory& traj, const Forcing& f, double alpha) {
    AprioriReport rep;
    if (traj.states.empty() || alpha <= 0.0) return rep;
    MacGrid g(traj.n);
    double h2 = g.h * g.h;
    double dt = traj.dt;
    int M = int(traj.states.size()) - 1;
    FineOperator identity_op(g, make_preset("constant", {1.0}), 1.0);
    double grad2 = 0.0, f2 = 0.0, p2 = 0.0, acc2 = 0.0;
    MacField fsample(g.n);
    for (int m = 1; m <= M; ++m) {
        const State& s = traj.states[m];
        grad2 += dt * identity_op.form(s.vel, s.vel);
        f.sample(g, s.t, fsample);
        f2 += dt * h2 * dot(fsample, fsample);
        p2 += dt * h2 * dot(s.p, s.p);
        MacField diff = s.vel;
        axpy(-1.0, traj.states[m - 1].vel, diff);
        acc2 += dt * h2 * dot(diff, diff) / (dt * dt);
    }
    rep.lhs = alpha * grad2;
    rep.rhs_surrogate = (1.0 / alpha) * kPoincareUnitSquare * kPoincareUnitSquare * f2;
    rep.holds = rep.lhs <= rep.rhs_surrogate;
    rep.h1_spacetime = std::sqrt(grad2);
    rep.pressure_l2q = std::sqrt(p2);
    rep.accel_surrogate = std::sqrt(acc2);
    return rep;
}

}  // namespace stokhom
