#include "stokhom/twoscale.hpp"

#include <cmath>
#include <stdexcept>

namespace stokhom {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

// C-infinity bump on (0,1), peak value 1 at s = 1/2, identically 0 outside.
double bump(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    return std::exp(4.0 - 1.0 / (s * (1.0 - s)));
}
}  // namespace

double TestFunction::eval_phi(double x1, double x2, double t) const {
    return bump(x1) * bump(x2) * bump(t / T);
}

double TestFunction::eval_w(double y1, double y2) const {
    switch (w) {
        case YFactor::One: return 1.0;
        case YFactor::Cos1: return std::cos(kTwoPi * y1);
        case YFactor::Cos2: return std::cos(kTwoPi * y2);
        case YFactor::CosCos: return std::cos(kTwoPi * y1) * std::cos(kTwoPi * y2);
        case YFactor::Cos1Sq: {
            double c = std::cos(kTwoPi * y1);
            return c * c;
        }
    }
    return 1.0;
}

double TestFunction::eval_chi(double tau) const {
    return chi == TauFactor::One ? 1.0 : std::cos(kTwoPi * tau);
}

double TestFunction::y_mean() const {
    switch (w) {
        case YFactor::One: return 1.0;
        case YFactor::Cos1Sq: return 0.5;
        default: return 0.0;
    }
}

double TestFunction::tau_mean() const { return chi == TauFactor::One ? 1.0 : 0.0; }

double PairingValue::norm() const { return std::sqrt(u * u + v * v); }

namespace {

// quadrature of one trajectory component against a node-evaluated weight
template <class WeightFn>
PairingValue accumulate_pairing(const Trajectory& traj, WeightFn&& weight) {
    MacGrid g(traj.n);
    int n = g.n;
    double h2 = g.h * g.h;
    PairingValue out;
    int M = int(traj.states.size()) - 1;
    for (int m = 1; m <= M; ++m) {
        const State& s = traj.states[m];
        double su = 0.0, sv = 0.0;
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < n; ++j) su += s.vel.u(i, j) * weight(g.xu(i), g.yu(j), s.t);
        for (int i = 0; i < n; ++i)
            for (int j = 1; j < n; ++j) sv += s.vel.v(i, j) * weight(g.xv(i), g.yv(j), s.t);
        out.u += traj.dt * h2 * su;
        out.v += traj.dt * h2 * sv;
    }
    return out;
}

}  // namespace

PairingValue two_scale_pairing(const Trajectory& traj, const TestFunction& psi, double eps) {
    if (eps <= 0.0) throw std::invalid_argument("two_scale_pairing: eps must be > 0");
    return accumulate_pairing(traj, [&](double x, double y, double t) {
        return psi.eval_phi(x, y, t) * psi.eval_w(x / eps, y / eps) * psi.eval_chi(t / eps);
    });
}

PairingValue limit_pairing(const Trajectory& traj_homog, const TestFunction& psi) {
    double mean = psi.y_mean() * psi.tau_mean();
    PairingValue out;
    if (mean == 0.0) return out;
    out = accumulate_pairing(traj_homog, [&](double x, double y, double t) { return psi.eval_phi(x, y, t); });
    out.u *= mean;
    out.v *= mean;
    return out;
}

MacField interpolate_mac(const MacGrid& coarse, const MacField& f, const MacGrid& fine) {
    int nc = coarse.n, nf = fine.n;
    if (nf % nc != 0) throw std::invalid_argument("interpolate_mac: fine grid must refine the coarse grid");
    MacField out(nf);
    double H = coarse.h;
    // u: faces at (iH, (j+1/2)H); mirror ghosts in y
    auto uval = [&](int i, int j) {
        double s = 1.0;
        if (j < 0) {
            j = -1 - j;
            s = -1.0;
        } else if (j >= nc) {
            j = 2 * nc - 1 - j;
            s = -1.0;
        }
        return s * f.u(i, j);
    };
    for (int i = 1; i < nf; ++i)
        for (int j = 0; j < nf; ++j) {
            double x = fine.xu(i), y = fine.yu(j);
            double sx = x / H, sy = y / H - 0.5;
            int i0 = std::min(int(std::floor(sx)), nc - 1);
            int j0 = int(std::floor(sy));
            double tx = sx - i0, ty = sy - j0;
            out.u(i, j) = (1 - tx) * (1 - ty) * uval(i0, j0) + tx * (1 - ty) * uval(i0 + 1, j0) +
                          (1 - tx) * ty * uval(i0, j0 + 1) + tx * ty * uval(i0 + 1, j0 + 1);
        }
    auto vval = [&](int i, int j) {
        double s = 1.0;
        if (i < 0) {
            i = -1 - i;
            s = -1.0;
        } else if (i >= nc) {
            i = 2 * nc - 1 - i;
            s = -1.0;
        }
        return s * f.v(i, j);
    };
    for (int i = 0; i < nf; ++i)
        for (int j = 1; j < nf; ++j) {
            double x = fine.xv(i), y = fine.yv(j);
            double sx = x / H - 0.5, sy = y / H;
            int i0 = int(std::floor(sx));
            int j0 = std::min(int(std::floor(sy)), nc - 1);
            double tx = sx - i0, ty = sy - j0;
            out.v(i, j) = (1 - tx) * (1 - ty) * vval(i0, j0) + tx * (1 - ty) * vval(i0 + 1, j0) +
                          (1 - tx) * ty * vval(i0, j0 + 1) + tx * ty * vval(i0 + 1, j0 + 1);
        }
    out.zero_pinned();
    return out;
}

double l2q_error(const Trajectory& traj_fine, const Trajectory& traj_homog) {
    if (traj_fine.states.size() != traj_homog.states.size())
        throw std::invalid_argument("l2q_error: incompatible time grids");
    MacGrid gf(traj_fine.n);
    bool same = traj_fine.n == traj_homog.n;
    MacGrid gh(traj_homog.n);
    double h2 = gf.h * gf.h;
    double acc = 0.0;
    int M = int(traj_fine.states.size()) - 1;
    for (int m = 1; m <= M; ++m) {
        const MacField& uf = traj_fine.states[m].vel;
        MacField uh =
            same ? traj_homog.states[m].vel : interpolate_mac(gh, traj_homog.states[m].vel, gf);
        MacField diff = uf;
        axpy(-1.0, uh, diff);
        acc += traj_fine.dt * h2 * dot(diff, diff);
    }
    return std::sqrt(acc);
}

namespace {

double gradient_error_impl(const Trajectory& traj_fine, const Trajectory& traj_homog,
                           const CorrectorSet* chi, double eps) {
    if (traj_fine.states.size() != traj_homog.states.size() || traj_fine.n != traj_homog.n)
        throw std::invalid_argument("gradient error: trajectories must share the space-time grid");
    MacGrid g(traj_fine.n);
    int n = g.n;
    double h2 = g.h * g.h;
    int M = int(traj_fine.states.size()) - 1;

    // corrector gradient tables d chi_im^k / dy_j sampled at x/eps on centers
    // (precomputed once); index [k][j][i][m]
    std::vector<Array2D> tables;
    auto table = [&](int k, int j, int i, int m) -> Array2D& {
        return tables[size_t(((k * 2 + j) * 2 + i) * 2 + m)];
    };
    if (chi) {
        tables.resize(16);
        for (int i = 0; i < 2; ++i)
            for (int m = 0; m < 2; ++m) {
                const CorrectorField& c = chi->at(i + 1, m + 1);
                Array2D gx1, gy1, gx2, gy2;
                spectral_gradient(c.u1, gx1, gy1);
                spectral_gradient(c.u2, gx2, gy2);
                const Array2D* grads[2][2] = {{&gx1, &gy1}, {&gx2, &gy2}};  // [k][j]
                for (int k = 0; k < 2; ++k)
                    for (int j = 0; j < 2; ++j) {
                        PeriodicInterp interp(*grads[k][j]);
                        Array2D t(n, n);
                        for (int p = 0; p < n; ++p)
                            for (int q = 0; q < n; ++q) t(p, q) = interp(g.xp(p) / eps, g.yp(q) / eps);
                        table(k, j, i, m) = std::move(t);
                    }
            }
    }

    double acc = 0.0;
    Array2D gf[2][2], gh[2][2];
    for (int s = 1; s <= M; ++s) {
        velocity_gradients_at_centers(g, traj_fine.states[s].vel, gf);
        velocity_gradients_at_centers(g, traj_homog.states[s].vel, gh);
        double step = 0.0;
        for (int k = 0; k < 2; ++k)
            for (int j = 0; j < 2; ++j) {
                const double* f = gf[k][j].data();
                const double* h = gh[k][j].data();
                if (chi) {
                    const double* t00 = table(k, j, 0, 0).data();
                    const double* t01 = table(k, j, 0, 1).data();
                    const double* t10 = table(k, j, 1, 0).data();
                    const double* t11 = table(k, j, 1, 1).data();
                    const double* du0[2][2] = {{gh[0][0].data(), gh[0][1].data()},
                                               {gh[1][0].data(), gh[1][1].data()}};
                    // (grad_y u1)^k_j = -sum_{i,m} du0^m/dx_i T[k][j][i][m]
                    for (size_t pq = 0; pq < gf[k][j].size(); ++pq) {
                        double corr = -(du0[0][0][pq] * t00[pq] + du0[1][0][pq] * t01[pq] +
                                        du0[0][1][pq] * t10[pq] + du0[1][1][pq] * t11[pq]);
                        double d = f[pq] - h[pq] - corr;
                        step += d * d;
                    }
                } else {
                    for (size_t pq = 0; pq < gf[k][j].size(); ++pq) {
                        double d = f[pq] - h[pq];
                        step += d * d;
                    }
                }
            }
        acc += traj_fine.dt * h2 * step;
    }
    return std::sqrt(acc);
}

}  // namespace

double plain_gradient_error(const Trajectory& traj_fine, const Trajectory& traj_homog) {
    return gradient_error_impl(traj_fine, traj_homog, nullptr, 1.0);
}

double corrector_error(const Trajectory& traj_fine, const Trajectory& traj_homog, const CorrectorSet& chi,
                       double eps) {
    if (chi.n <= 0) throw std::invalid_argument("corrector_error: missing correctors");
    return gradient_error_impl(traj_fine, traj_homog, &chi, eps);
}

std::pair<double, double> pressure_pairing(const Trajectory& traj_fine, const Trajectory& traj_homog,
                                           const TestFunction& phi) {
    if (traj_fine.states.size() != traj_homog.states.size() || traj_fine.n != traj_homog.n)
        throw std::invalid_argument("pressure_pairing: trajectories must share the space-time grid");
    MacGrid g(traj_fine.n);
    int n = g.n;
    double h2 = g.h * g.h;
    int M = int(traj_fine.states.size()) - 1;
    double pf = 0.0, ph = 0.0;
    for (int m = 1; m <= M; ++m) {
        double t = traj_fine.states[m].t;
        const Array2D& a = traj_fine.states[m].p;
        const Array2D& b = traj_homog.states[m].p;
        double sa = 0.0, sb = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double w = phi.eval_phi(g.xp(i), g.yp(j), t);
                sa += a(i, j) * w;
                sb += b(i, j) * w;
            }
        pf += traj_fine.dt * h2 * sa;
        ph += traj_fine.dt * h2 * sb;
    }
    return {pf, ph};
}

double fit_rate(const std::vector<double>& eps, const std::vector<double>& err) {
    if (eps.size() != err.size() || eps.size() < 3)
        throw std::invalid_argument("fit_rate: need at least 3 (eps, err) pairs");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = int(eps.size());
    for (int i = 0; i < m; ++i) {
        if (eps[i] <= 0.0 || err[i] <= 0.0) throw std::invalid_argument("fit_rate: entries must be positive");
        double x = std::log(eps[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double denom = sxx - sx * sx / m;
    return (sxy - sx * sy / m) / denom;
}

PeriodicInterp::PeriodicInterp(const Array2D& f) : f_(f) {
    if (f.nx != f.ny || f.nx < 4) throw std::invalid_argument("PeriodicInterp: need a square lattice, n >= 4");
}

namespace {
inline void catmull_rom(double t, double w[4]) {
    double t2 = t * t, t3 = t2 * t;
    w[0] = 0.5 * (-t3 + 2.0 * t2 - t);
    w[1] = 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0);
    w[2] = 0.5 * (-3.0 * t3 + 4.0 * t2 + t);
    w[3] = 0.5 * (t3 - t2);
}
}  // namespace

double PeriodicInterp::operator()(double y1, double y2) const {
    int n = f_.nx;
    // lattice coordinate: node p sits at y = -1/2 + p/n
    double s1 = (y1 + 0.5) * n, s2 = (y2 + 0.5) * n;
    double f1 = std::floor(s1), f2 = std::floor(s2);
    double t1 = s1 - f1, t2 = s2 - f2;
    int i0 = int(f1), j0 = int(f2);
    double w1[4], w2[4];
    catmull_rom(t1, w1);
    catmull_rom(t2, w2);
    double acc = 0.0;
    for (int a = -1; a <= 2; ++a) {
        int i = ((i0 + a) % n + n) % n;
        double row = 0.0;
        for (int b = -1; b <= 2; ++b) {
            int j = ((j0 + b) % n + n) % n;
            row += w2[b + 1] * f_(i, j);
        }
        acc += w1[a + 1] * row;
    }
    return acc;
}

}  // namespace stokhom
