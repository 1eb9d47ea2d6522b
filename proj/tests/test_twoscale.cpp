#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stokhom/twoscale.hpp"

using namespace stokhom;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

double bump01(double s) { return (s <= 0.0 || s >= 1.0) ? 0.0 : std::exp(4.0 - 1.0 / (s * (1.0 - s))); }

// smooth divergence-free-ish envelope (exact solenoidality is irrelevant here)
double genv_u(double x, double y, double t) { return std::sin(kTwoPi * x / 2.0) * y * (1.0 - y) * (1.0 + t); }
double genv_v(double x, double y, double t) { return x * (1.0 - x) * std::sin(kTwoPi * y / 2.0) * (2.0 - t); }

// synthetic trajectory u(x,t) = g(x,t) * osc(x), with M+1 states on [0,T]
Trajectory synthetic(int n, int M, double T, double (*oscf)(double, double)) {
    MacGrid g(n);
    Trajectory traj;
    traj.n = n;
    traj.T = T;
    traj.dt = T / M;
    for (int m = 0; m <= M; ++m) {
        State s(n);
        s.t = m * traj.dt;
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < n; ++j)
                s.vel.u(i, j) = genv_u(g.xu(i), g.yu(j), s.t) * (oscf ? oscf(g.xu(i), g.yu(j)) : 1.0);
        for (int i = 0; i < n; ++i)
            for (int j = 1; j < n; ++j)
                s.vel.v(i, j) = genv_v(g.xv(i), g.yv(j), s.t) * (oscf ? oscf(g.xv(i), g.yv(j)) : 1.0);
        traj.states.push_back(std::move(s));
    }
    return traj;
}

double g_eps = 0.0;
double osc_cos(double x, double) { return 1.0 + std::cos(kTwoPi * x / g_eps); }

// quadrature of g * phi over the trajectory lattice (per component)
PairingValue envelope_integral(int n, int M, double T) {
    MacGrid g(n);
    double dt = T / M, h2 = g.h * g.h;
    PairingValue out;
    TestFunction psi;
    psi.T = T;
    for (int m = 1; m <= M; ++m) {
        double t = m * dt;
        for (int i = 1; i < n; ++i)
            for (int j = 0; j < n; ++j)
                out.u += dt * h2 * genv_u(g.xu(i), g.yu(j), t) * psi.eval_phi(g.xu(i), g.yu(j), t);
        for (int i = 0; i < n; ++i)
            for (int j = 1; j < n; ++j)
                out.v += dt * h2 * genv_v(g.xv(i), g.yv(j), t) * psi.eval_phi(g.xv(i), g.yv(j), t);
    }
    return out;
}
}  // namespace

TEST_CASE("fit_rate recovers exact power laws") {
    std::vector<double> eps = {0.25, 0.125, 0.0625, 0.03125};
    std::vector<double> lin, quad;
    for (double e : eps) {
        lin.push_back(e);
        quad.push_back(e * e);
    }
    CHECK(fit_rate(eps, lin) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit_rate(eps, quad) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(fit_rate({0.5, 0.25}, {1.0, 0.5}), std::invalid_argument);
    std::vector<double> bad = {1.0, 0.0, 1.0, 1.0};
    CHECK_THROWS_AS(fit_rate(eps, bad), std::invalid_argument);
}

TEST_CASE("periodic bicubic interpolation is nodally exact and accurate") {
    int n = 32;
    CellSampling s(n);
    Array2D f(n, n);
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q)
            f(p, q) = std::cos(kTwoPi * s.node(p)) * std::sin(kTwoPi * s.node(q));
    PeriodicInterp interp(f);
    CHECK(interp(s.node(3), s.node(7)) == doctest::Approx(f(3, 7)).epsilon(1e-13));
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        double y1 = -0.5 + (t * 0.7129) - std::floor(t * 0.7129);
        double y2 = -0.5 + (t * 0.3341) - std::floor(t * 0.3341);
        double exact = std::cos(kTwoPi * y1) * std::sin(kTwoPi * y2);
        worst = std::max(worst, std::fabs(interp(y1, y2) - exact));
    }
    CHECK(worst <= 5e-4);
}

TEST_CASE("pairing against y- and tau-independent tests reduces to the plain integral") {
    int n = 32, M = 8;
    double T = 0.5;
    Trajectory traj = synthetic(n, M, T, nullptr);
    TestFunction psi;
    psi.T = T;  // w = 1, chi = 1
    PairingValue pair = two_scale_pairing(traj, psi, 0.25);
    PairingValue limit = limit_pairing(traj, psi);
    PairingValue direct = envelope_integral(n, M, T);
    CHECK(pair.u == doctest::Approx(direct.u).epsilon(1e-12));
    CHECK(pair.v == doctest::Approx(direct.v).epsilon(1e-12));
    CHECK(limit.u == doctest::Approx(direct.u).epsilon(1e-12));
    CHECK(limit.v == doctest::Approx(direct.v).epsilon(1e-12));
}

TEST_CASE("zero-mean oscillatory tests annihilate smooth trajectories") {
    int n = 64, M = 8;
    double T = 0.5;
    Trajectory traj = synthetic(n, M, T, nullptr);
    TestFunction psi;
    psi.T = T;
    psi.w = TestFunction::YFactor::Cos1;
    double scale = envelope_integral(n, M, T).norm();
    CHECK(two_scale_pairing(traj, psi, 1.0 / 16.0).norm() <= 1e-4 * scale);
    CHECK(limit_pairing(traj, psi).norm() == 0.0);
}

TEST_CASE("synthetic oscillating fields match the closed-form two-scale limits") {
    // u = g(x,t) (1 + cos(2 pi x1 / eps)); limits: <w (1+cos)> over Y
    int n = 256, M = 16;
    double T = 0.5, eps = 1.0 / 64.0;
    g_eps = eps;
    Trajectory traj = synthetic(n, M, T, osc_cos);
    PairingValue base = envelope_integral(n, M, T);

    TestFunction plain;
    plain.T = T;
    PairingValue p0 = two_scale_pairing(traj, plain, eps);
    CHECK(p0.u == doctest::Approx(base.u).epsilon(0.02));
    CHECK(p0.v == doctest::Approx(base.v).epsilon(0.02));

    TestFunction cos1;
    cos1.T = T;
    cos1.w = TestFunction::YFactor::Cos1;
    PairingValue p1 = two_scale_pairing(traj, cos1, eps);
    CHECK(p1.u == doctest::Approx(0.5 * base.u).epsilon(0.02));
    CHECK(p1.v == doctest::Approx(0.5 * base.v).epsilon(0.02));

    TestFunction cos1sq;
    cos1sq.T = T;
    cos1sq.w = TestFunction::YFactor::Cos1Sq;
    PairingValue p2 = two_scale_pairing(traj, cos1sq, eps);
    CHECK(p2.u == doctest::Approx(0.5 * base.u).epsilon(0.02));
    CHECK(p2.v == doctest::Approx(0.5 * base.v).epsilon(0.02));

    // transverse oscillation has zero coupling: limit is the plain integral
    TestFunction cos2;
    cos2.T = T;
    cos2.w = TestFunction::YFactor::Cos2;
    CHECK(two_scale_pairing(traj, cos2, eps).norm() <= 0.02 * base.norm());
}

TEST_CASE("l2q_error and pressure pairing basics") {
    int n = 32, M = 8;
    double T = 0.5;
    Trajectory a = synthetic(n, M, T, nullptr);
    CHECK(l2q_error(a, a) == 0.0);

    Trajectory b = a;
    b.states.pop_back();
    CHECK_THROWS_AS(l2q_error(a, b), std::invalid_argument);

    TestFunction phi;
    phi.T = T;
    auto [pf, ph] = pressure_pairing(a, a, phi);
    CHECK(pf == ph);
}

TEST_CASE("staggered interpolation refines smooth fields accurately") {
    MacGrid coarse(32), fine(64);
    auto fill = [&](const MacGrid& g) {
        MacField f(g.n);
        for (int i = 1; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j) f.u(i, j) = genv_u(g.xu(i), g.yu(j), 0.3);
        for (int i = 0; i < g.n; ++i)
            for (int j = 1; j < g.n; ++j) f.v(i, j) = genv_v(g.xv(i), g.yv(j), 0.3);
        return f;
    };
    MacField fc = fill(coarse), ff = fill(fine);
    MacField interp = interpolate_mac(coarse, fc, fine);
    MacField diff = interp;
    axpy(-1.0, ff, diff);
    CHECK(diff.max_abs() <= 2e-3);
    CHECK_THROWS_AS(interpolate_mac(coarse, fc, MacGrid(48)), std::invalid_argument);
}
