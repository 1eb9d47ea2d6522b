#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stokhom/stokes.hpp"

using namespace stokhom;

namespace {

MacField random_interior(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    MacField f(n);
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < n; ++j) f.u(i, j) = U(rng);
    for (int i = 0; i < n; ++i)
        for (int j = 1; j < n; ++j) f.v(i, j) = U(rng);
    return f;
}

}  // namespace

TEST_CASE("fast diagonalization inverts the constant-coefficient solve exactly") {
    int n = 16;
    MacGrid g(n);
    double cbar = 2.37;
    double sigma = 64.0;
    FineOperator op(g, make_preset("constant", {cbar}), 1.0);
    FastDiagPrecond prec(g, sigma, op.precond_hint());

    MacField r = random_interior(n, 5), z, hz;
    prec.apply(r, z);
    op.apply(z, hz);
    axpy(sigma, z, hz);
    hz.zero_pinned();
    double diff = 0.0;
    for (size_t m = 0; m < r.u.size(); ++m) diff = std::max(diff, std::fabs(hz.u.a[m] - r.u.a[m]));
    for (size_t m = 0; m < r.v.size(); ++m) diff = std::max(diff, std::fabs(hz.v.a[m] - r.v.a[m]));
    CHECK(diff <= 1e-10 * std::max(1.0, r.max_abs()));
}

TEST_CASE("velocity solves converge for variable coefficients") {
    int n = 32;
    MacGrid g(n);
    FineOperator op(g, make_preset("layered", {4.0}), 0.25);
    ImplicitStepper stepper(g, op, 1.0 / 64.0);
    MacField b = random_interior(n, 9), x, hx;
    long iters = stepper.solve_velocity(b, x);
    CHECK(iters > 0);
    op.apply(x, hx);
    axpy(64.0, x, hx);
    hx.zero_pinned();
    MacField res = b;
    axpy(-1.0, hx, res);
    CHECK(std::sqrt(dot(res, res)) <= 1e-10 * std::sqrt(dot(b, b)));
}

TEST_CASE("zero forcing keeps the flow at rest") {
    MacGrid g(16);
    FineOperator op(g, make_preset("layered", {4.0}), 0.25);
    Trajectory traj = solve_unsteady(g, op, Forcing::from_name("zero"), 0.5, 8);
    for (const auto& s : traj.states) {
        CHECK(s.vel.max_abs() == 0.0);
        CHECK(s.p.max_abs() == 0.0);
    }
    CHECK(energy_balance(traj, op, Forcing::from_name("zero")) == 0.0);
}

TEST_CASE("states satisfy the divergence, mean and initial-data invariants") {
    int n = 32;
    MacGrid g(n);
    FineOperator op(g, make_preset("layered", {4.0}), 0.25);
    Forcing f = Forcing::from_name("taylor");
    Trajectory traj = solve_unsteady(g, op, f, 0.5, 8);
    REQUIRE(traj.states.size() == 9);
    CHECK(traj.states[0].vel.max_abs() == 0.0);
    for (size_t m = 1; m < traj.states.size(); ++m) {
        Array2D div;
        mac_divergence(g, traj.states[m].vel, div);
        CHECK(div.max_abs() <= 1e-9);
        CHECK(std::fabs(traj.states[m].p.mean()) <= 1e-12);
        CHECK(traj.states[m].vel.max_abs() > 0.0);
    }
}

TEST_CASE("fine constant(1) and homogenized identity produce identical runs") {
    int n = 32;
    MacGrid g(n);
    FineOperator fine(g, make_preset("constant", {1.0}), 0.125);
    HomogOperator homog(g, EffectiveTensor::identity());
    Forcing f = Forcing::from_name("taylor");
    Trajectory a = solve_unsteady(g, fine, f, 0.5, 8);
    Trajectory b = solve_unsteady(g, homog, f, 0.5, 8);
    double worst = 0.0;
    for (size_t m = 0; m < a.states.size(); ++m) {
        MacField diff = a.states[m].vel;
        axpy(-1.0, b.states[m].vel, diff);
        worst = std::max(worst, diff.max_abs());
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("discrete energy identity holds to 1e-8 and is independently reproducible") {
    int n = 32;
    MacGrid g(n);
    FineOperator op(g, make_preset("layered", {4.0}), 0.25);
    Forcing f = Forcing::from_name("taylor");
    int M = 8;
    double T = 0.5, dt = T / M;
    Trajectory traj = solve_unsteady(g, op, f, T, M);

    CHECK(energy_balance(traj, op, f) <= 1e-8);

    // independent accumulation of the identity
    double h2 = g.h * g.h;
    double lhs = 0.0, rhs = 0.0;
    for (int m = 1; m <= M; ++m) {
        const MacField& un = traj.states[m].vel;
        MacField diff = un;
        axpy(-1.0, traj.states[m - 1].vel, diff);
        lhs += 0.5 * h2 * dot(diff, diff);
        MacField au;
        op.apply(un, au);
        lhs += dt * h2 * dot(au, un);
        MacField fs;
        f.sample(g, traj.states[m].t, fs);
        rhs += dt * h2 * dot(fs, un);
    }
    lhs += 0.5 * h2 * dot(traj.states[M].vel, traj.states[M].vel);
    CHECK(std::fabs(lhs - rhs) / std::max(lhs, rhs) <= 1e-8);
}

TEST_CASE("loosened solver tolerances degrade the energy identity") {
    int n = 32;
    MacGrid g(n);
    FineOperator op(g, make_preset("layered", {4.0}), 0.25);
    Forcing f = Forcing::from_name("taylor");
    StepperConfig loose;
    loose.div_tol = 1e-4;
    loose.inner_tol = 1e-4;
    Trajectory traj = solve_unsteady(g, op, f, 0.5, 8, loose);
    CHECK(energy_balance(traj, op, f) > 1e-8);
}

TEST_CASE("time refinement shows first-order convergence of implicit Euler") {
    int n = 32;
    MacGrid g(n);
    FineOperator op(g, make_preset("layered", {4.0}), 0.25);
    Forcing f = Forcing::from_name("taylor");
    double T = 0.5;
    std::vector<MacField> finals;
    for (int M : {8, 16, 32}) {
        Trajectory traj = solve_unsteady(g, op, f, T, M);
        finals.push_back(traj.states.back().vel);
    }
    auto diff_norm = [&](const MacField& a, const MacField& b) {
        MacField d = a;
        axpy(-1.0, b, d);
        return std::sqrt(dot(d, d)) * g.h;
    };
    double d1 = diff_norm(finals[0], finals[1]);
    double d2 = diff_norm(finals[1], finals[2]);
    CHECK(d2 < d1);
    CHECK(d1 / d2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("a-priori bound report behaves as expected") {
    int n = 32;
    MacGrid g(n);
    FineOperator op(g, make_preset("layered", {4.0}), 0.25);
    auto alpha = ellipticity_estimate(make_preset("layered", {4.0}), CellSampling(64));

    Trajectory zero_traj = solve_unsteady(g, op, Forcing::from_name("zero"), 0.5, 8);
    AprioriReport rep0 = apriori_bound_check(zero_traj, Forcing::from_name("zero"), alpha.alpha);
    CHECK(rep0.lhs == 0.0);
    CHECK(rep0.rhs_surrogate == 0.0);
    CHECK(rep0.holds);

    Forcing f = Forcing::from_name("taylor");
    Trajectory traj = solve_unsteady(g, op, f, 0.5, 8);
    AprioriReport rep = apriori_bound_check(traj, f, alpha.alpha);
    CHECK(rep.lhs > 0.0);
    CHECK(rep.holds);
    CHECK(rep.h1_spacetime > 0.0);
    CHECK(rep.pressure_l2q > 0.0);
    CHECK(rep.accel_surrogate > 0.0);
}

TEST_CASE("solver input validation") {
    MacGrid g(16);
    FineOperator op(g, make_preset("constant", {1.0}), 0.25);
    Forcing f = Forcing::from_name("taylor");
    CHECK_THROWS_AS(solve_unsteady(g, op, f, 0.5, 4), std::invalid_argument);
    CHECK_THROWS_AS(solve_unsteady(g, op, f, -1.0, 16), std::invalid_argument);
    CHECK_THROWS_AS(MacGrid(4), std::invalid_argument);
    CHECK_THROWS_AS(Forcing::from_name("gust"), std::invalid_argument);
}
