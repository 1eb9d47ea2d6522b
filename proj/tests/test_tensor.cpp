#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "stokhom/tensor.hpp"

using namespace stokhom;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

CorrectorSet zero_correctors(int n) {
    CorrectorSet set;
    set.n = n;
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k) {
            auto& c = set.at(i, k);
            c.i = i;
            c.k = k;
            c.u1 = Array2D(n, n);
            c.u2 = Array2D(n, n);
            c.pressure = Array2D(n, n);
        }
    return set;
}
}  // namespace

TEST_CASE("constant coefficients give q = c delta_ij delta_kh exactly") {
    auto f = make_preset("constant", {2.5});
    CellSolveConfig cfg;
    cfg.n_cell = 16;
    auto chi = solve_all_correctors(f, cfg);
    auto qd = effective_tensor_direct(f, chi);
    auto qe = effective_tensor_energy(f, chi);
    for (int i = 1; i <= 2; ++i)
        for (int j = 1; j <= 2; ++j)
            for (int k = 1; k <= 2; ++k)
                for (int h = 1; h <= 2; ++h) {
                    double expect = (i == j && k == h) ? 2.5 : 0.0;
                    CHECK(qd.at(i, j, k, h) == doctest::Approx(expect).epsilon(1e-12));
                    CHECK(qe.at(i, j, k, h) == doctest::Approx(expect).epsilon(1e-12));
                }
    CHECK(tensor_ellipticity(qd) == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("layered tensor matches the closed-form arithmetic/harmonic means") {
    // alpha(y1) = (kappa+1)/2 + (kappa-1)/2 sin(2 pi y1); the cell problems leave
    // only chi_12 nonzero, giving q_1122 = harmonic mean and arithmetic mean on
    // the other diagonal pairs.
    double kappa = 4.0;
    auto f = make_preset("layered", {kappa});
    CellSolveConfig cfg;
    cfg.n_cell = 64;
    auto chi = solve_all_correctors(f, cfg);
    auto q = effective_tensor_direct(f, chi);

    // independent 1D lattice oracles for the two means
    int m = 1 << 14;
    double arith = 0.0, harm = 0.0;
    for (int p = 0; p < m; ++p) {
        double y = -0.5 + double(p) / m;
        double alpha = 1.0 + (kappa - 1.0) * 0.5 * (1.0 + std::sin(kTwoPi * y));
        arith += alpha;
        harm += 1.0 / alpha;
    }
    arith /= m;
    harm = m / harm;
    CHECK(arith == doctest::Approx(0.5 * (kappa + 1.0)).epsilon(1e-12));
    CHECK(harm == doctest::Approx(std::sqrt(kappa)).epsilon(1e-10));

    CHECK(q.at(1, 1, 1, 1) == doctest::Approx(arith).epsilon(1e-8));
    CHECK(q.at(2, 2, 1, 1) == doctest::Approx(arith).epsilon(1e-8));
    CHECK(q.at(2, 2, 2, 2) == doctest::Approx(arith).epsilon(1e-8));
    CHECK(q.at(1, 1, 2, 2) == doctest::Approx(harm).epsilon(1e-8));
    // off-diagonal pair entries vanish for this preset
    CHECK(std::fabs(q.at(1, 2, 1, 2)) <= 1e-8);
    CHECK(std::fabs(q.at(1, 2, 2, 1)) <= 1e-8);
    CHECK(tensor_ellipticity(q) == doctest::Approx(harm).epsilon(1e-7));
}

TEST_CASE("direct and energy formulas agree; energy is exactly symmetric") {
    auto f = make_preset("trig", {0.5});
    CellSolveConfig cfg;
    cfg.n_cell = 64;
    auto chi = solve_all_correctors(f, cfg);
    auto qd = effective_tensor_direct(f, chi);
    auto qe = effective_tensor_energy(f, chi);

    double gap = tensor_consistency_gap(qd, qe);
    CHECK(gap <= 1e-8);

    auto repE = tensor_symmetry_report(qe);
    CHECK(repE.max_major_violation <= 1e-12);
    auto repD = tensor_symmetry_report(qd);
    CHECK(repD.max_major_violation <= gap + 1e-12);

    double a0 = tensor_ellipticity(qe);
    CHECK(a0 > 0.0);
    CHECK(a0 <= 1.0 + 1e-10);  // bounded by the mean of a in any fixed direction

    // energy minimization: corrected diagonal entries do not exceed the
    // uncorrected (chi = 0) energy values
    auto q0 = effective_tensor_energy(f, zero_correctors(cfg.n_cell));
    for (int i = 1; i <= 2; ++i)
        for (int k = 1; k <= 2; ++k)
            CHECK(qe.at(i, i, k, k) <= q0.at(i, i, k, k) + 1e-12);
}

TEST_CASE("tensor scales linearly with the coefficients") {
    auto f = make_preset("layered", {4.0});
    CellSolveConfig cfg;
    cfg.n_cell = 32;
    auto chi = solve_all_correctors(f, cfg);
    auto q1 = effective_tensor_direct(f, chi);
    for (double c : {0.5, 2.0}) {
        auto chi_c = solve_all_correctors(scaled(f, c), cfg);
        auto qc = effective_tensor_direct(scaled(f, c), chi_c);
        for (int i = 1; i <= 2; ++i)
            for (int j = 1; j <= 2; ++j)
                for (int k = 1; k <= 2; ++k)
                    for (int h = 1; h <= 2; ++h)
                        CHECK(qc.at(i, j, k, h) ==
                              doctest::Approx(c * q1.at(i, j, k, h)).epsilon(1e-10).scale(1.0));
    }
}

TEST_CASE("ellipticity check rejects asymmetric and non-positive tensors") {
    auto q = EffectiveTensor::isotropic(1.0);
    q.at(1, 2, 1, 2) = 0.5;  // leaves the (2,1,2,1) partner at zero
    CHECK_THROWS_AS(tensor_ellipticity(q), std::invalid_argument);

    auto neg = EffectiveTensor::isotropic(-1.0);
    CHECK_THROWS_AS(tensor_ellipticity(neg), std::runtime_error);
}

TEST_CASE("tensor csv block round-trips") {
    auto f = make_preset("layered", {4.0});
    CellSolveConfig cfg;
    cfg.n_cell = 16;
    auto chi = solve_all_correctors(f, cfg);
    auto q = effective_tensor_direct(f, chi);
    std::stringstream ss;
    write_tensor_csv(ss, q);
    auto back = read_tensor_csv(ss);
    CHECK(tensor_consistency_gap(q, back) == 0.0);

    std::stringstream bad("i,j,k,h,q\n1,1,1,1,2.0\n");
    CHECK_THROWS_AS(read_tensor_csv(bad), std::runtime_error);
    std::stringstream badhdr("x\n");
    CHECK_THROWS_AS(read_tensor_csv(badhdr), std::runtime_error);
}
