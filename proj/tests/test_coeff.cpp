#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "stokhom/coeff.hpp"

using namespace stokhom;

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

TEST_CASE("constant preset is the scaled identity everywhere") {
    auto f = make_preset("constant", {1.0});
    auto m = sample_at(f, 0.37, -1.9);
    CHECK(m.a11 == 1.0);
    CHECK(m.a12 == 0.0);
    CHECK(m.a22 == 1.0);

    auto f3 = make_preset("constant", {3.0});
    auto m3 = sample_at(f3, 0.7, -2.3);
    CHECK(m3.a11 == 3.0);
    CHECK(m3.a22 == 3.0);
}

TEST_CASE("trig preset point values and periodicity") {
    auto f = make_preset("trig", {0.5});
    auto m0 = sample_at(f, 0.0, 0.0);
    CHECK(m0.a11 == doctest::Approx(1.5).epsilon(1e-14));
    auto m1 = sample_at(f, 1.0, 1.0);
    CHECK(m1.a11 == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(m1.a22 == doctest::Approx(m0.a22).epsilon(1e-14));
}

TEST_CASE("layered preset direct evaluation") {
    auto f = make_preset("layered", {4.0});
    auto m = sample_at(f, 0.25, 0.0);
    // alpha = 1 + 3 * (1 + sin(pi/2)) / 2 = 4
    CHECK(m.a11 == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(m.a22 == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(m.a12 == 0.0);
}

TEST_CASE("analytic presets are exactly periodic") {
    // dyadic sample points, so that y + 1 is exactly representable
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> J(-3 * 4096, 3 * 4096);
    auto U = [&](std::mt19937& g) { return double(J(g)) / 4096.0; };
    std::vector<CoefficientField> fields = {
        make_preset("constant", {2.0}),
        make_preset("layered", {4.0}),
        make_preset("trig", {0.5}),
        make_preset("checkerboard_smooth", {4.0, 0.1}),
    };
    for (const auto& f : fields) {
        for (int t = 0; t < 20; ++t) {
            double y1 = U(rng), y2 = U(rng);
            auto m = sample_at(f, y1, y2);
            auto mx = sample_at(f, y1 + 1.0, y2);
            auto my = sample_at(f, y1, y2 + 1.0);
            CHECK(std::fabs(m.a11 - mx.a11) == 0.0);
            CHECK(std::fabs(m.a22 - my.a22) == 0.0);
            CHECK(std::fabs(m.a12 - mx.a12) == 0.0);
        }
    }
}

TEST_CASE("epsilon_sample equals sample_at at the rescaled point") {
    auto f = make_preset("trig", {0.5});
    auto m = epsilon_sample(f, 0.5, 0.5, 0.5);
    CHECK(m.a11 == doctest::Approx(1.5).epsilon(1e-14));

    auto lay = make_preset("layered", {4.0});
    auto ml = epsilon_sample(lay, 0.25, 0.0625, 0.0);
    CHECK(ml.a11 == doctest::Approx(4.0).epsilon(1e-14));

    std::mt19937 rng(77);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int t = 0; t < 20; ++t) {
        double eps = 0.05 + 0.9 * U(rng);
        double x1 = U(rng), x2 = U(rng);
        auto a = epsilon_sample(f, eps, x1, x2);
        auto b = sample_at(f, x1 / eps, x2 / eps);
        CHECK(a.a11 == b.a11);
        CHECK(a.a12 == b.a12);
        CHECK(a.a22 == b.a22);
    }

    CHECK_THROWS_AS(epsilon_sample(f, 0.0, 0.1, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_sample(f, -1.0, 0.1, 0.1), std::invalid_argument);
}

TEST_CASE("ellipticity estimates match lattice-scan oracles") {
    CellSampling s(256);

    auto c2 = ellipticity_estimate(make_preset("constant", {2.0}), s);
    CHECK(c2.ok);
    CHECK(c2.alpha == 2.0);

    // independent scan of the layered formula
    double scan = 1e300;
    for (int p = 0; p < 256; ++p) {
        double y1 = -0.5 + p / 256.0;
        scan = std::min(scan, 1.0 + 3.0 * 0.5 * (1.0 + std::sin(kTwoPi * y1)));
    }
    CHECK(scan == doctest::Approx(1.0).epsilon(1e-12));
    auto lay = ellipticity_estimate(make_preset("layered", {4.0}), s);
    CHECK(lay.ok);
    CHECK(lay.alpha == doctest::Approx(1.0).epsilon(1e-12));

    auto trig = ellipticity_estimate(make_preset("trig", {0.5}), s);
    CHECK(trig.ok);
    CHECK(trig.alpha == doctest::Approx(0.5).epsilon(1e-12));

    auto cb = ellipticity_estimate(make_preset("checkerboard_smooth", {4.0, 0.1}), s);
    CHECK(cb.ok);
    CHECK(cb.alpha == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("invalid presets are rejected") {
    CHECK_THROWS_AS(make_preset("nope", {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("trig", {1.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("trig", {-1.5}), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("layered", {-2.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("constant", {}), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("checkerboard_smooth", {4.0}), std::invalid_argument);
    CHECK_THROWS_AS(make_preset("checkerboard_smooth", {4.0, -0.1}), std::invalid_argument);
}

TEST_CASE("scaled fields multiply all entries") {
    auto f = make_preset("trig", {0.5});
    auto g = scaled(f, 2.0);
    auto mf = sample_at(f, 0.13, 0.29);
    auto mg = sample_at(g, 0.13, 0.29);
    CHECK(mg.a11 == doctest::Approx(2.0 * mf.a11).epsilon(1e-15));
    CHECK(mg.a22 == doctest::Approx(2.0 * mf.a22).epsilon(1e-15));
    CHECK_THROWS_AS(scaled(f, 0.0), std::invalid_argument);
}
