#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hyperlab/geometry.hpp"
#include "hyperlab/quadrature.hpp"

using namespace hyperlab::geometry;

TEST_CASE("rapidity embedding lies on the hyperbola") {
    for (double u : {-3.0, -0.7, 0.0, 1.2, 8.0}) {
        HPoint1 p{u};
        CHECK(std::fabs(p.tau() * p.tau() - p.xi() * p.xi() - 1.0) < 1e-9);
        CHECK(p.tau() >= 1.0);
    }
}

TEST_CASE("boost t = -tanh(2) maps u = -2 to u = 0") {
    Isometry iso = Isometry::boost(std::tanh(2.0));
    HPoint1 p{-2.0};
    CHECK(iso.apply(p).u == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("identity isometry fixes points") {
    Isometry id;
    CHECK(id.apply(HPoint1{1.3}).u == doctest::Approx(1.3));
    HPoint2 q{3.0, 1.0};
    HPoint2 q2 = id.apply(q);
    CHECK(q2.r == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(q2.theta == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("boost parameter domain") {
    Isometry bad = Isometry::boost(1.0);
    CHECK_THROWS_AS(bad.apply(HPoint1{0.0}), std::domain_error);
}

TEST_CASE("d=2 boosts preserve the bilinear form") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ut(-0.95, 0.95), uphi(0.0, two_pi),
        ur(0.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        Isometry iso = Isometry::boost_rotation(ut(rng), uphi(rng), i % 2 == 0);
        HPoint2 p{ur(rng), uphi(rng)};
        HPoint2 q = iso.apply(p);
        CHECK(std::fabs(q.tau() * q.tau() - q.r * q.r - 1.0) < 1e-9);
    }
}

TEST_CASE("iso then inverse returns the point, embedding error < 1e-12") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ut(-0.9, 0.9), uphi(0.0, two_pi),
        ur(0.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        Isometry iso = Isometry::boost_rotation(ut(rng), uphi(rng), i % 2 == 0);
        HPoint2 p{ur(rng), uphi(rng)};
        HPoint2 q = iso.inverse().apply(iso.apply(p));
        CHECK(std::fabs(q.xi1() - p.xi1()) < 1e-12 * (1.0 + p.r));
        CHECK(std::fabs(q.xi2() - p.xi2()) < 1e-12 * (1.0 + p.r));
        CHECK(std::fabs(q.tau() - p.tau()) < 1e-12 * (1.0 + p.tau()));

        Isometry b1 = Isometry::boost(ut(rng)), b2 = Isometry::boost(ut(rng));
        HPoint1 x{uphi(rng) - 3.0};
        // composition of boosts along one axis adds rapidities
        const double u2 = b2.apply(b1.apply(x)).u;
        CHECK(u2 == doctest::Approx(x.u + b1.rapidity() + b2.rapidity()).epsilon(1e-12));
    }
}

TEST_CASE("cap_of d=1 half-open convention") {
    CHECK(cap_of(HPoint1{0.3}).k == 0);
    CHECK(cap_of(HPoint1{0.5}).k == 1);
    CHECK(cap_of(HPoint1{-0.5}).k == 0);
    CHECK(cap_of(HPoint1{-0.51}).k == -1);
    CHECK(cap_of(HPoint1{7.9}).k == 8);
}

TEST_CASE("cap_of d=2 examples and membership") {
    CHECK(cap_of(HPoint2{1.0, 3.0}).n == 0);
    CHECK(cap_of(HPoint2{1.999, 0.0}).n == 0);
    CapId2 c = cap_of(HPoint2{5.0, 3.0 * std::numbers::pi / 4.0});
    CHECK(c.n == 2);
    CHECK(c.j == 1);

    std::mt19937 rng(23);
    std::uniform_real_distribution<double> ur(0.0, 100.0), uth(0.0, two_pi);
    for (int i = 0; i < 100000; ++i) {
        HPoint2 p{ur(rng), uth(rng)};
        CapId2 id = cap_of(p);
        id.check();
        if (p.r < 2.0) {
            CHECK(id.n == 0);
            CHECK(id.j == 0);
        } else {
            const double lo = std::ldexp(1.0, id.n), hi = std::ldexp(1.0, id.n + 1);
            CHECK(p.r >= lo);
            CHECK(p.r < hi);
            const double w = two_pi / std::ldexp(1.0, id.n);
            CHECK(p.theta >= id.j * w);
            CHECK(p.theta < (id.j + 1) * w);
        }
    }
}

TEST_CASE("cap measures") {
    CHECK(cap_measure(CapId1{7}) == 1.0);
    CHECK(cap_measure(CapId2{0, 0}) ==
          doctest::Approx(two_pi * (std::sqrt(5.0) - 1.0)).epsilon(1e-15));
    for (int n = 1; n <= 20; ++n) {
        const double ratio = cap_measure(CapId2{n, 0}) / two_pi;
        CHECK(ratio >= 0.9);
        CHECK(ratio <= 1.0);
        // caps of one generation sum exactly to the annulus measure
        const double total = cap_measure(CapId2{n, 0}) * std::ldexp(1.0, n);
        CHECK(total == doctest::Approx(annulus_measure(n)).epsilon(1e-14));
    }
    CHECK_THROWS_AS(cap_measure(CapId2{2, 4}), std::domain_error);
}

TEST_CASE("d=1 recentering maps C_k onto C_0 exactly") {
    for (int k : {-5, -1, 0, 2, 9}) {
        Isometry iso = recenter_cap(CapId1{k});
        if (k == 2) CHECK(iso.boost_t == doctest::Approx(-std::tanh(2.0)).epsilon(1e-15));
        for (double du : {-0.499, -0.1, 0.0, 0.25, 0.4999}) {
            HPoint1 p{k + du};
            CHECK(cap_of(iso.apply(p)).k == 0);
        }
    }
}

TEST_CASE("d=2 recentering keeps the cap inside |xi| <= 2 sqrt(2) pi") {
    const double bound = 2.0 * std::numbers::sqrt2 * std::numbers::pi;
    CHECK(recenter_cap(CapId2{1, 0}).boost_t == 0.0);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> uu(0.0, 1.0);
    for (int n = 3; n <= 10; ++n) {
        const long last = (1L << n) - 1;
        for (long j : {0L, last / 2, last}) {
            Isometry iso = recenter_cap(CapId2{n, j});
            for (int s = 0; s < 1000; ++s) {
                const double r = std::ldexp(1.0, n) * (1.0 + uu(rng));
                const double th = two_pi * (j + uu(rng)) / std::ldexp(1.0, n);
                HPoint2 img = iso.apply(HPoint2{r, th});
                CHECK(img.r <= bound * (1.0 + 1e-12));
            }
        }
    }
}

TEST_CASE("boost invariance of the measure, d=1") {
    // int g(L u) du = int g(u) du since boosts translate rapidity
    auto g = [](double u) { return std::exp(-0.3 * u * u) * (2.0 + std::sin(u)); };
    Isometry iso = Isometry::boost(-std::tanh(1.7));
    const double k = iso.rapidity();
    const double direct = hyperlab::integrate(g, -12.0, 12.0).value;
    const double moved =
        hyperlab::integrate([&](double u) { return g(u + k); }, -12.0 - k, 12.0 - k).value;
    CHECK(std::fabs(moved / direct - 1.0) < 1e-8);
}

TEST_CASE("lorentz_reduce") {
    CHECK(lorentz_reduce(0.0, 7.0) == doctest::Approx(7.0));
    CHECK(lorentz_reduce(3.0, 5.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(lorentz_reduce(3.0, 0.0, 5.0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(lorentz_reduce(5.0, 3.0), std::domain_error);
    CHECK_THROWS_AS(lorentz_reduce(1.0, 1.0), std::domain_error);
}
