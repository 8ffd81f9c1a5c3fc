#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "liouville/hyperbolic.hpp"
#include "liouville/mobius.hpp"
#include "support.hpp"

using liouville::Complex;
using liouville::ExtComplex;
using liouville::Mobius;
using testsupport::Rng;

namespace {
constexpr double kPi = 3.14159265358979323846;

Mobius random_mobius(Rng& rng) {
    while (true) {
        Complex a = rng.box(-2.0, 2.0, -2.0, 2.0);
        Complex b = rng.box(-2.0, 2.0, -2.0, 2.0);
        Complex c = rng.box(-2.0, 2.0, -2.0, 2.0);
        Complex d = rng.box(-2.0, 2.0, -2.0, 2.0);
        if (std::abs(a * d - b * c) > 0.3) return Mobius::normalized(a, b, c, d);
    }
}
}  // namespace

TEST_CASE("mobius: normalization and group structure") {
    Rng rng(31);
    for (int k = 0; k < 60; ++k) {
        Mobius g = random_mobius(rng);
        CHECK(std::abs(g.det() - 1.0) <= 1e-12);

        Mobius gi = liouville::compose(g, g.inverse());
        // proportional to the identity after composition; normalized reps
        // can differ by sign
        Complex s = gi.a;
        CHECK(std::abs(gi.b) < 1e-12);
        CHECK(std::abs(gi.c) < 1e-12);
        CHECK(std::abs(gi.d - s) < 1e-12);
        CHECK(std::abs(std::abs(s) - 1.0) < 1e-12);

        // associativity on a point
        Mobius h = random_mobius(rng);
        Mobius f = random_mobius(rng);
        ExtComplex z(rng.box(-3.0, 3.0, -3.0, 3.0));
        ExtComplex lhs = liouville::compose(liouville::compose(f, h), g).apply(z);
        ExtComplex rhs = liouville::compose(f, liouville::compose(h, g)).apply(z);
        REQUIRE_FALSE(lhs.is_inf());
        CHECK(std::abs(lhs.v - rhs.v) < 1e-10 * (1.0 + std::abs(lhs.v)));
    }
    CHECK_THROWS_AS(Mobius::normalized(1.0, 2.0, 2.0, 4.0), liouville::DomainError);
}

TEST_CASE("mobius: infinity conventions") {
    Mobius g = Mobius::normalized(2.0, 1.0, 1.0, 3.0);
    ExtComplex at_pole = g.apply(ExtComplex(Complex(-3.0, 0.0)));  // z = -d/c
    CHECK(at_pole.is_inf());
    ExtComplex at_inf = g.apply(ExtComplex::infinity());
    REQUIRE_FALSE(at_inf.is_inf());
    CHECK(std::abs(at_inf.v - Complex(2.0, 0.0)) < 1e-12);  // a/c

    Mobius affine = Mobius::normalized(1.0, 5.0, 0.0, 1.0);
    CHECK(affine.apply(ExtComplex::infinity()).is_inf());
}

TEST_CASE("cross ratio: specializations") {
    // (0, 1, e, inf) -> e
    auto r = liouville::cross_ratio(ExtComplex(0.0), ExtComplex(1.0),
                                    ExtComplex(Complex(std::exp(1.0), 0.0)),
                                    ExtComplex::infinity());
    REQUIRE_FALSE(r.is_inf());
    CHECK(r.v == Complex(std::exp(1.0), 0.0));

    Rng rng(37);
    for (int k = 0; k < 50; ++k) {
        Complex lambda = rng.box(-4.0, 4.0, -4.0, 4.0);
        if (std::abs(lambda) < 1e-3 || std::abs(lambda - 1.0) < 1e-3) continue;
        auto rr = liouville::cross_ratio(ExtComplex(0.0), ExtComplex(1.0), ExtComplex(lambda),
                                         ExtComplex::infinity());
        CHECK(rr.v == lambda);

        Complex w1 = rng.box(-4.0, 4.0, -4.0, 4.0);
        Complex w2 = rng.box(-4.0, 4.0, -4.0, 4.0);
        if (std::abs(w1) < 1e-3 || std::abs(w2) < 1e-3 || std::abs(w1 - w2) < 1e-3) continue;
        auto rw = liouville::cross_ratio(ExtComplex(0.0), ExtComplex(w1), ExtComplex(w2),
                                         ExtComplex::infinity());
        CHECK(std::abs(rw.v - w2 / w1) < 1e-14 * std::abs(w2 / w1));
    }

    CHECK_THROWS_AS(liouville::cross_ratio(ExtComplex(0.0), ExtComplex(0.0), ExtComplex(1.0),
                                           ExtComplex::infinity()),
                    liouville::DomainError);
    CHECK_THROWS_AS(liouville::cross_ratio(ExtComplex::infinity(), ExtComplex(0.0),
                                           ExtComplex(1.0), ExtComplex::infinity()),
                    liouville::DomainError);
}

TEST_CASE("cross ratio: Mobius invariance") {
    Rng rng(41);
    for (int k = 0; k < 50; ++k) {
        Mobius g = random_mobius(rng);
        ExtComplex z[4];
        for (auto& zi : z) zi = ExtComplex(rng.box(-3.0, 3.0, -3.0, 3.0));
        bool distinct = true;
        for (int i = 0; i < 4; ++i) {
            for (int j = i + 1; j < 4; ++j) {
                if (std::abs(z[i].v - z[j].v) < 1e-3) distinct = false;
            }
        }
        if (!distinct) continue;
        auto before = liouville::cross_ratio(z[0], z[1], z[2], z[3]);
        auto after = liouville::cross_ratio(g.apply(z[0]), g.apply(z[1]), g.apply(z[2]),
                                            g.apply(z[3]));
        REQUIRE_FALSE(before.is_inf());
        REQUIRE_FALSE(after.is_inf());
        CHECK(std::abs(before.v - after.v) <= 1e-12 * (1.0 + std::abs(before.v)));
    }
}

TEST_CASE("exp displacement") {
    CHECK(liouville::exp_displacement(Complex(0.0, 0.0)) == Complex(1.0, 0.0));
    CHECK(std::abs(liouville::exp_displacement(Complex(0.0, kPi)) - Complex(-1.0, 0.0)) < 1e-15);
}

TEST_CASE("beltrami path") {
    // endpoints
    CHECK(liouville::beltrami_path(Complex(0.3, 0.2), 0.0) == Complex(0.0, 0.0));
    Complex mu(0.25, -0.15);
    CHECK(std::abs(liouville::beltrami_path(mu, 1.0) - mu) < 1e-14);
    CHECK(liouville::beltrami_path(Complex(0.0, 0.0), 0.7) == Complex(0.0, 0.0));

    // |mu| = 0.3, a = 1/2: oracle tanh(atanh(0.3)/2) via the identity
    // tanh(a artanh m) = (r^a - 1)/(r^a + 1), r = (1+m)/(1-m)
    Complex half = liouville::beltrami_path(Complex(0.3, 0.0), 0.5);
    CHECK(std::abs(half) == doctest::Approx(0.15353599527684791).epsilon(1e-12));
    CHECK(half.imag() == 0.0);
    // phase preserved
    Complex rot = liouville::beltrami_path(Complex(0.0, 0.3), 0.5);
    CHECK(rot.real() == doctest::Approx(0.0));
    CHECK(rot.imag() == doctest::Approx(0.15353599527684791).epsilon(1e-12));

    // semigroup in the hyperbolic parameter, monotone magnitude
    Rng rng(43);
    for (int k = 0; k < 50; ++k) {
        double m = rng.uniform(0.01, 0.95);
        double a = rng.uniform(0.0, 1.0);
        Complex mu_a = liouville::beltrami_path(Complex(m, 0.0), a);
        CHECK(std::atanh(std::abs(mu_a)) == doctest::Approx(a * std::atanh(m)).epsilon(1e-13));
        CHECK(std::abs(mu_a) <= m + 1e-15);
        double a2 = rng.uniform(a, 1.0);
        if (a2 > a && m > 0.0) {
            CHECK(std::abs(liouville::beltrami_path(Complex(m, 0.0), a2)) >= std::abs(mu_a));
        }
    }

    CHECK_THROWS_AS(liouville::beltrami_path(Complex(1.0, 0.0), 0.5), liouville::DomainError);
}

TEST_CASE("quasiconformal constants") {
    auto q = liouville::qc_constants(1.0 / 3.0);
    CHECK(q.k == doctest::Approx(2.0).epsilon(1e-15));
    for (double m : {0.1, 0.2, 0.3}) {
        auto qc = liouville::qc_constants(m);
        CHECK(std::abs(qc.cr_distortion - std::atanh(m)) < 1e-14);
        CHECK(qc.step_dilatation(0.0, 1.0) == doctest::Approx(qc.k).epsilon(1e-14));
        CHECK(qc.step_dilatation(0.4, 0.4) == doctest::Approx(1.0));
        CHECK(qc.step_beltrami_bound(0.0, 1.0) == doctest::Approx(m).epsilon(1e-14));
        CHECK(qc.step_beltrami_bound(0.2, 0.7) ==
              doctest::Approx(std::tanh(0.5 * std::atanh(m))).epsilon(1e-14));
    }
    CHECK_THROWS_AS(liouville::qc_constants(0.0), liouville::DomainError);
    CHECK_THROWS_AS(liouville::qc_constants(1.0), liouville::DomainError);
}

TEST_CASE("tract factor") {
    CHECK(liouville::tract_factor(Complex(0.0, 0.0)) == doctest::Approx(1.0 / (3.0 * kPi)));
    Rng rng(47);
    double prev = liouville::tract_factor(Complex(0.0, 5.0));
    for (double x = 0.5; x <= 10.0; x += 0.5) {
        CHECK(liouville::tract_factor(Complex(x, 0.0)) ==
              doctest::Approx(liouville::tract_factor(Complex(-x, 0.0))));
        double cur = liouville::tract_factor(Complex(x, rng.uniform(-5.0, 5.0)));
        CHECK(cur < prev);
        prev = cur;
    }
}

TEST_CASE("euclidean ball bound") {
    CHECK(liouville::euclid_ball_bound(1.5, Complex(1.0, 0.0)) ==
          doctest::Approx(0.5 * (1.0 + 1.5 * kPi)).epsilon(1e-15));
    CHECK(liouville::euclid_ball_bound(1.0 + 1e-12, Complex(2.0, 1.0)) < 1e-10);
    CHECK_THROWS_AS(liouville::euclid_ball_bound(1.0, Complex(0.0, 0.0)),
                    liouville::DomainError);

    // matches the displacement bound when K = (1+M)/(1-M)
    for (double m : {0.1, 0.2, 0.3}) {
        double k = (1.0 + m) / (1.0 - m);
        Complex r(2.5, 1.0);
        double lhs = liouville::euclid_ball_bound(k, r);
        double rhs = (2.0 * m / (1.0 - m)) * (std::abs(r.real()) + 1.5 * kPi);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
    }
}

TEST_CASE("polyline length: constant density and closed forms") {
    auto half = [](Complex) { return 0.5; };
    CHECK(liouville::polyline_length(half, {Complex(0.0, 0.0), Complex(4.0, 0.0)}) ==
          doctest::Approx(2.0).epsilon(1e-12));

    // tract density along [0, x]: (1/2) log(1 + x/(3 pi/2))
    auto tract = [](Complex z) { return liouville::tract_factor(z); };
    for (double x : {0.5, 1.0, 3.0, 10.0}) {
        double expect = 0.5 * std::log(1.0 + x / (1.5 * kPi));
        CHECK(liouville::polyline_length(tract, {Complex(0.0, 0.0), Complex(x, 0.0)}) ==
              doctest::Approx(expect).epsilon(1e-9));
    }

    // kink crossing: [-1, 2] = [-1, 0] + [0, 2] by symmetry/closed form
    double left = 0.5 * std::log(1.0 + 1.0 / (1.5 * kPi));
    double right = 0.5 * std::log(1.0 + 2.0 / (1.5 * kPi));
    CHECK(liouville::polyline_length(tract, {Complex(-1.0, 0.0), Complex(2.0, 0.0)}) ==
          doctest::Approx(left + right).epsilon(1e-9));

    // additivity over concatenation
    Rng rng(53);
    for (int k = 0; k < 20; ++k) {
        Complex a = rng.box(-3.0, 3.0, -3.0, 3.0);
        Complex b = rng.box(-3.0, 3.0, -3.0, 3.0);
        Complex c = rng.box(-3.0, 3.0, -3.0, 3.0);
        if (a == b || b == c) continue;
        double joint = liouville::polyline_length(tract, {a, b, c});
        double split = liouville::polyline_length(tract, {a, b}) +
                       liouville::polyline_length(tract, {b, c});
        CHECK(joint == doctest::Approx(split).epsilon(1e-10));
    }
}

TEST_CASE("tract distance") {
    CHECK(liouville::tract_distance(Complex(1.0, 2.0), Complex(1.0, 2.0)).distance == 0.0);

    // small real separation: the straight segment is the geodesic
    for (double x : {0.1, 0.5, 1.0}) {
        auto res = liouville::tract_distance(Complex(0.0, 0.0), Complex(x, 0.0));
        double straight = 0.5 * std::log(1.0 + x / (1.5 * kPi));
        CHECK(res.distance <= straight * (1.0 + 1e-6));
        CHECK(res.distance >= straight * 0.99);
        // refinement never increases the estimate
        for (std::size_t s = 1; s < res.stage_lengths.size(); ++s) {
            CHECK(res.stage_lengths[s] <= res.stage_lengths[s - 1] * (1.0 + 1e-12));
        }
    }

    // symmetry and triangle inequality within search slack
    Rng rng(59);
    for (int k = 0; k < 6; ++k) {
        Complex a = rng.box(-4.0, 4.0, -3.0, 3.0);
        Complex b = rng.box(-4.0, 4.0, -3.0, 3.0);
        Complex c = rng.box(-4.0, 4.0, -3.0, 3.0);
        if (a == b || b == c || a == c) continue;
        double dab = liouville::tract_distance(a, b).distance;
        double dba = liouville::tract_distance(b, a).distance;
        CHECK(dab == doctest::Approx(dba).epsilon(1e-4));
        double dac = liouville::tract_distance(a, c).distance;
        double dcb = liouville::tract_distance(c, b).distance;
        CHECK(dab <= 1.05 * (dac + dcb));
    }
}

TEST_CASE("tract ball sits inside the euclidean bound") {
    Rng rng(61);
    for (double k_dil : {1.2, 1.5}) {
        for (Complex r : {Complex(0.0, 0.0), Complex(1.0, 0.0)}) {
            double radius = 0.5 * std::log(k_dil);
            double euclid = liouville::euclid_ball_bound(k_dil, r);
            int inside = 0;
            for (int s = 0; s < 60; ++s) {
                double theta = rng.uniform(0.0, 2.0 * kPi);
                double rho = rng.uniform(0.0, 1.3) * euclid;
                Complex b = r + rho * Complex(std::cos(theta), std::sin(theta));
                if (b == r) continue;
                auto d = liouville::tract_distance(r, b);
                if (d.distance <= radius) {
                    ++inside;
                    CHECK(std::abs(b - r) <= euclid * 1.01);
                }
            }
            CHECK(inside > 0);
        }
    }
}

TEST_CASE("schwarzian fd: kernel, exp, cocycle") {
    // Mobius maps have vanishing Schwarzian; probe away from the pole at -3,
    // where the O(h^2) stencil truncation stays below the tolerance
    auto mob = [](Complex z) { return (2.0 * z + 1.0) / (z + 3.0); };
    for (Complex z : {Complex(0.0, 1.0), Complex(0.5, -0.5), Complex(1.0, 0.2)}) {
        CHECK(std::abs(liouville::schwarzian_fd(mob, z, 1e-3)) < 1e-6);
    }

    // {exp, z} = -1/2 exactly
    auto ex = [](Complex z) { return std::exp(z); };
    Rng rng(67);
    for (int k = 0; k < 20; ++k) {
        Complex z = rng.box(-1.0, 1.0, -1.0, 1.0);
        CHECK(std::abs(liouville::schwarzian_fd(ex, z, 1e-3) - Complex(-0.5, 0.0)) < 1e-6);
    }

    // cocycle: S(omega . zeta) = S(zeta) + S(omega)(zeta) zeta'^2 with
    // zeta = exp and omega = z + 0.1 sin z, both sides by independent FD
    auto omega = [](Complex w) { return w + 0.1 * std::sin(w); };
    for (int k = 0; k < 12; ++k) {
        Complex z = rng.box(-0.8, 0.8, -0.8, 0.8);
        auto comp = [&](Complex w) { return omega(std::exp(w)); };
        Complex lhs = liouville::schwarzian_fd(comp, z, 1e-3);
        Complex zeta_prime = std::exp(z);
        Complex rhs = liouville::schwarzian_fd(ex, z, 1e-3) +
                      liouville::schwarzian_fd(omega, std::exp(z), 1e-3) * zeta_prime * zeta_prime;
        CHECK(std::abs(lhs - rhs) < 1e-5);
    }

    // post-composition with a Mobius map on the left leaves it unchanged
    auto base = [](Complex z) { return std::exp(z) + 0.3 * z; };
    for (int k = 0; k < 12; ++k) {
        Complex z = rng.box(-0.8, 0.8, -0.8, 0.8);
        auto composed = [&](Complex w) { return mob(base(w)); };
        Complex s1 = liouville::schwarzian_fd(base, z, 1e-3);
        Complex s2 = liouville::schwarzian_fd(composed, z, 1e-3);
        CHECK(std::abs(s1 - s2) < 1e-5);
    }

    // cancellation detector
    auto flat = [](Complex) { return Complex(1.0, 0.0); };
    CHECK_THROWS_AS(liouville::schwarzian_fd(flat, Complex(0.0, 0.0), 1e-3),
                    liouville::DomainError);
}

TEST_CASE("quadrature non-convergence is reported") {
    // non-integrable spike at the segment midpoint
    auto spike = [](Complex z) { return 1.0 / std::abs(z.real()); };
    CHECK_THROWS_AS(
        liouville::polyline_length(spike, {Complex(-1.0, 0.0), Complex(1.0, 0.0)}, 1e-8),
        liouville::SearchError);
}

TEST_CASE("tract distance converges on benign instances") {
    auto res = liouville::tract_distance(Complex(0.0, 0.0), Complex(2.0, 1.0));
    CHECK(res.converged);
    CHECK(res.stage_lengths.size() == 3);
}
