#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "liouville/detail/rk853.hpp"
#include "liouville/ode.hpp"
#include "support.hpp"

using liouville::Complex;
using liouville::HillState;
using liouville::IntegratorConfig;
using liouville::PathPolyline;
using liouville::PotentialExpr;
using liouville::Strip;
using testsupport::Rng;

namespace {
constexpr double kPi = 3.14159265358979323846;

PathPolyline bounded_span_zigzag(double x0, double length_target) {
    // vertical runs with small horizontal hops: long total length, short
    // horizontal extent, so the recessive mode is never transported far
    PathPolyline path;
    path.vertices.push_back({x0, 0.3});
    double x = x0;
    bool up = true;
    while (path.length() < length_target) {
        path.vertices.push_back({x, up ? 2.84 : 0.3});
        up = !up;
        x += 0.2;
        path.vertices.push_back({x, up ? 0.3 : 2.84});
    }
    return path;
}
}  // namespace

TEST_CASE("hill_rhs: free jet derivatives") {
    HillState s;
    s.z = 0.0;
    s.psi = 1.0;
    s.dpsi = -0.5;
    s.psit = 1.0;
    s.dpsit = 0.5;
    s.y = 0.0;
    auto d = liouville::hill_rhs(PotentialExpr::parse("0"), s);
    CHECK(d.psi == Complex(-0.5, 0.0));
    CHECK(d.dpsi == Complex(0.25, 0.0));
    CHECK(d.psit == Complex(0.5, 0.0));
    CHECK(d.dpsit == Complex(0.25, 0.0));
    CHECK(d.y == Complex(1.0, 0.0));
}

TEST_CASE("hill_rhs: Wronskian derivative vanishes identically") {
    const char* corpus[] = {"0", "0.1", "0.05/cosh(z - i*1.5707963267948966)^2",
                            "0.02*exp(i*z)"};
    Rng rng(101);
    for (const char* text : corpus) {
        auto p = PotentialExpr::parse(text);
        for (int k = 0; k < 25; ++k) {
            HillState s;
            s.z = rng.box(-5.0, 5.0, 0.3, 2.8);
            s.psi = rng.box(-2.0, 2.0, -2.0, 2.0);
            s.dpsi = rng.box(-2.0, 2.0, -2.0, 2.0);
            s.psit = rng.box(-2.0, 2.0, -2.0, 2.0);
            s.dpsit = rng.box(-2.0, 2.0, -2.0, 2.0);
            if (std::abs(s.psi * s.psit) < 1e-3) continue;
            auto d = liouville::hill_rhs(p, s);
            Complex wr_dot = d.psi * s.dpsit + s.psi * d.dpsit - d.dpsi * s.psit -
                             s.dpsi * d.psit;
            double scale = std::abs(s.psi * d.dpsit) + std::abs(d.dpsi * s.psit) + 1.0;
            CHECK(std::abs(wr_dot) <= 1e-13 * scale);
        }
    }
}

TEST_CASE("hill_rhs: constant-potential mode pair satisfies the system") {
    Rng rng(103);
    for (Complex c : {Complex(0.05, 0.0), Complex(0.1, 0.0), Complex(0.0, 0.05)}) {
        std::ostringstream ps;
        if (c.imag() == 0.0) {
            ps << c.real();
        } else {
            ps << c.imag() << "i";
        }
        auto p = PotentialExpr::parse(ps.str());
        Complex kappa = std::sqrt(0.25 + 0.5 * c);
        for (int k = 0; k < 20; ++k) {
            Complex z = rng.box(-4.0, 4.0, 0.3, 2.8);
            HillState s = liouville::mode_state(z, c);
            auto d = liouville::hill_rhs(p, s);
            CHECK(std::abs(d.psi - (-kappa * s.psi)) <= 1e-12 * std::abs(s.psi));
            CHECK(std::abs(d.dpsi - (kappa * kappa * s.psi)) <= 1e-12 * std::abs(s.psi));
            CHECK(std::abs(d.psit - (kappa * s.psit)) <= 1e-12 * std::abs(s.psit));
            CHECK(std::abs(d.dpsit - (kappa * kappa * s.psit)) <= 1e-12 * std::abs(s.psit));
            CHECK(std::abs(d.y - 2.0 * kappa) <= 1e-12);
        }
    }
}

TEST_CASE("hill_rhs: pole proximity propagates") {
    auto p = PotentialExpr::parse("1/cosh(z)^2");
    HillState s = liouville::free_state(Complex(0.0, kPi / 2.0));
    CHECK_THROWS_AS(liouville::hill_rhs(p, s), liouville::PoleProximityError);
}

TEST_CASE("anchor states carry exact invariants") {
    Rng rng(107);
    for (int k = 0; k < 30; ++k) {
        Complex z = rng.box(-15.0, 15.0, 0.2, 3.0);
        HillState f = liouville::free_state(z);
        CHECK(std::abs(f.wronskian() - 1.0) < 1e-14);
        CHECK(std::abs(std::exp(f.y) - f.ratio()) < 1e-13 * std::abs(f.ratio()));

        HillState m = liouville::mode_state(z, Complex(0.05, 0.02));
        CHECK(std::abs(m.wronskian() - 1.0) < 1e-13);
        CHECK(std::abs(std::exp(m.y) - m.ratio()) < 1e-12 * std::abs(m.ratio()));
    }
    CHECK_THROWS_AS(liouville::mode_state(Complex(0, 1), Complex(-0.5, 0.0)),
                    liouville::DomainError);
}

TEST_CASE("integrate: free case 0 -> 2") {
    auto p = PotentialExpr::parse("0");
    IntegratorConfig cfg;
    auto res = liouville::integrate(p, liouville::free_state(Complex(0.0, 0.0)),
                                    PathPolyline{Complex(0.0, 0.0), Complex(2.0, 0.0)}, cfg);
    CHECK(std::abs(res.final.psi - std::exp(-1.0)) < 1e-10);
    CHECK(std::abs(res.final.psit - std::exp(1.0)) < 1e-10);
    CHECK(std::abs(res.final.y - 2.0) < 1e-10);
    CHECK(res.dense.size() >= 2);
    CHECK(res.wronskian_drift < 1e-12);
}

TEST_CASE("integrate: constant-potential closed form at rtol 1e-10") {
    Complex c(0.1, 0.0);
    auto p = PotentialExpr::parse("0.1");
    Complex kappa = std::sqrt(0.25 + 0.5 * c);
    Complex za(-5.0, kPi / 2.0), zb(5.0, kPi / 2.0);
    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    auto res = liouville::integrate(p, liouville::mode_state(za, c), PathPolyline{za, zb}, cfg);
    Complex dy_exact = 2.0 * kappa * (zb - za);
    CHECK(std::abs((res.final.y - liouville::mode_state(za, c).y) - dy_exact) < 1e-8);
    HillState exact = liouville::mode_state(zb, c);
    CHECK(std::abs(res.final.psi - exact.psi) < 1e-8 * std::abs(exact.psi));
}

TEST_CASE("integrate: Wronskian conservation over length-100 paths") {
    const char* corpus[] = {"0", "0.05", "0.05/cosh(z - i*1.5707963267948966)^2",
                            "0.02/cosh(z - i*1.5707963267948966)^2"};
    PathPolyline path = bounded_span_zigzag(-4.0, 100.0);
    CHECK(path.length() >= 100.0);
    CHECK(path.length() <= 110.0);
    for (const char* text : corpus) {
        auto p = PotentialExpr::parse(text);
        IntegratorConfig cfg;
        cfg.rtol = 1e-10;
        cfg.atol = 1e-12;
        auto res = liouville::integrate(p, liouville::free_state(path.vertices.front()), path,
                                        cfg, false);
        CHECK(res.wronskian_drift < 1e-9);
        // module invariant, much looser
        CHECK(res.wronskian_drift <= 100.0 * cfg.rtol * path.length());
    }
}

TEST_CASE("integrate: path independence inside the strip") {
    auto p = PotentialExpr::parse("0.05/cosh(z - i*1.5707963267948966)^2");
    Strip strip{kPi};
    Complex za(-2.0, 0.6), zb(2.5, 2.4);
    PathPolyline direct{za, zb};
    PathPolyline detour{za, Complex(-2.0, 2.8), Complex(2.5, 2.8), zb};
    direct.validate(strip);
    detour.validate(strip);

    IntegratorConfig cfg;
    cfg.rtol = 1e-10;
    cfg.atol = 1e-12;
    HillState start = liouville::free_state(za);
    auto r1 = liouville::integrate(p, start, direct, cfg, false);
    auto r2 = liouville::integrate(p, start, detour, cfg, false);

    auto rel = [](Complex a, Complex b) {
        return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
    };
    double tol = 10.0 * cfg.rtol;
    CHECK(rel(r1.final.psi, r2.final.psi) < tol);
    CHECK(rel(r1.final.dpsi, r2.final.dpsi) < tol);
    CHECK(rel(r1.final.psit, r2.final.psit) < tol);
    CHECK(rel(r1.final.dpsit, r2.final.dpsit) < tol);
    CHECK(std::abs(r1.final.y - r2.final.y) < tol * (1.0 + std::abs(r1.final.y)));
}

TEST_CASE("integrate: y stays consistent with psit/psi at dense samples") {
    auto p = PotentialExpr::parse("0.05/cosh(z - i*1.5707963267948966)^2");
    IntegratorConfig cfg;
    Complex za(-6.0, kPi / 2.0);
    auto res = liouville::integrate(p, liouville::free_state(za),
                                    PathPolyline{za, Complex(6.0, kPi / 2.0),
                                                 Complex(6.0, 2.6)},
                                    cfg, true);
    for (const HillState& s : res.dense) {
        Complex ratio = s.ratio();
        CHECK(std::abs(std::exp(s.y) - ratio) <= 100.0 * cfg.rtol * std::abs(ratio));
    }
}

TEST_CASE("integrate: tolerance controls the endpoint error") {
    // An order-8 pair under error-per-step control gains about 2^(8/9) per
    // halving asymptotically; the aggregate over two decades is the robust
    // order signal.
    Complex c(0.1, 0.0);
    auto p = PotentialExpr::parse("0.1");
    Complex za(0.0, kPi / 2.0), zb(10.0, kPi / 2.0);
    HillState exact = liouville::mode_state(zb, c);
    auto err_at = [&](double rtol) {
        IntegratorConfig cfg;
        cfg.rtol = rtol;
        cfg.atol = 1e-14;
        auto res =
            liouville::integrate(p, liouville::mode_state(za, c), PathPolyline{za, zb}, cfg, false);
        return std::abs(res.final.y - exact.y);
    };
    double e6 = err_at(1e-6);
    double e7 = err_at(1e-7);
    double e8 = err_at(1e-8);
    CHECK(e6 / e7 > 2.0);   // one decade
    CHECK(e6 / e8 > 8.0);   // two decades
    CHECK(e8 < 1e-7);
}

TEST_CASE("integrate: zero crossing reported with location") {
    // psi = sinh((z-1)/2) crosses zero at z = 1; psit = -2 cosh((z-1)/2)
    // keeps Wr = 1 exactly
    auto p = PotentialExpr::parse("0");
    HillState s;
    s.z = 0.0;
    Complex w = Complex(-0.5, 0.0);
    s.psi = std::sinh(w);
    s.dpsi = 0.5 * std::cosh(w);
    s.psit = -2.0 * std::cosh(w);
    s.dpsit = -std::sinh(w);
    s.y = std::log(s.psit / s.psi);
    REQUIRE(std::abs(s.wronskian() - 1.0) < 1e-14);

    IntegratorConfig cfg;
    try {
        liouville::integrate(p, s, PathPolyline{Complex(0.0, 0.0), Complex(2.5, 0.0)}, cfg,
                             false);
        CHECK(false);
    } catch (const liouville::PointedError& e) {
        CHECK(std::abs(e.where() - Complex(1.0, 0.0)) < 1e-3);
    }
}

TEST_CASE("integrate: max_steps exceeded") {
    auto p = PotentialExpr::parse("0");
    IntegratorConfig cfg;
    cfg.max_steps = 3;
    cfg.h_max = 0.01;
    CHECK_THROWS_AS(liouville::integrate(p, liouville::free_state(Complex(0.0, 1.0)),
                                         PathPolyline{Complex(0.0, 1.0), Complex(5.0, 1.0)},
                                         cfg, false),
                    liouville::MaxStepsError);
}

TEST_CASE("integrate: start-state validation") {
    auto p = PotentialExpr::parse("0");
    IntegratorConfig cfg;
    HillState s = liouville::free_state(Complex(0.0, 1.0));
    CHECK_THROWS_AS(liouville::integrate(p, s, PathPolyline{Complex(1.0, 1.0), Complex(2.0, 1.0)},
                                         cfg, false),
                    liouville::DomainError);
    s.dpsit = 0.7;  // breaks Wr = 1
    CHECK_THROWS_AS(liouville::integrate(p, s, PathPolyline{Complex(0.0, 1.0), Complex(2.0, 1.0)},
                                         cfg, false),
                    liouville::DomainError);
}

TEST_CASE("config and path validation") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-2;
    CHECK_THROWS_AS(cfg.validate(), liouville::DomainError);
    cfg = IntegratorConfig{};
    cfg.atol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), liouville::DomainError);
    cfg = IntegratorConfig{};
    cfg.max_steps = 100000000LL;
    CHECK_THROWS_AS(cfg.validate(), liouville::DomainError);

    Strip strip{kPi};
    PathPolyline outside{Complex(0.0, -1.0), Complex(1.0, 1.0)};
    CHECK_THROWS_AS(outside.validate(strip), liouville::DomainError);
    PathPolyline dup{Complex(0.0, 1.0), Complex(0.0, 1.0)};
    CHECK_THROWS_AS(dup.validate(strip), liouville::DomainError);
}

TEST_CASE("dense output CSV") {
    auto p = PotentialExpr::parse("0");
    IntegratorConfig cfg;
    auto res = liouville::integrate(p, liouville::free_state(Complex(0.0, 1.0)),
                                    PathPolyline{Complex(0.0, 1.0), Complex(3.0, 1.0)}, cfg);
    std::ostringstream os;
    liouville::write_dense_csv(os, res.dense);
    std::string text = os.str();
    std::size_t rows = 0;
    for (char ch : text) {
        if (ch == '\n') ++rows;
    }
    CHECK(rows == res.dense.size() + 1);  // header + data
    CHECK(text.substr(0, 9) == "re_z,im_z");
}

TEST_CASE("tableau consistency: row sums, weights, error combinations") {
    namespace d = liouville::detail;
    auto near = [](double a, double b) { return std::abs(a - b) < 1e-14; };
    CHECK(near(d::a21, d::rk_c2));
    CHECK(near(d::a31 + d::a32, d::rk_c3));
    CHECK(near(d::a41 + d::a43, d::rk_c4));
    CHECK(near(d::a51 + d::a53 + d::a54, d::rk_c5));
    CHECK(near(d::a61 + d::a64 + d::a65, d::rk_c6));
    CHECK(near(d::a71 + d::a74 + d::a75 + d::a76, d::rk_c7));
    CHECK(near(d::a81 + d::a84 + d::a85 + d::a86 + d::a87, d::rk_c8));
    CHECK(near(d::a91 + d::a94 + d::a95 + d::a96 + d::a97 + d::a98, d::rk_c9));
    CHECK(near(d::a101 + d::a104 + d::a105 + d::a106 + d::a107 + d::a108 + d::a109, d::rk_c10));
    CHECK(near(d::a111 + d::a114 + d::a115 + d::a116 + d::a117 + d::a118 + d::a119 + d::a1110,
               d::rk_c11));
    CHECK(near(d::a121 + d::a124 + d::a125 + d::a126 + d::a127 + d::a128 + d::a129 + d::a1210 +
                   d::a1211,
               1.0));
    CHECK(near(d::b1 + d::b6 + d::b7 + d::b8 + d::b9 + d::b10 + d::b11 + d::b12, 1.0));
    CHECK(near(d::bhh1 + d::bhh2 + d::bhh3, 1.0));
    // the order-5 comparison weights are a difference of two unit-sum rows
    CHECK(near(d::er1 + d::er6 + d::er7 + d::er8 + d::er9 + d::er10 + d::er11 + d::er12, 0.0));
}
