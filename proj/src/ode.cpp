#include "liouville/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "liouville/detail/rk853.hpp"

namespace liouville {

namespace {

constexpr double kProductFloor = 1e-30;  // |psi psit| below this breaks the y equation

using Vec = std::array<Complex, 5>;

Vec to_vec(const HillState& s) { return {s.psi, s.dpsi, s.psit, s.dpsit, s.y}; }

HillState to_state(Complex z, const Vec& v) {
    HillState s;
    s.z = z;
    s.psi = v[0];
    s.dpsi = v[1];
    s.psit = v[2];
    s.dpsit = v[3];
    s.y = v[4];
    return s;
}

Vec jet_rhs(const PotentialExpr& p, Complex z, const Vec& s) {
    EvalResult pe = p.eval(z);
    if (pe.near_pole) {
        throw PoleProximityError(z, "potential pole reached during integration");
    }
    Complex q = 0.25 + 0.5 * pe.value;
    if (std::abs(s[0]) * 1e12 < std::abs(s[1]) || std::abs(s[2]) * 1e12 < std::abs(s[3])) {
        throw ZeroCrossingError(z, "psi or psit crossed zero");
    }
    Complex prod = s[0] * s[2];
    if (std::abs(prod) < kProductFloor) {
        throw ZeroCrossingError(z, "psi*psit vanished; the y equation broke down");
    }
    return {s[1], q * s[0], s[3], q * s[2], 1.0 / prod};
}

}  // namespace

HillDeriv hill_rhs(const PotentialExpr& p, const HillState& s) {
    Vec d = jet_rhs(p, s.z, to_vec(s));
    return {d[0], d[1], d[2], d[3], d[4]};
}

void IntegratorConfig::validate() const {
    if (!(rtol > 0.0 && rtol <= 1e-3)) throw DomainError("rtol must lie in (0, 1e-3]");
    if (!(atol > 0.0)) throw DomainError("atol must be positive");
    if (max_steps < 1 || max_steps > 10000000LL) {
        throw DomainError("max_steps must lie in [1, 1e7]");
    }
}

double PathPolyline::length() const {
    double total = 0.0;
    for (std::size_t i = 1; i < vertices.size(); ++i) {
        total += std::abs(vertices[i] - vertices[i - 1]);
    }
    return total;
}

void PathPolyline::validate(const Strip& strip) const {
    if (vertices.empty()) throw DomainError("empty path");
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        if (!strip.contains(vertices[i])) {
            throw DomainError("path vertex outside the strip");
        }
        if (i > 0 && vertices[i] == vertices[i - 1]) {
            throw DomainError("consecutive path vertices coincide");
        }
    }
}

HillState free_state(Complex z) {
    HillState s;
    s.z = z;
    s.psi = std::exp(-0.5 * z);
    s.dpsi = -0.5 * s.psi;
    s.psit = std::exp(0.5 * z);
    s.dpsit = 0.5 * s.psit;
    s.y = z;
    return s;
}

HillState mode_state(Complex z, Complex c) {
    Complex kappa = std::sqrt(0.25 + 0.5 * c);
    if (std::abs(kappa) < 1e-6) {
        throw DomainError("constant potential too close to -1/2; mode pair degenerates");
    }
    HillState s;
    s.z = z;
    s.psi = std::exp(-kappa * z);
    s.dpsi = -kappa * s.psi;
    s.psit = std::exp(kappa * z) / (2.0 * kappa);
    s.dpsit = kappa * s.psit;
    s.y = 2.0 * kappa * z - std::log(2.0 * kappa);
    return s;
}

IntegrationResult integrate(const PotentialExpr& p, const HillState& start,
                            const PathPolyline& path, const IntegratorConfig& cfg,
                            bool record_dense) {
    cfg.validate();
    if (path.vertices.empty()) throw DomainError("empty path");
    if (std::abs(start.z - path.vertices.front()) > 1e-12) {
        throw DomainError("start state is not at the first path vertex");
    }
    if (std::abs(start.wronskian() - 1.0) > 1e-9) {
        throw DomainError("start state violates the Wronskian-1 invariant");
    }

    IntegrationResult res;
    if (record_dense) {
        res.dense.reserve(256);
        res.dense.push_back(start);
    }

    auto rhs = [&p](Complex z, const Vec& s) { return jet_rhs(p, z, s); };
    // Relative control per solution pair: each pair's components sweep wide
    // exponential ranges jointly, and Wronskian conservation needs relative
    // accuracy on both pairs. atol applies to the logarithmic coordinate.
    auto scales = [&cfg](const Vec& s0, const Vec& s1) {
        std::array<double, 5> sc;
        double p0 = std::abs(s0[0]) + std::abs(s0[1]);
        double p1 = std::abs(s1[0]) + std::abs(s1[1]);
        double q0 = std::abs(s0[2]) + std::abs(s0[3]);
        double q1 = std::abs(s1[2]) + std::abs(s1[3]);
        sc[0] = sc[1] = cfg.rtol * std::max(p0, p1) + 1e-280;
        sc[2] = sc[3] = cfg.rtol * std::max(q0, q1) + 1e-280;
        sc[4] = cfg.atol + cfg.rtol * std::max(std::abs(s0[4]), std::abs(s1[4]));
        return sc;
    };

    detail::StepLimits lim;
    lim.rtol = cfg.rtol;
    lim.h_init = cfg.h_init;
    lim.h_max = cfg.h_max;
    lim.max_steps = cfg.max_steps;

    Vec s = to_vec(start);
    Complex z = start.z;
    std::int64_t steps = 0, rejected = 0;
    double errold = 1e-4;
    for (std::size_t i = 1; i < path.vertices.size(); ++i) {
        Complex target = path.vertices[i];
        Complex delta = target - z;
        double T = std::abs(delta);
        if (T == 0.0) continue;
        auto accept = [&](Complex zc, const Vec& sc) {
            if (record_dense) res.dense.push_back(to_state(zc, sc));
        };
        detail::rk853_segment<5>(z, delta / T, T, s, lim, rhs, scales, accept, steps, rejected,
                                 errold);
        z = target;
    }

    res.final = to_state(z, s);
    res.steps = steps;
    res.rejected = rejected;
    res.wronskian_drift = std::abs(res.final.wronskian() - 1.0);
    return res;
}

void write_dense_csv(std::ostream& os, const std::vector<HillState>& dense) {
    os << "re_z,im_z,re_psi,im_psi,re_dpsi,im_dpsi,re_psit,im_psit,re_dpsit,im_dpsit,re_y,im_y\n";
    char buf[512];
    for (const HillState& s : dense) {
        std::snprintf(buf, sizeof(buf),
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      s.z.real(), s.z.imag(), s.psi.real(), s.psi.imag(), s.dpsi.real(),
                      s.dpsi.imag(), s.psit.real(), s.psit.imag(), s.dpsit.real(),
                      s.dpsit.imag(), s.y.real(), s.y.imag());
        os << buf;
    }
}

}  // namespace liouville
