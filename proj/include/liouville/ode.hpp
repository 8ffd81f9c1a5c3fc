#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <vector>

#include "liouville/expr.hpp"
#include "liouville/geometry.hpp"

namespace liouville {

/// The 5-component jet transported by the Hill system: a Wronskian-1
/// solution pair (psi, psit) of psi'' = (1/4 + p/2) psi together with the
/// branch-tracked logarithm y of psit/psi, integrated as a state component
/// so no principal-branch log is ever taken.
struct HillState {
    Complex z{};
    Complex psi{1.0, 0.0};
    Complex dpsi{};
    Complex psit{1.0, 0.0};
    Complex dpsit{};
    Complex y{};

    Complex wronskian() const { return psi * dpsit - dpsi * psit; }
    Complex ratio() const { return psit / psi; }
};

/// z-derivative of the jet. y' = 1/(psi psit), the exact consequence of
/// Wr = 1: (psit/psi)' = 1/psi^2, so (log psit/psi)' = 1/(psi psit).
struct HillDeriv {
    Complex psi{}, dpsi{}, psit{}, dpsit{}, y{};
};

HillDeriv hill_rhs(const PotentialExpr& p, const HillState& s);

struct IntegratorConfig {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_init = 0.0;  // 0 = automatic
    double h_max = 0.0;   // 0 = segment length
    std::int64_t max_steps = 1000000;

    void validate() const;
};

struct PathPolyline {
    std::vector<Complex> vertices;

    PathPolyline() = default;
    PathPolyline(std::initializer_list<Complex> v) : vertices(v) {}
    explicit PathPolyline(std::vector<Complex> v) : vertices(std::move(v)) {}

    double length() const;
    /// Consecutive vertices distinct, all inside the strip (segments follow
    /// by convexity).
    void validate(const Strip& strip) const;
};

struct IntegrationResult {
    HillState final;
    std::vector<HillState> dense;  // states at accepted steps
    double wronskian_drift = 0.0;  // |Wr(final) - 1|
    std::int64_t steps = 0;
    std::int64_t rejected = 0;
};

/// Adaptive Dormand-Prince 8(5,3) transport of the jet along a polyline.
/// The position is an affine function of arclength per segment, never
/// integrated, so z carries no drift.
IntegrationResult integrate(const PotentialExpr& p, const HillState& start,
                            const PathPolyline& path, const IntegratorConfig& cfg,
                            bool record_dense = true);

/// Free jet psi = e^{-z/2}, psit = e^{z/2}, Wr = 1 exactly, y = z.
HillState free_state(Complex z);

/// Exact jet for constant potential c: psi = e^{-kappa z},
/// psit = e^{kappa z}/(2 kappa), y = 2 kappa z - log(2 kappa),
/// kappa = sqrt(1/4 + c/2). Reduces to free_state when c = 0.
HillState mode_state(Complex z, Complex c);

/// Rows: re z, im z, re psi, im psi, ..., re y, im y.
void write_dense_csv(std::ostream& os, const std::vector<HillState>& dense);

}  // namespace liouville
