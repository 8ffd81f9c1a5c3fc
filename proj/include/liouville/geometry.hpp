#pragma once

#include <complex>
#include <cstdint>
#include <limits>

#include "liouville/expr.hpp"

namespace liouville {

/// Canonical horizontal strip {z : 0 < Im z < height}. height = infinity
/// encodes the edge-free case, where the flat metric branch applies
/// everywhere.
struct Strip {
    double height = 3.14159265358979323846;

    static Strip infinite() { return Strip{std::numeric_limits<double>::infinity()}; }

    bool is_infinite() const { return std::isinf(height); }
    bool contains(Complex z) const { return z.imag() > 0.0 && z.imag() < height; }
    void validate() const;
};

struct GridSpec {
    std::int64_t nx = 0;
    std::int64_t ny = 0;
    double x_min = 0.0;
    double x_max = 0.0;
    double edge_margin = 1e-3;

    void validate(const Strip& strip) const;
    double x_at(const Strip&, std::int64_t i) const;
    double y_at(const Strip&, std::int64_t j) const;
};

struct HypothesisReport {
    double m = 0.0;
    double worst_ratio = 0.0;
    Complex worst_point{};
    bool pass = false;
    std::int64_t samples = 0;
};

/// Distance from z to the edge of the strip: min(Im z, height - Im z),
/// infinity for the infinite strip. Throws DomainError outside the strip.
double edge_distance(const Strip& strip, Complex z);

/// Density w(z) of the piecewise strip metric w^2 |dz|^2:
/// 1/(2 sin l) where the edge distance l <= pi/2, and 1/2 beyond.
double thurston_factor(const Strip& strip, Complex z);

/// Hyperbolic density 1/(2 sin(Im u)) of the height-pi strip 0 < Im u < pi,
/// i.e. the exp-pullback of the half-plane density 1/(2 Im w).
double hyperbolic_factor_bicorn_disk(Complex u);

/// Grid sup of |p(z)/2| / (M w(z)^2). Passes when the worst ratio stays
/// below 1. M = 1 checks the qualitative bound; M in (0, 1/3) is the range
/// needed by the displacement bound. A pole flag at a grid point fails the
/// report with that point and a sentinel ratio.
HypothesisReport check_hypothesis(const Strip& strip, const PotentialExpr& p, double m,
                                  const GridSpec& grid);

}  // namespace liouville
