#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "liouville/errors.hpp"
#include "liouville/expr.hpp"

namespace liouville {

/// exp(r). Paired with cross_ratio in the harness: for a constructed map,
/// cross_ratio(0, exp y(m), exp y(n), inf) = exp(y(n) - y(m)).
Complex exp_displacement(Complex r);

/// (mu/|mu|) tanh(a arctanh |mu|); zero stays zero. Runs from 0 at a = 0 to
/// mu at a = 1 with |mu_a| <= |mu| throughout.
Complex beltrami_path(Complex mu, double a);

struct QcConstants {
    double m = 0.0;
    double k = 1.0;              // (1+M)/(1-M)
    double cr_distortion = 0.0;  // (1/2) log((1+M)/(1-M)) = arctanh M

    double step_dilatation(double a, double b) const;    // K^{|b-a|}
    double step_beltrami_bound(double a, double b) const;  // tanh((b-a) arctanh M)
};

QcConstants qc_constants(double m);

/// Density of the tract metric, 1/(2(|Re z| + 3 pi/2)): an explicit lower
/// bound for the exp-pullback of the hyperbolic density of the
/// thrice-punctured sphere.
double tract_factor(Complex z);

/// (K - 1)(|Re r| + 3 pi/2): Euclidean radius containing the tract-metric
/// ball of radius (1/2) log K around r.
double euclid_ball_bound(double k, Complex r);

/// Adaptive quadrature of density * |dz| along a polyline, relative error
/// target rel_tol. Splits each segment where |Re z| has its kink.
double polyline_length(const std::function<double(Complex)>& density,
                       const std::vector<Complex>& path, double rel_tol = 1e-8);

struct TractSearchConfig {
    int max_iter = 600;       // Nelder-Mead iterations per refinement stage
    double xtol = 1e-6;       // simplex collapse threshold (control-point units)
    double quad_tol = 1e-8;
};

struct TractDistanceResult {
    double distance = 0.0;  // best polyline length found (upper bound estimate)
    bool converged = true;
    std::vector<double> stage_lengths;  // per refinement n = 1, 3, 7
};

/// Approximate geodesic distance in the tract metric: polyline search with
/// n = 1, 3, 7 control points, each stage seeded by subdividing the last,
/// so the estimate is monotone non-increasing across stages.
TractDistanceResult tract_distance(Complex a, Complex b, const TractSearchConfig& cfg = {});

/// 5-point finite-difference Schwarzian f'''/f' - (3/2)(f''/f')^2.
Complex schwarzian_fd(const std::function<Complex(Complex)>& f, Complex z, double h);

}  // namespace liouville
