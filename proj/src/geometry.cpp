#include "liouville/geometry.hpp"

#include <cmath>

namespace liouville {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleRatioSentinel = 1e100;
}  // namespace

void Strip::validate() const {
    if (std::isinf(height)) return;
    if (!(height >= kPi)) {
        throw DomainError("strip height must be at least pi (or infinite)");
    }
}

void GridSpec::validate(const Strip& strip) const {
    if (nx < 1 || ny < 1) throw DomainError("grid counts must be positive");
    if (nx * ny > 100000000LL) throw DomainError("grid larger than 1e8 points");
    if (!(x_min < x_max) && nx > 1) throw DomainError("grid needs x_min < x_max");
    if (!(edge_margin > 0.0)) throw DomainError("edge_margin must be positive");
    if (!strip.is_infinite() && !(edge_margin < strip.height / 2.0)) {
        throw DomainError("edge_margin must be below half the strip height");
    }
}

double GridSpec::x_at(const Strip&, std::int64_t i) const {
    if (nx == 1) return 0.5 * (x_min + x_max);
    return x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double GridSpec::y_at(const Strip& strip, std::int64_t j) const {
    // Infinite strips have no upper edge; span a vertical window matching
    // the horizontal extent so the sample region stays finite.
    double lo = edge_margin;
    double hi = strip.is_infinite() ? edge_margin + (x_max - x_min) : strip.height - edge_margin;
    if (ny == 1) return strip.is_infinite() ? lo : strip.height / 2.0;
    return lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(ny - 1);
}

double edge_distance(const Strip& strip, Complex z) {
    if (!strip.contains(z)) throw DomainError("point outside the strip");
    if (strip.is_infinite()) return std::numeric_limits<double>::infinity();
    return std::min(z.imag(), strip.height - z.imag());
}

double thurston_factor(const Strip& strip, Complex z) {
    double ell = edge_distance(strip, z);
    if (ell <= kPi / 2.0) return 1.0 / (2.0 * std::sin(ell));
    return 0.5;
}

double hyperbolic_factor_bicorn_disk(Complex u) {
    if (!(u.imag() > 0.0 && u.imag() < kPi)) {
        throw DomainError("point outside the height-pi strip");
    }
    return 1.0 / (2.0 * std::sin(u.imag()));
}

HypothesisReport check_hypothesis(const Strip& strip, const PotentialExpr& p, double m,
                                  const GridSpec& grid) {
    strip.validate();
    grid.validate(strip);
    if (!(m > 0.0 && m <= 1.0)) throw DomainError("m must lie in (0, 1]");

    HypothesisReport report;
    report.m = m;
    report.samples = grid.nx * grid.ny;

    bool have_worst = false;
    // Row-major in (x, y) ascending with a strictly-greater update keeps the
    // arg-max at the smallest lexicographic (Re z, Im z).
    for (std::int64_t i = 0; i < grid.nx; ++i) {
        double x = grid.x_at(strip, i);
        for (std::int64_t j = 0; j < grid.ny; ++j) {
            Complex z(x, grid.y_at(strip, j));
            EvalResult r = p.eval(z);
            double ratio;
            if (r.near_pole) {
                ratio = kPoleRatioSentinel;
            } else {
                double w = thurston_factor(strip, z);
                ratio = 0.5 * std::abs(r.value) / (m * w * w);
            }
            if (!have_worst || ratio > report.worst_ratio) {
                have_worst = true;
                report.worst_ratio = ratio;
                report.worst_point = z;
            }
        }
    }
    report.pass = report.worst_ratio < 1.0;
    return report;
}

}  // namespace liouville
