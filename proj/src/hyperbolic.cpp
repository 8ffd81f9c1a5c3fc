#include "liouville/hyperbolic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "liouville/detail/fd_weights.hpp"

namespace liouville {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Complex exp_displacement(Complex r) { return std::exp(r); }

Complex beltrami_path(Complex mu, double a) {
    double mag = std::abs(mu);
    if (!(mag < 1.0)) throw DomainError("|mu| must be below 1");
    if (mag == 0.0) return Complex(0.0, 0.0);
    double scaled = std::tanh(a * std::atanh(mag));
    return (mu / mag) * scaled;
}

double QcConstants::step_dilatation(double a, double b) const {
    return std::pow(k, std::abs(b - a));
}

double QcConstants::step_beltrami_bound(double a, double b) const {
    return std::tanh((b - a) * std::atanh(m));
}

QcConstants qc_constants(double m) {
    if (!(m > 0.0 && m < 1.0)) throw DomainError("M must lie in (0, 1)");
    QcConstants q;
    q.m = m;
    q.k = (1.0 + m) / (1.0 - m);
    q.cr_distortion = 0.5 * std::log((1.0 + m) / (1.0 - m));
    return q;
}

double tract_factor(Complex z) {
    return 1.0 / (2.0 * (std::abs(z.real()) + 1.5 * kPi));
}

double euclid_ball_bound(double k, Complex r) {
    if (!(k > 1.0)) throw DomainError("K must exceed 1");
    return (k - 1.0) * (std::abs(r.real()) + 1.5 * kPi);
}

namespace {

struct Quad {
    const std::function<double(Complex)>& density;
    Complex z0, dz;
    double speed;

    double g(double t) const { return density(z0 + t * dz) * speed; }

    double simpson(double a, double fa, double fm, double fb, double b) const {
        return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    }

    double adapt(double a, double b, double fa, double fm, double fb, double whole,
                 double tol, int depth) const {
        if (depth > 28) throw SearchError("quadrature failed to converge");
        double m = 0.5 * (a + b);
        double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
        double flm = g(lm), frm = g(rm);
        double left = simpson(a, fa, flm, fm, m);
        double right = simpson(m, fm, frm, fb, b);
        if (std::abs(left + right - whole) <= 15.0 * tol) {
            return left + right + (left + right - whole) / 15.0;
        }
        return adapt(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
               adapt(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
    }

    double run(double a, double b, double tol) const {
        double fa = g(a), fb = g(b), fm = g(0.5 * (a + b));
        double whole = simpson(a, fa, fm, fb, b);
        double scale = std::max(std::abs(whole), 1e-300);
        return adapt(a, b, fa, fm, fb, whole, tol * scale, 0);
    }
};

double segment_length(const std::function<double(Complex)>& density, Complex z0, Complex z1,
                      double rel_tol) {
    Complex dz = z1 - z0;
    double speed = std::abs(dz);
    if (speed == 0.0) return 0.0;
    Quad q{density, z0, dz, speed};
    // |Re z| is not smooth where the segment crosses the imaginary axis.
    double r0 = z0.real(), r1 = z1.real();
    if ((r0 < 0.0 && r1 > 0.0) || (r0 > 0.0 && r1 < 0.0)) {
        double ts = r0 / (r0 - r1);
        return q.run(0.0, ts, rel_tol) + q.run(ts, 1.0, rel_tol);
    }
    return q.run(0.0, 1.0, rel_tol);
}

}  // namespace

double polyline_length(const std::function<double(Complex)>& density,
                       const std::vector<Complex>& path, double rel_tol) {
    if (path.size() < 2) return 0.0;
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        total += segment_length(density, path[i - 1], path[i], rel_tol);
    }
    return total;
}

namespace {

// Deterministic Nelder-Mead over the flattened control points.
struct NelderMead {
    std::function<double(const std::vector<double>&)> f;
    int max_iter;
    double xtol;

    double best_value = 0.0;
    std::vector<double> best_point;
    bool converged = false;

    void run(std::vector<double> x0, double step) {
        std::size_t n = x0.size();
        std::vector<std::vector<double>> simplex(n + 1, x0);
        std::vector<double> fv(n + 1);
        for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step;
        for (std::size_t i = 0; i <= n; ++i) fv[i] = f(simplex[i]);

        auto order = [&] {
            for (std::size_t i = 1; i <= n; ++i) {
                for (std::size_t k = i; k > 0 && fv[k] < fv[k - 1]; --k) {
                    std::swap(fv[k], fv[k - 1]);
                    std::swap(simplex[k], simplex[k - 1]);
                }
            }
        };
        order();

        for (int it = 0; it < max_iter; ++it) {
            double spread = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                spread = std::max(spread, std::abs(simplex[n][i] - simplex[0][i]));
            }
            if (spread < xtol) {
                converged = true;
                break;
            }

            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k];
            }
            for (double& c : centroid) c /= static_cast<double>(n);

            auto blend = [&](double coef) {
                std::vector<double> p(n);
                for (std::size_t k = 0; k < n; ++k) {
                    p[k] = centroid[k] + coef * (centroid[k] - simplex[n][k]);
                }
                return p;
            };

            std::vector<double> xr = blend(1.0);
            double fr = f(xr);
            if (fr < fv[0]) {
                std::vector<double> xe = blend(2.0);
                double fe = f(xe);
                if (fe < fr) {
                    simplex[n] = std::move(xe);
                    fv[n] = fe;
                } else {
                    simplex[n] = std::move(xr);
                    fv[n] = fr;
                }
            } else if (fr < fv[n - 1]) {
                simplex[n] = std::move(xr);
                fv[n] = fr;
            } else {
                std::vector<double> xc = blend(fr < fv[n] ? 0.5 : -0.5);
                double fc = f(xc);
                if (fc < std::min(fr, fv[n])) {
                    simplex[n] = std::move(xc);
                    fv[n] = fc;
                } else {
                    for (std::size_t i = 1; i <= n; ++i) {
                        for (std::size_t k = 0; k < n; ++k) {
                            simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                        }
                        fv[i] = f(simplex[i]);
                    }
                }
            }
            order();
        }
        best_value = fv[0];
        best_point = simplex[0];
    }
};

}  // namespace

TractDistanceResult tract_distance(Complex a, Complex b, const TractSearchConfig& cfg) {
    TractDistanceResult out;
    if (a == b) {
        out.distance = 0.0;
        return out;
    }
    std::function<double(Complex)> density = [](Complex z) { return tract_factor(z); };

    auto objective = [&](const std::vector<double>& vars) {
        std::vector<Complex> path;
        path.reserve(vars.size() / 2 + 2);
        path.push_back(a);
        for (std::size_t i = 0; i + 1 < vars.size(); i += 2) {
            path.emplace_back(vars[i], vars[i + 1]);
        }
        path.push_back(b);
        return polyline_length(density, path, cfg.quad_tol);
    };

    // Stage n = 1 starts from the straight midpoint; each later stage is
    // seeded by inserting segment midpoints, which leaves the polyline (and
    // its length) unchanged, so the stage bests cannot increase.
    std::vector<Complex> controls{0.5 * (a + b)};
    bool all_converged = true;
    for (int stage = 0; stage < 3; ++stage) {
        std::vector<double> x0;
        x0.reserve(controls.size() * 2);
        for (Complex c : controls) {
            x0.push_back(c.real());
            x0.push_back(c.imag());
        }
        NelderMead nm;
        nm.f = objective;
        nm.max_iter = cfg.max_iter * static_cast<int>(controls.size());
        nm.xtol = cfg.xtol * (1.0 + std::abs(b - a));
        nm.run(std::move(x0), std::max(0.05 * std::abs(b - a), 1e-3));
        all_converged = all_converged && nm.converged;
        out.stage_lengths.push_back(nm.best_value);

        controls.clear();
        for (std::size_t i = 0; i + 1 < nm.best_point.size(); i += 2) {
            controls.emplace_back(nm.best_point[i], nm.best_point[i + 1]);
        }
        if (stage < 2) {
            // subdivide: midpoints of the current polyline segments
            std::vector<Complex> refined;
            Complex prev = a;
            for (Complex c : controls) {
                refined.push_back(0.5 * (prev + c));
                refined.push_back(c);
                prev = c;
            }
            refined.push_back(0.5 * (prev + b));
            controls = std::move(refined);
        }
    }
    out.distance = out.stage_lengths.back();
    out.converged = all_converged;
    return out;
}

Complex schwarzian_fd(const std::function<Complex(Complex)>& f, Complex z, double h) {
    if (!(h > 0.0)) throw DomainError("fd step must be positive");
    Complex f0 = f(z);
    std::array<Complex, 5> v;
    std::array<double, 5> nodes;  // actual rounded offsets, not k h
    for (int k = 0; k < 5; ++k) {
        Complex zk = z + static_cast<double>(k - 2) * h;
        v[k] = f(zk) - f0;
        nodes[k] = (zk - z).real();
    }
    auto w = detail::fd_weights<5, 3>(nodes);
    auto deriv = [&](std::size_t m) {
        Complex acc{};
        for (std::size_t k = 0; k < 5; ++k) acc += w[m][k] * v[k];
        return acc;
    };
    Complex f1 = deriv(1);
    if (std::abs(f1) < 1e3 * std::numeric_limits<double>::epsilon() / h) {
        throw DomainError("fd step too small: f' cancelled to noise");
    }
    Complex f2 = deriv(2);
    Complex f3 = deriv(3);
    return f3 / f1 - 1.5 * (f2 / f1) * (f2 / f1);
}

}  // namespace liouville
