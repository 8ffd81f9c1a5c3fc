#include "liouville/liouville_map.hpp"

#include <algorithm>
#include <cmath>

#include "liouville/detail/fd_weights.hpp"
#include "liouville/detail/rk853.hpp"

namespace liouville {

namespace {

constexpr double kPi = 3.14159265358979323846;

using HalfVec = std::array<Complex, 3>;  // (v, v', log v)

// 5-point finite differences on the actual (rounded) node offsets.
struct Fd5 {
    std::array<std::array<double, 5>, 4> w;

    explicit Fd5(const std::array<double, 5>& nodes)
        : w(detail::fd_weights<5, 3>(nodes)) {}

    Complex deriv(std::size_t m, const std::array<Complex, 5>& v) const {
        Complex acc{};
        for (std::size_t k = 0; k < 5; ++k) acc += w[m][k] * v[k];
        return acc;
    }
};

}  // namespace

LiouvilleMap::LiouvilleMap(const Strip& strip, const PotentialExpr& p, double anchor_l,
                           const IntegratorConfig& ode)
    : LiouvilleMap(strip, p, [&] {
          Config c;
          c.anchor_l = anchor_l;
          c.ode = ode;
          return c;
      }()) {}

LiouvilleMap::Half LiouvilleMap::half_advance(const Half& from, Complex target) const {
    if (target == from.z) return from;
    auto rhs = [this](Complex z, const HalfVec& s) -> HalfVec {
        EvalResult pe = p_.eval(z);
        if (pe.near_pole) {
            throw PoleProximityError(z, "potential pole reached during integration");
        }
        Complex q = 0.25 + 0.5 * pe.value;
        if (std::abs(s[0]) * 1e12 < std::abs(s[1])) {
            throw ZeroCrossingError(z, "transported solution crossed zero");
        }
        return {s[1], q * s[0], s[1] / s[0]};
    };
    auto scales = [this](const HalfVec& s0, const HalfVec& s1) {
        std::array<double, 3> sc;
        double p0 = std::abs(s0[0]) + std::abs(s0[1]);
        double p1 = std::abs(s1[0]) + std::abs(s1[1]);
        sc[0] = sc[1] = cfg_.ode.rtol * std::max(p0, p1) + 1e-280;
        sc[2] = cfg_.ode.atol + cfg_.ode.rtol * std::max(std::abs(s0[2]), std::abs(s1[2]));
        return sc;
    };

    detail::StepLimits lim;
    lim.rtol = cfg_.ode.rtol;
    lim.h_init = cfg_.ode.h_init;
    lim.h_max = cfg_.ode.h_max;
    lim.max_steps = cfg_.ode.max_steps;

    HalfVec s{from.v, from.dv, from.b};
    Complex delta = target - from.z;
    double T = std::abs(delta);
    std::int64_t steps = 0, rejected = 0;
    double errold = 1e-4;
    detail::rk853_segment<3>(from.z, delta / T, T, s, lim, rhs, scales,
                             [](Complex, const HalfVec&) {}, steps, rejected, errold);
    return Half{target, s[0], s[1], s[2]};
}

LiouvilleMap::Half LiouvilleMap::checkpoint(bool left, double x) const {
    const Half& anchor = left ? left_anchor_ : right_anchor_;
    auto& cache = left ? cache_left_ : cache_right_;
    double ax = anchor.z.real();
    double dx = cfg_.checkpoint_dx;
    double offset = x - ax;
    auto k = static_cast<std::int64_t>(std::floor(std::abs(offset) / dx));
    std::int64_t sign = offset >= 0.0 ? 1 : -1;

    std::lock_guard<std::mutex> lock(mu_);
    if (cache.find(0) == cache.end()) cache[0] = anchor;
    std::int64_t have = 0;
    for (std::int64_t j = k; j >= 1; --j) {
        if (cache.count(sign * j)) {
            have = j;
            break;
        }
    }
    for (std::int64_t j = have + 1; j <= k; ++j) {
        Complex target(ax + static_cast<double>(sign * j) * dx, midline_im_);
        cache[sign * j] = half_advance(cache[sign * (j - 1)], target);
    }
    Half at_k = cache[sign * k];
    return half_advance(at_k, Complex(x, midline_im_));
}

LiouvilleMap::Half LiouvilleMap::left_at(Complex z) const {
    Half h = checkpoint(true, z.real());
    if (z != h.z) h = half_advance(h, z);
    return h;
}

LiouvilleMap::Half LiouvilleMap::right_at(Complex z) const {
    Half h = checkpoint(false, z.real());
    if (z != h.z) h = half_advance(h, z);
    return h;
}

MapProbe LiouvilleMap::assemble(const Half& left, const Half& right) const {
    HillState st;
    st.z = left.z;
    st.psit = left.v;
    st.dpsit = left.dv;
    st.psi = right.v * right_scale_;
    st.dpsi = right.dv * right_scale_;
    Complex b_hat = right.b + right_log_shift_;
    st.y = left.b - b_hat;
    MapProbe pr;
    pr.state = st;
    pr.sqrt_dy = std::exp(-0.5 * (left.b + b_hat));
    return pr;
}

LiouvilleMap::LiouvilleMap(const Strip& strip, const PotentialExpr& p, const Config& cfg)
    : strip_(strip), p_(p), cfg_(cfg) {
    strip_.validate();
    cfg_.ode.validate();
    if (!(cfg_.checkpoint_dx > 0.0)) throw DomainError("checkpoint_dx must be positive");
    if (!(cfg_.anchor_l > 0.0)) throw DomainError("anchor_l must be positive");

    midline_im_ = cfg_.midline_im;
    if (std::isnan(midline_im_)) {
        midline_im_ = strip_.is_infinite() ? kPi / 2.0 : strip_.height / 2.0;
    }
    if (!strip_.contains(Complex(0.0, midline_im_))) {
        throw DomainError("midline outside the strip");
    }
    double aux_r = std::isnan(cfg_.aux_anchor_r) ? cfg_.anchor_l : cfg_.aux_anchor_r;
    anchor_z_ = Complex(-cfg_.anchor_l, midline_im_);
    aux_anchor_z_ = Complex(aux_r, midline_im_);

    auto tail_decays = [&](Complex from, double direction) {
        for (int k = 0; k <= 16; ++k) {
            Complex z = from + Complex(direction * 0.5 * k, 0.0);
            EvalResult r = p_.eval(z);
            if (r.near_pole) throw PoleProximityError(z, "potential pole on an anchor tail");
            if (std::abs(r.value) >= cfg_.decay_tau) return false;
        }
        return true;
    };

    // Left tip fixes the gauge: free asymptotics require decay below tau.
    bool left_decays = tail_decays(anchor_z_, -1.0);
    Complex target_log_psi;  // log of the gauge normalization of psi at the anchor
    if (left_decays) {
        left_anchor_ = Half{anchor_z_, std::exp(0.5 * anchor_z_), 0.5 * std::exp(0.5 * anchor_z_),
                            0.5 * anchor_z_};
        target_log_psi = -0.5 * anchor_z_;
        norm_error_estimate_ = cfg_.decay_tau * cfg_.anchor_l;
    } else if (cfg_.acknowledge_no_decay) {
        // No canonical tip gauge; anchor on the solution pair of the local
        // constant potential, which keeps constant p exact.
        Complex kappa = std::sqrt(0.25 + 0.5 * p_.value_at(anchor_z_));
        if (std::abs(kappa) < 1e-6) {
            throw DomainError("potential too close to -1/2 at the anchor");
        }
        Complex v = std::exp(kappa * anchor_z_) / (2.0 * kappa);
        left_anchor_ = Half{anchor_z_, v, kappa * v, kappa * anchor_z_ - std::log(2.0 * kappa)};
        target_log_psi = -kappa * anchor_z_;
        norm_error_estimate_ = std::numeric_limits<double>::infinity();
    } else {
        throw DomainError(
            "potential does not decay below decay_tau left of the anchor; "
            "pass acknowledge_no_decay to anchor on the local mode pair");
    }

    // Auxiliary right anchor seeds the recessive-at-plus-infinity factor.
    if (tail_decays(aux_anchor_z_, 1.0)) {
        right_anchor_ = Half{aux_anchor_z_, std::exp(-0.5 * aux_anchor_z_),
                             -0.5 * std::exp(-0.5 * aux_anchor_z_), -0.5 * aux_anchor_z_};
    } else {
        Complex kappa = std::sqrt(0.25 + 0.5 * p_.value_at(aux_anchor_z_));
        if (std::abs(kappa) < 1e-6) {
            throw DomainError("potential too close to -1/2 at the auxiliary anchor");
        }
        right_anchor_ = Half{aux_anchor_z_, std::exp(-kappa * aux_anchor_z_),
                             -kappa * std::exp(-kappa * aux_anchor_z_), -kappa * aux_anchor_z_};
    }

    // Gauge matching at the left anchor: scale psi so its value there equals
    // the tip normalization, then renormalize the pair to Wronskian 1.
    Half r_at_left = right_at(anchor_z_);
    Complex delta = target_log_psi - r_at_left.b;
    Complex scale_u = std::exp(delta);
    Complex psi_u = r_at_left.v * scale_u;
    Complex dpsi_u = r_at_left.dv * scale_u;
    matching_w_ = psi_u * left_anchor_.dv - dpsi_u * left_anchor_.v;
    if (!(std::abs(matching_w_ - 1.0) < 0.5)) {
        throw DomainError("two-sided matching failed: anchor pair is far from Wronskian 1");
    }
    right_log_shift_ = delta - std::log(matching_w_);
    right_scale_ = std::exp(right_log_shift_);
}

MapProbe LiouvilleMap::probe(Complex z) const {
    if (!strip_.contains(z)) throw DomainError("point outside the strip");
    return assemble(left_at(z), right_at(z));
}

Complex LiouvilleMap::y(Complex z) const { return probe(z).state.y; }

Complex LiouvilleMap::y_prime(Complex z) const { return probe(z).y_prime(); }

Complex LiouvilleMap::y_along(const PathPolyline& path) const {
    path.validate(strip_);
    if (std::abs(path.vertices.front() - anchor_z_) > 1e-12) {
        throw DomainError("explicit path must start at the anchor");
    }
    Half h = left_anchor_;
    for (std::size_t i = 1; i < path.vertices.size(); ++i) {
        h = half_advance(h, path.vertices[i]);
    }
    Half r = right_at(h.z);
    return h.b - (r.b + right_log_shift_);
}

void LiouvilleMap::require_stencil_room(Complex z, double h) const {
    if (!(h > 0.0)) throw DomainError("fd_step must be positive");
    double im = z.imag();
    if (!(im - 4.0 * h > 0.0) ||
        (!strip_.is_infinite() && !(im + 4.0 * h < strip_.height))) {
        throw DomainError("fd_step too large: stencil disk leaves the strip");
    }
}

std::array<LiouvilleMap::StencilPoint, 5> LiouvilleMap::stencil5(Complex z, double h) const {
    // One shared trajectory per transported factor, with each log component
    // rebased to zero at its entry point: the y offsets within the stencil
    // then carry no large-accumulator roundoff, which matters because the
    // third-derivative formula divides by h^3. Rebasing is exact: the rhs
    // never reads the log component.
    Half lw = left_at(z - 2.0 * h);
    Complex b_left_entry = lw.b;
    lw.b = Complex(0.0, 0.0);
    std::array<Half, 5> lefts;
    lefts[0] = lw;
    for (int k = 1; k < 5; ++k) {
        lw = half_advance(lw, z + static_cast<double>(k - 2) * h);
        lefts[k] = lw;
    }

    Half rw = right_at(z + 2.0 * h);
    Complex b_right_entry = rw.b;
    rw.b = Complex(0.0, 0.0);
    std::array<Half, 5> rights;
    rights[4] = rw;
    for (int k = 3; k >= 0; --k) {
        rw = half_advance(rw, z + static_cast<double>(k - 2) * h);
        rights[k] = rw;
    }

    std::array<StencilPoint, 5> out;
    for (int k = 0; k < 5; ++k) {
        Half l = lefts[k];
        Half r = rights[k];
        l.b += b_left_entry;
        r.b += b_right_entry;
        out[k].probe = assemble(l, r);
        out[k].y_rel = lefts[k].b - rights[k].b;
    }
    return out;
}

SchwarzianProbe LiouvilleMap::schwarzian_probe(Complex z, double fd_step) const {
    require_stencil_room(z, fd_step);
    std::array<StencilPoint, 5> pts = stencil5(z, fd_step);
    std::array<Complex, 5> yv;
    std::array<double, 5> nodes;
    for (int k = 0; k < 5; ++k) {
        yv[k] = pts[k].y_rel;
        nodes[k] = (pts[k].probe.state.z - z).real();
    }
    Fd5 fd(nodes);

    Complex y1 = fd.deriv(1, yv);
    if (std::abs(y1) < 1e3 * std::numeric_limits<double>::epsilon() / fd_step) {
        throw DomainError("fd_step too small: y' cancelled to noise");
    }
    Complex y2 = fd.deriv(2, yv);
    Complex y3 = fd.deriv(3, yv);
    Complex sz = y3 / y1 - 1.5 * (y2 / y1) * (y2 / y1);

    Complex yp = pts[2].probe.y_prime();
    Complex rhs = 0.5 * yp * yp - 0.5 - p_.value_at(z);

    SchwarzianProbe out;
    out.residual = std::abs(sz - rhs);
    out.yprime_dev = std::abs(y1 - yp);
    return out;
}

double LiouvilleMap::schwarzian_residual(Complex z, double fd_step) const {
    return schwarzian_probe(z, fd_step).residual;
}

double LiouvilleMap::operator_identity_residual(Complex z, Complex a, double fd_step) const {
    require_stencil_room(z, fd_step);
    std::array<StencilPoint, 5> pts = stencil5(z, fd_step);

    std::array<Complex, 5> g;   // y_z^{1/2} phi with the tracked branch
    std::array<Complex, 5> yp;  // closed-form y'
    std::array<double, 5> nodes;
    for (int k = 0; k < 5; ++k) {
        g[k] = pts[k].probe.sqrt_dy * std::exp(a * pts[k].probe.state.z);
        yp[k] = pts[k].probe.y_prime();
        nodes[k] = (pts[k].probe.state.z - z).real();
    }
    Fd5 fd(nodes);

    Complex g1 = fd.deriv(1, g);
    Complex g2 = fd.deriv(2, g);
    Complex ypc = yp[2];
    Complex y2 = fd.deriv(1, yp);

    // (d/dy)^2 g = g''/(y')^2 - g' y''/(y')^3, with d/dy = (1/y') d/dz.
    Complex ddy2 = g2 / (ypc * ypc) - g1 * y2 / (ypc * ypc * ypc);
    Complex s = pts[2].probe.sqrt_dy;
    Complex rhs = (s * s * s) * (ddy2 - 0.25 * g[2]);

    Complex phi = std::exp(a * z);
    Complex lhs = (a * a - 0.25 - 0.5 * p_.value_at(z)) * phi;
    return std::abs(lhs - rhs);
}

std::int64_t displacement_j(Complex r) {
    double t = std::abs(r.imag()) / kPi;
    auto j = static_cast<std::int64_t>(std::ceil(t - 1e-9));
    return std::max<std::int64_t>(1, j);
}

double displacement_bound(double m, Complex r, std::int64_t j) {
    return (2.0 * m / (1.0 - m)) *
           (std::abs(r.real()) + 1.5 * static_cast<double>(j) * kPi);
}

DisplacementCheck displacement_check(const LiouvilleMap& map, double m, Complex m_start,
                                     Complex m_end) {
    if (!(m > 0.0 && m < 1.0)) throw DomainError("m must lie in (0, 1)");
    DisplacementCheck out;
    out.m_start = m_start;
    out.m_end = m_end;
    out.r = m_end - m_start;
    out.r_prime = map.y(m_end) - map.y(m_start);
    out.j = displacement_j(out.r);
    out.bound = displacement_bound(m, out.r, out.j);
    out.deviation = std::abs(out.r_prime - out.r);
    out.pass = out.deviation <= out.bound;
    return out;
}

GaugeResult translation_gauge(const LiouvilleMap& map_a, const LiouvilleMap& map_b,
                              std::span<const Complex> sample_points) {
    if (sample_points.empty()) throw DomainError("translation_gauge needs sample points");
    std::vector<Complex> diffs;
    diffs.reserve(sample_points.size());
    Complex sum{};
    for (Complex z : sample_points) {
        Complex d = map_a.y(z) - map_b.y(z);
        diffs.push_back(d);
        sum += d;
    }
    GaugeResult out;
    out.c = sum / static_cast<double>(diffs.size());
    for (Complex d : diffs) out.max_dev = std::max(out.max_dev, std::abs(d - out.c));
    return out;
}

InjectivityResult probe_injectivity(std::span<const std::pair<Complex, Complex>> samples,
                                    double sep, double img_tol) {
    InjectivityResult res;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t k = i + 1; k < samples.size(); ++k) {
            if (std::abs(samples[i].first - samples[k].first) < sep) continue;
            ++res.pairs_checked;
            if (std::abs(samples[i].second - samples[k].second) < img_tol) {
                res.pass = false;
                res.witness_a = samples[i].first;
                res.witness_b = samples[k].first;
                return res;
            }
        }
    }
    return res;
}

EmbeddingReport embedding_probe(const LiouvilleMap& map, const GridSpec& grid, double sep,
                                double img_tol) {
    const Strip& strip = map.strip();
    grid.validate(strip);

    EmbeddingReport rep;
    std::vector<std::pair<Complex, Complex>> samples;
    samples.reserve(static_cast<std::size_t>(grid.nx * grid.ny));
    Complex gauge_sum{};
    for (std::int64_t i = 0; i < grid.nx; ++i) {
        for (std::int64_t j = 0; j < grid.ny; ++j) {
            Complex z(grid.x_at(strip, i), grid.y_at(strip, j));
            Complex y = map.y(z);
            samples.emplace_back(z, y);
            gauge_sum += y - z;
        }
    }
    rep.samples = static_cast<std::int64_t>(samples.size());
    rep.gauge = gauge_sum / static_cast<double>(samples.size());
    for (const auto& [z, y] : samples) {
        rep.max_dev = std::max(rep.max_dev, std::abs(y - z - rep.gauge));
    }

    rep.injectivity = probe_injectivity(samples, sep, img_tol);

    // Tip behavior: Re y strictly increasing along the midline, growing by a
    // definite fraction of the horizontal extent.
    rep.midline_monotone = true;
    double prev = 0.0;
    double first = 0.0, last = 0.0;
    for (std::int64_t i = 0; i < grid.nx; ++i) {
        Complex z(grid.x_at(strip, i), map.midline_im());
        double re_y = map.y(z).real();
        if (i == 0) {
            first = re_y;
        } else if (re_y <= prev) {
            rep.midline_monotone = false;
        }
        prev = re_y;
        last = re_y;
    }
    double extent = grid.x_max - grid.x_min;
    rep.midline_span_ratio = extent > 0.0 ? (last - first) / extent : 0.0;
    rep.tips_ok = rep.midline_monotone && rep.midline_span_ratio >= 0.5;

    rep.pass = rep.injectivity.pass && rep.tips_ok;
    return rep;
}

}  // namespace liouville
