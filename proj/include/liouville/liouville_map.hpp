#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "liouville/expr.hpp"
#include "liouville/geometry.hpp"
#include "liouville/ode.hpp"

namespace liouville {

/// Assembled jet at a point plus the continuous square root of
/// y' = 1/(psi psit), principal at the anchor.
struct MapProbe {
    HillState state;
    Complex sqrt_dy{1.0, 0.0};

    Complex y_prime() const { return 1.0 / (state.psi * state.psit); }
};

struct SchwarzianProbe {
    double residual = 0.0;    // |{y,z}_FD - (1/2 (y')^2 - 1/2 - p)|
    double yprime_dev = 0.0;  // |y'_FD - 1/(psi psit)|
};

struct DisplacementCheck {
    Complex m_start{}, m_end{};
    Complex r{}, r_prime{};
    std::int64_t j = 1;
    double bound = 0.0;
    double deviation = 0.0;
    bool pass = false;
};

struct GaugeResult {
    Complex c{};           // mean of y_A - y_B over the samples
    double max_dev = 0.0;  // max |y_A - y_B - c|
};

struct InjectivityResult {
    bool pass = true;
    Complex witness_a{}, witness_b{};
    std::int64_t pairs_checked = 0;
};

struct EmbeddingReport {
    InjectivityResult injectivity;
    bool midline_monotone = false;
    double midline_span_ratio = 0.0;  // Re y growth across the grid / x extent
    bool tips_ok = false;
    Complex gauge{};       // mean of y - z over the grid
    double max_dev = 0.0;  // max |y - z - gauge|, informational
    std::int64_t samples = 0;
    bool pass = false;
};

/// Normalized numerical coordinate y conjugating (d/dz)^2 - (1/4 + p/2) to
/// the free operator.
///
/// The growing-direction solution is transported from each side: psit
/// rightward from the left anchor, psi leftward from an auxiliary right
/// anchor (forward transport of a recessive solution amplifies roundoff by
/// exp(2 kappa span), hopeless over the spans of interest). The logarithm
/// of each factor rides along as a state component, so y = log psit - log
/// psi needs no principal-branch choice anywhere. The left-tip gauge is
/// fixed by value-matching psi at the left anchor, where the stored state
/// is the exact free pair whenever the potential decays below decay_tau.
///
/// Midline transports snap to a fixed checkpoint lattice, so results are
/// independent of query order; concurrent evaluation is serialized on an
/// internal mutex.
class LiouvilleMap {
public:
    struct Config {
        double anchor_l = 15.0;
        // NaN = anchor_l: horizontal position +R of the auxiliary anchor
        double aux_anchor_r = std::numeric_limits<double>::quiet_NaN();
        // NaN = height/2 for finite strips, pi/2 for the infinite one
        double midline_im = std::numeric_limits<double>::quiet_NaN();
        double decay_tau = 1e-8;
        bool acknowledge_no_decay = false;
        IntegratorConfig ode{};
        double checkpoint_dx = 0.5;
    };

    LiouvilleMap(const Strip& strip, const PotentialExpr& p, const Config& cfg);
    LiouvilleMap(const Strip& strip, const PotentialExpr& p, double anchor_l,
                 const IntegratorConfig& ode = {});

    LiouvilleMap(const LiouvilleMap&) = delete;
    LiouvilleMap& operator=(const LiouvilleMap&) = delete;

    Complex y(Complex z) const;
    Complex y_prime(Complex z) const;
    MapProbe probe(Complex z) const;

    /// y with the left-anchor transport routed along an explicit polyline
    /// from the anchor (monodromy checks).
    Complex y_along(const PathPolyline& path) const;

    SchwarzianProbe schwarzian_probe(Complex z, double fd_step) const;
    double schwarzian_residual(Complex z, double fd_step) const;
    double operator_identity_residual(Complex z, Complex a, double fd_step) const;

    const Strip& strip() const { return strip_; }
    const PotentialExpr& potential() const { return p_; }
    Complex anchor() const { return anchor_z_; }
    Complex aux_anchor() const { return aux_anchor_z_; }
    double midline_im() const { return midline_im_; }
    double normalization_error_estimate() const { return norm_error_estimate_; }
    const IntegratorConfig& ode_config() const { return cfg_.ode; }
    /// Wronskian of the matched pair at the anchor before renormalization;
    /// 1 + O(decay_tau) for decaying potentials.
    Complex matching_wronskian() const { return matching_w_; }

private:
    struct Half {
        Complex z{}, v{}, dv{}, b{};  // value, derivative, integrated log
    };

    struct StencilPoint {
        MapProbe probe;
        Complex y_rel{};  // y offset within the stencil, roundoff-clean
    };

    Half half_advance(const Half& from, Complex target) const;
    Half checkpoint(bool left, double x) const;
    Half left_at(Complex z) const;
    Half right_at(Complex z) const;
    MapProbe assemble(const Half& left, const Half& right) const;
    std::array<StencilPoint, 5> stencil5(Complex z, double h) const;
    void require_stencil_room(Complex z, double h) const;

    Strip strip_;
    PotentialExpr p_;
    Config cfg_;
    Complex anchor_z_{};
    Complex aux_anchor_z_{};
    double midline_im_ = 0.0;
    double norm_error_estimate_ = 0.0;
    Half left_anchor_{};
    Half right_anchor_{};
    Complex right_log_shift_{};  // b_hat = b_right + shift; fixes gauge and Wr
    Complex right_scale_{1.0, 0.0};
    Complex matching_w_{1.0, 0.0};

    mutable std::mutex mu_;
    mutable std::map<std::int64_t, Half> cache_left_;
    mutable std::map<std::int64_t, Half> cache_right_;
};

DisplacementCheck displacement_check(const LiouvilleMap& map, double m, Complex m_start,
                                     Complex m_end);

/// Least j >= 1 with |Im r| <= j pi; exact multiples resolve downward.
std::int64_t displacement_j(Complex r);
double displacement_bound(double m, Complex r, std::int64_t j);

GaugeResult translation_gauge(const LiouvilleMap& map_a, const LiouvilleMap& map_b,
                              std::span<const Complex> sample_points);

/// Injectivity scan over precomputed (z, y) samples: fails when some pair
/// with |z1 - z2| >= sep lands within img_tol in the image.
InjectivityResult probe_injectivity(std::span<const std::pair<Complex, Complex>> samples,
                                    double sep, double img_tol);

EmbeddingReport embedding_probe(const LiouvilleMap& map, const GridSpec& grid, double sep,
                                double img_tol);

}  // namespace liouville
