#pragma once

#include <complex>

#include "liouville/errors.hpp"
#include "liouville/expr.hpp"

namespace liouville {

/// Point of the Riemann sphere: a finite complex value or infinity.
struct ExtComplex {
    Complex v{};
    bool inf = false;

    ExtComplex() = default;
    ExtComplex(Complex value) : v(value) {}
    ExtComplex(double re) : v(re, 0.0) {}

    static ExtComplex infinity() {
        ExtComplex e;
        e.inf = true;
        return e;
    }

    bool is_inf() const { return inf; }
    bool same_point(const ExtComplex& o) const {
        if (inf || o.inf) return inf && o.inf;
        return v == o.v;
    }
};

/// Normalized fractional-linear transformation, ad - bc = 1.
struct Mobius {
    Complex a{1.0, 0.0}, b{}, c{}, d{1.0, 0.0};

    static Mobius identity() { return {}; }
    static Mobius normalized(Complex a, Complex b, Complex c, Complex d);

    Complex det() const { return a * d - b * c; }
    Mobius inverse() const { return Mobius{d, -b, -c, a}; }

    ExtComplex apply(const ExtComplex& z) const;
};

/// f after g.
Mobius compose(const Mobius& f, const Mobius& g);

/// ((z2 - z0)/(z1 - z0)) * ((z1 - z3)/(z2 - z3)) with symbolic infinity
/// limits; cross_ratio(0, w1, w2, inf) = w2/w1 exactly. The four points
/// must be distinct.
ExtComplex cross_ratio(const ExtComplex& z0, const ExtComplex& z1, const ExtComplex& z2,
                       const ExtComplex& z3);

}  // namespace liouville
