#include "liouville/mobius.hpp"

#include <cmath>

namespace liouville {

Mobius Mobius::normalized(Complex a, Complex b, Complex c, Complex d) {
    Complex det = a * d - b * c;
    if (std::abs(det) < 1e-200) throw DomainError("degenerate Mobius coefficients");
    Complex s = std::sqrt(det);
    return Mobius{a / s, b / s, c / s, d / s};
}

ExtComplex Mobius::apply(const ExtComplex& z) const {
    if (z.is_inf()) {
        if (c == Complex(0.0, 0.0)) return ExtComplex::infinity();
        return ExtComplex(a / c);
    }
    Complex den = c * z.v + d;
    if (den == Complex(0.0, 0.0)) return ExtComplex::infinity();
    Complex w = (a * z.v + b) / den;
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) return ExtComplex::infinity();
    return ExtComplex(w);
}

Mobius compose(const Mobius& f, const Mobius& g) {
    return Mobius{f.a * g.a + f.b * g.c, f.a * g.b + f.b * g.d,
                  f.c * g.a + f.d * g.c, f.c * g.b + f.d * g.d};
}

ExtComplex cross_ratio(const ExtComplex& z0, const ExtComplex& z1, const ExtComplex& z2,
                       const ExtComplex& z3) {
    const ExtComplex* pts[4] = {&z0, &z1, &z2, &z3};
    for (int i = 0; i < 4; ++i) {
        for (int k = i + 1; k < 4; ++k) {
            if (pts[i]->same_point(*pts[k])) throw DomainError("cross ratio needs distinct points");
        }
    }
    auto finite_ratio = [](Complex num, Complex den) -> ExtComplex {
        if (den == Complex(0.0, 0.0)) return ExtComplex::infinity();
        return ExtComplex(num / den);
    };
    if (z0.is_inf()) return finite_ratio(z1.v - z3.v, z2.v - z3.v);
    if (z1.is_inf()) return finite_ratio(z2.v - z0.v, z2.v - z3.v);
    if (z2.is_inf()) return finite_ratio(z1.v - z3.v, z1.v - z0.v);
    if (z3.is_inf()) return finite_ratio(z2.v - z0.v, z1.v - z0.v);
    Complex num = (z2.v - z0.v) * (z1.v - z3.v);
    Complex den = (z1.v - z0.v) * (z2.v - z3.v);
    return finite_ratio(num, den);
}

}  // namespace liouville
