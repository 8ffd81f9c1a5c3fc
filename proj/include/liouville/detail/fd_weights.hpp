#pragma once

// Finite-difference weights on arbitrary nodes (Fornberg's recursion). The
// stencil abscissas z +- k h round to ulp(|z|), which classical equal-spacing
// formulas turn into an O(ulp/h^3) error in the third derivative; weights on
// the actual node offsets remove that entirely.

#include <array>
#include <cstddef>

namespace liouville::detail {

// weights[m][k] multiplies the sample at node[k] in the m-th derivative,
// m = 0..M, expansion point 0.
template <std::size_t Nn, std::size_t M>
std::array<std::array<double, Nn>, M + 1> fd_weights(const std::array<double, Nn>& x) {
    std::array<std::array<double, Nn>, M + 1> w{};
    double c1 = 1.0;
    double c4 = x[0];
    w[0][0] = 1.0;
    for (std::size_t i = 1; i < Nn; ++i) {
        std::size_t mn = i < M ? i : M;
        double c2 = 1.0;
        double c5 = c4;
        c4 = x[i];
        for (std::size_t j = 0; j < i; ++j) {
            double c3 = x[i] - x[j];
            c2 *= c3;
            if (j == i - 1) {
                for (std::size_t k = mn; k >= 1; --k) {
                    w[k][i] = c1 * (static_cast<double>(k) * w[k - 1][i - 1] - c5 * w[k][i - 1]) / c2;
                }
                w[0][i] = -c1 * c5 * w[0][i - 1] / c2;
            }
            for (std::size_t k = mn; k >= 1; --k) {
                w[k][j] = (c4 * w[k][j] - static_cast<double>(k) * w[k - 1][j]) / c3;
            }
            w[0][j] = c4 * w[0][j] / c3;
        }
        c1 = c2;
    }
    return w;
}

}  // namespace liouville::detail
