#pragma once

#include <complex>
#include <random>
#include <vector>

namespace testsupport {

using Complex = std::complex<double>;

// All test randomness flows through one seeded engine per test case so
// reruns are reproducible.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) {
        // 53-bit mantissa straight from the engine; distribution-free so the
        // stream is pinned across standard libraries.
        double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    Complex box(double re_lo, double re_hi, double im_lo, double im_hi) {
        double re = uniform(re_lo, re_hi);
        double im = uniform(im_lo, im_hi);
        return {re, im};
    }

private:
    std::mt19937_64 eng_;
};

inline std::vector<Complex> sample_box(Rng& rng, int n, double re_lo, double re_hi,
                                       double im_lo, double im_hi) {
    std::vector<Complex> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.push_back(rng.box(re_lo, re_hi, im_lo, im_hi));
    return out;
}

}  // namespace testsupport
