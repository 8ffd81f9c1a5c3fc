#pragma once

// Dormand-Prince 8(5,3) core over complex state vectors, shared by the
// 5-component Hill jet and the map's internal half-jet transports. The
// position is affine in arclength and never integrated.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

#include "liouville/errors.hpp"

namespace liouville::detail {

using Cx = std::complex<double>;

inline constexpr double rk_c2 = 0.526001519587677318785587544488e-01;
inline constexpr double rk_c3 = 0.789002279381515978178381316732e-01;
inline constexpr double rk_c4 = 0.118350341907227396726757197510e+00;
inline constexpr double rk_c5 = 0.281649658092772603273242802490e+00;
inline constexpr double rk_c6 = 0.333333333333333333333333333333e+00;
inline constexpr double rk_c7 = 0.25e+00;
inline constexpr double rk_c8 = 0.307692307692307692307692307692e+00;
inline constexpr double rk_c9 = 0.651282051282051282051282051282e+00;
inline constexpr double rk_c10 = 0.6e+00;
inline constexpr double rk_c11 = 0.857142857142857142857142857142e+00;

inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

struct StepLimits {
    double rtol = 1e-10;
    double h_init = 0.0;
    double h_max = 0.0;
    std::int64_t max_steps = 1000000;
};

// RhsFn:   (Cx z, const State&) -> State, the z-derivative.
// ScaleFn: (const State& s0, const State& s1) -> std::array<double, N>.
// Accept:  (Cx z, const State&) -> void, called after accepted steps.
template <std::size_t N, typename RhsFn, typename ScaleFn, typename Accept>
void rk853_segment(Cx z0, Cx dir, double T, std::array<Cx, N>& s, const StepLimits& lim,
                   RhsFn&& rhs, ScaleFn&& scales, Accept&& accept, std::int64_t& steps,
                   std::int64_t& rejected, double& errold) {
    using State = std::array<Cx, N>;
    auto f = [&](double t, const State& st) {
        State d = rhs(z0 + t * dir, st);
        for (auto& c : d) c *= dir;
        return d;
    };

    double t = 0.0;
    State k1 = f(0.0, s);

    double h;
    if (lim.h_init > 0.0) {
        h = std::min(lim.h_init, T);
    } else {
        // First-guess step from the solution-pair components only; the
        // logarithmic components may sit at zero and carry no scale.
        std::array<double, N> sc = scales(s, s);
        double dny = 0.0, dnf = 0.0;
        constexpr std::size_t pair_n = N >= 4 ? 4 : 2;
        for (std::size_t i = 0; i < pair_n; ++i) {
            double a = std::abs(s[i]) / sc[i];
            double b = std::abs(k1[i]) / sc[i];
            dny += a * a;
            dnf += b * b;
        }
        h = (dnf > 0.0 && dny > 0.0) ? 0.01 * std::sqrt(dny / dnf) : 1e-6;
        h = std::min(h, T);
        h = std::max(h, 1e-12);
    }
    if (lim.h_max > 0.0) h = std::min(h, lim.h_max);

    bool last = (t + h >= T);
    if (last) h = T - t;

    while (true) {
        if (steps + rejected >= lim.max_steps) {
            throw MaxStepsError("max_steps exceeded during integration");
        }
        double hmin = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, t);
        if (h < hmin) {
            throw StepUnderflowError(z0 + t * dir, "step size underflow");
        }

        State w, k2, k3, k4, k5, k6, k7, k8, k9, k10, k11, k12, s1, bsum;
        double err;
        try {
            for (std::size_t i = 0; i < N; ++i) w[i] = s[i] + h * (a21 * k1[i]);
            k2 = f(t + rk_c2 * h, w);
            for (std::size_t i = 0; i < N; ++i) w[i] = s[i] + h * (a31 * k1[i] + a32 * k2[i]);
            k3 = f(t + rk_c3 * h, w);
            for (std::size_t i = 0; i < N; ++i) w[i] = s[i] + h * (a41 * k1[i] + a43 * k3[i]);
            k4 = f(t + rk_c4 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a51 * k1[i] + a53 * k3[i] + a54 * k4[i]);
            k5 = f(t + rk_c5 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a61 * k1[i] + a64 * k4[i] + a65 * k5[i]);
            k6 = f(t + rk_c6 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
            k7 = f(t + rk_c7 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] +
                                   a87 * k7[i]);
            k8 = f(t + rk_c8 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] +
                                   a97 * k7[i] + a98 * k8[i]);
            k9 = f(t + rk_c9 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
                                   a107 * k7[i] + a108 * k8[i] + a109 * k9[i]);
            k10 = f(t + rk_c10 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
                                   a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i]);
            k11 = f(t + rk_c11 * h, w);
            for (std::size_t i = 0; i < N; ++i)
                w[i] = s[i] + h * (a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
                                   a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
                                   a1211 * k11[i]);
            k12 = f(t + h, w);

            for (std::size_t i = 0; i < N; ++i) {
                bsum[i] = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] + b9 * k9[i] +
                          b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
                s1[i] = s[i] + h * bsum[i];
            }

            std::array<double, N> sc = scales(s, s1);
            double err5 = 0.0, err3 = 0.0;
            for (std::size_t i = 0; i < N; ++i) {
                Cx e3 = bsum[i] - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
                Cx e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] + er9 * k9[i] +
                        er10 * k10[i] + er11 * k11[i] + er12 * k12[i];
                double q3 = std::abs(e3) / sc[i];
                double q5 = std::abs(e5) / sc[i];
                err3 += q3 * q3;
                err5 += q5 * q5;
            }
            double deno = err5 + 0.01 * err3;
            if (deno <= 0.0) deno = 1.0;
            err = h * err5 * std::sqrt(1.0 / (static_cast<double>(N) * deno));
        } catch (const PointedError&) {
            // a trial stage hit a pole or a zero crossing; shrink unless the
            // trajectory is genuinely stuck there
            if (h < 64.0 * hmin) throw;
            h *= 0.25;
            ++rejected;
            last = false;
            continue;
        }

        constexpr double beta = 0.04;
        constexpr double expo = 1.0 / 8.0 - beta * 0.75;
        constexpr double safe = 0.9;
        constexpr double facmin = 1.0 / 3.0;
        constexpr double facmax = 6.0;

        if (!std::isfinite(err)) {
            if (h < 64.0 * hmin) {
                throw StepUnderflowError(z0 + t * dir, "error estimate diverged");
            }
            h *= 0.25;
            ++rejected;
            last = false;
            continue;
        }

        if (err <= 1.0) {
            t += h;
            s = s1;
            ++steps;
            accept(z0 + t * dir, s);
            if (last || t >= T) break;
            k1 = f(t, s);

            double fac = err == 0.0 ? facmax
                                    : safe * std::pow(err, -expo) * std::pow(errold, beta);
            fac = std::clamp(fac, facmin, facmax);
            errold = std::max(err, 1e-4);
            h *= fac;
            if (lim.h_max > 0.0) h = std::min(h, lim.h_max);
            if (t + h >= T) {
                h = T - t;
                last = true;
            }
        } else {
            double fac = std::max(safe * std::pow(err, -expo), facmin);
            h *= fac;
            ++rejected;
            last = false;
        }
    }
}

}  // namespace liouville::detail
