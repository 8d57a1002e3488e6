#pragma once

// Dormand-Prince 5(4) integrator with the standard 4th-order continuous
// extension (Hairer, Norsett & Wanner, "Solving ODEs I", routine DOPRI5).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

#include "dirac/errors.hpp"

namespace dirac::ode {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Tolerances {
    double rel = 1e-10;
    double abs = 1e-12;
};

struct Stats {
    int accepted = 0;
    int rejected = 0;
};

namespace detail {

// clang-format off
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
// clang-format on

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [c, k] : terms)
        for (std::size_t i = 0; i < N; ++i) out[i] += h * c * (*k)[i];
    return out;
}

} // namespace detail

/// Integrate y' = f(t, y) from t0 to t1 (either direction).
///
/// `t_out` must be sorted in the direction of integration; for each entry
/// `sink(index, y(t_out[index]))` is called with the dense-output value.
/// Returns y(t1). Step-size underflow raises NumericalError carrying
/// `to_radius(t)` so callers can report physical positions.
template <std::size_t N, class Rhs, class Sink, class ToRadius>
Vec<N> integrate(Rhs&& f, double t0, Vec<N> y, double t1, Tolerances tol, std::span<const double> t_out,
                 Sink&& sink, ToRadius&& to_radius, Stats* stats = nullptr) {
    using namespace detail;
    const double span = t1 - t0;
    if (span == 0.0) {
        for (std::size_t i = 0; i < t_out.size(); ++i) sink(i, y);
        return y;
    }
    const double dir = span > 0 ? 1.0 : -1.0;
    const double eps = std::numeric_limits<double>::epsilon();

    auto scale = [&](const Vec<N>& u, const Vec<N>& v, std::size_t i) {
        return tol.abs + tol.rel * std::max(std::abs(u[i]), std::abs(v[i]));
    };

    Vec<N> k1 = f(t0, y);

    // initial step (Hairer's hinit)
    double h;
    {
        double dnf = 0.0, dny = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol.abs + tol.rel * std::abs(y[i]);
            dnf += (k1[i] / sk) * (k1[i] / sk);
            dny += (y[i] / sk) * (y[i] / sk);
        }
        h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(dny / dnf);
        h = std::min(h, std::abs(span));
        Vec<N> y1 = axpy<N>(y, dir * h, {{1.0, &k1}});
        Vec<N> k2 = f(t0 + dir * h, y1);
        double der2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sk = tol.abs + tol.rel * std::abs(y[i]);
            der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
        }
        der2 = std::sqrt(der2) / h;
        const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
        const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
        h = std::min({100 * h, h1, std::abs(span)});
    }

    double t = t0;
    std::size_t next_out = 0;
    double fac_old = 1e-4;

    while (dir * (t1 - t) > 0) {
        if (h < 10 * eps * std::max(1.0, std::abs(t)))
            throw NumericalError("step size underflow", to_radius(t));
        bool last = false;
        if (dir * (t + dir * h - t1) >= 0) {
            h = dir * (t1 - t);
            last = true;
        }
        const double hs = dir * h;

        const Vec<N> k2 = f(t + c2 * hs, axpy<N>(y, hs, {{a21, &k1}}));
        const Vec<N> k3 = f(t + c3 * hs, axpy<N>(y, hs, {{a31, &k1}, {a32, &k2}}));
        const Vec<N> k4 = f(t + c4 * hs, axpy<N>(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const Vec<N> k5 = f(t + c5 * hs, axpy<N>(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const Vec<N> k6 =
            f(t + hs, axpy<N>(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const Vec<N> y_new = axpy<N>(y, hs, {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const Vec<N> k7 = f(t + hs, y_new);

        double err = 0.0;
        bool finite = true;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
            const double q = ei / scale(y, y_new, i);
            err += q * q;
            finite &= std::isfinite(y_new[i]);
        }
        err = std::sqrt(err / N);
        if (!finite || !std::isfinite(err)) {
            if (stats) ++stats->rejected;
            h *= 0.1;
            continue;
        }

        // Lund-stabilised PI controller as in DOPRI5
        const double fac11 = std::pow(err, 0.2 - 0.04 * 0.75);
        double fac = fac11 / std::pow(fac_old, 0.04);
        fac = std::clamp(fac / 0.9, 0.1, 5.0);
        if (err <= 1.0) {
            fac_old = std::max(err, 1e-4);
            if (stats) ++stats->accepted;
            const double t_new = last ? t1 : t + hs;
            // dense output for every requested point in (t, t_new]
            while (next_out < t_out.size() && dir * (t_out[next_out] - t_new) <= 0) {
                const double theta = (t_out[next_out] - t) / hs;
                const double theta1 = 1.0 - theta;
                Vec<N> yo;
                for (std::size_t i = 0; i < N; ++i) {
                    const double r1 = y[i];
                    const double r2 = y_new[i] - y[i];
                    const double r3 = hs * k1[i] - r2;
                    const double r4 = r2 - hs * k7[i] - r3;
                    const double r5 = hs * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                            d7 * k7[i]);
                    yo[i] = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
                }
                sink(next_out, yo);
                ++next_out;
            }
            y = y_new;
            k1 = k7;
            t = t_new;
            h = h / fac;
        } else {
            if (stats) ++stats->rejected;
            h = h / std::min(1.0 / 0.2, fac11 / 0.9);
        }
    }
    for (; next_out < t_out.size(); ++next_out) sink(next_out, y);
    return y;
}

} // namespace dirac::ode
