#include "ibdwaves/integrate.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ibdwaves/errors.hpp"

namespace ibdwaves {

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

OdeState hermite(double t0, const OdeState& y0, const OdeState& f0, double t1, const OdeState& y1,
                 const OdeState& f1, double t) {
    const double h = t1 - t0;
    const double s = (t - t0) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
    const double h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s);
    const double h11 = s * s * (s - 1);
    OdeState y(y0.size());
    for (std::size_t k = 0; k < y.size(); ++k) {
        y[k] = h00 * y0[k] + h10 * h * f0[k] + h01 * y1[k] + h11 * h * f1[k];
    }
    return y;
}

bool all_finite(const OdeState& y) {
    return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

bool crosses(double g0, double g1, int direction) {
    if (direction >= 0 && g0 < 0.0 && g1 >= 0.0) return true;
    if (direction <= 0 && g0 > 0.0 && g1 <= 0.0) return true;
    return false;
}

}  // namespace

OdeState OdeSolution::sample(double t) const {
    if (times.empty()) throw DomainError("empty solution");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - times.begin());
    return hermite(times[j - 1], states[j - 1], derivatives[j - 1], times[j], states[j],
                   derivatives[j], t);
}

OdeSolution rk_adaptive(const OdeRhs& rhs, OdeState y0, double t0, double t1,
                        const OdeOptions& opts) {
    if (!(opts.rtol > 0.0 && opts.atol > 0.0)) throw ParameterError("tolerances must be positive");
    if (!(t1 > t0)) throw ParameterError("rk_adaptive integrates forward only");
    const std::size_t n = y0.size();

    OdeSolution sol;
    OdeState f0(n);
    rhs(t0, y0, f0);
    if (!all_finite(y0) || !all_finite(f0)) throw IntegrationError("rhs not finite at initial state");

    std::array<OdeState, 7> k;
    for (auto& v : k) v.assign(n, 0.0);
    OdeState ytmp(n), ynew(n), err(n);

    auto weighted_norm = [&](const OdeState& e, const OdeState& ya, const OdeState& yb) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opts.atol + opts.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            s += (e[i] / sc) * (e[i] / sc);
        }
        return std::sqrt(s / static_cast<double>(n));
    };

    double h = opts.h_initial;
    if (h <= 0.0) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opts.atol + opts.rtol * std::abs(y0[i]);
            d0 += (y0[i] / sc) * (y0[i] / sc);
            d1 += (f0[i] / sc) * (f0[i] / sc);
        }
        d0 = std::sqrt(d0 / n);
        d1 = std::sqrt(d1 / n);
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }
    h = std::min({h, opts.h_max, t1 - t0});

    std::vector<double> g_prev(opts.events.size());
    for (std::size_t e = 0; e < opts.events.size(); ++e) g_prev[e] = opts.events[e].fn(t0, y0);

    sol.times.push_back(t0);
    sol.states.push_back(y0);
    sol.derivatives.push_back(f0);

    double t = t0;
    OdeState y = std::move(y0);
    OdeState f = f0;
    double err_prev = 1e-4;
    const double safety = 0.9, alpha = 0.7 / 5.0, beta = 0.4 / 5.0;

    for (std::size_t step = 0; step < opts.max_steps; ++step) {
        const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
        if (h < h_min) {
            sol.status = OdeStatus::StepFailure;
            sol.message = "step size underflow at t = " + std::to_string(t);
            return sol;
        }
        const bool last = t + h >= t1;
        if (last) h = t1 - t;

        k[0] = f;
        auto stage = [&](std::initializer_list<double> coef, double c, OdeState& out) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                std::size_t j = 0;
                for (double a : coef) acc += a * k[j++][i];
                ytmp[i] = y[i] + h * acc;
            }
            rhs(t + c * h, ytmp, out);
        };
        stage({a21}, c2, k[1]);
        stage({a31, a32}, c3, k[2]);
        stage({a41, a42, a43}, c4, k[3]);
        stage({a51, a52, a53, a54}, c5, k[4]);
        stage({a61, a62, a63, a64, a65}, 1.0, k[5]);
        for (std::size_t i = 0; i < n; ++i) {
            ynew[i] = y[i] + h * (b1 * k[0][i] + b3 * k[2][i] + b4 * k[3][i] + b5 * k[4][i] +
                                  b6 * k[5][i]);
        }
        rhs(t + h, ynew, k[6]);
        for (std::size_t i = 0; i < n; ++i) {
            err[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] +
                          e6 * k[5][i] + e7 * k[6][i]);
        }
        double en = (all_finite(ynew) && all_finite(k[6])) ? weighted_norm(err, y, ynew)
                                                           : std::numeric_limits<double>::infinity();
        if (!(en <= 1.0)) {
            const double fac = std::isfinite(en) ? std::max(0.2, safety * std::pow(en, -alpha)) : 0.2;
            h *= fac;
            continue;
        }

        const double t_new = last ? t1 : t + h;
        // event scan on the accepted step
        std::optional<std::size_t> hit;
        double t_hit = t_new;
        for (std::size_t e = 0; e < opts.events.size(); ++e) {
            const auto& ev = opts.events[e];
            const double g1 = ev.fn(t_new, ynew);
            if (crosses(g_prev[e], g1, ev.direction) && ev.terminal) {
                double lo = t, hi = t_new, glo = g_prev[e];
                while (hi - lo > opts.atol && hi - lo > 4 * std::numeric_limits<double>::epsilon() * std::abs(hi)) {
                    const double mid = 0.5 * (lo + hi);
                    const double gm = ev.fn(mid, hermite(t, y, f, t_new, ynew, k[6], mid));
                    if (crosses(glo, gm, ev.direction)) {
                        hi = mid;
                    } else {
                        lo = mid;
                        glo = gm;
                    }
                }
                if (!hit || hi < t_hit) {
                    hit = e;
                    t_hit = hi;
                }
            }
            g_prev[e] = g1;
        }
        if (hit) {
            OdeState ye = hermite(t, y, f, t_new, ynew, k[6], t_hit);
            OdeState fe(n);
            rhs(t_hit, ye, fe);
            if (t_hit > t) {
                sol.times.push_back(t_hit);
                sol.states.push_back(std::move(ye));
                sol.derivatives.push_back(std::move(fe));
            }
            sol.status = OdeStatus::EventTriggered;
            sol.event_index = hit;
            return sol;
        }

        t = t_new;
        y = ynew;
        f = k[6];
        sol.times.push_back(t);
        sol.states.push_back(y);
        sol.derivatives.push_back(f);
        if (last) {
            sol.status = OdeStatus::ReachedEnd;
            return sol;
        }
        en = std::max(en, 1e-10);
        double fac = safety * std::pow(en, -alpha) * std::pow(err_prev, beta);
        fac = std::clamp(fac, 0.2, 5.0);
        err_prev = en;
        h = std::min(h * fac, opts.h_max);
    }
    sol.status = OdeStatus::StepFailure;
    sol.message = "maximum number of steps exceeded";
    return sol;
}

OdeSolution solve_temporal_ds(double m0, double i0, const ModelParams& p, double t_end,
                              const OdeOptions& opts) {
    if (!in_clipped_rectangle(m0, i0, p.delta())) {
        throw DomainError("initial state outside R(delta)");
    }
    const double a = p.a(), b = p.b(), s = p.sigma(), al = p.alpha2(), be = p.beta2();
    const double inv_delta = 1.0 / p.delta();
    OdeRhs rhs = [=](double, std::span<const double> y, std::span<double> dy) {
        const double m = y[0], i = y[1];
        dy[0] = i * m * (1.0 - m);
        dy[1] = inv_delta * a * i * (b * (s - 1.0) + b * m - i) / (al * i + be * (1.0 - m));
    };
    return rk_adaptive(rhs, {m0, i0}, 0.0, t_end, opts);
}

}  // namespace ibdwaves
