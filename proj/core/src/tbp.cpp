#include <algorithm>
#include <cmath>
#include <mutex>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>

#include "ibdwaves/errors.hpp"
#include "ibdwaves/integrate.hpp"
#include "ibdwaves/scalarwaves.hpp"

namespace ibdwaves {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
constexpr double kTransitionSeam = 4.0;  // |m_tilde| beyond which outer forms are used
constexpr double kDecisionEnd = 12.0;    // deviations from the separatrix grow like Bi(m) up to here

double hermite_eval(const std::vector<double>& x, const std::vector<double>& y,
                    const std::vector<double>& dy, double t) {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t j = static_cast<std::size_t>(it - x.begin());
    j = std::clamp<std::size_t>(j, 1, x.size() - 1);
    const double h = x[j] - x[j - 1];
    const double s = (t - x[j - 1]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y[j - 1] + h10 * h * dy[j - 1] + h01 * y[j] + h11 * h * dy[j];
}

struct TbpShot {
    double c_minus;
    OdeSolution sol;
};

// H'' = c H (H - b m), started at m = -m_max / (c b)^{1/3} on the decaying Airy tail.
// Returns +1 when the amplitude is too large, -1 when too small.
int classify_tbp(double c, double b, double amp, double m_max, double m_end, OdeSolution* keep) {
    const double ms = std::cbrt(c * b);
    const double hs = std::cbrt(b * b / c);
    const double m0 = -m_max / ms;
    OdeState y0 = {amp * boost::math::airy_ai(m_max), -amp * ms * boost::math::airy_ai_prime(m_max)};
    OdeRhs rhs = [c, b](double m, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = c * y[0] * (y[0] - b * m);
    };
    OdeOptions o;
    o.rtol = 1e-12;
    o.atol = 1e-300;
    o.h_max = 0.05 / ms;
    if (!keep) {
        // armed only for m > 0, where H = b m is the outer branch
        o.events.push_back({[b, hs](double m, std::span<const double> y) { return m > 0.0 ? y[0] - (b * m + hs) : -hs; },
                            +1, true});
        o.events.push_back({[](double, std::span<const double> y) { return y[1]; }, -1, true});
    }
    auto sol = rk_adaptive(rhs, y0, m0, m_end / ms, o);
    if (sol.status == OdeStatus::StepFailure) throw ShootingDivergence("TBP shot failed: " + sol.message);
    int cls = 0;
    if (sol.status == OdeStatus::EventTriggered) {
        cls = *sol.event_index == 0 ? +1 : -1;
    } else {
        const auto& yf = sol.final_state();
        cls = yf[0] > b * (m_end / ms) ? +1 : -1;
    }
    if (keep) *keep = std::move(sol);
    return cls;
}

double shoot_amplitude(double c, double b, double m_max, double tol) {
    const double hs = std::cbrt(b * b / c);
    double lo = 0.2 * hs, hi = 5.0 * hs;
    if (classify_tbp(c, b, lo, m_max, kDecisionEnd, nullptr) != -1 || classify_tbp(c, b, hi, m_max, kDecisionEnd, nullptr) != +1) {
        throw ShootingDivergence("TBP amplitude bracket does not straddle");
    }
    while (hi - lo > tol * hs) {
        const double mid = 0.5 * (lo + hi);
        (classify_tbp(c, b, mid, m_max, kDecisionEnd, nullptr) > 0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

struct AmplitudeFit {
    double amp;
    double m_max;
    bool warning;
};

AmplitudeFit converged_amplitude(double c, double b, double tol) {
    double m_max = 8.0;
    double prev = shoot_amplitude(c, b, m_max, tol);
    constexpr double kCap = 32.0;
    while (m_max < kCap) {
        m_max *= 2.0;
        const double next = shoot_amplitude(c, b, m_max, tol);
        if (std::abs(next - prev) <= 100.0 * tol * std::abs(next)) return {next, m_max, false};
        prev = next;
    }
    return {prev, m_max, true};
}

}  // namespace

double UniversalTbp::eval(double mt) const {
    if (mt <= m.front()) return c_hat * boost::math::airy_ai(-mt);
    if (mt >= m.back()) return mt + c_plus * boost::math::airy_ai(mt);
    return hermite_eval(m, H, dH, mt);
}

UniversalTbp solve_universal_tbp(double tol) {
    UniversalTbp u;
    const auto fit = converged_amplitude(1.0, 1.0, tol);
    u.c_hat = fit.amp;
    u.c_hat_bessel = fit.amp / kSqrt3;
    u.m_max = fit.m_max;
    u.truncation_warning = fit.warning;

    OdeSolution sol;
    constexpr double kEnd = 4.5;
    classify_tbp(1.0, 1.0, u.c_hat, u.m_max, kEnd, &sol);
    constexpr double step = 0.005;
    for (double mt = -u.m_max; mt <= kEnd + 1e-12; mt += step) {
        const auto y = sol.sample(mt);
        u.m.push_back(mt);
        u.H.push_back(y[0]);
        u.dH.push_back(y[1]);
    }
    // least-squares amplitude of H - m against Ai(m) well inside the right tail
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < u.m.size(); ++j) {
        if (u.m[j] < 3.0 || u.m[j] > 4.0) continue;
        const double ai = boost::math::airy_ai(u.m[j]);
        num += (u.H[j] - u.m[j]) * ai;
        den += ai * ai;
    }
    u.c_plus = num / den;
    // keep the tabulated part where the solution is trustworthy
    while (!u.m.empty() && u.m.back() > kTransitionSeam + 0.25) {
        u.m.pop_back();
        u.H.pop_back();
        u.dH.pop_back();
    }
    return u;
}

const UniversalTbp& universal_tbp() {
    static const UniversalTbp cached = solve_universal_tbp();
    return cached;
}

double TbpResult::eval(double mm) const {
    return H_scale * universal_tbp().eval(m_scale * mm);
}

TbpResult solve_tbp(const ModelParams& p, double vstar, double tol) {
    const double s = p.sigma();
    if (!(s > 0.0 && s < 1.0)) throw DomainError("TBP requires sigma in (0,1)");
    TbpResult r;
    r.sigma = s;
    r.vstar = vstar;
    const double b = p.b();
    r.c_sigma = transition_coefficient(p, vstar);
    r.m_scale = std::cbrt(r.c_sigma * b);
    r.H_scale = std::cbrt(b * b / r.c_sigma);
    const auto fit = converged_amplitude(r.c_sigma, b, tol);
    r.c_minus = fit.amp;
    r.c_hat = r.c_minus / r.H_scale;

    OdeSolution sol;
    classify_tbp(r.c_sigma, b, r.c_minus, fit.m_max, 4.5, &sol);
    double num = 0.0, den = 0.0;
    for (double mt = -fit.m_max; mt <= 4.5; mt += 0.005) {
        const double mm = mt / r.m_scale;
        const auto y = sol.sample(mm);
        if (mt <= kTransitionSeam + 0.25) {
            r.m.push_back(mm);
            r.H.push_back(y[0]);
        }
        if (mt >= 3.0 && mt <= 4.0) {
            const double ai = boost::math::airy_ai(mt);
            num += (y[0] - b * mm) * ai;
            den += ai * ai;
        }
    }
    r.c_plus = num / den;
    return r;
}

double phi0(double M, const ModelParams& p, double vstar) {
    const double s = p.sigma();
    if (!(s > 0.0 && s < 1.0)) throw DomainError("Phi0 requires sigma in (0,1)");
    if (!(M >= 0.0 && M <= 1.0)) throw DomainError("M outside [0,1]");
    const double cut = 1.0 - s;
    if (M >= cut) return 0.0;
    const double c = transition_coefficient(p, vstar);
    const double K = cut * std::sqrt(s * p.b() * c);
    constexpr double kLogSwitch = 1e-12;
    if (M < kLogSwitch) {
        if (M <= 0.0) return std::numeric_limits<double>::infinity();
        return phi0(kLogSwitch, p, vstar) + phi0_log_rate(p, vstar) * std::log(kLogSwitch / M);
    }
    const double rc = std::sqrt(cut);
    // x = cut - u^2 removes the square-root endpoint behaviour at the cut-off
    auto remainder = [cut, rc](double u) {
        const double x = cut - u * u;
        return 2.0 * u * (u / std::sqrt(1.0 - x) - rc) / x;
    };
    double err = 0.0;
    const double part = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        remainder, 0.0, std::sqrt(cut - M), 15, 1e-12, &err);
    if (!std::isfinite(part)) throw QuadratureFailure("Phi0 quadrature failed");
    return K * (rc * std::log(cut / M) + part);
}

double phi0_near_cutoff(double M, const ModelParams& p, double vstar) {
    const double cut = 1.0 - p.sigma();
    const double c = transition_coefficient(p, vstar);
    const double d = std::max(0.0, cut - M);
    return (2.0 / 3.0) * std::sqrt(p.b() * c) * d * std::sqrt(d);
}

double phi0_log_rate(const ModelParams& p, double vstar) {
    const double s = p.sigma();
    const double c = transition_coefficient(p, vstar);
    return std::sqrt(s * std::pow(1.0 - s, 3) * p.b() * c);
}

double composite_H(double M_T, const ModelParams& p, double vstar) {
    const double s = p.sigma();
    if (!(s > 0.0 && s < 1.0)) throw DomainError("composite_H requires sigma in (0,1)");
    if (!(M_T >= 0.0 && M_T <= 1.0)) throw DomainError("M_T outside [0,1]");
    const double cut = 1.0 - s;
    const double b = p.b();
    const double db = p.delta_bar();
    const double c = transition_coefficient(p, vstar);
    const double ms = std::cbrt(c * b);
    const double hs = std::cbrt(b * b / c);
    const double d3 = std::cbrt(db);
    const double mt = ms * (M_T - cut) / d3;
    if (mt >= kTransitionSeam) return b * (M_T - cut);
    if (mt <= -kTransitionSeam) {
        if (M_T <= 0.0) return 0.0;
        return std::exp(-phi0(M_T, p, vstar) / std::sqrt(db));
    }
    return d3 * hs * universal_tbp().eval(mt);
}

}  // namespace ibdwaves
