#include "ibdwaves/asymptotics.hpp"

#include <cmath>

#include "ibdwaves/errors.hpp"
#include "ibdwaves/integrate.hpp"
#include "ibdwaves/scalarwaves.hpp"

namespace ibdwaves {

std::string_view to_string(SpeedMethod m) {
    switch (m) {
        case SpeedMethod::NumericShooting: return "shoot";
        case SpeedMethod::NumericBVP: return "bvp";
        case SpeedMethod::AsymSmallSigma: return "asym-small";
        case SpeedMethod::AsymNearOne: return "asym-near-one";
        case SpeedMethod::ExactFamilyMin: return "exact";
    }
    return "?";
}

double vstar_asym(const ModelParams& p, AsymBranch branch) {
    const double s = p.sigma();
    if (!(s > 0.0 && s <= 1.0)) throw DomainError("v* asymptotics require sigma in (0,1]");
    const double b = p.b();
    if (branch == AsymBranch::SmallSigma) return std::sqrt(b / 3.0) * s * std::sqrt(s);
    return std::sqrt(b) * (1.0 / std::sqrt(2.0) - std::sqrt(2.0) * (1.0 - s));
}

double cubic_fisher_speed(const ModelParams& p) {
    const double b1 = p.beta2() / (p.beta2() + p.alpha2());
    return std::sqrt(0.5 * b1);
}

double mvp4_min_speed(double sigma) {
    if (!(sigma > 1.0)) throw DomainError("V_m requires sigma > 1");
    if (sigma >= 1.5) return 2.0;
    const double r = std::sqrt(2.0 * (sigma - 1.0));
    return r + 1.0 / r;
}

double uptw_min_speed(const ModelParams& p) {
    const double s = p.sigma();
    if (!(s > 1.0)) throw DomainError("UPTW requires sigma > 1");
    const double b = p.b();
    if (s < 1.5) return std::sqrt(2.0 * b) * ((s - 1.0) + 0.5);
    return 2.0 * std::sqrt(b * (s - 1.0));
}

double lptw_min_speed(const ModelParams& p) {
    const double s = p.sigma();
    if (!(s > 1.0)) throw DomainError("LPTW requires sigma > 1");
    return 2.0 * std::sqrt(p.a() * p.b() * (s - 1.0) / p.beta2()) * std::sqrt(p.D() / p.delta());
}

FamilySpeeds family_min_speeds(const ModelParams& p) {
    FamilySpeeds out;
    const double s = p.sigma();
    if (s > 1.0) {
        out.uptw = uptw_min_speed(p);
        out.lptw = lptw_min_speed(p);
    } else if (s == 1.0) {
        out.fptw = cubic_fisher_speed(p);
    } else {
        out.fptw = solve_mvp1_speed(p).speed;
        out.fptw_numeric = true;
    }
    return out;
}

double best_vstar(const ModelParams& p) {
    const double s = p.sigma();
    if (s < 0.3) return vstar_asym(p, AsymBranch::SmallSigma);
    if (s > 0.7) return vstar_asym(p, AsymBranch::NearOne);
    return solve_mvp1_speed(p).speed;
}

double appendix_c_leading(double X) {
    if (!(X >= 0.0 && X <= 1.0)) throw DomainError("X outside [0,1]");
    return -X * std::sqrt(1.0 - 2.0 * X / 3.0);
}

double small_sigma_rescaled_speed(double sigma, double tol) {
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("sigma must lie in (0,1)");
    // Y(X) near X = 0 follows the unstable direction of the saturated state:
    // Y ~ -sigma^{-1/2} lambda X with lambda = (-v + sqrt(v^2 + 4 sigma))/2, v = sigma^{3/2} V.
    constexpr double x0 = 1e-6;
    auto endpoint_gap = [sigma](double V) {
        const double v = sigma * std::sqrt(sigma) * V;
        const double lam = 0.5 * (-v + std::sqrt(v * v + 4.0 * sigma));
        const double y0 = -lam / std::sqrt(sigma) * x0;
        OdeRhs rhs = [sigma, V](double X, std::span<const double> y, std::span<double> dy) {
            dy[0] = sigma * V + (1.0 - sigma * X) * X * (1.0 - X) / y[0];
        };
        OdeOptions o;
        o.rtol = 1e-11;
        o.atol = 1e-14;
        o.events.push_back({[](double, std::span<const double> y) { return y[0]; }, +1, true});
        auto sol = rk_adaptive(rhs, {y0}, x0, 1.0, o);
        if (sol.status == OdeStatus::EventTriggered) return 1.0;  // path reached Y = 0 early
        if (sol.status == OdeStatus::StepFailure) throw ShootingDivergence(sol.message);
        return sol.final_state()[0] + V * (1.0 - sigma);
    };
    double lo = 0.05, hi = 3.0;
    double glo = endpoint_gap(lo), ghi = endpoint_gap(hi);
    if (glo * ghi > 0.0) throw BracketFailure("rescaled small-sigma problem not bracketed");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double g = endpoint_gap(mid);
        if ((g > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = g;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

TailRates tail_rates(TailFamily kind, double v, const ModelParams& p) {
    if (!(v > 0.0)) throw DomainError("speed must be positive");
    const double s = p.sigma();
    TailRates t;
    auto unstable = [v](double slope) { return 0.5 * (-v + std::sqrt(v * v + 4.0 * slope)); };
    switch (kind) {
        case TailFamily::CutoffFPTW:
            if (!(s > 0.0 && s < 1.0)) throw DomainError("cut-off wave requires sigma in (0,1)");
            t.left_growth = unstable(p.b() * s);
            t.right_slow = t.right_fast = v;
            return t;
        case TailFamily::CubicFisher: {
            const double vm = cubic_fisher_speed(p);
            if (v < vm * (1.0 - 1e-12)) throw DomainError("speed below the family minimum");
            t.left_growth = unstable(p.b());
            t.right_fast = v;
            if (v > vm * (1.0 + 1e-12)) {
                t.right_algebraic = true;
                t.right_slow = 0.0;
            } else {
                t.right_slow = v;
            }
            return t;
        }
        case TailFamily::LowerRescaled: {
            if (!(s > 1.0)) throw DomainError("lower family requires sigma > 1");
            if (v < 2.0 * (1.0 - 1e-12)) throw DomainError("speed below the family minimum");
            const double g = p.alpha2() * p.b() * (s - 1.0) / p.beta2();
            t.left_growth = unstable(1.0 / (1.0 + g));
            const double r = std::sqrt(std::max(0.0, v * v - 4.0));
            t.right_slow = 0.5 * (v - r);
            t.right_fast = 0.5 * (v + r);
            t.right_double_root = r == 0.0;
            return t;
        }
        case TailFamily::UpperRescaled: {
            if (!(s > 1.0)) throw DomainError("upper family requires sigma > 1");
            if (v < mvp4_min_speed(s) * (1.0 - 1e-12)) throw DomainError("speed below the family minimum");
            t.left_growth = unstable(s / (s - 1.0));
            const double r = std::sqrt(std::max(0.0, v * v - 4.0));
            t.right_slow = 0.5 * (v - r);
            t.right_fast = 0.5 * (v + r);
            t.right_double_root = r == 0.0;
            return t;
        }
    }
    return t;
}

}  // namespace ibdwaves
