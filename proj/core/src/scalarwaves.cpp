#include "ibdwaves/scalarwaves.hpp"

#include <algorithm>
#include <cmath>

#include "ibdwaves/asymptotics.hpp"
#include "ibdwaves/errors.hpp"
#include "ibdwaves/integrate.hpp"

namespace ibdwaves {

namespace {

constexpr double kSigmaOneTol = 1e-12;

struct ProblemData {
    double slope_at_one;   // F'(1) < 0
    double slope_at_zero;  // F'(0)
    double curv_at_zero;   // F''(0)
    double anchor;         // level fixed at x = 0
    double chi_lin;        // switch to the linear decision near the origin
};

void check_kind(ScalarProblem k, const ModelParams& p) {
    const double s = p.sigma();
    switch (k) {
        case ScalarProblem::MVP1:
            if (!(s > 0.0 && s < 1.0)) throw DomainError("MVP1 requires sigma in (0,1)");
            break;
        case ScalarProblem::MVP2:
            if (std::abs(s - 1.0) > kSigmaOneTol) throw DomainError("MVP2 requires sigma = 1");
            break;
        case ScalarProblem::MVP3:
        case ScalarProblem::MVP4:
            if (!(s > 1.0)) throw DomainError("MVP3/MVP4 require sigma > 1");
            break;
    }
}

double gamma_of(const ModelParams& p) {
    return p.alpha2() * p.b() * (p.sigma() - 1.0) / p.beta2();
}

// Reaction without range checks; the phase plane is followed slightly past [0,1].
double reaction_raw(ScalarProblem k, double X, const ModelParams& p) {
    const double s = p.sigma();
    switch (k) {
        case ScalarProblem::MVP1: {
            const double cut = 1.0 - s;
            return X > cut ? p.b() * (X - cut) * X * (1.0 - X) : 0.0;
        }
        case ScalarProblem::MVP2:
            return p.b() * X * X * (1.0 - X);
        case ScalarProblem::MVP3:
            return X * (1.0 - X) / (1.0 + gamma_of(p) * X);
        case ScalarProblem::MVP4:
            return X * (1.0 + X / (s - 1.0)) * (1.0 - X);
    }
    return 0.0;
}

ProblemData problem_data(ScalarProblem k, const ModelParams& p) {
    const double s = p.sigma();
    switch (k) {
        case ScalarProblem::MVP1:
            return {-p.b() * s, 0.0, 0.0, 1.0 - s, 0.0};
        case ScalarProblem::MVP2:
            return {-p.b(), 0.0, 2.0 * p.b(), 0.5, 1e-4};
        case ScalarProblem::MVP3: {
            const double g = gamma_of(p);
            return {-1.0 / (1.0 + g), 1.0, -2.0 * (1.0 + g), 0.5, 1e-6};
        }
        case ScalarProblem::MVP4:
            return {-s / (s - 1.0), 1.0, 2.0 * (1.0 / (s - 1.0) - 1.0), 0.5, 1e-6};
    }
    return {};
}

struct Path {
    ShootOutcome outcome;
    std::vector<OdeSolution> pieces;
};

OdeState start_point(double v, const ProblemData& d, double displacement) {
    const double mu = 0.5 * (-v + std::sqrt(v * v + 4.0 * std::abs(d.slope_at_one)));
    const double n = std::hypot(1.0, mu);
    return {1.0 - displacement / n, -displacement * mu / n};
}

Path integrate_path(ScalarProblem k, double v, const ModelParams& p, const ShootOptions& opts,
                    bool mvp1_tail) {
    check_kind(k, p);
    if (!(v > 0.0)) throw ParameterError("speed must be positive");
    const ProblemData d = problem_data(k, p);
    OdeRhs rhs = [k, v, &p](double, std::span<const double> y, std::span<double> dy) {
        dy[0] = y[1];
        dy[1] = -v * y[1] - reaction_raw(k, y[0], p);
    };
    OdeOptions o;
    o.rtol = opts.rtol;
    o.atol = opts.atol;

    Path path;
    auto g_of = [v](std::span<const double> y) { return y[1] + v * y[0]; };

    if (k == ScalarProblem::MVP1) {
        const double cut = d.anchor;
        o.events.push_back({[cut](double, std::span<const double> y) { return y[0] - cut; }, -1, true});
        o.events.push_back({[g_of](double, std::span<const double> y) { return g_of(y); }, -1, true});
        auto sol = rk_adaptive(rhs, start_point(v, d, opts.displacement), 0.0, opts.x_cap, o);
        if (sol.status == OdeStatus::StepFailure) throw ShootingDivergence(sol.message);
        const double g = g_of(sol.final_state());
        auto& out = path.outcome;
        out.miss = g;
        if (sol.status == OdeStatus::EventTriggered && *sol.event_index == 1) {
            out.kind = ShootClass::Overshoot;
        } else {
            out.at_cap = sol.status == OdeStatus::ReachedEnd;
            out.kind = g < 0.0 ? ShootClass::Overshoot
                               : (g > 0.0 ? ShootClass::Undershoot : ShootClass::Connection);
        }
        const bool reached_cut = sol.status == OdeStatus::EventTriggered && *sol.event_index == 0;
        path.pieces.push_back(std::move(sol));
        if (mvp1_tail && reached_cut) {
            const double t0 = path.pieces.back().times.back();
            const double len = opts.tail_decades * std::log(10.0) / v;
            OdeOptions ot;
            ot.rtol = opts.rtol;
            ot.atol = opts.atol * cut;
            auto tail = rk_adaptive(rhs, path.pieces.back().final_state(), t0, t0 + len, ot);
            if (tail.status == OdeStatus::StepFailure) throw ShootingDivergence(tail.message);
            path.pieces.push_back(std::move(tail));
        }
        return path;
    }

    const double chi_lin = d.chi_lin;
    o.events.push_back({[g_of](double, std::span<const double> y) { return g_of(y); }, -1, true});
    o.events.push_back({[chi_lin](double, std::span<const double> y) { return y[0] - chi_lin; }, -1, true});
    o.events.push_back({[](double, std::span<const double> y) { return y[1]; }, +1, true});
    auto sol = rk_adaptive(rhs, start_point(v, d, opts.displacement), 0.0, opts.x_cap, o);
    if (sol.status == OdeStatus::StepFailure) throw ShootingDivergence(sol.message);
    auto& out = path.outcome;
    const auto& y = sol.final_state();
    out.miss = g_of(y);
    if (sol.status == OdeStatus::ReachedEnd) {
        out.at_cap = true;
        out.kind = out.miss > 0.0 ? ShootClass::Connection : ShootClass::Overshoot;
    } else if (*sol.event_index == 1) {
        const double disc = v * v - 4.0 * d.slope_at_zero;
        if (disc < 0.0) {
            out.kind = ShootClass::Overshoot;
        } else {
            const double lf = 0.5 * (-v - std::sqrt(disc));
            const double s2 = -d.curv_at_zero / (2.0 * (3.0 * lf + v));
            const double psi_strong = lf * y[0] + s2 * y[0] * y[0];
            out.kind = y[1] > psi_strong ? ShootClass::Connection : ShootClass::Overshoot;
        }
    } else {
        out.kind = ShootClass::Overshoot;
    }
    path.pieces.push_back(std::move(sol));
    return path;
}

ScalarProfile sample_path(const Path& path, ScalarProblem k, double v, double anchor) {
    ScalarProfile s;
    s.problem = k;
    s.speed = v;
    constexpr int kSub = 4;
    for (const auto& piece : path.pieces) {
        for (std::size_t j = 0; j < piece.times.size(); ++j) {
            if (j > 0) {
                const double t0 = piece.times[j - 1], t1 = piece.times[j];
                for (int q = 1; q < kSub; ++q) {
                    const double t = t0 + (t1 - t0) * q / kSub;
                    const auto y = piece.sample(t);
                    s.x.push_back(t);
                    s.u.push_back(y[0]);
                    s.du.push_back(y[1]);
                }
            }
            if (!s.x.empty() && piece.times[j] <= s.x.back()) continue;
            s.x.push_back(piece.times[j]);
            s.u.push_back(piece.states[j][0]);
            s.du.push_back(piece.states[j][1]);
        }
    }
    align_profile(s, anchor);
    return s;
}

}  // namespace

std::string_view to_string(WaveKind k) {
    switch (k) {
        case WaveKind::FPTW: return "FPTW";
        case WaveKind::UPTW: return "UPTW";
        case WaveKind::LPTW: return "LPTW";
    }
    return "?";
}

std::string_view to_string(ScalarProblem k) {
    switch (k) {
        case ScalarProblem::MVP1: return "MVP1";
        case ScalarProblem::MVP2: return "MVP2";
        case ScalarProblem::MVP3: return "MVP3";
        case ScalarProblem::MVP4: return "MVP4";
    }
    return "?";
}

double scalar_reaction(ScalarProblem k, double X, const ModelParams& p) {
    check_kind(k, p);
    if (!(X >= 0.0 && X <= 1.0)) throw DomainError("X outside [0,1]");
    return reaction_raw(k, X, p);
}

double crossing_position(const std::vector<double>& x, const std::vector<double>& u, double level) {
    for (std::size_t j = 0; j + 1 < u.size(); ++j) {
        const double a = u[j] - level, b = u[j + 1] - level;
        if (a == 0.0) return x[j];
        if ((a > 0.0) != (b > 0.0)) return x[j] + (x[j + 1] - x[j]) * a / (a - b);
    }
    throw DomainError("profile never crosses the requested level");
}

void align_profile(ScalarProfile& s, double level) {
    const double shift = crossing_position(s.x, s.u, level);
    for (double& x : s.x) x -= shift;
}

ShootOutcome shoot_phase_path(ScalarProblem k, double v, const ModelParams& p,
                              const ShootOptions& opts) {
    Path path = integrate_path(k, v, p, opts, opts.want_profile);
    if (opts.want_profile && path.outcome.kind == ShootClass::Connection) {
        path.outcome.profile = sample_path(path, k, v, problem_data(k, p).anchor);
    }
    return std::move(path.outcome);
}

ShootingResult solve_mvp1_speed(const ModelParams& p, double tol, const ShootOptions& opts) {
    check_kind(ScalarProblem::MVP1, p);
    if (!(tol > 0.0)) throw ParameterError("tol must be positive");
    ShootOptions quiet = opts;
    quiet.want_profile = false;
    double lo = tol, hi = 10.0;
    auto cls = [&](double v) { return shoot_phase_path(ScalarProblem::MVP1, v, p, quiet).kind; };
    if (cls(lo) != ShootClass::Overshoot || cls(hi) != ShootClass::Undershoot) {
        throw BracketFailure("MVP1 bracket [tol, 10] does not straddle the connection");
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const auto c = cls(mid);
        if (c == ShootClass::Connection) {
            lo = hi = mid;
            break;
        }
        (c == ShootClass::Overshoot ? lo : hi) = mid;
    }
    ShootingResult r;
    r.speed = 0.5 * (lo + hi);
    r.bracket = {lo, hi};
    r.classification = SpeedClassification::Unique;
    // the undershooting end of the bracket is guaranteed to reach the cut-off
    Path path = integrate_path(ScalarProblem::MVP1, hi, p, opts, true);
    r.scalar = sample_path(path, ScalarProblem::MVP1, r.speed, 1.0 - p.sigma());
    r.profile = lift_profile(r.scalar, p);
    return r;
}

ScalarProfile family_profile(ScalarProblem k, double v, const ModelParams& p,
                             const ShootOptions& opts) {
    if (k == ScalarProblem::MVP1) throw DomainError("MVP1 has a unique speed");
    Path path = integrate_path(k, v, p, opts, false);
    if (path.outcome.kind != ShootClass::Connection) {
        throw ShootingDivergence("no monotone connection at the requested speed");
    }
    return sample_path(path, k, v, problem_data(k, p).anchor);
}

ShootingResult min_speed_family(ScalarProblem k, const ModelParams& p, double tol,
                                const ShootOptions& opts) {
    if (k == ScalarProblem::MVP1) throw DomainError("MVP1 has a unique speed");
    check_kind(k, p);
    ShootOptions quiet = opts;
    quiet.want_profile = false;
    auto ok = [&](double v) {
        return shoot_phase_path(k, v, p, quiet).kind == ShootClass::Connection;
    };
    double lo = std::max(tol, 1e-6), hi = 10.0;
    if (!ok(hi) || ok(lo)) throw BracketFailure("family bracket does not straddle the minimum");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? hi : lo) = mid;
    }
    ShootingResult r;
    r.speed = hi;
    r.bracket = {lo, hi};
    r.classification = SpeedClassification::MinimumOfFamily;
    r.scalar = family_profile(k, hi, p, opts);
    r.profile = lift_profile(r.scalar, p);
    switch (k) {
        case ScalarProblem::MVP2: r.analytic = cubic_fisher_speed(p); break;
        case ScalarProblem::MVP3: r.analytic = 2.0; break;
        case ScalarProblem::MVP4: r.analytic = mvp4_min_speed(p.sigma()); break;
        default: break;
    }
    return r;
}

WaveProfile lift_profile(const ScalarProfile& s, const ModelParams& p) {
    WaveProfile w;
    w.sigma = p.sigma();
    w.delta = p.delta();
    const double b = p.b(), sg = p.sigma();
    const std::size_t n = s.x.size();
    w.z.resize(n);
    w.M.resize(n);
    w.I.resize(n);
    double zscale = 1.0;
    switch (s.problem) {
        case ScalarProblem::MVP1:
        case ScalarProblem::MVP2:
            w.kind = WaveKind::FPTW;
            w.speed = s.speed;
            break;
        case ScalarProblem::MVP3: {
            w.kind = WaveKind::LPTW;
            const double C = *derived_coeffs(p).C_sigma_delta;
            zscale = 1.0 / C;
            w.speed = s.speed * p.D() * C;
            break;
        }
        case ScalarProblem::MVP4: {
            w.kind = WaveKind::UPTW;
            const double r = std::sqrt(b * (sg - 1.0));
            zscale = 1.0 / r;
            w.speed = s.speed * r;
            break;
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        const double u = std::clamp(s.u[j], 0.0, 1.0);
        w.z[j] = s.x[j] * zscale;
        switch (s.problem) {
            case ScalarProblem::MVP1:
                w.M[j] = u;
                w.I[j] = b * std::max(0.0, u - (1.0 - sg));
                break;
            case ScalarProblem::MVP2:
                w.M[j] = u;
                w.I[j] = b * u;
                break;
            case ScalarProblem::MVP3:
                w.M[j] = 0.0;
                w.I[j] = b * (sg - 1.0) * u;
                break;
            case ScalarProblem::MVP4:
                w.M[j] = u;
                w.I[j] = b * (u + sg - 1.0);
                break;
        }
    }
    return w;
}

double exact_waveform(ExactWaveform k, const ModelParams& p, double z) {
    const double s = p.sigma();
    if (k == ExactWaveform::CubicFisherMin) {
        if (std::abs(s - 1.0) > kSigmaOneTol) throw DomainError("CubicFisherMin requires sigma = 1");
        const double v = cubic_fisher_speed(p);
        // logistic form written to avoid overflow for large |z|
        return 0.5 * (1.0 - std::tanh(0.5 * v * z));
    }
    if (!(s > 1.0 && s <= 1.5)) throw DomainError("UptwMin requires sigma in (1, 3/2]");
    const double k2 = 1.0 / std::sqrt(2.0 * (s - 1.0));
    return 0.5 * (1.0 - std::tanh(0.5 * k2 * z));
}

}  // namespace ibdwaves
