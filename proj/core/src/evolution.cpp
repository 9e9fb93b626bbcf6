#include "ibdwaves/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ibdwaves/errors.hpp"

namespace ibdwaves {

namespace {

// Solves (diag_j) u_j - r u_{j-1} - r u_{j+1} = rhs_j with mirrored (Neumann) ends,
// diag_j = 1 + 2r + extra_j. rhs is overwritten by the solution.
void implicit_diffusion(std::vector<double>& rhs, double r, const std::vector<double>* extra,
                        std::vector<double>& c_work) {
    const std::size_t n = rhs.size();
    c_work.resize(n);
    auto diag = [&](std::size_t j) { return 1.0 + 2.0 * r + (extra ? (*extra)[j] : 0.0); };
    // forward sweep
    double denom = diag(0);
    c_work[0] = -2.0 * r / denom;
    rhs[0] /= denom;
    for (std::size_t j = 1; j < n; ++j) {
        const double lower = (j == n - 1) ? -2.0 * r : -r;
        const double upper = -r;
        denom = diag(j) - lower * c_work[j - 1];
        c_work[j] = upper / denom;
        rhs[j] = (rhs[j] - lower * rhs[j - 1]) / denom;
    }
    for (std::size_t j = n - 1; j-- > 0;) rhs[j] -= c_work[j] * rhs[j + 1];
}

void explicit_laplacian(const std::vector<double>& u, double coef, std::vector<double>& out) {
    const std::size_t n = u.size();
    out.resize(n);
    out[0] = coef * 2.0 * (u[1] - u[0]);
    out[n - 1] = coef * 2.0 * (u[n - 2] - u[n - 1]);
    for (std::size_t j = 1; j + 1 < n; ++j) out[j] = coef * (u[j + 1] - 2.0 * u[j] + u[j - 1]);
}

struct Reduced {
    double a, b, s, al, be, inv_delta;
    explicit Reduced(const ModelParams& p)
        : a(p.a()), b(p.b()), s(p.sigma()), al(p.alpha2()), be(p.beta2()), inv_delta(1.0 / p.delta()) {}
    double f(double M, double I) const {
        return a * I * (b * (s - 1.0) + b * M - I) / (al * I + be * (1.0 - M));
    }
};

double max_reaction_slope(const ModelParams& p) {
    const Reduced r(p);
    double S = 1.0;
    constexpr int K = 40;
    const double h = 1e-7;
    for (int i = 0; i <= K; ++i) {
        for (int j = 0; j <= K; ++j) {
            const double M = static_cast<double>(i) / K, I = static_cast<double>(j) / K;
            if (!in_clipped_rectangle(M, I, p.delta()) || (M > 1.0 - p.delta() && I < p.delta())) continue;
            if (M + h > 1.0 || I + h > 1.0) continue;
            const double fI = (r.f(M, I + h) - r.f(M, I)) / h;
            const double fM = (r.f(M + h, I) - r.f(M, I)) / h;
            S = std::max({S, std::abs(fI), std::abs(fM)});
        }
    }
    return S;
}

std::vector<double> schedule(const std::vector<double>& requested, double t0, double t_end) {
    std::vector<double> out;
    for (double t : requested) {
        if (t >= t0 && t <= t_end) out.push_back(t);
    }
    out.push_back(t_end);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [](double x, double y) { return std::abs(x - y) < 1e-12; }),
              out.end());
    return out;
}

void emit(const SimOptions& opts, const std::string& msg) {
    if (opts.log) opts.log(msg);
}

void check_front_margin(const FieldState& s, const SimOptions& opts, SimulationResult& res) {
    for (std::size_t k = 0; k < s.fields.size() && k < 2; ++k) {
        const auto& u = s.fields[k];
        const double top = *std::max_element(u.begin(), u.end());
        if (top < 1e-3) continue;
        const double x = front_position(s, static_cast<Field>(k), 0.5 * top);
        const bool reached = u.back() > 1e-3 * top;
        if (reached || (std::isfinite(x) && s.grid.x_max - x < opts.front_margin)) {
            ++res.boundary_warnings;
            std::ostringstream os;
            os << "front of field " << k << " within " << opts.front_margin
               << " of the right boundary at t = " << s.t;
            emit(opts, os.str());
        }
    }
}

// Also flushes values decayed below 1e-200 to zero: subnormal arithmetic is
// two orders of magnitude slower and those values carry no information.
void check_finite(std::vector<double>& u, double t, const char* name) {
    for (std::size_t j = 0; j < u.size(); ++j) {
        if (std::abs(u[j]) < 1e-200) u[j] = 0.0;
        if (!std::isfinite(u[j])) {
            std::ostringstream os;
            os << "non-finite " << name << " at index " << j << ", t = " << t;
            throw NanDetected(os.str());
        }
    }
}

template <class Step>
SimulationResult march(const FieldState& init, double t_end, double dt, const SimOptions& opts,
                       Step&& step) {
    SimulationResult res;
    FieldState state = init;
    const auto outs = schedule(opts.output_times, init.t, t_end);
    std::size_t k = 0;
    if (!outs.empty() && std::abs(outs[0] - init.t) < 1e-12) {
        res.snapshots.push_back(state);
        ++k;
    }
    for (; k < outs.size(); ++k) {
        const double target = outs[k];
        while (state.t < target - 1e-12) {
            const double h = std::min(dt, target - state.t);
            step(state, h, res);
            state.t = (target - state.t - h < 1e-12) ? target : state.t + h;
            ++res.steps;
        }
        check_front_margin(state, opts, res);
        res.snapshots.push_back(state);
    }
    return res;
}

}  // namespace

Grid1D::Grid1D(double x_min_, double x_max_, std::size_t n_) : x_min(x_min_), x_max(x_max_), n(n_) {
    if (!(x_max > x_min) || n < 3) throw ParameterError("grid needs x_max > x_min and n >= 3");
}

FieldState heaviside_initial(const Grid1D& grid, double M0, double I0, const ModelParams& p,
                             bool four_component, double rho0, double B0) {
    if (!in_clipped_rectangle(M0, I0, p.delta())) throw DomainError("(M0, I0) outside R(delta)");
    FieldState s;
    s.grid = grid;
    const std::size_t nf = four_component ? 4 : 2;
    s.fields.assign(nf, std::vector<double>(grid.n, 0.0));
    const double dx = grid.dx();
    for (std::size_t j = 0; j < grid.n; ++j) {
        const double x = grid.x(j);
        const double w = std::clamp(0.5 - x / dx, 0.0, 1.0);
        s.fields[kM][j] = M0 * w;
        s.fields[kI][j] = I0 * w;
        if (four_component) {
            const double Bi = slow_manifold_B(s.fields[kM][j], s.fields[kI][j], p);
            s.fields[kRho][j] = rho0 >= 0.0 ? rho0 * w : Bi;
            s.fields[kB][j] = B0 >= 0.0 ? B0 * w : Bi;
        }
    }
    return s;
}

SimulationResult simulate_lds(const FieldState& init, const ModelParams& p, double t_end,
                              const SimOptions& opts) {
    if (init.fields.size() != 2) throw ParameterError("simulate_lds needs two fields");
    const double delta = p.delta();
    for (std::size_t j = 0; j < init.grid.n; ++j) {
        if (!in_clipped_rectangle(init.M()[j], init.I()[j], delta, 1e-8)) {
            throw DomainError("initial data outside R(delta)");
        }
    }
    const double dt = opts.dt > 0.0 ? opts.dt : delta / 20.0;
    const double dx = init.grid.dx();
    if (opts.scheme == Scheme::IMEX) {
        if (dt > delta / 10.0 * (1.0 + 1e-12)) throw CflViolation("IMEX requires dt <= delta/10");
    } else {
        if (dt > dx * dx / (2.0 * std::max(1.0, p.D())) * (1.0 + 1e-12)) {
            throw CflViolation("explicit diffusion requires dt <= dx^2/(2 max(1, D))");
        }
        if (dt > delta / (10.0 * max_reaction_slope(p)) * (1.0 + 1e-12)) {
            throw CflViolation("explicit reaction requires dt <= delta/(10 max slope)");
        }
    }
    const Reduced rx(p);
    const double D = p.D();
    std::vector<double> work, lapM, lapI;
    auto step = [&](FieldState& s, double h, SimulationResult& res) {
        auto& M = s.fields[kM];
        auto& I = s.fields[kI];
        const std::size_t n = M.size();
        if (opts.scheme == Scheme::Explicit) {
            explicit_laplacian(M, 1.0 / (dx * dx), lapM);
            explicit_laplacian(I, D / (dx * dx), lapI);
        }
        for (std::size_t j = 0; j < n; ++j) {
            const double m = M[j], i = I[j];
            const double fm = i * m * (1.0 - m);
            const double fi = rx.f(m, i) * rx.inv_delta;
            M[j] = m + h * fm;
            I[j] = i + h * fi;
            if (opts.scheme == Scheme::Explicit) {
                M[j] += h * lapM[j];
                I[j] += h * lapI[j];
            }
        }
        if (opts.scheme == Scheme::IMEX) {
            implicit_diffusion(M, h / (dx * dx), nullptr, work);
            implicit_diffusion(I, D * h / (dx * dx), nullptr, work);
        }
        check_finite(M, s.t, "M");
        check_finite(I, s.t, "I");
        std::size_t moved = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (!in_clipped_rectangle(M[j], I[j], delta, 1e-8)) {
                project_to_clipped_rectangle(M[j], I[j], delta);
                ++moved;
            }
        }
        if (moved) {
            res.projection_events += moved;
            std::ostringstream os;
            os << "projected " << moved << " points onto R(delta) at t = " << s.t;
            emit(opts, os.str());
        }
    };
    return march(init, t_end, dt, opts, step);
}

SimulationResult simulate_rds(const FieldState& init, const ModelParams& p, double t_end,
                              const SimOptions& opts) {
    if (init.fields.size() != 4) throw ParameterError("simulate_rds needs four fields");
    p.require_fast_regime();
    if (opts.scheme != Scheme::IMEX) throw ParameterError("the four-component model runs IMEX only");
    const double delta = p.delta(), eps = p.epsilon();
    const double dt = opts.dt > 0.0 ? opts.dt : delta / 20.0;
    if (dt > delta / 10.0 * (1.0 + 1e-12)) throw CflViolation("IMEX requires dt <= delta/10");
    for (const auto& u : init.fields) {
        for (double v : u) {
            if (!(v >= -1e-8 && v <= 1.0 + 1e-8)) throw DomainError("initial data outside [0,1]^4");
        }
    }
    const double dx = init.grid.dx();
    const double D = p.D(), Dr = p.D_rho(), DB = p.D_B();
    const double al = p.alpha2(), be = p.beta2(), b1 = p.beta1();
    std::vector<double> work, extra;
    auto step = [&](FieldState& s, double h, SimulationResult& res) {
        auto& M = s.fields[kM];
        auto& I = s.fields[kI];
        auto& rho = s.fields[kRho];
        auto& B = s.fields[kB];
        const std::size_t n = M.size();
        for (std::size_t j = 0; j < n; ++j) {
            const double m = M[j], i = I[j], bb = B[j];
            M[j] = m + h * i * m * (1.0 - m);
            I[j] = i + h * (bb - (bb + b1) * i) / delta;
        }
        implicit_diffusion(M, h / (dx * dx), nullptr, work);
        implicit_diffusion(I, D * h / (dx * dx), nullptr, work);
        extra.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            extra[j] = h / eps * (al * I[j] + be * (1.0 - M[j]));
            rho[j] += h / eps * al * I[j];
        }
        implicit_diffusion(rho, Dr * h / (dx * dx), &extra, work);
        std::fill(extra.begin(), extra.end(), h / eps);
        for (std::size_t j = 0; j < n; ++j) B[j] += h / eps * rho[j];
        implicit_diffusion(B, DB * h / (dx * dx), &extra, work);
        std::size_t moved = 0;
        for (auto* u : {&M, &I, &rho, &B}) {
            check_finite(*u, s.t, "state");
            for (double& v : *u) {
                if (v < -1e-8 || v > 1.0 + 1e-8) {
                    v = std::clamp(v, 0.0, 1.0);
                    ++moved;
                }
            }
        }
        if (moved) {
            res.projection_events += moved;
            std::ostringstream os;
            os << "projected " << moved << " values onto [0,1]^4 at t = " << s.t;
            emit(opts, os.str());
        }
    };
    return march(init, t_end, dt, opts, step);
}

SimulationResult simulate_fkpp(const FieldState& init, double t_end, const SimOptions& opts) {
    if (init.fields.empty()) throw ParameterError("simulate_fkpp needs one field");
    const double dt = opts.dt > 0.0 ? opts.dt : 0.01;
    const double dx = init.grid.dx();
    std::vector<double> work;
    FieldState start = init;
    start.fields.resize(1);
    auto step = [&](FieldState& s, double h, SimulationResult&) {
        auto& u = s.fields[0];
        for (double& v : u) v += h * v * (1.0 - v);
        implicit_diffusion(u, h / (dx * dx), nullptr, work);
        check_finite(u, s.t, "u");
    };
    return march(start, t_end, dt, opts, step);
}

double front_position(const FieldState& s, Field field, double level) {
    const auto& u = s.fields.at(field);
    for (std::size_t j = u.size() - 1; j-- > 0;) {
        if (u[j] >= level && u[j + 1] < level) {
            return s.grid.x(j) + s.grid.dx() * (u[j] - level) / (u[j] - u[j + 1]);
        }
    }
    return std::numeric_limits<double>::quiet_NaN();
}

FrontTrace track_front(const std::vector<FieldState>& snapshots, Field field, double level,
                       double fit_window) {
    if (!(fit_window > 0.0 && fit_window <= 1.0)) throw ParameterError("fit_window must lie in (0,1]");
    FrontTrace tr;
    tr.level = level;
    tr.fit_window = fit_window;
    for (const auto& s : snapshots) {
        const double x = front_position(s, field, level);
        if (std::isfinite(x)) {
            tr.times.push_back(s.t);
            tr.positions.push_back(x);
        }
    }
    const std::size_t n = tr.times.size();
    if (n < 2) return tr;
    std::size_t first = static_cast<std::size_t>(std::floor((1.0 - fit_window) * static_cast<double>(n)));
    first = std::min(first, n - 2);
    const double cnt = static_cast<double>(n - first);
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (std::size_t k = first; k < n; ++k) {
        st += tr.times[k];
        sx += tr.positions[k];
        stt += tr.times[k] * tr.times[k];
        stx += tr.times[k] * tr.positions[k];
    }
    const double den = cnt * stt - st * st;
    tr.fitted_speed = den > 0.0 ? (cnt * stx - st * sx) / den : 0.0;
    return tr;
}

}  // namespace ibdwaves
