#include "ibdwaves/systemwaves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "ibdwaves/asymptotics.hpp"
#include "ibdwaves/errors.hpp"

namespace ibdwaves {

namespace {

struct ImmunePartials {
    double f, f_M, f_I;
};

ImmunePartials immune_partials(double M, double I, const ModelParams& p) {
    const double a = p.a(), b = p.b(), s = p.sigma();
    const double den = p.alpha2() * I + p.beta2() * (1.0 - M);
    const double num = a * I * (b * (s - 1.0) + b * M - I);
    const double dnum_M = a * I * b;
    const double dnum_I = a * (b * (s - 1.0) + b * M - 2.0 * I);
    return {num / den, (dnum_M * den + p.beta2() * num) / (den * den),
            (dnum_I * den - p.alpha2() * num) / (den * den)};
}

struct Roots {
    double lo, hi;
};

Roots real_roots(double bcoef, double ccoef, const char* what) {
    // lambda^2 + bcoef lambda + ccoef = 0
    const double disc = bcoef * bcoef - 4.0 * ccoef;
    if (disc < 0.0) throw ComplexEigenvalue(std::string("complex eigenvalues in the ") + what + " block");
    const double r = std::sqrt(disc);
    return {0.5 * (-bcoef - r), 0.5 * (-bcoef + r)};
}

struct Ends {
    Equilibrium left, right;
};

Ends ends_for(WaveKind kind, const ModelParams& p) {
    const Equilibrium origin{0.0, 0.0, EquilibriumKind::ContinuumE, Stability::DegenerateStableNode};
    switch (kind) {
        case WaveKind::FPTW:
            if (p.sigma() > 1.0) throw NewtonDivergence("no full-transition wave exists for sigma > 1");
            return {full_equilibrium(p), origin};
        case WaveKind::UPTW: {
            auto eT = transitional_equilibrium(p);
            if (!eT) throw DomainError("UPTW requires sigma > 1");
            return {full_equilibrium(p), *eT};
        }
        case WaveKind::LPTW: {
            auto eT = transitional_equilibrium(p);
            if (!eT) throw DomainError("LPTW requires sigma > 1");
            return {*eT, origin};
        }
    }
    return {};
}

double interp(const std::vector<double>& x, const std::vector<double>& y, double t) {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    auto it = std::upper_bound(x.begin(), x.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - x.begin());
    const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
    return (1.0 - w) * y[j - 1] + w * y[j];
}

class EvpSystem {
public:
    EvpSystem(WaveKind kind, const ModelParams& p, bool free_speed, const BvpConfig& cfg)
        : kind_(kind), p_(p), free_(free_speed), N_(cfg.N), L_(cfg.L),
          h_(2.0 * cfg.L / (cfg.N - 1)), ends_(ends_for(kind, p)) {
        n_ = 2 * N_ + (free_ ? 1 : 0);
        const double s = p.sigma();
        if (kind == WaveKind::FPTW) {
            phase_on_M_ = true;
            phase_level_ = s < 1.0 ? 1.0 - s : 0.5;
        } else if (kind == WaveKind::UPTW) {
            phase_level_ = p.b() * (s - 0.5);
        } else {
            phase_level_ = 0.5 * p.b() * (s - 1.0);
        }
        const double zpos = L_ / h_;
        j0_ = static_cast<int>(std::floor(zpos));
        w0_ = zpos - j0_;
        if (j0_ >= N_ - 1) {
            j0_ = N_ - 2;
            w0_ = 1.0;
        }
    }

    int size() const { return n_; }
    double z(int j) const { return -L_ + h_ * j; }

    // Residual for the unknowns x at speed v.
    Eigen::VectorXd residual(const Eigen::VectorXd& x, double v) const {
        Eigen::VectorXd R(n_);
        const auto bl = linearized_bc(ends_.left, Side::Left, kind_, v, p_);
        const auto br = linearized_bc(ends_.right, Side::Right, kind_, v, p_);
        check_counts(bl, br);
        const double ih2 = 1.0 / (h_ * h_), i2h = 0.5 / h_;
        const double Dd = p_.D() * p_.delta(), dv = p_.delta() * v;
        for (int j = 1; j < N_ - 1; ++j) {
            const double Mm = x[2 * (j - 1)], M0 = x[2 * j], Mp = x[2 * (j + 1)];
            const double Im = x[2 * (j - 1) + 1], I0 = x[2 * j + 1], Ip = x[2 * (j + 1) + 1];
            const auto fp = immune_partials(M0, I0, p_);
            R[2 * j] = (Mp - 2 * M0 + Mm) * ih2 + v * (Mp - Mm) * i2h + I0 * M0 * (1 - M0);
            R[2 * j + 1] = Dd * (Ip - 2 * I0 + Im) * ih2 + dv * (Ip - Im) * i2h + fp.f;
        }
        int slot = 0;
        for (const auto& row : bl.rows) R[slot_row(slot++)] = apply_row(row, x, true, ends_.left);
        for (const auto& row : br.rows) R[slot_row(slot++)] = apply_row(row, x, false, ends_.right);
        R[slot_row(slot)] = phase_value(x) - phase_level_;
        return R;
    }

    Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x, double v,
                                         const Eigen::VectorXd& R0) const {
        std::vector<Eigen::Triplet<double>> t;
        t.reserve(static_cast<std::size_t>(N_) * 12 + 64);
        const auto bl = linearized_bc(ends_.left, Side::Left, kind_, v, p_);
        const auto br = linearized_bc(ends_.right, Side::Right, kind_, v, p_);
        const double ih2 = 1.0 / (h_ * h_), i2h = 0.5 / h_;
        const double Dd = p_.D() * p_.delta(), dv = p_.delta() * v;
        for (int j = 1; j < N_ - 1; ++j) {
            const double M0 = x[2 * j], I0 = x[2 * j + 1];
            const auto fp = immune_partials(M0, I0, p_);
            const int rm = 2 * j, ri = 2 * j + 1;
            t.emplace_back(rm, 2 * (j - 1), ih2 - v * i2h);
            t.emplace_back(rm, 2 * (j + 1), ih2 + v * i2h);
            t.emplace_back(rm, 2 * j, -2 * ih2 + I0 * (1 - 2 * M0));
            t.emplace_back(rm, 2 * j + 1, M0 * (1 - M0));
            t.emplace_back(ri, 2 * (j - 1) + 1, Dd * ih2 - dv * i2h);
            t.emplace_back(ri, 2 * (j + 1) + 1, Dd * ih2 + dv * i2h);
            t.emplace_back(ri, 2 * j + 1, -2 * Dd * ih2 + fp.f_I);
            t.emplace_back(ri, 2 * j, fp.f_M);
        }
        int slot = 0;
        for (const auto& row : bl.rows) add_row(t, slot_row(slot++), row, true);
        for (const auto& row : br.rows) add_row(t, slot_row(slot++), row, false);
        {
            const int r = slot_row(slot);
            const int off = phase_on_M_ ? 0 : 1;
            t.emplace_back(r, 2 * j0_ + off, 1.0 - w0_);
            t.emplace_back(r, 2 * (j0_ + 1) + off, w0_);
        }
        if (free_) {
            const double dvs = 1e-7 * std::max(1.0, std::abs(v));
            Eigen::VectorXd x2 = x;
            x2[2 * N_] = v + dvs;
            const Eigen::VectorXd R1 = residual(x2, v + dvs);
            for (int r = 0; r < n_; ++r) {
                const double d = (R1[r] - R0[r]) / dvs;
                if (d != 0.0) t.emplace_back(r, 2 * N_, d);
            }
        }
        Eigen::SparseMatrix<double> J(n_, n_);
        J.setFromTriplets(t.begin(), t.end());
        return J;
    }

private:
    int slot_row(int slot) const {
        static constexpr int kMap[5] = {0, 1, -2, -1, 0};
        if (slot < 2) return kMap[slot];
        if (slot < 4) return 2 * N_ + kMap[slot];
        return 2 * N_;
    }

    void check_counts(const BoundaryOperator& bl, const BoundaryOperator& br) const {
        const std::size_t need = free_ ? 4 : 3;
        if (bl.rows.size() + br.rows.size() != need) {
            throw DomainError("boundary conditions do not close the problem for this wave kind");
        }
    }

    // one-sided second-order derivative stencil at the ends
    std::array<std::pair<int, double>, 3> stencil(bool left) const {
        const double c = 0.5 / h_;
        if (left) return {{{0, -3 * c}, {1, 4 * c}, {2, -c}}};
        return {{{N_ - 1, 3 * c}, {N_ - 2, -4 * c}, {N_ - 3, c}}};
    }

    double apply_row(const std::array<double, 4>& w, const Eigen::VectorXd& x, bool left,
                     const Equilibrium& e) const {
        const int jb = left ? 0 : N_ - 1;
        double dM = 0.0, dI = 0.0;
        for (auto [j, c] : stencil(left)) {
            dM += c * x[2 * j];
            dI += c * x[2 * j + 1];
        }
        return w[0] * (x[2 * jb] - e.m) + w[1] * dM + w[2] * (x[2 * jb + 1] - e.i) + w[3] * dI;
    }

    void add_row(std::vector<Eigen::Triplet<double>>& t, int r, const std::array<double, 4>& w,
                 bool left) const {
        const int jb = left ? 0 : N_ - 1;
        if (w[0] != 0.0) t.emplace_back(r, 2 * jb, w[0]);
        if (w[2] != 0.0) t.emplace_back(r, 2 * jb + 1, w[2]);
        for (auto [j, c] : stencil(left)) {
            if (w[1] != 0.0) t.emplace_back(r, 2 * j, w[1] * c);
            if (w[3] != 0.0) t.emplace_back(r, 2 * j + 1, w[3] * c);
        }
    }

    double phase_value(const Eigen::VectorXd& x) const {
        const int off = phase_on_M_ ? 0 : 1;
        return (1.0 - w0_) * x[2 * j0_ + off] + w0_ * x[2 * (j0_ + 1) + off];
    }

    WaveKind kind_;
    const ModelParams& p_;
    bool free_;
    int N_;
    double L_, h_;
    Ends ends_;
    int n_ = 0;
    bool phase_on_M_ = false;
    double phase_level_ = 0.0;
    int j0_ = 0;
    double w0_ = 0.0;
};

double max_abs(const Eigen::VectorXd& v) {
    if (!v.allFinite()) return std::numeric_limits<double>::infinity();
    return v.lpNorm<Eigen::Infinity>();
}

}  // namespace

void BvpConfig::validate() const {
    if (!(L > 0.0)) throw ParameterError("BvpConfig.L must be positive");
    if (N < 100) throw ParameterError("BvpConfig.N must be at least 100");
    if (!(atol > 0.0 && rtol > 0.0)) throw ParameterError("BvpConfig tolerances must be positive");
    if (max_newton_iters < 1) throw ParameterError("BvpConfig.max_newton_iters must be positive");
}

BoundaryOperator linearized_bc(const Equilibrium& eq, Side side, WaveKind kind, double v,
                               const ModelParams& p) {
    if (!(v > 0.0)) throw DomainError("speed must be positive");
    BoundaryOperator op;
    op.side = side;
    const double db = p.delta_bar();
    const double vb = v / p.D();
    const double qM = eq.i * (1.0 - 2.0 * eq.m);
    const auto fp = immune_partials(eq.m, eq.i, p);
    const double fI = fp.f_I, fM = fp.f_M;

    auto m_row = [v](double lam) { return std::array<double, 4>{lam + v, 1.0, 0.0, 0.0}; };
    auto i_row = [&](double lam) {
        std::array<double, 4> w{0.0, 0.0, lam + vb, 1.0};
        if (fM != 0.0) {
            const double pm = lam * (lam + v) + qM;
            if (std::abs(pm) < 1e-14) throw ComplexEigenvalue("resonant boundary eigenvalues");
            const double k = -(fM / db) / pm;
            w[0] = k * (lam + v);
            w[1] = k;
        }
        return w;
    };

    const bool at_eT = eq.kind == EquilibriumKind::TransitionalET;
    if (side == Side::Left && kind == WaveKind::LPTW) {
        // whole M block suppressed: M = M' = 0
        op.rows.push_back({1.0, 0.0, 0.0, 0.0});
        op.rows.push_back({0.0, 1.0, 0.0, 0.0});
        const auto ri = real_roots(vb, fI / db, "I");
        op.eigenvalues_I = {ri.lo, ri.hi};
        op.suppressed.push_back(ri.lo);
        op.rows.push_back(i_row(ri.lo));
        return op;
    }

    const auto rm = real_roots(v, qM, "M");
    op.eigenvalues_M = {rm.lo, rm.hi};
    if (side == Side::Right && kind == WaveKind::LPTW) {
        const auto ri = real_roots(vb, fI / db, "I");
        op.eigenvalues_I = {ri.lo, ri.hi};
        return op;
    }
    const auto ri = real_roots(vb, fI / db, "I");
    op.eigenvalues_I = {ri.lo, ri.hi};

    if (side == Side::Left) {
        op.suppressed = {rm.lo, ri.lo};
        op.rows.push_back(m_row(rm.lo));
        op.rows.push_back(i_row(ri.lo));
    } else if (at_eT) {
        op.suppressed = {ri.hi};
        op.rows.push_back(i_row(ri.hi));
    } else {
        // leading edge at the origin: the M centre direction is always removed,
        // the I direction with non-negative root likewise
        op.suppressed = {rm.hi, ri.hi};
        op.rows.push_back(m_row(rm.hi));
        op.rows.push_back(i_row(ri.hi));
    }
    if (op.rows.size() == 2) {
        const auto& r0 = op.rows[0];
        const auto& r1 = op.rows[1];
        const double b00 = r0[1], b01 = r0[3], b10 = r1[1], b11 = r1[3];
        const double det = b00 * b11 - b01 * b10;
        if (std::abs(det) > 1e-14) {
            const double a00 = r0[0], a01 = r0[2], a10 = r1[0], a11 = r1[2];
            // Lambda = -B^{-1} A
            op.lambda = std::array<double, 4>{-(b11 * a00 - b01 * a10) / det, -(b11 * a01 - b01 * a11) / det,
                                              -(-b10 * a00 + b00 * a10) / det, -(-b10 * a01 + b00 * a11) / det};
        }
    }
    return op;
}

EvpResult solve_evp(WaveKind kind, const ModelParams& p, std::optional<double> speed,
                    const BvpConfig& cfg, const WaveProfile& guess) {
    cfg.validate();
    if (guess.z.size() < 2) throw ParameterError("initial guess must have at least two points");
    const bool free_speed = !speed.has_value();
    if (free_speed && kind != WaveKind::FPTW) {
        throw DomainError("the speed is an unknown only for the full-transition wave");
    }
    if (kind == WaveKind::FPTW && !free_speed) {
        throw DomainError("the full-transition wave is solved with the speed as an unknown");
    }
    EvpSystem sys(kind, p, free_speed, cfg);
    const int N = cfg.N;
    Eigen::VectorXd x(sys.size());
    for (int j = 0; j < N; ++j) {
        x[2 * j] = kind == WaveKind::LPTW ? 0.0 : interp(guess.z, guess.M, sys.z(j));
        x[2 * j + 1] = interp(guess.z, guess.I, sys.z(j));
    }
    double v = free_speed ? guess.speed : *speed;
    if (free_speed) x[2 * N] = v;

    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    Eigen::VectorXd R = sys.residual(x, v);
    double rn = max_abs(R);
    int it = 0;
    for (; it < cfg.max_newton_iters && rn > cfg.atol; ++it) {
        const auto J = sys.jacobian(x, v, R);
        lu.compute(J);
        if (lu.info() != Eigen::Success) throw NewtonDivergence("singular Newton matrix");
        const Eigen::VectorXd dx = lu.solve(R);
        if (!dx.allFinite()) throw NewtonDivergence("non-finite Newton step");
        double lam = 1.0;
        bool accepted = false;
        for (int k = 0; k < 12; ++k, lam *= 0.5) {
            Eigen::VectorXd xt = x - lam * dx;
            const double vt = free_speed ? xt[2 * N] : v;
            if (!(vt > 0.0)) continue;
            double rt;
            try {
                rt = max_abs(sys.residual(xt, vt));
            } catch (const ComplexEigenvalue&) {
                continue;
            }
            if (rt < (1.0 - 1e-4 * lam) * rn || rt <= cfg.atol) {
                x = std::move(xt);
                v = vt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            if (rn < 1e3 * cfg.atol) break;
            throw NewtonDivergence("line search failed, residual " + std::to_string(rn));
        }
        R = sys.residual(x, v);
        rn = max_abs(R);
    }
    if (rn > cfg.atol) {
        if (rn < 1e3 * cfg.atol) {
            // accept near-converged state only when the step has stalled at round-off
        } else {
            throw ResidualStall("Newton residual stalled at " + std::to_string(rn));
        }
    }
    EvpResult res;
    res.newton_iterations = it;
    auto& w = res.profile;
    w.kind = kind;
    w.sigma = p.sigma();
    w.delta = p.delta();
    w.speed = v;
    w.residual = rn;
    w.z.resize(N);
    w.M.resize(N);
    w.I.resize(N);
    for (int j = 0; j < N; ++j) {
        w.z[j] = sys.z(j);
        w.M[j] = x[2 * j];
        w.I[j] = x[2 * j + 1];
    }
    res.monotone = profile_is_monotone(w);
    return res;
}

WaveProfile leading_order_guess(WaveKind kind, const ModelParams& p, double speed) {
    const double s = p.sigma(), b = p.b();
    switch (kind) {
        case WaveKind::FPTW: {
            if (s > 1.0) throw NewtonDivergence("no full-transition wave exists for sigma > 1");
            WaveProfile w;
            w.kind = kind;
            w.sigma = s;
            w.delta = p.delta();
            if (s == 1.0) {
                w.speed = cubic_fisher_speed(p);
                for (double z = -60.0; z <= 60.0; z += 0.01) {
                    const double m = exact_waveform(ExactWaveform::CubicFisherMin, p, z);
                    w.z.push_back(z);
                    w.M.push_back(m);
                    w.I.push_back(b * m);
                }
                return w;
            }
            const auto shot = solve_mvp1_speed(p, 1e-10);
            w = shot.profile;
            for (std::size_t j = 0; j < w.z.size(); ++j) {
                w.I[j] = composite_H(std::clamp(w.M[j], 0.0, 1.0), p, shot.speed);
            }
            return w;
        }
        case WaveKind::UPTW: {
            const double r = std::sqrt(b * (s - 1.0));
            return lift_profile(family_profile(ScalarProblem::MVP4, speed / r, p), p);
        }
        case WaveKind::LPTW: {
            const double C = *derived_coeffs(p).C_sigma_delta;
            return lift_profile(family_profile(ScalarProblem::MVP3, speed / (p.D() * C), p), p);
        }
    }
    return {};
}

bool profile_is_monotone(const WaveProfile& w, double tol) {
    const std::size_t n = w.z.size();
    if (n < 3) return false;
    const std::size_t lo = n / 20, hi = n - n / 20;
    for (std::size_t j = 0; j < n; ++j) {
        if (w.M[j] < -tol || w.I[j] < -tol) return false;
    }
    if (w.kind == WaveKind::LPTW) {
        for (double m : w.M) {
            if (std::abs(m) > 1e-10) return false;
        }
    }
    for (std::size_t j = lo; j + 1 < hi; ++j) {
        if (w.I[j + 1] - w.I[j] > tol) return false;
        if (w.kind != WaveKind::LPTW && w.M[j + 1] - w.M[j] > tol) return false;
    }
    return true;
}

MinSpeedResult min_speed_search(WaveKind kind, const ModelParams& p, const BvpConfig& cfg,
                                double rel_tol) {
    MinSpeedResult out;
    const double s = p.sigma();
    if (kind == WaveKind::FPTW) {
        if (std::abs(s - 1.0) > 1e-12) throw DomainError("FPTW minimum-speed search requires sigma = 1");
        // at sigma = 1 the minimum-speed wave is the one with the fast leading-edge
        // decay; with both centre directions removed the speed closes the problem
        const auto guess = leading_order_guess(kind, p, cubic_fisher_speed(p));
        auto r = solve_evp(kind, p, std::nullopt, cfg, guess);
        out.solves = 1;
        if (!r.monotone) throw ContinuationFailure("sigma = 1 minimum-speed wave is not monotone");
        out.v_m = r.profile.speed;
        out.bracket_lo = out.bracket_hi = out.v_m;
        out.profile = std::move(r.profile);
        return out;
    }
    const double v_asym = kind == WaveKind::UPTW ? uptw_min_speed(p) : lptw_min_speed(p);
    double v_good = 1.5 * v_asym;
    auto attempt = [&](double v, const WaveProfile& guess) -> std::optional<WaveProfile> {
        ++out.solves;
        try {
            auto r = solve_evp(kind, p, v, cfg, guess);
            if (!r.monotone) return std::nullopt;
            return std::move(r.profile);
        } catch (const SolverError&) {
            return std::nullopt;
        }
    };
    auto first = attempt(v_good, leading_order_guess(kind, p, v_good));
    if (!first) throw ContinuationFailure("starting speed does not give a monotone wave");
    WaveProfile good = std::move(*first);
    const double step = 0.05 * v_asym;
    double v_bad = 0.0;
    for (;;) {
        const double v = v_good - step;
        if (v <= 0.0) break;
        auto r = attempt(v, good);
        if (!r) {
            v_bad = v;
            break;
        }
        v_good = v;
        good = std::move(*r);
    }
    while (v_good - v_bad > rel_tol * v_good) {
        const double v = 0.5 * (v_good + v_bad);
        auto r = attempt(v, good);
        if (r) {
            v_good = v;
            good = std::move(*r);
        } else {
            v_bad = v;
        }
    }
    out.v_m = v_good;
    out.bracket_lo = v_bad;
    out.bracket_hi = v_good;
    out.profile = std::move(good);
    return out;
}

double wave_height_ratio(double sigma) {
    if (!(sigma > 1.0)) throw DomainError("height ratio requires sigma > 1");
    return sigma / (sigma - 1.0);
}

}  // namespace ibdwaves
