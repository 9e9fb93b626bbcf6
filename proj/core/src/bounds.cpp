#include <algorithm>
#include <cmath>

#include "ibdwaves/errors.hpp"
#include "ibdwaves/evolution.hpp"

namespace ibdwaves {

double BoundsReport::worst() const {
    double w = 0.0;
    for (const auto& c : checks) w = std::max(w, c.max_violation);
    return w;
}

double threshold_decay_constant(double M0, const ModelParams& p) {
    const double s = p.sigma();
    return p.beta1() * p.beta2() * ((1.0 - s) - M0) / (2.0 * (p.alpha2() + p.beta2()));
}

double threshold_mass(double M0, const ModelParams& p) { return M0 + ((1.0 - p.sigma()) - M0) / 2.0; }

BoundsRegime bounds_regime(double M0, const ModelParams& p) {
    const double s = p.sigma(), d = p.delta(), q = std::pow(d, 0.25);
    if (s >= d && s < 1.0 - q && M0 < (1.0 - s) - q && M0 > 0.0) return BoundsRegime::SubThreshold;
    if ((s >= d && s <= 1.0 && M0 > 1.0 - s && M0 <= 1.0) || (s > 1.0 && M0 > 0.0 && M0 <= 1.0)) {
        return BoundsRegime::SuperThreshold;
    }
    throw RegimeMismatch("(M0, sigma, delta) lies outside both comparison regimes");
}

BoundsReport check_appendix_bounds(const std::vector<FieldState>& snapshots, const ModelParams& p,
                                   double M0, double I0, BoundsRegime regime, double t_min) {
    if (bounds_regime(M0, p) != regime) throw RegimeMismatch("requested bounds do not apply to M0");
    BoundsReport rep;
    rep.regime = regime;
    const double delta = p.delta(), D = p.D();
    const double c = threshold_decay_constant(M0, p);
    rep.c_M0 = c;

    std::vector<const FieldState*> used;
    for (const auto& s : snapshots) {
        if (s.t > 0.0 && s.t >= t_min) used.push_back(&s);
    }

    auto heat = [](double amp, double x, double t, double diff) {
        return 0.5 * amp * std::erfc(x / (2.0 * std::sqrt(diff * t)));
    };

    if (regime == BoundsRegime::SubThreshold) {
        BoundCheck iu{"I_upper"}, ml{"M_lower"}, mu{"M_upper"}, ip{"I_nonnegative"};
        for (const auto* s : used) {
            const double t = s->t;
            const double decay = std::exp(-c * t / delta);
            const double growth = std::exp(I0 * (delta / c) * (1.0 - decay));
            for (std::size_t j = 0; j < s->grid.n; ++j) {
                const double x = s->grid.x(j), M = s->M()[j], I = s->I()[j];
                iu.max_violation = std::max(iu.max_violation, I - heat(I0, x, t, D) * decay);
                ml.max_violation = std::max(ml.max_violation, heat(M0, x, t, 1.0) - M);
                mu.max_violation = std::max(mu.max_violation, M - heat(M0, x, t, 1.0) * growth);
                ip.max_violation = std::max(ip.max_violation, -I);
            }
            iu.points += s->grid.n;
            ml.points += s->grid.n;
            mu.points += s->grid.n;
            ip.points += s->grid.n;
        }
        rep.checks = {iu, ml, mu, ip};
        return rep;
    }

    BoundCheck ml{"M_lower"}, mu{"M_upper_fkpp"}, iu{"I_upper"};
    if (!used.empty()) {
        std::vector<double> times;
        for (const auto* s : used) times.push_back(s->t);
        FieldState u0;
        u0.grid = used.front()->grid;
        u0.fields.assign(1, std::vector<double>(u0.grid.n));
        const double dx = u0.grid.dx();
        for (std::size_t j = 0; j < u0.grid.n; ++j) {
            u0.fields[0][j] = std::clamp(0.5 - u0.grid.x(j) / dx, 0.0, 1.0);
        }
        SimOptions fo;
        fo.output_times = times;
        fo.dt = std::min(0.01, delta / 20.0);
        const auto fk = simulate_fkpp(u0, times.back(), fo);
        const double bs = p.b() * p.sigma();
        const double rate = p.a() / (p.alpha2() * delta);
        for (std::size_t k = 0; k < used.size(); ++k) {
            const auto* s = used[k];
            const auto* u = &fk.snapshots.front();
            for (const auto& snap : fk.snapshots) {
                if (std::abs(snap.t - s->t) < std::abs(u->t - s->t)) u = &snap;
            }
            const double t = s->t;
            const double e = std::exp(-rate * t);
            for (std::size_t j = 0; j < s->grid.n; ++j) {
                const double x = s->grid.x(j), M = s->M()[j], I = s->I()[j];
                ml.max_violation = std::max(ml.max_violation, heat(M0, x, t, 1.0) - M);
                mu.max_violation = std::max(mu.max_violation, M - u->fields[0][j]);
                iu.max_violation = std::max(iu.max_violation, I - (bs + (heat(I0, x, t, D) - bs) * e));
            }
            ml.points += s->grid.n;
            mu.points += s->grid.n;
            iu.points += s->grid.n;
        }
    }
    rep.checks = {ml, mu, iu};
    return rep;
}

}  // namespace ibdwaves
