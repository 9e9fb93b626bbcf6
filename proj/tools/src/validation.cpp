#include "ibdwaves_cli/validation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "ibdwaves/asymptotics.hpp"
#include "ibdwaves/evolution.hpp"
#include "ibdwaves/scalarwaves.hpp"
#include "ibdwaves/systemwaves.hpp"

namespace ibdwaves::cli {

namespace {

using nlohmann::json;

struct Ctx {
    double tamper;
    // numerical side
    ModelParams P(double sigma, double delta, double D = 1.0) const {
        return ModelParams::from_sigma(sigma, delta, D, tamper, 1.0);
    }
    // reference side
    static ModelParams R(double sigma, double delta, double D = 1.0) {
        return ModelParams::from_sigma(sigma, delta, D);
    }
};

double rel(double x, double ref) { return std::abs(x - ref) / std::abs(ref); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double sup_vs_logistic(const std::vector<double>& z, const std::vector<double>& u, const ModelParams& ref) {
    const double z0 = crossing_position(z, u, 0.5);
    double e = 0.0;
    for (std::size_t k = 0; k < z.size(); ++k) {
        e = std::max(e, std::abs(u[k] - exact_waveform(ExactWaveform::CubicFisherMin, ref, z[k] - z0)));
    }
    return e;
}

// Reference sigma = 4 set: D = 4 puts the lower/upper speed ratio at 10.
double D_for(double sigma) { return sigma == 4.0 ? 4.0 : 1.0; }

void c1(const Ctx& c, CriterionResult& r) {
    const auto ref = Ctx::R(1.0, 0.05);
    const double v_ref = cubic_fisher_speed(ref);
    const auto sh = min_speed_family(ScalarProblem::MVP2, c.P(1.0, 0.05));
    const double sup_sh = sup_vs_logistic(sh.scalar.x, sh.scalar.u, ref);
    // the logistic wave is the delta -> 0 limit of the full system
    BvpConfig cfg;
    cfg.L = 40.0;
    cfg.N = 4000;
    const auto bv = min_speed_search(WaveKind::FPTW, c.P(1.0, 0.002), cfg);
    const double sup_bv = sup_vs_logistic(bv.profile.z, bv.profile.M, ref);
    r.metrics = {{"v_ref", v_ref}, {"v_shoot", sh.speed}, {"v_bvp", bv.v_m}, {"bvp_delta", 0.002},
                 {"sup_shoot", sup_sh}, {"sup_bvp", sup_bv}};
    const bool ok = std::abs(sh.speed - v_ref) < 1e-3 && std::abs(bv.v_m - v_ref) < 1e-3 && sup_sh <= 1e-4 &&
                    sup_bv <= 1e-4;
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    r.detail = fmt("v_ref=%.6f shoot=%.6f bvp(delta=0.002)=%.6f sup shoot=%.2e bvp=%.2e", v_ref, sh.speed,
                   bv.v_m, sup_sh, sup_bv);
}

void c2(const Ctx& c, CriterionResult& r) {
    bool ok = true;
    std::ostringstream d;
    BvpConfig cfg;
    for (double s : {1.25, 1.4, 2.0, 4.0}) {
        const double v = min_speed_search(WaveKind::UPTW, c.P(s, 0.05, D_for(s)), cfg).v_m;
        const double ref = uptw_min_speed(Ctx::R(s, 0.05, D_for(s)));
        ok = ok && rel(v, ref) < 0.02;
        r.metrics["sigma_" + fmt("%g", s)] = {{"v_m", v}, {"formula", ref}, {"rel", rel(v, ref)}};
        d << fmt("s=%g %.2f%% ", s, 100 * rel(v, ref));
    }
    const double va = min_speed_search(WaveKind::UPTW, c.P(4.0, 0.05, 4.0), cfg).v_m;
    const double vb = min_speed_search(WaveKind::UPTW, c.P(4.0, 0.5, 4.0), cfg).v_m;
    const double di = std::abs(vb - va) / va;
    ok = ok && di < 0.01;
    r.metrics["delta_independence"] = di;
    d << fmt("| delta shift at s=4 %.2e", di);
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    r.detail = d.str();
}

void c3(const Ctx& c, CriterionResult& r) {
    const auto ref = Ctx::R(1.25, 0.05);
    const auto sh = min_speed_family(ScalarProblem::MVP4, c.P(1.25, 0.05));
    double e = 0.0;
    for (std::size_t k = 0; k < sh.scalar.x.size(); ++k) {
        e = std::max(e, std::abs(sh.scalar.u[k] - exact_waveform(ExactWaveform::UptwMin, ref, sh.scalar.x[k])));
    }
    r.metrics = {{"V", sh.speed}, {"V_m", mvp4_min_speed(1.25)}, {"sup", e}};
    r.verdict = e <= 1e-3 ? Verdict::Pass : Verdict::Fail;
    r.detail = fmt("V=%.6f sup=%.2e", sh.speed, e);
}

void c4(const Ctx& c, CriterionResult& r) {
    bool ok = true;
    std::ostringstream d;
    BvpConfig cfg;
    double v_low4 = 0.0;
    for (auto [s, dl] : {std::pair{4.0, 0.05}, std::pair{1.25, 0.5}}) {
        const auto p = c.P(s, dl, D_for(s));
        const double vb = min_speed_search(WaveKind::LPTW, p, cfg).v_m;
        const double vs = min_speed_family(ScalarProblem::MVP3, p).profile.speed;
        const double ref = lptw_min_speed(Ctx::R(s, dl, D_for(s)));
        ok = ok && rel(vb, ref) < 0.01 && rel(vs, ref) < 0.01;
        if (s == 4.0) v_low4 = vb;
        r.metrics[fmt("sigma_%g_delta_%g", s, dl)] = {{"bvp", vb}, {"shoot", vs}, {"formula", ref}};
        d << fmt("(%g,%g) bvp %.2f%% shoot %.2f%% ", s, dl, 100 * rel(vb, ref), 100 * rel(vs, ref));
    }
    const double vu = min_speed_search(WaveKind::UPTW, c.P(4.0, 0.05, 4.0), cfg).v_m;
    const double ratio = v_low4 / vu;
    ok = ok && rel(ratio, 10.0) < 0.03;
    r.metrics["ratio"] = ratio;
    d << fmt("| ratio %.4f", ratio);
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    r.detail = d.str();
}

void c5(const Ctx& c, CriterionResult& r) {
    std::vector<double> dev;
    std::ostringstream d;
    double r01 = 0.0;
    for (double s : {0.2, 0.1, 0.05}) {
        const double v = solve_mvp1_speed(c.P(s, 0.05)).speed;
        const double q = v / vstar_asym(Ctx::R(s, 0.05), AsymBranch::SmallSigma);
        if (s == 0.1) r01 = q;
        dev.push_back(std::abs(q - 1.0));
        r.metrics[fmt("ratio_%g", s)] = q;
        d << fmt("ratio(%g)=%.4f ", s, q);
    }
    const double v95 = solve_mvp1_speed(c.P(0.95, 0.05)).speed;
    const double e95 = rel(vstar_asym(Ctx::R(0.95, 0.05), AsymBranch::NearOne), v95);
    r.metrics["near_one_rel_0.95"] = e95;
    d << fmt("| near-one at 0.95 %.2f%%", 100 * e95);
    const bool ok = r01 >= 0.7 && r01 <= 1.3 && dev[0] > dev[1] && dev[1] > dev[2] && e95 < 0.05;
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    r.detail = d.str();
}

void c6(const Ctx& c, CriterionResult& r) {
    bool ok = true;
    std::ostringstream d;
    for (double s : {0.3, 0.75}) {
        const auto p = c.P(s, 0.05);
        const auto t = solve_tbp(p, solve_mvp1_speed(p).speed);
        const double cb = t.c_hat / std::sqrt(3.0);
        ok = ok && std::abs(cb - 0.7749) <= 0.01;
        r.metrics[fmt("sigma_%g", s)] = {{"c_hat_ai", t.c_hat}, {"c_hat_bessel", cb}};
        d << fmt("s=%g c_hat=%.5f ", s, cb);
    }
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    r.detail = d.str() + "(K_1/3 normalisation)";
}

void c7(const Ctx& c, CriterionResult& r) {
    const double vs = solve_mvp1_speed(Ctx::R(0.75, 0.05)).speed;
    BvpConfig cfg;
    cfg.L = 40.0;
    cfg.N = 4000;
    double e[2];
    int k = 0;
    for (double dl : {0.05, 0.01}) {
        const auto p = c.P(0.75, dl);
        const auto res = solve_evp(WaveKind::FPTW, p, std::nullopt, cfg, leading_order_guess(WaveKind::FPTW, p, vs));
        e[k++] = rel(res.profile.speed, vs);
        r.metrics[fmt("delta_%g", dl)] = {{"v", res.profile.speed}, {"rel", e[k - 1]}};
    }
    r.metrics["vstar"] = vs;
    const bool ok = e[0] < 0.1 && e[1] < e[0];
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    r.detail = fmt("v*=%.6f rel err delta=0.05: %.2f%%, delta=0.01: %.2f%%", vs, 100 * e[0], 100 * e[1]);
}

void c8(const Ctx& c, CriterionResult& r) {
    // sub-threshold part: delta small enough for the sub-threshold comparison regime
    const double dl = 4e-4;
    const auto p = c.P(0.75, dl);
    const Grid1D g(-20.0, 20.0, 801);
    SimOptions o;
    o.output_times = {20 * dl, 5.0};
    const auto sub = simulate_lds(heaviside_initial(g, 0.1, 0.5, p), p, 5.0, o);
    const auto& s20 = sub.snapshots.front();
    const double supI = *std::max_element(s20.I().begin(), s20.I().end());
    const auto& s5 = sub.snapshots.back();
    double em = 0.0;
    for (std::size_t j = 0; j < g.n; ++j) {
        em = std::max(em, std::abs(s5.M()[j] - 0.05 * std::erfc(g.x(j) / (2.0 * std::sqrt(5.0)))));
    }
    em /= 0.1;
    double t_small = std::numeric_limits<double>::quiet_NaN();
    {
        SimOptions o2;
        for (int k = 1; k <= 100; ++k) o2.output_times.push_back(k * dl);
        const auto tr = simulate_lds(heaviside_initial(g, 0.1, 0.5, p), p, 100 * dl, o2);
        for (const auto& s : tr.snapshots) {
            if (*std::max_element(s.I().begin(), s.I().end()) < 1e-6) {
                t_small = s.t / dl;
                break;
            }
        }
    }
    // propagating part
    const auto pp = c.P(0.75, 0.01);
    const double T = 200.0;
    const Grid1D gp(-10.0, 100.0, 2201);
    SimOptions op;
    for (int k = 1; k <= 100; ++k) op.output_times.push_back(T * k / 100.0);
    const auto sup = simulate_lds(heaviside_initial(gp, 0.5, 0.5, pp), pp, T, op);
    const double vs = solve_mvp1_speed(Ctx::R(0.75, 0.01)).speed;
    const double vf = track_front(sup.snapshots, kM, 0.25).fitted_speed;
    const double ev = rel(vf, vs);
    const bool a = supI < 1e-6, b = em <= 0.02, cc = ev < 0.05;
    r.metrics = {{"supI_at_20delta", supI}, {"first_t_over_delta_supI_below_1e-6", t_small},
                 {"erfc_rel_sup_t5", em}, {"front_speed", vf}, {"vstar", vs}, {"speed_rel", ev},
                 {"part_supI", a}, {"part_erfc", b}, {"part_speed", cc}};
    r.verdict = (a && b && cc) ? Verdict::Pass : Verdict::Fail;
    r.detail = fmt("sup I(20 delta)=%.2e [%s] (below 1e-6 first at %.0f delta); erfc rel=%.2e [%s]; speed %.5f vs "
                   "%.5f (%.2f%%) [%s]",
                   supI, a ? "ok" : "FAIL", t_small, em, b ? "ok" : "FAIL", vf, vs, 100 * ev, cc ? "ok" : "FAIL");
}

void c9(const Ctx& c, CriterionResult& r) {
    const auto p = c.P(4.0, 0.05, 4.0);
    const auto ref = Ctx::R(4.0, 0.05, 4.0);
    const double T = 40.0;
    const Grid1D g(-10.0, 670.0, 13601);
    SimOptions o;
    for (int k = 1; k <= 80; ++k) o.output_times.push_back(T * k / 80.0);
    const auto res = simulate_lds(heaviside_initial(g, 1.0, 0.8, p), p, T, o);
    const double vf = track_front(res.snapshots, kI, 0.3).fitted_speed;
    const double vsl = track_front(res.snapshots, kM, 0.5).fitted_speed;
    const double rl = lptw_min_speed(ref), ru = uptw_min_speed(ref);
    const auto& s = res.snapshots.back();
    const double xm = front_position(s, kM, 0.5), xi = front_position(s, kI, 0.3);
    auto at = [&](const std::vector<double>& u, double x) {
        return u[static_cast<std::size_t>(std::lround((x - g.x_min) / g.dx()))];
    };
    const double hi = at(s.I(), 0.5 * xm), lo = at(s.I(), 0.5 * (xm + xi));
    const bool ok = rel(vf, rl) < 0.1 && rel(vsl, ru) < 0.1 && rel(hi, 0.8) < 0.02 && rel(lo, 0.6) < 0.02;
    r.metrics = {{"fast", vf}, {"lower_formula", rl}, {"slow", vsl}, {"upper_formula", ru},
                 {"plateau_behind", hi}, {"plateau_between", lo}};
    r.verdict = ok ? Verdict::Pass : Verdict::Fail;
    r.detail = fmt("fast %.3f vs %.3f (%.1f%%), slow %.4f vs %.4f (%.1f%%), plateaus %.4f / %.4f", vf, rl,
                   100 * rel(vf, rl), vsl, ru, 100 * rel(vsl, ru), hi, lo);
}

void c10(const Ctx& c, CriterionResult& r) {
    const double eps = 1e-3;
    const auto p = c.P(0.75, 0.05).with_epsilon(eps);
    const Grid1D g(-20.0, 40.0, 1201);
    SimOptions o;
    for (int k = 1; k <= 10; ++k) o.output_times.push_back(k);
    const auto two = simulate_lds(heaviside_initial(g, 0.5, 0.5, p), p, 10.0, o);
    const auto four = simulate_rds(heaviside_initial(g, 0.5, 0.5, p, true), p, 10.0, o);
    double e = 0.0;
    for (std::size_t k = 0; k < two.snapshots.size(); ++k) {
        if (two.snapshots[k].t < 1.0) continue;
        for (std::size_t j = 0; j < g.n; ++j) {
            e = std::max({e, std::abs(two.snapshots[k].M()[j] - four.snapshots[k].M()[j]),
                          std::abs(two.snapshots[k].I()[j] - four.snapshots[k].I()[j])});
        }
    }
    r.metrics = {{"sup", e}, {"bound", 10 * eps}};
    r.verdict = e <= 10 * eps ? Verdict::Pass : Verdict::Fail;
    r.detail = fmt("sup |(M,I)_4D - (M,I)_2D| on [1,10] = %.2e (bound %.0e)", e, 10 * eps);
}

void c11(const Ctx& c, CriterionResult& r) {
    std::vector<std::string> failed;
    // monotonicity and bounds on converged profiles
    std::vector<std::pair<std::string, WaveProfile>> profiles;
    BvpConfig cfg;
    {
        const auto p = c.P(0.75, 0.05);
        const double vs = solve_mvp1_speed(p).speed;
        profiles.emplace_back("fptw_0.75", solve_evp(WaveKind::FPTW, p, std::nullopt, cfg,
                                                     leading_order_guess(WaveKind::FPTW, p, vs)).profile);
        profiles.emplace_back("mvp1_0.75", solve_mvp1_speed(p).profile);
    }
    profiles.emplace_back("fptw_1", min_speed_search(WaveKind::FPTW, c.P(1.0, 0.01), cfg).profile);
    profiles.emplace_back("uptw_2", min_speed_search(WaveKind::UPTW, c.P(2.0, 0.05), cfg).profile);
    profiles.emplace_back("lptw_4", min_speed_search(WaveKind::LPTW, c.P(4.0, 0.05, 4.0), cfg).profile);
    for (const auto& [name, w] : profiles) {
        const auto ref = Ctx::R(w.sigma, 0.05);
        const double cap = ref.b() * ref.sigma();
        bool ok = profile_is_monotone(w);
        for (std::size_t k = 0; k < w.z.size(); ++k) {
            ok = ok && w.M[k] >= -1e-8 && w.M[k] <= 1.0 + 1e-8 && w.I[k] >= -1e-8 && w.I[k] <= cap + 1e-8;
        }
        r.metrics["profiles"][name] = ok;
        if (!ok) failed.push_back("profile " + name);
    }
    // invariant rectangle on every snapshot
    std::size_t checked = 0, outside = 0, projected = 0;
    for (auto [s, m0, i0] : {std::tuple{0.75, 0.5, 0.5}, std::tuple{4.0, 0.9, 0.7}}) {
        const auto p = c.P(s, 0.05);
        const Grid1D g(-10.0, 40.0, 1001);
        SimOptions o;
        for (int k = 1; k <= 20; ++k) o.output_times.push_back(0.5 * k);
        const auto res = simulate_lds(heaviside_initial(g, m0, i0, p), p, 10.0, o);
        projected += res.projection_events;
        for (const auto& snap : res.snapshots) {
            for (std::size_t j = 0; j < g.n; ++j, ++checked) {
                if (!in_clipped_rectangle(snap.M()[j], snap.I()[j], p.delta(), 1e-12)) ++outside;
            }
        }
    }
    r.metrics["rectangle"] = {{"points", checked}, {"outside", outside}, {"projections", projected}};
    if (outside) failed.push_back("invariant rectangle");
    // a b = beta1 beta2
    double id = 0.0;
    for (double s = 0.05; s < 5.0; s += 0.05) {
        const auto p = c.P(s, 0.01);
        id = std::max(id, rel(p.a() * p.b(), p.beta1() * p.beta2()));
    }
    r.metrics["ab_identity"] = id;
    if (id > 1e-14) failed.push_back("a b identity");
    // continuity of the upper-family formula at sigma = 3/2
    const double below = std::nextafter(1.5, 1.0);
    const double jump = std::max(std::abs(mvp4_min_speed(1.5) - mvp4_min_speed(below)),
                                 std::abs(uptw_min_speed(c.P(1.5, 0.05)) - uptw_min_speed(c.P(below, 0.05))));
    r.metrics["continuity_jump"] = jump;
    if (jump > 1e-14) failed.push_back("continuity at 3/2");
    // small-sigma phase path checks
    const double y1 = appendix_c_leading(1.0);
    const double V = small_sigma_rescaled_speed(0.02);
    r.metrics["Y0_at_1"] = y1;
    r.metrics["V_0.02"] = V;
    if (std::abs(y1 + kV0) > 1e-14) failed.push_back("Y0(1)");
    if (rel(V, kV0) > 0.03) failed.push_back("V0");
    r.verdict = failed.empty() ? Verdict::Pass : Verdict::Fail;
    std::ostringstream d;
    d << profiles.size() << " profiles, " << checked << " snapshot points, ab err " << fmt("%.1e", id)
      << ", jump " << fmt("%.1e", jump) << ", V(0.02)=" << fmt("%.4f", V);
    for (const auto& f : failed) d << " | failed: " << f;
    r.detail = d.str();
}

constexpr const char* kTitles[kCriterionCount] = {
    "exact sigma=1 speed and logistic profile",
    "upper-family minimum speeds",
    "exact upper-family waveform at sigma=1.25",
    "lower-family speed and speed ratio",
    "cut-off FKPP asymptotic branches",
    "transition-problem constant",
    "BVP vs asymptotic full-transition speed",
    "IVP threshold behaviour",
    "two-front structure at sigma=4",
    "slow-manifold reduction",
    "property suites",
};

}  // namespace

std::vector<CriterionResult> run_validation(const ValidationOptions& opts) {
    using Fn = void (*)(const Ctx&, CriterionResult&);
    constexpr Fn fns[kCriterionCount] = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11};
    const Ctx ctx{opts.tamper};
    std::vector<CriterionResult> out;
    for (int id = 1; id <= kCriterionCount; ++id) {
        CriterionResult r;
        r.id = id;
        r.title = kTitles[id - 1];
        const bool skip = opts.skip.count(id) || (opts.fast && (id == 8 || id == 9));
        if (skip) {
            r.verdict = Verdict::Skip;
            r.detail = "skipped on request";
        } else {
            const auto t0 = std::chrono::steady_clock::now();
            try {
                fns[id - 1](ctx, r);
            } catch (const std::exception& e) {
                r.verdict = Verdict::Fail;
                r.detail = std::string("exception: ") + e.what();
            }
            r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        }
        if (opts.on_result) opts.on_result(r);
        out.push_back(std::move(r));
    }
    return out;
}

std::string format_line(const CriterionResult& r) {
    const char* tag = r.verdict == Verdict::Pass ? "PASS" : r.verdict == Verdict::Fail ? "FAIL" : "SKIP";
    return fmt("[%s] %2d %s: %s (%.1fs)", tag, r.id, r.title.c_str(), r.detail.c_str(), r.seconds);
}

json to_json(const std::vector<CriterionResult>& results) {
    json j = json::array();
    for (const auto& r : results) {
        j.push_back({{"id", r.id},
                     {"title", r.title},
                     {"verdict", r.verdict == Verdict::Pass ? "pass" : r.verdict == Verdict::Fail ? "fail" : "skip"},
                     {"detail", r.detail},
                     {"metrics", r.metrics},
                     {"seconds", r.seconds}});
    }
    return j;
}

bool all_passed(const std::vector<CriterionResult>& results) {
    return std::all_of(results.begin(), results.end(),
                       [](const CriterionResult& r) { return r.verdict != Verdict::Fail; });
}

}  // namespace ibdwaves::cli
