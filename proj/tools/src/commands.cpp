#include "ibdwaves_cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ibdwaves/asymptotics.hpp"
#include "ibdwaves/errors.hpp"
#include "ibdwaves/evolution.hpp"
#include "ibdwaves/integrate.hpp"
#include "ibdwaves/scalarwaves.hpp"
#include "ibdwaves/systemwaves.hpp"
#include "ibdwaves_cli/csv.hpp"
#include "ibdwaves_cli/manifest.hpp"
#include "ibdwaves_cli/pool.hpp"
#include "ibdwaves_cli/svg.hpp"
#include "ibdwaves_cli/validation.hpp"

namespace ibdwaves::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

json global_json(const GlobalOptions& g) {
    return {{"alpha2", g.alpha2}, {"beta1", g.beta1},         {"beta2", g.beta2},
            {"delta", g.delta},   {"D", g.D},                 {"epsilon", g.epsilon},
            {"threads", g.threads}, {"seedless_deterministic", g.seedless_deterministic}};
}

void prepare(const fs::path& out) {
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw UsageError("cannot create output directory " + out.string());
}

std::string tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
}

double shift_anchor(const WaveProfile& w) {
    if (w.kind == WaveKind::LPTW) {
        const double top = *std::max_element(w.I.begin(), w.I.end());
        return crossing_position(w.z, w.I, 0.5 * top);
    }
    const double level = (w.kind == WaveKind::FPTW && w.sigma < 1.0) ? 1.0 - w.sigma : 0.5;
    return crossing_position(w.z, w.M, level);
}

}  // namespace

ModelParams GlobalOptions::params(std::optional<double> sigma, std::optional<double> delta_override) const {
    ModelParams p(alpha2, beta1, beta2, delta_override.value_or(delta), D, epsilon);
    return sigma ? p.with_sigma(*sigma) : p;
}

std::vector<double> parse_values(const std::string& text) {
    std::vector<double> out;
    auto to_d = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw UsageError("malformed number '" + s + "'");
        }
        if (used != s.size()) throw UsageError("malformed number '" + s + "'");
        return v;
    };
    if (text.find(':') != std::string::npos) {
        std::vector<double> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ':')) parts.push_back(to_d(item));
        if (parts.size() != 3 || !(parts[2] > 0.0)) throw UsageError("range must be start:stop:step with step > 0");
        const long n = std::lround(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
        for (long k = 0; k <= n; ++k) out.push_back(parts[0] + static_cast<double>(k) * parts[2]);
    } else {
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (!item.empty()) out.push_back(to_d(item));
        }
    }
    if (out.empty()) throw UsageError("empty value list '" + text + "'");
    return out;
}

std::vector<std::string> parse_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    if (out.empty()) throw UsageError("empty list");
    return out;
}

// ---------------------------------------------------------------- speed-curve

namespace {

struct SpeedJob {
    double sigma;
    std::string method;
    std::optional<double> delta;
};

struct SpeedRow {
    double sigma;
    double v;
    std::string label;
    std::optional<double> delta;
    std::string error;
};

std::vector<SpeedRow> speed_point(const GlobalOptions& g, const SpeedJob& job) {
    std::vector<SpeedRow> rows;
    auto fail = [&](const std::string& label, const std::string& what) {
        rows.push_back({job.sigma, kNaN, label, job.delta, what});
    };
    try {
        const auto p = g.params(job.sigma, job.delta);
        const double s = job.sigma;
        if (job.method == "shoot") {
            double v;
            if (s < 1.0) {
                v = solve_mvp1_speed(p).speed;
            } else if (s == 1.0) {
                v = min_speed_family(ScalarProblem::MVP2, p).speed;
            } else {
                v = min_speed_family(ScalarProblem::MVP4, p).profile.speed;
            }
            rows.push_back({s, v, "shoot", std::nullopt, ""});
        } else if (job.method == "asym") {
            if (s < 1.0) {
                // each branch on its own half of (0, 1)
                if (s <= 0.5) {
                    rows.push_back({s, vstar_asym(p, AsymBranch::SmallSigma),
                                    std::string(to_string(SpeedMethod::AsymSmallSigma)), std::nullopt, ""});
                }
                if (s >= 0.5) {
                    rows.push_back({s, vstar_asym(p, AsymBranch::NearOne),
                                    std::string(to_string(SpeedMethod::AsymNearOne)), std::nullopt, ""});
                }
            } else {
                rows.push_back({s, s == 1.0 ? cubic_fisher_speed(p) : uptw_min_speed(p),
                                std::string(to_string(SpeedMethod::ExactFamilyMin)), std::nullopt, ""});
            }
        } else if (job.method == "exact") {
            if (s >= 1.0) {
                rows.push_back({s, s == 1.0 ? cubic_fisher_speed(p) : uptw_min_speed(p),
                                std::string(to_string(SpeedMethod::ExactFamilyMin)), std::nullopt, ""});
            }
        } else {
            BvpConfig cfg;
            double v;
            if (s < 1.0) {
                const double vs = solve_mvp1_speed(p).speed;
                v = solve_evp(WaveKind::FPTW, p, std::nullopt, cfg, leading_order_guess(WaveKind::FPTW, p, vs))
                        .profile.speed;
            } else {
                v = min_speed_search(s == 1.0 ? WaveKind::FPTW : WaveKind::UPTW, p, cfg).v_m;
            }
            rows.push_back({s, v, "bvp", job.delta, ""});
        }
    } catch (const std::exception& e) {
        fail(job.method == "bvp" ? "bvp" : job.method, e.what());
    }
    return rows;
}

}  // namespace

int cmd_speed_curve(const GlobalOptions& g, const SpeedCurveArgs& a) {
    const auto sigmas = parse_values(a.sigma);
    const auto deltas = a.deltas.empty() ? std::vector<double>{g.delta} : parse_values(a.deltas);
    const auto methods = parse_list(a.methods);
    for (const auto& m : methods) {
        if (m != "shoot" && m != "bvp" && m != "asym" && m != "exact") throw UsageError("unknown method " + m);
    }
    for (double s : sigmas) {
        if (!(s > 0.0)) throw UsageError("sigma values must be positive");
    }
    prepare(g.out);
    std::vector<SpeedJob> jobs;
    for (double s : sigmas) {
        for (const auto& m : methods) {
            if (m == "bvp") {
                for (double d : deltas) jobs.push_back({s, m, d});
            } else {
                jobs.push_back({s, m, std::nullopt});
            }
        }
    }
    const auto results = parallel_map(jobs.size(), g.threads, [&](std::size_t k) { return speed_point(g, jobs[k]); });

    json params = global_json(g);
    params["sigma"] = a.sigma;
    params["deltas"] = deltas;
    params["methods"] = methods;
    RunManifest man("speed-curve", params);
    const auto csv = g.out / "speed_curve.csv";
    std::size_t good = 0, bad = 0;
    {
        CsvWriter w(csv, {"sigma", "v", "method", "delta"});
        for (const auto& rows : results) {
            for (const auto& r : rows) {
                w.row({r.sigma, r.v, r.label, r.delta ? format_number(*r.delta) : std::string()});
                if (r.error.empty()) {
                    ++good;
                } else {
                    ++bad;
                    man.add_failure({{"sigma", r.sigma}, {"method", r.label}, {"error", r.error}});
                    std::cerr << "speed-curve: sigma=" << r.sigma << " " << r.label << " failed: " << r.error << '\n';
                }
            }
        }
    }
    man.add_output(csv);
    const auto svg = g.out / "speed_curve.svg";
    plot_csv(csv, svg, {"Propagation speed", "sigma", {"v"}, {"method", "delta"}, "sigma", "v", true});
    man.add_output(svg);
    man.write(g.out);
    std::cout << "speed-curve: " << good << " points, " << bad << " failures -> " << csv.string() << '\n';
    return good == 0 ? kSolverFailure : kOk;
}

// ---------------------------------------------------------------- profile

int cmd_profile(const GlobalOptions& g, const ProfileArgs& a) {
    WaveKind kind;
    if (a.kind == "fptw") {
        kind = WaveKind::FPTW;
    } else if (a.kind == "uptw") {
        kind = WaveKind::UPTW;
    } else if (a.kind == "lptw") {
        kind = WaveKind::LPTW;
    } else {
        throw UsageError("kind must be fptw, uptw or lptw");
    }
    const double s = a.sigma;
    if (kind == WaveKind::FPTW && s > 1.0) throw UsageError("fptw requires sigma <= 1");
    if (kind != WaveKind::FPTW && s <= 1.0) throw UsageError("uptw/lptw require sigma > 1");
    const auto deltas = a.deltas.empty() ? std::vector<double>{g.delta} : parse_values(a.deltas);
    const auto methods = parse_list(a.methods);
    for (const auto& m : methods) {
        if (m != "bvp" && m != "shoot" && m != "asym") throw UsageError("unknown method " + m);
    }
    prepare(g.out);
    json params = global_json(g);
    params["kind"] = a.kind;
    params["sigma"] = s;
    params["deltas"] = deltas;
    params["methods"] = methods;
    RunManifest man("profile", params);

    const std::string stem = "profile_" + a.kind + "_sigma" + tag(s);
    const auto combined = g.out / (stem + ".csv");
    int failures = 0;
    {
    CsvWriter all(combined, {"method", "delta", "z", "M_T", "I_T"});
    for (double d : deltas) {
        const auto p = g.params(s, d);
        double speed_hint = 0.0;
        if (kind == WaveKind::FPTW) {
            speed_hint = s < 1.0 ? solve_mvp1_speed(p).speed : cubic_fisher_speed(p);
        } else {
            speed_hint = kind == WaveKind::UPTW ? uptw_min_speed(p) : lptw_min_speed(p);
        }
        for (const auto& m : methods) {
            WaveProfile w;
            try {
                if (m == "bvp") {
                    BvpConfig cfg;
                    if (kind == WaveKind::FPTW && s < 1.0) {
                        w = solve_evp(kind, p, std::nullopt, cfg, leading_order_guess(kind, p, speed_hint)).profile;
                    } else {
                        w = min_speed_search(kind, p, cfg).profile;
                    }
                } else if (m == "shoot") {
                    if (kind == WaveKind::FPTW) {
                        w = s < 1.0 ? solve_mvp1_speed(p).profile : min_speed_family(ScalarProblem::MVP2, p).profile;
                    } else {
                        w = min_speed_family(kind == WaveKind::UPTW ? ScalarProblem::MVP4 : ScalarProblem::MVP3, p)
                                .profile;
                    }
                } else {
                    w = leading_order_guess(kind, p, speed_hint);
                }
            } catch (const SolverError& e) {
                ++failures;
                man.add_failure({{"delta", d}, {"method", m}, {"error", e.what()}});
                std::cerr << "profile: delta=" << d << " " << m << " failed: " << e.what() << '\n';
                continue;
            }
            const double z0 = shift_anchor(w);
            const auto file = g.out / (stem + "_delta" + tag(d) + "_" + m + ".csv");
            {
                CsvWriter one(file, {"z", "M_T", "I_T"});
                for (std::size_t k = 0; k < w.z.size(); ++k) {
                    one.row({w.z[k] - z0, w.M[k], w.I[k]});
                    all.row({m, d, w.z[k] - z0, w.M[k], w.I[k]});
                }
            }
            man.add_output(file);
            if (kind == WaveKind::FPTW && s < 1.0 && m == "bvp") {
                // zoom on the transition region around M_T = 1 - sigma
                const auto zoom = g.out / (stem + "_delta" + tag(d) + "_transition.csv");
                {
                    CsvWriter zw(zoom, {"M_T", "I_T_numeric", "I_T_leading", "I_T_uniform"});
                    const double cut = 1.0 - s, win = 0.5 * std::min(cut, s);
                    for (std::size_t k = w.z.size(); k-- > 0;) {
                        if (std::abs(w.M[k] - cut) > win) continue;
                        zw.row({w.M[k], w.I[k], p.b() * std::max(0.0, w.M[k] - cut),
                                composite_H(std::clamp(w.M[k], 0.0, 1.0), p, speed_hint)});
                    }
                }
                const auto zsvg = g.out / (stem + "_delta" + tag(d) + "_transition.svg");
                plot_csv(zoom, zsvg, {"transition region, delta=" + tag(d), "M_T",
                                      {"I_T_numeric", "I_T_leading", "I_T_uniform"}, {}, "M_T", "I_T"});
                man.add_output(zoom);
                man.add_output(zsvg);
            }
        }
    }
    }
    man.add_output(combined);
    for (const char* col : {"M_T", "I_T"}) {
        const auto svg = g.out / (stem + "_" + col + ".svg");
        plot_csv(combined, svg, {a.kind + " profiles, sigma=" + tag(s), "z", {col}, {"method", "delta"}, "z", col});
        man.add_output(svg);
    }
    man.write(g.out);
    std::cout << "profile: wrote " << combined.string() << '\n';
    return failures == static_cast<int>(deltas.size() * methods.size()) ? kSolverFailure : kOk;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a) {
    if (a.model != "lds" && a.model != "rds") throw UsageError("model must be lds or rds");
    if (!(a.t_end > 0.0) || !(a.dx > 0.0) || a.snapshots < 1) throw UsageError("t_end, dx and snapshots must be positive");
    const auto p = g.params(a.sigma);
    const double s = p.sigma();
    const bool four = a.model == "rds";

    double v_guess = 0.0;
    if (s > 1.0) {
        v_guess = lptw_min_speed(p);
    } else if (a.M0 > 1.0 - s) {
        v_guess = s == 1.0 ? cubic_fisher_speed(p) : best_vstar(p);
    }
    const double x_max = std::isfinite(a.x_max) ? a.x_max : std::max(40.0, a.x_min + 1.1 * v_guess * a.t_end + 30.0);
    if (!(x_max > a.x_min)) throw UsageError("x_max must exceed x_min");
    const auto n = static_cast<std::size_t>(std::lround((x_max - a.x_min) / a.dx)) + 1;
    const Grid1D grid(a.x_min, x_max, n);
    const auto init = heaviside_initial(grid, a.M0, a.I0, p, four);

    SimOptions o;
    o.dt = a.dt;
    for (int k = 1; k <= a.snapshots; ++k) o.output_times.push_back(a.t_end * k / a.snapshots);
    std::vector<std::string> log;
    o.log = [&log](const std::string& m) {
        if (log.size() < 200) log.push_back(m);
    };
    const auto res = four ? simulate_rds(init, p, a.t_end, o) : simulate_lds(init, p, a.t_end, o);

    prepare(g.out);
    json params = global_json(g);
    params.update({{"model", a.model}, {"sigma", s}, {"M0", a.M0}, {"I0", a.I0}, {"t_end", a.t_end},
                   {"x_min", a.x_min}, {"x_max", x_max}, {"dx", grid.dx()}, {"dt", a.dt}, {"snapshots", a.snapshots}});
    RunManifest man("simulate", params);

    const auto snaps = g.out / "snapshots.csv";
    {
        std::vector<std::string> head = {"t", "x", "M", "I"};
        if (four) head.insert(head.end(), {"rho", "B"});
        CsvWriter w(snaps, head);
        for (const auto& st : res.snapshots) {
            for (std::size_t j = 0; j < grid.n; ++j) {
                std::vector<Cell> row = {st.t, grid.x(j), st.M()[j], st.I()[j]};
                if (four) {
                    row.emplace_back(st.fields[kRho][j]);
                    row.emplace_back(st.fields[kB][j]);
                }
                w.row(row);
            }
        }
    }
    man.add_output(snaps);

    json report;
    const double thresh = std::max(1.0 - s, 0.0);
    double maxM = 0.0;
    for (const auto& st : res.snapshots) maxM = std::max(maxM, *std::max_element(st.M().begin(), st.M().end()));
    const double top_I = s > 1.0 ? p.b() * (s - 1.0) : p.b() * s;
    std::vector<std::pair<Field, double>> levels = {{kM, 0.5}, {kI, 0.5 * top_I}};
    if (a.M0 == 0.0) {
        report["status"] = "no mutant: M stays 0";
        report["M_stays_zero"] = maxM == 0.0;
        if (s > 1.0) report["structure"] = "single lower-family front";
    } else if (a.M0 <= thresh) {
        report["status"] = "no propagation: below threshold max(1-sigma,0)";
    } else {
        report["status"] = "propagation";
    }
    report["threshold"] = thresh;

    const auto fronts = g.out / "fronts.csv";
    json fitted = json::object();
    {
        CsvWriter w(fronts, {"t", "field", "level", "position"});
        for (auto [f, lvl] : levels) {
            const auto tr = track_front(res.snapshots, f, lvl);
            const std::string name = f == kM ? "M" : "I";
            for (std::size_t k = 0; k < tr.times.size(); ++k) w.row({tr.times[k], name, lvl, tr.positions[k]});
            fitted[name] = {{"level", lvl}, {"speed", tr.times.size() >= 2 ? json(tr.fitted_speed) : json(nullptr)}};
        }
    }
    man.add_output(fronts);
    report["fitted_speeds"] = fitted;
    if (report["status"] == "propagation") {
        try {
            if (s < 1.0) {
                report["reference_speed"] = {{"vstar", solve_mvp1_speed(p).speed}};
            } else if (s == 1.0) {
                report["reference_speed"] = {{"vstar", cubic_fisher_speed(p)}};
            } else {
                report["reference_speed"] = {{"upper", uptw_min_speed(p)}, {"lower", lptw_min_speed(p)}};
            }
        } catch (const std::exception& e) {
            report["reference_speed"] = {{"error", e.what()}};
        }
    } else if (s > 1.0) {
        report["reference_speed"] = {{"lower", lptw_min_speed(p)}};
    }
    if (!four) {
        try {
            const auto regime = bounds_regime(a.M0, p);
            const auto b = check_appendix_bounds(res.snapshots, p, a.M0, a.I0, regime);
            json checks = json::array();
            for (const auto& c : b.checks) {
                checks.push_back({{"name", c.name}, {"max_violation", c.max_violation}, {"points", c.points}});
            }
            report["bounds"] = {{"regime", regime == BoundsRegime::SubThreshold ? "sub-threshold" : "super-threshold"},
                                {"c_M0", b.c_M0},
                                {"threshold_mass", threshold_mass(a.M0, p)},
                                {"checks", checks}};
        } catch (const RegimeMismatch& e) {
            report["bounds"] = {{"regime", "not applicable"}, {"reason", e.what()}};
        }
    }
    report["projection_events"] = res.projection_events;
    report["boundary_warnings"] = res.boundary_warnings;
    report["steps"] = res.steps;
    report["log"] = log;
    const auto rep = g.out / "report.json";
    write_json(rep, report);
    man.add_output(rep);

    for (const char* col : {"M", "I"}) {
        const auto svg = g.out / (std::string("snapshots_") + col + ".svg");
        PlotSpec ps{std::string(col) + "(x, t)", "x", {col}, {"t"}, "x", col};
        ps.max_groups = 8;
        plot_csv(snaps, svg, ps);
        man.add_output(svg);
    }
    const auto fsvg = g.out / "fronts.svg";
    plot_csv(fronts, fsvg, {"front positions", "t", {"position"}, {"field"}, "t", "x", true});
    man.add_output(fsvg);
    man.write(g.out);
    std::cout << "simulate: " << report["status"].get<std::string>() << "; fitted " << fitted.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------- tbp

int cmd_tbp(const GlobalOptions& g, const TbpArgs& a) {
    const auto sigmas = parse_values(a.sigmas);
    for (double s : sigmas) {
        if (!(s > 0.0 && s < 1.0)) throw UsageError("tbp sigma values must lie in (0,1)");
    }
    prepare(g.out);
    json params = global_json(g);
    params["sigmas"] = sigmas;
    RunManifest man("tbp", params);
    const auto& u = universal_tbp();
    const auto csv = g.out / "tbp_universal.csv";
    {
        CsvWriter w(csv, {"m", "H", "dH", "outer"});
        for (std::size_t k = 0; k < u.m.size(); ++k) {
            if (u.m[k] >= -8.0) w.row({u.m[k], u.H[k], u.dH[k], std::max(0.0, u.m[k])});
        }
    }
    man.add_output(csv);
    json j = {{"c_hat_ai", u.c_hat},
              {"c_hat_bessel", u.c_hat_bessel},
              {"c_plus", u.c_plus},
              {"m_max", u.m_max},
              {"truncation_warning", u.truncation_warning},
              {"dH_at_0", 0.0}};
    {
        const auto it = std::lower_bound(u.m.begin(), u.m.end(), 0.0);
        const auto k = static_cast<std::size_t>(it - u.m.begin());
        if (k > 0 && k < u.m.size()) {
            const double w = -u.m[k - 1] / (u.m[k] - u.m[k - 1]);
            j["dH_at_0"] = (1.0 - w) * u.dH[k - 1] + w * u.dH[k];
        }
    }
    j["per_sigma"] = json::array();
    for (double s : sigmas) {
        const auto p = g.params(s);
        const double vs = solve_mvp1_speed(p).speed;
        const auto t = solve_tbp(p, vs);
        j["per_sigma"].push_back({{"sigma", s},
                                  {"vstar", vs},
                                  {"c_sigma", t.c_sigma},
                                  {"c_hat_ai", t.c_hat},
                                  {"c_hat_bessel", t.c_hat / std::sqrt(3.0)},
                                  {"c_minus", t.c_minus},
                                  {"c_plus", t.c_plus}});
    }
    const auto js = g.out / "tbp.json";
    write_json(js, j);
    man.add_output(js);
    const auto svg = g.out / "tbp_universal.svg";
    plot_csv(csv, svg, {"transition problem", "m", {"H", "outer"}, {}, "m", "H"});
    man.add_output(svg);
    man.write(g.out);
    std::printf("tbp: c_hat = %.10f (Ai), %.10f (K_1/3), c_plus = %.6f\n", u.c_hat, u.c_hat_bessel, u.c_plus);
    return kOk;
}

// ---------------------------------------------------------------- phase-portrait

int cmd_phase_portrait(const GlobalOptions& g, const PhasePortraitArgs& a) {
    if (a.grid < 2 || !(a.t_end > 0.0)) throw UsageError("grid must be >= 2 and t_end positive");
    const auto p = g.params(a.sigma);
    prepare(g.out);
    json params = global_json(g);
    params.update({{"sigma", a.sigma}, {"t_end", a.t_end}, {"grid", a.grid}});
    RunManifest man("phase-portrait", params);

    std::vector<std::pair<double, double>> starts;
    for (int i = 0; i < a.grid; ++i) {
        for (int k = 0; k < a.grid; ++k) {
            const double m = 0.02 + 0.96 * i / (a.grid - 1), in = 0.02 + 0.96 * k / (a.grid - 1);
            if (in_clipped_rectangle(m, in, p.delta())) starts.emplace_back(m, in);
        }
    }
    struct Traj {
        std::vector<double> t, m, i;
        std::string error;
    };
    const auto trajs = parallel_map(starts.size(), g.threads, [&](std::size_t k) {
        Traj tr;
        try {
            const auto sol = solve_temporal_ds(starts[k].first, starts[k].second, p, a.t_end);
            const int samples = 400;
            for (int q = 0; q <= samples; ++q) {
                // geometric spacing resolves the fast O(delta) transient
                const double t = q == 0 ? 0.0 : a.t_end * std::pow(1e-4, 1.0 - static_cast<double>(q) / samples);
                if (t > sol.times.back()) break;
                const auto y = sol.sample(t);
                tr.t.push_back(t);
                tr.m.push_back(y[0]);
                tr.i.push_back(y[1]);
            }
        } catch (const std::exception& e) {
            tr.error = e.what();
        }
        return tr;
    });
    const auto csv = g.out / "phase_portrait.csv";
    int failures = 0;
    {
        CsvWriter w(csv, {"traj", "t", "m", "i"});
        for (std::size_t k = 0; k < trajs.size(); ++k) {
            if (!trajs[k].error.empty()) {
                ++failures;
                man.add_failure({{"m0", starts[k].first}, {"i0", starts[k].second}, {"error", trajs[k].error}});
                continue;
            }
            for (std::size_t q = 0; q < trajs[k].t.size(); ++q) {
                w.row({std::to_string(k), trajs[k].t[q], trajs[k].m[q], trajs[k].i[q]});
            }
        }
    }
    man.add_output(csv);
    const auto eq = g.out / "equilibria.csv";
    {
        CsvWriter w(eq, {"m", "i", "kind", "stability"});
        for (const auto& e : equilibria(p)) {
            w.row({e.m, e.i, std::string(to_string(e.kind)), std::string(to_string(e.stability))});
        }
    }
    man.add_output(eq);
    const auto svg = g.out / "phase_portrait.svg";
    PlotSpec ps{"(m, i) trajectories, sigma=" + tag(p.sigma()), "m", {"i"}, {"traj"}, "m", "i"};
    ps.legend = false;
    plot_csv(csv, svg, ps);
    man.add_output(svg);
    man.write(g.out);
    std::cout << "phase-portrait: " << trajs.size() - failures << " trajectories\n";
    return failures == static_cast<int>(trajs.size()) ? kSolverFailure : kOk;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const GlobalOptions& g, const ValidateArgs& a) {
    ValidationOptions o;
    if (!a.skip.empty()) {
        for (double v : parse_values(a.skip)) {
            const int id = static_cast<int>(v);
            if (id != v || id < 1 || id > kCriterionCount) throw UsageError("skip ids must be 1..11");
            o.skip.insert(id);
        }
    }
    if (!(a.tamper > 0.0)) throw UsageError("tamper factor must be positive");
    o.fast = a.fast;
    o.tamper = a.tamper;
    o.on_result = [](const CriterionResult& r) { std::cout << format_line(r) << std::endl; };
    const auto results = run_validation(o);
    prepare(g.out);
    json params = global_json(g);
    params.update({{"skip", a.skip}, {"fast", a.fast}, {"tamper", a.tamper}});
    RunManifest man("validate", params);
    const bool ok = all_passed(results);
    const auto path = g.out / "validation.json";
    write_json(path, {{"passed", ok}, {"criteria", to_json(results)}});
    man.add_output(path);
    man.write(g.out);
    std::cout << (ok ? "validate: all criteria passed" : "validate: at least one criterion failed") << '\n';
    return ok ? kOk : kSolverFailure;
}

}  // namespace ibdwaves::cli
