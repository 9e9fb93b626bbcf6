#pragma once

#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "ibdwaves/model.hpp"

namespace ibdwaves {

enum class WaveKind { FPTW, UPTW, LPTW };

std::string_view to_string(WaveKind k);

struct WaveProfile {
    std::vector<double> z;
    std::vector<double> M;
    std::vector<double> I;
    double speed = 0.0;
    WaveKind kind = WaveKind::FPTW;
    double sigma = 0.0;
    double delta = 0.0;
    double residual = 0.0;
};

// MVP1 cut-off FKPP (sigma < 1), MVP2 cubic Fisher (sigma = 1),
// MVP3 rescaled lower family, MVP4 rescaled upper family (sigma > 1).
enum class ScalarProblem { MVP1, MVP2, MVP3, MVP4 };

std::string_view to_string(ScalarProblem k);

struct ScalarProfile {
    std::vector<double> x;   // z or rescaled y
    std::vector<double> u;   // chi
    std::vector<double> du;  // chi'
    double speed = 0.0;
    ScalarProblem problem = ScalarProblem::MVP1;
};

enum class ShootClass { Undershoot, Overshoot, Connection };

struct ShootOptions {
    double displacement = 1e-8;
    double rtol = 1e-12;
    double atol = 1e-14;
    double x_cap = 2e5;       // maximum integration length
    double tail_decades = 6;  // MVP1 tail length after the cut-off, in decades
    bool want_profile = true;
};

struct ShootOutcome {
    ShootClass kind = ShootClass::Overshoot;
    double miss = 0.0;  // psi + v chi at the decision point
    bool at_cap = false;
    std::optional<ScalarProfile> profile;
};

enum class SpeedClassification { Unique, MinimumOfFamily };

struct ShootingResult {
    double speed = 0.0;
    ScalarProfile scalar;
    WaveProfile profile;
    std::pair<double, double> bracket;
    SpeedClassification classification = SpeedClassification::Unique;
    std::optional<double> analytic;
};

double scalar_reaction(ScalarProblem k, double X, const ModelParams& p);

// sigma is taken from p.
ShootOutcome shoot_phase_path(ScalarProblem k, double v, const ModelParams& p,
                              const ShootOptions& opts = {});

ShootingResult solve_mvp1_speed(const ModelParams& p, double tol = 1e-10,
                                const ShootOptions& opts = {});

ShootingResult min_speed_family(ScalarProblem k, const ModelParams& p, double tol = 1e-8,
                                const ShootOptions& opts = {});

// Connection profile at a supplied speed at or above the family minimum.
ScalarProfile family_profile(ScalarProblem k, double v, const ModelParams& p,
                             const ShootOptions& opts = {});

// Map a scalar profile to (z, M_T, I_T) using the leading-order I relation.
WaveProfile lift_profile(const ScalarProfile& s, const ModelParams& p);

enum class ExactWaveform { CubicFisherMin, UptwMin };

// CubicFisherMin takes z; UptwMin takes the rescaled coordinate y.
double exact_waveform(ExactWaveform k, const ModelParams& p, double z);

// Translate so that u crosses level at x = 0.
void align_profile(ScalarProfile& s, double level);
double crossing_position(const std::vector<double>& x, const std::vector<double>& u, double level);

// ---- transition problem ----

// Universal problem H'' = H (H - m) with H ~ c Ai(-m) as m -> -inf and
// H ~ m + c_plus Ai(m) as m -> +inf.
struct UniversalTbp {
    std::vector<double> m;
    std::vector<double> H;
    std::vector<double> dH;
    double c_hat = 0.0;         // amplitude against Ai
    double c_hat_bessel = 0.0;  // amplitude against (1/pi) sqrt(x) K_{1/3}(2/3 x^{3/2})
    double c_plus = 0.0;        // fitted right-tail amplitude
    double m_max = 0.0;
    bool truncation_warning = false;

    double eval(double m_tilde) const;
};

UniversalTbp solve_universal_tbp(double tol = 1e-13);

// Cached universal solution.
const UniversalTbp& universal_tbp();

struct TbpResult {
    double sigma = 0.0;
    double vstar = 0.0;
    double c_sigma = 0.0;
    double c_minus = 0.0;  // amplitude of Ai(-(cb)^{1/3} m)
    double c_plus = 0.0;
    double c_hat = 0.0;
    double m_scale = 0.0;  // m_tilde = m_scale * m
    double H_scale = 0.0;  // H = H_scale * H_tilde
    std::vector<double> m;
    std::vector<double> H;

    double eval(double m) const;
};

// H'' + c H (b m - H) = 0 for the given parameters.
TbpResult solve_tbp(const ModelParams& p, double vstar, double tol = 1e-13);

// Outer exponent of I_T = exp(-Phi0 / sqrt(delta_bar)) below the cut-off.
double phi0(double M, const ModelParams& p, double vstar);
double phi0_near_cutoff(double M, const ModelParams& p, double vstar);
double phi0_log_rate(const ModelParams& p, double vstar);

// Piecewise leading-order I_T(M_T) across the cut-off.
double composite_H(double M_T, const ModelParams& p, double vstar);

}  // namespace ibdwaves
