#pragma once

#include <array>
#include <optional>
#include <vector>

#include "ibdwaves/model.hpp"
#include "ibdwaves/scalarwaves.hpp"

namespace ibdwaves {

struct BvpConfig {
    double L = 30.0;
    int N = 5000;
    double rtol = 1e-13;
    double atol = 1e-10;  // Newton residual target (max norm)
    int max_newton_iters = 60;

    void validate() const;
};

enum class Side { Left, Right };

// Linear conditions w . (M - M_e, M', I - I_e, I') = 0 at one end of the
// domain, removing the eigen-directions the wave may not use there.
struct BoundaryOperator {
    Side side = Side::Left;
    std::vector<std::array<double, 4>> rows;
    std::vector<double> eigenvalues_M;  // roots of the M block (real)
    std::vector<double> eigenvalues_I;  // roots of the I block (real)
    std::vector<double> suppressed;
    // U' = Lambda U with U = (M - M_e, I - I_e); present when two rows are
    // imposed and the derivative part is invertible.
    std::optional<std::array<double, 4>> lambda;  // row-major 2x2
};

BoundaryOperator linearized_bc(const Equilibrium& eq, Side side, WaveKind kind, double v,
                               const ModelParams& p);

struct SolveForSpeed {};

struct EvpResult {
    WaveProfile profile;
    int newton_iterations = 0;
    bool monotone = false;
};

// Solve the travelling-wave boundary-value problem on [-L, L]. With
// speed == nullopt the speed is an unknown closed by the phase condition.
EvpResult solve_evp(WaveKind kind, const ModelParams& p, std::optional<double> speed,
                    const BvpConfig& cfg, const WaveProfile& guess);

// Leading-order profile used to seed the Newton iteration.
WaveProfile leading_order_guess(WaveKind kind, const ModelParams& p, double speed);

// Discrete derivative one-signed (non-increasing) on the interior 90% of the
// grid up to tol, and no component below -tol.
bool profile_is_monotone(const WaveProfile& w, double tol = 1e-8);

struct MinSpeedResult {
    double v_m = 0.0;
    WaveProfile profile;
    double bracket_lo = 0.0;  // largest failing speed seen
    double bracket_hi = 0.0;  // smallest monotone speed
    int solves = 0;
};

// kind FPTW requires sigma = 1.
MinSpeedResult min_speed_search(WaveKind kind, const ModelParams& p, const BvpConfig& cfg,
                                double rel_tol = 1e-4);

double wave_height_ratio(double sigma);

}  // namespace ibdwaves
