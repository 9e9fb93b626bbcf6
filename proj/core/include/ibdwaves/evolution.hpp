#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ibdwaves/model.hpp"

namespace ibdwaves {

struct Grid1D {
    double x_min = 0.0;
    double x_max = 1.0;
    std::size_t n = 2;

    Grid1D() = default;
    Grid1D(double x_min, double x_max, std::size_t n);

    double dx() const { return (x_max - x_min) / static_cast<double>(n - 1); }
    double x(std::size_t j) const { return x_min + dx() * static_cast<double>(j); }
};

enum Field : std::size_t { kM = 0, kI = 1, kRho = 2, kB = 3 };

struct FieldState {
    Grid1D grid;
    double t = 0.0;
    std::vector<std::vector<double>> fields;  // M, I[, rho, B]

    const std::vector<double>& M() const { return fields[kM]; }
    const std::vector<double>& I() const { return fields[kI]; }
};

enum class Scheme { IMEX, Explicit };

struct SimOptions {
    double dt = 0.0;  // 0 selects delta/20
    Scheme scheme = Scheme::IMEX;
    std::vector<double> output_times;  // snapshot times; t_end is always included
    std::function<void(const std::string&)> log;  // diagnostics sink, may be empty
    double front_margin = 10.0;
};

struct SimulationResult {
    std::vector<FieldState> snapshots;
    std::size_t projection_events = 0;
    std::size_t boundary_warnings = 0;
    std::size_t steps = 0;
};

// Heaviside data (M0 H(-x), I0 H(-x)) as a one-cell ramp across x = 0. With
// four_component the (rho, B) fields start on the slow manifold unless
// rho0/B0 are supplied as non-negative values.
FieldState heaviside_initial(const Grid1D& grid, double M0, double I0, const ModelParams& p,
                             bool four_component = false, double rho0 = -1.0, double B0 = -1.0);

SimulationResult simulate_lds(const FieldState& init, const ModelParams& p, double t_end,
                              const SimOptions& opts = {});

SimulationResult simulate_rds(const FieldState& init, const ModelParams& p, double t_end,
                              const SimOptions& opts = {});

// Scalar FKPP u_t = u_xx + u(1 - u) on the same grid (comparison solution).
SimulationResult simulate_fkpp(const FieldState& init, double t_end, const SimOptions& opts = {});

struct FrontTrace {
    double level = 0.0;
    std::vector<double> times;
    std::vector<double> positions;
    double fitted_speed = 0.0;
    double fit_window = 0.5;
};

FrontTrace track_front(const std::vector<FieldState>& snapshots, Field field, double level,
                       double fit_window = 0.5);

// Rightmost crossing of level, NaN when the field does not cross it.
double front_position(const FieldState& s, Field field, double level);

enum class BoundsRegime { SubThreshold, SuperThreshold };

struct BoundCheck {
    std::string name;
    double max_violation = 0.0;  // positive when the inequality fails somewhere
    std::size_t points = 0;
};

struct BoundsReport {
    BoundsRegime regime = BoundsRegime::SubThreshold;
    double c_M0 = 0.0;
    std::vector<BoundCheck> checks;

    double worst() const;
};

// c(M0, sigma) = beta1 beta2 ((1 - sigma) - M0) / (2 (alpha2 + beta2)).
double threshold_decay_constant(double M0, const ModelParams& p);

// Threshold mass M_a = M0 + ((1 - sigma) - M0)/2.
double threshold_mass(double M0, const ModelParams& p);

BoundsRegime bounds_regime(double M0, const ModelParams& p);

// Evaluate the pointwise comparison bounds on every snapshot with t >= t_min.
// The super-threshold check runs its own FKPP comparison on the snapshot grid.
BoundsReport check_appendix_bounds(const std::vector<FieldState>& snapshots, const ModelParams& p,
                                   double M0, double I0, BoundsRegime regime, double t_min = 0.0);

}  // namespace ibdwaves
