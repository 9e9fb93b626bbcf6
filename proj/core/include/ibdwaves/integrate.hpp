#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ibdwaves/model.hpp"

namespace ibdwaves {

using OdeState = std::vector<double>;
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

struct OdeEvent {
    std::function<double(double t, std::span<const double> y)> fn;
    int direction = 0;  // +1 rising only, -1 falling only, 0 both
    bool terminal = true;
};

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h_initial = 0.0;  // 0 selects automatically
    double h_max = std::numeric_limits<double>::infinity();
    std::size_t max_steps = 2'000'000;
    std::vector<OdeEvent> events;
};

enum class OdeStatus { ReachedEnd, EventTriggered, StepFailure };

struct OdeSolution {
    std::vector<double> times;
    std::vector<OdeState> states;
    std::vector<OdeState> derivatives;
    OdeStatus status = OdeStatus::ReachedEnd;
    std::optional<std::size_t> event_index;
    std::string message;

    // Cubic Hermite interpolation between accepted steps.
    OdeState sample(double t) const;
    const OdeState& final_state() const { return states.back(); }
};

// Dormand-Prince 5(4) with PI step control; integrates from t0 to t1 (t1 > t0).
OdeSolution rk_adaptive(const OdeRhs& rhs, OdeState y0, double t0, double t1,
                        const OdeOptions& opts = {});

// Temporal system m' = i m (1 - m), i' = f(m, i)/delta.
OdeSolution solve_temporal_ds(double m0, double i0, const ModelParams& p, double t_end,
                              const OdeOptions& opts = {});

}  // namespace ibdwaves
