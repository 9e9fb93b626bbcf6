#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ibdwaves/model.hpp"

namespace ibdwaves {

enum class AsymBranch { SmallSigma, NearOne };

enum class SpeedMethod { NumericShooting, NumericBVP, AsymSmallSigma, AsymNearOne, ExactFamilyMin };

std::string_view to_string(SpeedMethod m);

struct SpeedCurve {
    std::vector<double> sigma_values;
    std::vector<double> speeds;
    SpeedMethod method = SpeedMethod::NumericShooting;
    std::optional<double> delta;  // set for NumericBVP
};

// Leading-order constants of the small-sigma and near-one expansions.
inline constexpr double kV0 = 0.57735026918962576;       // sqrt(1/3)
inline constexpr double kNearOneV1 = 1.4142135623730951;  // sqrt(2)

double vstar_asym(const ModelParams& p, AsymBranch branch);

// sqrt(b(1)/2), the sigma = 1 minimum speed.
double cubic_fisher_speed(const ModelParams& p);

// Rescaled upper-family minimum speed V_m(sigma), sigma > 1.
double mvp4_min_speed(double sigma);

// Upper-family minimum speed in travelling-wave units, sigma > 1.
double uptw_min_speed(const ModelParams& p);

// Lower-family minimum speed, sigma > 1.
double lptw_min_speed(const ModelParams& p);

struct FamilySpeeds {
    std::optional<double> fptw;
    bool fptw_numeric = false;
    std::optional<double> uptw;
    std::optional<double> lptw;
};

FamilySpeeds family_min_speeds(const ModelParams& p);

// SmallSigma below 0.3, NearOne above 0.7, numeric shooting in between.
double best_vstar(const ModelParams& p);

// Leading-order small-sigma phase path.
double appendix_c_leading(double X);

// Rescaled small-sigma phase-path problem
//   dY/dX = sigma V + (1 - sigma X) X (1 - X) / Y,  Y(1) = -V (1 - sigma),
// solved for V by shooting from X = 0. Tends to kV0 as sigma -> 0.
double small_sigma_rescaled_speed(double sigma, double tol = 1e-10);

enum class TailFamily { CutoffFPTW, CubicFisher, LowerRescaled, UpperRescaled };

struct TailRates {
    double left_growth = 0.0;  // growth rate out of the saturated state
    double right_slow = 0.0;   // slower decay rate at the leading edge
    double right_fast = 0.0;   // faster decay rate at the leading edge
    bool right_algebraic = false;
    bool right_double_root = false;
};

// Rates are expressed in the variables of the corresponding scalar problem;
// v is the speed in those variables.
TailRates tail_rates(TailFamily kind, double v, const ModelParams& p);

}  // namespace ibdwaves
