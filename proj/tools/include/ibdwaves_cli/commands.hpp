#pragma once

#include <filesystem>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibdwaves/model.hpp"

namespace ibdwaves::cli {

enum ExitCode : int { kOk = 0, kSolverFailure = 1, kUsage = 2 };

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct GlobalOptions {
    double alpha2 = 1.0;
    double beta1 = 1.0;
    double beta2 = 1.0;
    double delta = 0.05;
    double D = 1.0;
    double epsilon = 1e-3;
    std::filesystem::path out = ".";
    unsigned threads = 1;
    bool seedless_deterministic = false;

    // With sigma given, beta1 is adjusted so that alpha2/(beta1 beta2) = sigma.
    ModelParams params(std::optional<double> sigma = std::nullopt,
                       std::optional<double> delta_override = std::nullopt) const;
};

// "a:b:h", "a,b,c" or a single value. Throws UsageError on empty or malformed input.
std::vector<double> parse_values(const std::string& text);
std::vector<std::string> parse_list(const std::string& text);

struct SpeedCurveArgs {
    std::string sigma;
    std::string deltas;  // empty: global delta
    std::string methods = "shoot,asym";
};
int cmd_speed_curve(const GlobalOptions& g, const SpeedCurveArgs& a);

struct ProfileArgs {
    std::string kind = "fptw";
    double sigma = 0.75;
    std::string deltas;
    std::string methods = "bvp,asym";
};
int cmd_profile(const GlobalOptions& g, const ProfileArgs& a);

struct SimulateArgs {
    std::string model = "lds";
    double sigma = 0.75;
    double M0 = 0.5;
    double I0 = 0.5;
    double t_end = 50.0;
    double x_min = -10.0;
    double x_max = std::numeric_limits<double>::quiet_NaN();  // NaN sizes the domain from the expected speed
    double dx = 0.05;
    double dt = 0.0;
    int snapshots = 50;
};
int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a);

struct TbpArgs {
    std::string sigmas = "0.3,0.75";
};
int cmd_tbp(const GlobalOptions& g, const TbpArgs& a);

struct PhasePortraitArgs {
    double sigma = 0.75;
    double t_end = 40.0;
    int grid = 6;
};
int cmd_phase_portrait(const GlobalOptions& g, const PhasePortraitArgs& a);

struct ValidateArgs {
    std::string skip;
    bool fast = false;
    double tamper = 1.0;
};
int cmd_validate(const GlobalOptions& g, const ValidateArgs& a);

}  // namespace ibdwaves::cli
