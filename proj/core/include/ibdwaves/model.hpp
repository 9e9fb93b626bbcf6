#pragma once

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace ibdwaves {

// Dimensionless parameters of the reduced and full models. sigma is always
// derived from (alpha2, beta1, beta2).
class ModelParams {
public:
    ModelParams(double alpha2, double beta1, double beta2, double delta, double D = 1.0,
                double epsilon = 1e-3, double D_rho = 1.0, double D_B = 1.0);

    // alpha2 and beta2 fixed, beta1 = alpha2 / (sigma * beta2).
    static ModelParams from_sigma(double sigma, double delta, double D = 1.0,
                                  double alpha2 = 1.0, double beta2 = 1.0);

    double alpha2() const { return alpha2_; }
    double beta1() const { return beta1_; }
    double beta2() const { return beta2_; }
    double delta() const { return delta_; }
    double D() const { return D_; }
    double epsilon() const { return epsilon_; }
    double D_rho() const { return D_rho_; }
    double D_B() const { return D_B_; }

    double sigma() const { return alpha2_ / (beta1_ * beta2_); }
    double a() const { return beta1_ * (beta2_ * sigma() + alpha2_); }
    double b() const { return beta2_ / (beta2_ * sigma() + alpha2_); }
    double delta_bar() const { return D_ * delta_; }

    ModelParams with_sigma(double sigma) const;
    ModelParams with_delta(double delta) const;
    ModelParams with_D(double D) const;
    ModelParams with_epsilon(double epsilon) const;

    // Throws ParameterError unless epsilon < delta.
    void require_fast_regime() const;

private:
    double alpha2_, beta1_, beta2_, delta_, D_, epsilon_, D_rho_, D_B_;
};

struct DerivedCoeffs {
    double sigma = 0.0;
    double a_sigma = 0.0;
    double b_sigma = 0.0;
    std::optional<double> gamma_sigma;
    std::optional<double> C_sigma_delta;
    std::optional<double> c_transition;
};

// c_transition is filled only when sigma < 1 and vstar is supplied.
DerivedCoeffs derived_coeffs(const ModelParams& p, std::optional<double> vstar = std::nullopt);

// c(sigma) of the transition problem.
double transition_coefficient(const ModelParams& p, double vstar);

enum class EquilibriumKind { ContinuumE, FullySaturatedEF, TransitionalET };

enum class Stability {
    DegenerateStableNode,
    DegenerateUnstableNode,
    DegenerateTransition,
    HyperbolicStableNode,
    HyperbolicSaddle
};

struct Equilibrium {
    double m = 0.0;
    double i = 0.0;
    EquilibriumKind kind = EquilibriumKind::ContinuumE;
    Stability stability = Stability::DegenerateStableNode;
};

std::string_view to_string(EquilibriumKind k);
std::string_view to_string(Stability s);

struct Rates2 {
    double F_M;
    double F_I;
};

using State4 = std::array<double, 4>;

// f(M, I) of the reduced immune equation (without the 1/delta factor).
double immune_reaction(double M, double I, const ModelParams& p);

Rates2 reaction_lds(double M, double I, const ModelParams& p);
State4 reaction_rds(const State4& state, const ModelParams& p);

double slow_manifold_B(double M, double I, const ModelParams& p);

// X H0(X) (1 - X) with the leading-order cut-off H0.
double cutoff_reaction(double X, double sigma, const ModelParams& p);

double slow_manifold_S(double m, const ModelParams& p);

Equilibrium continuum_equilibrium(double m_e, const ModelParams& p);
Equilibrium full_equilibrium(const ModelParams& p);
std::optional<Equilibrium> transitional_equilibrium(const ModelParams& p);

// Representative continuum points (m_e = 0, the split 1 - sigma when inside,
// 1 - delta) followed by e_F and, for sigma > 1, e_T.
std::vector<Equilibrium> equilibria(const ModelParams& p);

// Membership of the clipped rectangle R(delta), with slack tol.
bool in_clipped_rectangle(double M, double I, double delta, double tol = 0.0);

// Nearest admissible point of R(delta); returns true when a move was needed.
bool project_to_clipped_rectangle(double& M, double& I, double delta);

}  // namespace ibdwaves
