#include "ibdwaves/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ibdwaves/errors.hpp"

namespace ibdwaves {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw ParameterError(std::string(name) + " must be finite and positive");
    }
}

void require_unit_square(double M, double I) {
    if (!(M >= 0.0 && M <= 1.0 && I >= 0.0 && I <= 1.0)) {
        throw DomainError("state (M, I) outside [0,1]^2");
    }
}

}  // namespace

ModelParams::ModelParams(double alpha2, double beta1, double beta2, double delta, double D,
                         double epsilon, double D_rho, double D_B)
    : alpha2_(alpha2), beta1_(beta1), beta2_(beta2), delta_(delta), D_(D),
      epsilon_(epsilon), D_rho_(D_rho), D_B_(D_B) {
    require_positive(alpha2, "alpha2");
    require_positive(beta1, "beta1");
    require_positive(beta2, "beta2");
    require_positive(delta, "delta");
    require_positive(D, "D");
    require_positive(epsilon, "epsilon");
    require_positive(D_rho, "D_rho");
    require_positive(D_B, "D_B");
    if (sigma() < delta_) {
        throw ParameterError("sigma = alpha2/(beta1*beta2) must satisfy sigma >= delta");
    }
}

ModelParams ModelParams::from_sigma(double sigma, double delta, double D, double alpha2,
                                    double beta2) {
    require_positive(sigma, "sigma");
    return ModelParams(alpha2, alpha2 / (sigma * beta2), beta2, delta, D);
}

ModelParams ModelParams::with_sigma(double sigma) const {
    require_positive(sigma, "sigma");
    return ModelParams(alpha2_, alpha2_ / (sigma * beta2_), beta2_, delta_, D_, epsilon_, D_rho_,
                       D_B_);
}

ModelParams ModelParams::with_delta(double delta) const {
    return ModelParams(alpha2_, beta1_, beta2_, delta, D_, epsilon_, D_rho_, D_B_);
}

ModelParams ModelParams::with_D(double D) const {
    return ModelParams(alpha2_, beta1_, beta2_, delta_, D, epsilon_, D_rho_, D_B_);
}

ModelParams ModelParams::with_epsilon(double epsilon) const {
    return ModelParams(alpha2_, beta1_, beta2_, delta_, D_, epsilon, D_rho_, D_B_);
}

void ModelParams::require_fast_regime() const {
    if (!(epsilon_ < delta_)) {
        throw ParameterError("the four-component model requires epsilon < delta");
    }
}

double transition_coefficient(const ModelParams& p, double vstar) {
    const double s = p.sigma();
    if (!(s < 1.0)) throw DomainError("c(sigma) is defined only for sigma < 1");
    require_positive(vstar, "vstar");
    return p.a() / (p.beta2() * s * (1.0 - s) * (1.0 - s) * vstar * vstar);
}

DerivedCoeffs derived_coeffs(const ModelParams& p, std::optional<double> vstar) {
    DerivedCoeffs d;
    d.sigma = p.sigma();
    d.a_sigma = p.a();
    d.b_sigma = p.b();
    if (d.sigma > 1.0) {
        d.gamma_sigma = p.alpha2() * d.b_sigma * (d.sigma - 1.0) / p.beta2();
        d.C_sigma_delta =
            std::sqrt(d.a_sigma * d.b_sigma * (d.sigma - 1.0) / (p.beta2() * p.delta_bar()));
    }
    if (d.sigma < 1.0 && vstar) d.c_transition = transition_coefficient(p, *vstar);
    return d;
}

std::string_view to_string(EquilibriumKind k) {
    switch (k) {
        case EquilibriumKind::ContinuumE: return "continuum";
        case EquilibriumKind::FullySaturatedEF: return "e_F";
        case EquilibriumKind::TransitionalET: return "e_T";
    }
    return "?";
}

std::string_view to_string(Stability s) {
    switch (s) {
        case Stability::DegenerateStableNode: return "degenerate-stable-node";
        case Stability::DegenerateUnstableNode: return "degenerate-unstable-node";
        case Stability::DegenerateTransition: return "degenerate-transition";
        case Stability::HyperbolicStableNode: return "hyperbolic-stable-node";
        case Stability::HyperbolicSaddle: return "hyperbolic-saddle";
    }
    return "?";
}

double immune_reaction(double M, double I, const ModelParams& p) {
    const double den = p.alpha2() * I + p.beta2() * (1.0 - M);
    if (!(den > 0.0)) throw SingularityError("f(M, I) is singular at (M, I) = (1, 0)");
    const double b = p.b();
    return p.a() * I * (b * (p.sigma() - 1.0) + b * M - I) / den;
}

Rates2 reaction_lds(double M, double I, const ModelParams& p) {
    require_unit_square(M, I);
    return {I * M * (1.0 - M), immune_reaction(M, I, p) / p.delta()};
}

State4 reaction_rds(const State4& s, const ModelParams& p) {
    for (double v : s) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("state outside [0,1]^4");
    }
    const auto [M, I, rho, B] = s;
    const double eps = p.epsilon();
    return {I * M * (1.0 - M), (B - (B + p.beta1()) * I) / p.delta(),
            (p.alpha2() * I - (p.alpha2() * I + p.beta2() * (1.0 - M)) * rho) / eps,
            (rho - B) / eps};
}

double slow_manifold_B(double M, double I, const ModelParams& p) {
    require_unit_square(M, I);
    const double num = p.alpha2() * I;
    const double den = num + p.beta2() * (1.0 - M);
    if (!(den > 0.0)) throw SingularityError("slow manifold undefined at (M, I) = (1, 0)");
    return num / den;
}

double cutoff_reaction(double X, double sigma, const ModelParams& p) {
    if (!(X >= 0.0 && X <= 1.0)) throw DomainError("X outside [0,1]");
    if (!(sigma > 0.0 && sigma < 1.0)) throw DomainError("cut-off reaction needs sigma in (0,1)");
    const double cut = 1.0 - sigma;
    if (X <= cut) return 0.0;
    const double b = p.beta2() / (p.beta2() * sigma + p.alpha2());
    return b * (X - cut) * X * (1.0 - X);
}

double slow_manifold_S(double m, const ModelParams& p) {
    return std::max(0.0, p.b() * (m + p.sigma() - 1.0));
}

Equilibrium continuum_equilibrium(double m_e, const ModelParams& p) {
    if (!(m_e >= 0.0 && m_e <= 1.0 - p.delta())) {
        throw DomainError("continuum equilibria require m_e in [0, 1 - delta]");
    }
    Equilibrium e{m_e, 0.0, EquilibriumKind::ContinuumE, Stability::DegenerateUnstableNode};
    const double split = 1.0 - p.sigma();
    if (m_e < split) {
        e.stability = Stability::DegenerateStableNode;
    } else if (m_e == split) {
        e.stability = Stability::DegenerateTransition;
    }
    return e;
}

Equilibrium full_equilibrium(const ModelParams& p) {
    return {1.0, p.b() * p.sigma(), EquilibriumKind::FullySaturatedEF,
            Stability::HyperbolicStableNode};
}

std::optional<Equilibrium> transitional_equilibrium(const ModelParams& p) {
    if (!(p.sigma() > 1.0)) return std::nullopt;
    return Equilibrium{0.0, p.b() * (p.sigma() - 1.0), EquilibriumKind::TransitionalET,
                       Stability::HyperbolicSaddle};
}

std::vector<Equilibrium> equilibria(const ModelParams& p) {
    std::vector<Equilibrium> out;
    const double top = 1.0 - p.delta();
    out.push_back(continuum_equilibrium(0.0, p));
    const double split = 1.0 - p.sigma();
    if (split > 0.0 && split < top) out.push_back(continuum_equilibrium(split, p));
    if (top > 0.0) out.push_back(continuum_equilibrium(top, p));
    out.push_back(full_equilibrium(p));
    if (auto eT = transitional_equilibrium(p)) out.push_back(*eT);
    return out;
}

bool in_clipped_rectangle(double M, double I, double delta, double tol) {
    if (M < -tol || M > 1.0 + tol || I < -tol || I > 1.0 + tol) return false;
    if (M > 1.0 - delta && I < M - (1.0 - delta) - tol) return false;
    return true;
}

bool project_to_clipped_rectangle(double& M, double& I, double delta) {
    const double M0 = M, I0 = I;
    M = std::clamp(M, 0.0, 1.0);
    I = std::clamp(I, 0.0, 1.0);
    const double gap = (M - (1.0 - delta)) - I;
    if (M > 1.0 - delta && gap > 0.0) {
        // nearest point on the segment I = M - (1 - delta), M in [1 - delta, 1]
        const double Mp = std::clamp(M - 0.5 * gap, 1.0 - delta, 1.0);
        M = Mp;
        I = Mp - (1.0 - delta);
    }
    return M != M0 || I != I0;
}

}  // namespace ibdwaves
