#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "specbound/network.hpp"
#include "specbound/odeint.hpp"

namespace specbound {

enum class GrowthFamily { Logistic, Linear };
enum class ResponseFamily { Lotka, Monod };

/// Single-species patch model u_i' = u_i f_i(u_i) + mu * dispersal - mu e_i u_i
/// with logistic f_i(u) = r_i (1 - u/K_i) or linear f_i(u) = p_i - u.
struct SingleModel {
    DispersalNetwork net;
    GrowthFamily growth = GrowthFamily::Logistic;
    Vector r, K; // logistic parameters
    Vector p;    // linear parameters
    Vector leak; // per-patch dispersal death rate e_i >= 0 (empty = zero)
    double mu = 0.0;
};

/// Predator-prey model with prey network A and predator network B;
/// response g(u) = u (Lotka) or u/(a_i + u) (Monod).
struct PredPreyModel {
    DispersalNetwork prey_net;
    DispersalNetwork pred_net;
    Vector r, K;
    ResponseFamily response = ResponseFamily::Lotka;
    Vector response_a; // Monod half-saturation constants
    Vector c, d;
    double mu_u = 0.0;
    double mu_v = 0.0;
};

/// Two competitors identical except for dispersal speed.
struct CompetitionModel {
    DispersalNetwork net;
    Vector p;
    double mu_u = 0.0;
    double mu_v = 0.0;
};

/// SIS epidemic patch model with conserved total population N.
struct SisModel {
    DispersalNetwork net;
    Vector beta, gamma;
    double mu_s = 0.0;
    double mu_i = 0.0;
    double total_population = 0.0;
};

using ModelSpec = std::variant<SingleModel, PredPreyModel, CompetitionModel, SisModel>;

enum class RegimeVerdict { ExtinctionAllMu, PersistenceAllMu, ThresholdAt };

/// Extinction/persistence trichotomy for the single-species model.
struct RegimeReport {
    double M = 0.0; // max_i f_i(0)
    double m = 0.0; // sum_i alpha_i f_i(0)
    std::optional<double> mu_star;
    RegimeVerdict verdict = RegimeVerdict::ExtinctionAllMu;
    std::string theorem_case;
};

enum class PredatorInvasion { StableAllMuV, UnstableAllMuV, Threshold };

struct PredPreyThreshold {
    PredatorInvasion kind = PredatorInvasion::StableAllMuV;
    std::optional<double> mu_v_star;
    double M = 0.0;
    double m = 0.0;
    Vector prey_equilibrium;
};

struct R0Report {
    double mu_I = 0.0;
    double r0 = 0.0;
    double limit_zero = 0.0;     // max_j beta_j / gamma_j
    double limit_infinity = 0.0; // sum(alpha*beta) / sum(alpha*gamma)
    double next_gen_residual = 0.0;
};

enum class CompetitionVerdict { SlowerWins, BothExtinct, Undetermined };

struct CompetitionOutcome {
    CompetitionVerdict verdict = CompetitionVerdict::Undetermined;
    Vector final_u, final_v;
    double v_norm = 0.0;
    std::optional<Vector> u_star;
    std::optional<double> u_star_distance;
    double t_reached = 0.0;
};

/// Semantic validation of all model parameters; throws ValidationError.
void validate_model(const ModelSpec& spec);

int state_dimension(const ModelSpec& spec);

/// Right-hand side of the model ODE at the given state. SIS incidence
/// beta S I / (S + I) extends continuously to 0 at S + I = 0.
Vector model_rhs(const ModelSpec& spec, const Vector& state, double t = 0.0);

/// Analytic Jacobian at the given state. For SIS every patch needs
/// S_j + I_j > 0 (DomainError otherwise).
Matrix model_jacobian(const ModelSpec& spec, const Vector& state);

/// Rhs closure with the network matrices baked in, for integrators.
RhsFunction make_rhs(const ModelSpec& spec);

/// Unique positive equilibrium of the single-species model, found by
/// integrating from an interior point and Newton-polishing until
/// ‖F(u*)‖∞ <= tol. Requires the persistence regime at the model's mu.
Vector single_equilibrium(const SingleModel& model, double tol = 1e-10);

/// Extinction/persistence classification per the dispersal-rate
/// trichotomy. Boundary cases M = 0 or m = 0 raise DomainError
/// ("degenerate, theorem silent").
RegimeReport classify_regime(const SingleModel& model, double tol = 1e-10);

/// Predator-invasion threshold mu_v* for the predator-prey model at the
/// prey-only equilibrium E1.
PredPreyThreshold predprey_threshold(const PredPreyModel& model, double tol = 1e-10);

/// Disease-free equilibrium S-hat = alpha * N (I = 0).
Vector disease_free_equilibrium(const SisModel& model, double tol = 1e-10);

/// Basic reproduction number r(-F V^{-1}) with F = diag(beta) and
/// V = mu_I A - diag(gamma); the linear systems are solved, V is never
/// inverted explicitly.
R0Report sis_r0(const SisModel& model, double mu_I, double tol = 1e-10);

std::vector<R0Report> r0_sweep(const SisModel& model, const std::vector<double>& mu_grid,
                               double tol = 1e-10);

/// Simulates the competition model and reports which exclusion outcome the
/// trajectory reached by t_end (or Undetermined, with distances).
CompetitionOutcome competition_outcome(const CompetitionModel& model, double t_end,
                                       double tol = 1e-5,
                                       const std::optional<Vector>& initial = std::nullopt);

} // namespace specbound
