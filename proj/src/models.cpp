#include "specbound/models.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "specbound/spectral.hpp"

namespace specbound {

namespace {

// Growth rate f_i(u) and derivative per family.
double growth_f(const SingleModel& m, int i, double u) {
    return m.growth == GrowthFamily::Logistic ? m.r(i) * (1.0 - u / m.K(i)) : m.p(i) - u;
}

double growth_df(const SingleModel& m, int i, double /*u*/) {
    return m.growth == GrowthFamily::Logistic ? -m.r(i) / m.K(i) : -1.0;
}

double response_g(const PredPreyModel& m, int i, double u) {
    return m.response == ResponseFamily::Lotka ? u : u / (m.response_a(i) + u);
}

double response_dg(const PredPreyModel& m, int i, double u) {
    if (m.response == ResponseFamily::Lotka) return 1.0;
    const double s = m.response_a(i) + u;
    return m.response_a(i) / (s * s);
}

// sum_{j != i} (a_ij y_j - a_ji y_i), the diagonal-independent dispersal term.
void add_dispersal(const Matrix& a, double mu, const Vector& y, Vector& dy, int offset = 0) {
    const int n = static_cast<int>(y.size());
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            acc += a(i, j) * y(j) - a(j, i) * y(i);
        }
        dy(offset + i) += mu * acc;
    }
}

// Jacobian contribution of the dispersal term.
void add_dispersal_jacobian(const Matrix& a, double mu, Matrix& jac, int row0, int col0) {
    const int n = static_cast<int>(a.rows());
    for (int i = 0; i < n; ++i) {
        double outflow = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            jac(row0 + i, col0 + j) += mu * a(i, j);
            outflow += a(j, i);
        }
        jac(row0 + i, col0 + i) -= mu * outflow;
    }
}

void require_finite(const Vector& v, const std::string& name) {
    if (!v.allFinite()) throw ValidationError("model: non-finite entries in " + name);
}

void require_len(const Vector& v, int n, const std::string& name) {
    if (v.size() != n) throw ValidationError("model: " + name + " must have length n");
    require_finite(v, name);
}

double degenerate_band(const Vector& q) {
    return 1e-12 * std::max(1.0, q.cwiseAbs().maxCoeff());
}

} // namespace

void validate_model(const ModelSpec& spec) {
    std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SingleModel>) {
                const int n = m.net.n;
                if (m.growth == GrowthFamily::Logistic) {
                    require_len(m.r, n, "r");
                    require_len(m.K, n, "K");
                    if ((m.K.array() <= 0.0).any())
                        throw ValidationError("model: K must be positive");
                } else {
                    require_len(m.p, n, "p");
                }
                if (m.leak.size() > 0) {
                    require_len(m.leak, n, "leak");
                    if ((m.leak.array() < 0.0).any())
                        throw ValidationError("model: leak rates must be >= 0");
                }
                if (!std::isfinite(m.mu) || m.mu < 0.0)
                    throw ValidationError("model: mu must be finite and >= 0");
            } else if constexpr (std::is_same_v<T, PredPreyModel>) {
                const int n = m.prey_net.n;
                if (m.pred_net.n != n)
                    throw ValidationError("model: predator network size mismatch");
                require_len(m.r, n, "r");
                require_len(m.K, n, "K");
                if ((m.K.array() <= 0.0).any()) throw ValidationError("model: K must be positive");
                require_len(m.c, n, "c");
                require_len(m.d, n, "d");
                if (m.response == ResponseFamily::Monod) {
                    require_len(m.response_a, n, "response a");
                    if ((m.response_a.array() <= 0.0).any())
                        throw ValidationError("model: Monod half-saturation must be positive");
                }
                if (!std::isfinite(m.mu_u) || !std::isfinite(m.mu_v) || m.mu_u < 0.0 || m.mu_v < 0.0)
                    throw ValidationError("model: dispersal rates must be finite and >= 0");
            } else if constexpr (std::is_same_v<T, CompetitionModel>) {
                require_len(m.p, m.net.n, "p");
                if (!std::isfinite(m.mu_u) || !std::isfinite(m.mu_v) || m.mu_u < 0.0 || m.mu_v < 0.0)
                    throw ValidationError("model: dispersal rates must be finite and >= 0");
            } else {
                const int n = m.net.n;
                require_len(m.beta, n, "beta");
                require_len(m.gamma, n, "gamma");
                if ((m.beta.array() < 0.0).any())
                    throw ValidationError("model: beta must be >= 0");
                if ((m.gamma.array() <= 0.0).any())
                    throw ValidationError("model: gamma must be positive");
                if (!std::isfinite(m.total_population) || m.total_population <= 0.0)
                    throw ValidationError("model: total population must be positive");
                if (!std::isfinite(m.mu_s) || !std::isfinite(m.mu_i) || m.mu_s < 0.0 || m.mu_i < 0.0)
                    throw ValidationError("model: dispersal rates must be finite and >= 0");
            }
        },
        spec);
}

int state_dimension(const ModelSpec& spec) {
    return std::visit(
        [](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SingleModel>)
                return m.net.n;
            else if constexpr (std::is_same_v<T, PredPreyModel>)
                return 2 * m.prey_net.n;
            else if constexpr (std::is_same_v<T, CompetitionModel>)
                return 2 * m.net.n;
            else
                return 2 * m.net.n;
        },
        spec);
}

Vector model_rhs(const ModelSpec& spec, const Vector& state, double /*t*/) {
    if (state.size() != state_dimension(spec))
        throw ValidationError("model_rhs: state dimension mismatch");

    return std::visit(
        [&](const auto& m) -> Vector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SingleModel>) {
                const int n = m.net.n;
                Vector dy = Vector::Zero(n);
                for (int i = 0; i < n; ++i) {
                    dy(i) = state(i) * growth_f(m, i, state(i));
                    if (m.leak.size() > 0) dy(i) -= m.mu * m.leak(i) * state(i);
                }
                add_dispersal(m.net.a, m.mu, state, dy);
                return dy;
            } else if constexpr (std::is_same_v<T, PredPreyModel>) {
                const int n = m.prey_net.n;
                const auto u = state.head(n);
                const auto v = state.tail(n);
                Vector dy = Vector::Zero(2 * n);
                for (int i = 0; i < n; ++i) {
                    const double g = response_g(m, i, u(i));
                    dy(i) = m.r(i) * u(i) * (1.0 - u(i) / m.K(i)) - g * v(i);
                    dy(n + i) = v(i) * (m.c(i) * g - m.d(i));
                }
                add_dispersal(m.prey_net.a, m.mu_u, u, dy, 0);
                add_dispersal(m.pred_net.a, m.mu_v, v, dy, n);
                return dy;
            } else if constexpr (std::is_same_v<T, CompetitionModel>) {
                const int n = m.net.n;
                const auto u = state.head(n);
                const auto v = state.tail(n);
                Vector dy = Vector::Zero(2 * n);
                for (int i = 0; i < n; ++i) {
                    const double shared = m.p(i) - u(i) - v(i);
                    dy(i) = u(i) * shared;
                    dy(n + i) = v(i) * shared;
                }
                add_dispersal(m.net.a, m.mu_u, u, dy, 0);
                add_dispersal(m.net.a, m.mu_v, v, dy, n);
                return dy;
            } else {
                const int n = m.net.n;
                const auto s = state.head(n);
                const auto infected = state.tail(n);
                Vector dy = Vector::Zero(2 * n);
                for (int j = 0; j < n; ++j) {
                    const double total = s(j) + infected(j);
                    const double incidence =
                        total > 0.0 ? m.beta(j) * s(j) * infected(j) / total : 0.0;
                    dy(j) = -incidence + m.gamma(j) * infected(j);
                    dy(n + j) = incidence - m.gamma(j) * infected(j);
                }
                add_dispersal(m.net.a, m.mu_s, s, dy, 0);
                add_dispersal(m.net.a, m.mu_i, infected, dy, n);
                return dy;
            }
        },
        spec);
}

Matrix model_jacobian(const ModelSpec& spec, const Vector& state) {
    if (state.size() != state_dimension(spec))
        throw ValidationError("model_jacobian: state dimension mismatch");

    return std::visit(
        [&](const auto& m) -> Matrix {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SingleModel>) {
                const int n = m.net.n;
                Matrix jac = Matrix::Zero(n, n);
                for (int i = 0; i < n; ++i) {
                    jac(i, i) = growth_f(m, i, state(i)) + state(i) * growth_df(m, i, state(i));
                    if (m.leak.size() > 0) jac(i, i) -= m.mu * m.leak(i);
                }
                add_dispersal_jacobian(m.net.a, m.mu, jac, 0, 0);
                return jac;
            } else if constexpr (std::is_same_v<T, PredPreyModel>) {
                const int n = m.prey_net.n;
                const auto u = state.head(n);
                const auto v = state.tail(n);
                Matrix jac = Matrix::Zero(2 * n, 2 * n);
                for (int i = 0; i < n; ++i) {
                    const double g = response_g(m, i, u(i));
                    const double dg = response_dg(m, i, u(i));
                    jac(i, i) = m.r(i) * (1.0 - 2.0 * u(i) / m.K(i)) - dg * v(i);
                    jac(i, n + i) = -g;
                    jac(n + i, i) = m.c(i) * dg * v(i);
                    jac(n + i, n + i) = m.c(i) * g - m.d(i);
                }
                add_dispersal_jacobian(m.prey_net.a, m.mu_u, jac, 0, 0);
                add_dispersal_jacobian(m.pred_net.a, m.mu_v, jac, n, n);
                return jac;
            } else if constexpr (std::is_same_v<T, CompetitionModel>) {
                const int n = m.net.n;
                const auto u = state.head(n);
                const auto v = state.tail(n);
                Matrix jac = Matrix::Zero(2 * n, 2 * n);
                for (int i = 0; i < n; ++i) {
                    const double shared = m.p(i) - u(i) - v(i);
                    jac(i, i) = shared - u(i);
                    jac(i, n + i) = -u(i);
                    jac(n + i, i) = -v(i);
                    jac(n + i, n + i) = shared - v(i);
                }
                add_dispersal_jacobian(m.net.a, m.mu_u, jac, 0, 0);
                add_dispersal_jacobian(m.net.a, m.mu_v, jac, n, n);
                return jac;
            } else {
                const int n = m.net.n;
                const auto s = state.head(n);
                const auto infected = state.tail(n);
                Matrix jac = Matrix::Zero(2 * n, 2 * n);
                for (int j = 0; j < n; ++j) {
                    const double total = s(j) + infected(j);
                    if (total <= 0.0)
                        throw DomainError("model_jacobian: SIS incidence singular at patch " +
                                          std::to_string(j + 1) + " (S + I = 0)");
                    const double di = m.beta(j) * infected(j) * infected(j) / (total * total);
                    const double ds = m.beta(j) * s(j) * s(j) / (total * total);
                    jac(j, j) = -di;
                    jac(j, n + j) = -ds + m.gamma(j);
                    jac(n + j, j) = di;
                    jac(n + j, n + j) = ds - m.gamma(j);
                }
                add_dispersal_jacobian(m.net.a, m.mu_s, jac, 0, 0);
                add_dispersal_jacobian(m.net.a, m.mu_i, jac, n, n);
                return jac;
            }
        },
        spec);
}

RhsFunction make_rhs(const ModelSpec& spec) {
    validate_model(spec);
    return [spec](double t, const Vector& y) { return model_rhs(spec, y, t); };
}

namespace {

Vector growth_at_zero(const SingleModel& m) {
    Vector fz(m.net.n);
    for (int i = 0; i < m.net.n; ++i) fz(i) = growth_f(m, i, 0.0);
    return fz;
}

Vector leak_or_zero(const SingleModel& m) {
    return m.leak.size() > 0 ? m.leak : Vector::Zero(m.net.n).eval();
}

} // namespace

Vector single_equilibrium(const SingleModel& model, double tol) {
    validate_model(model);
    const int n = model.net.n;
    const Matrix a_eff = effective_matrix(model.net);
    Matrix j0 = model.mu * (a_eff - Matrix(leak_or_zero(model).asDiagonal()));
    j0.diagonal() += growth_at_zero(model);
    const double s0 = spectral_bound(j0, std::min(tol, 1e-10));
    if (s0 <= 0.0)
        throw DomainError(
            "single_equilibrium: no positive equilibrium, s(J(mu)) = " + std::to_string(s0) +
            " <= 0 (extinction regime verdict at this mu)");

    Vector start(n);
    for (int i = 0; i < n; ++i)
        start(i) = model.growth == GrowthFamily::Logistic ? 0.5 * model.K(i)
                                                          : 0.5 * std::max(model.p(i), 0.0);

    const ModelSpec spec = model;
    const RhsFunction rhs = make_rhs(spec);
    IntegratorConfig cfg;
    cfg.convergence_norm_tol = std::sqrt(tol);
    const EquilibriumResult eq = integrate_to_equilibrium(rhs, start, cfg);

    // Newton polish
    Vector u = eq.state;
    Vector f = model_rhs(spec, u);
    for (int it = 0; it < 60 && f.cwiseAbs().maxCoeff() > tol; ++it) {
        const Matrix jac = model_jacobian(spec, u);
        const Vector step = jac.partialPivLu().solve(-f);
        u += step;
        if (!u.allFinite())
            throw NumericError("single_equilibrium: Newton iteration diverged");
        f = model_rhs(spec, u);
    }
    if (f.cwiseAbs().maxCoeff() > tol)
        throw NumericError("single_equilibrium: Newton polish stalled at ||F|| = " +
                               std::to_string(f.cwiseAbs().maxCoeff()),
                           f.cwiseAbs().maxCoeff());
    if ((u.array() <= 0.0).any())
        throw NumericError("single_equilibrium: computed equilibrium is not strictly positive");
    return u;
}

RegimeReport classify_regime(const SingleModel& model, double tol) {
    validate_model(model);
    const Matrix a_eff = effective_matrix(model.net);
    if (!strongly_connected(a_eff))
        throw StructureError("classify_regime: network must be irreducible");

    const Vector eps = leak_or_zero(model);
    const bool loss_free = eps.maxCoeff() == 0.0;
    const Matrix a_eps = a_eff - Matrix(eps.asDiagonal());
    const Vector fz = growth_at_zero(model);

    RegimeReport rep;
    rep.M = fz.maxCoeff();
    rep.m = principal_eigen(a_eps, tol).right.dot(fz);

    const double band = degenerate_band(fz);
    if (rep.M == 0.0)
        throw DomainError("classify_regime: degenerate, theorem silent (M = 0)");
    if (loss_free && std::abs(rep.m) <= band && rep.M > 0.0)
        throw DomainError("classify_regime: degenerate, theorem silent (m = 0)");

    if (rep.M < 0.0) {
        rep.verdict = RegimeVerdict::ExtinctionAllMu;
        rep.theorem_case = "case (i): M < 0, extinction for every mu";
    } else if (loss_free && rep.m > 0.0) {
        rep.verdict = RegimeVerdict::PersistenceAllMu;
        rep.theorem_case = "case (ii): loss-free dispersal and m > 0, persistence for every mu";
    } else {
        rep.verdict = RegimeVerdict::ThresholdAt;
        rep.theorem_case = loss_free
                               ? "case (iii): loss-free dispersal and m < 0 < M"
                               : "case (iii): lossy dispersal and M > 0";
        rep.mu_star = threshold_mu(a_eps, fz, 1.0, tol);
    }
    return rep;
}

PredPreyThreshold predprey_threshold(const PredPreyModel& model, double tol) {
    validate_model(model);
    if ((model.r.array() <= 0.0).any())
        throw ValidationError(
            "predprey_threshold: all prey growth rates must be positive in this setting");

    SingleModel prey;
    prey.net = model.prey_net;
    prey.growth = GrowthFamily::Logistic;
    prey.r = model.r;
    prey.K = model.K;
    prey.mu = model.mu_u;

    PredPreyThreshold res;
    res.prey_equilibrium = single_equilibrium(prey, tol);

    const int n = model.prey_net.n;
    Vector q(n);
    for (int i = 0; i < n; ++i)
        q(i) = model.c(i) * response_g(model, i, res.prey_equilibrium(i)) - model.d(i);

    const Matrix b_eff = effective_matrix(model.pred_net);
    if (!strongly_connected(b_eff))
        throw StructureError("predprey_threshold: predator network must be irreducible");
    res.M = q.maxCoeff();
    res.m = principal_eigen(b_eff, tol).right.dot(q);

    const double band = degenerate_band(q);
    if (std::abs(res.M) <= band || std::abs(res.m) <= band)
        throw DomainError("predprey_threshold: degenerate, theorem silent (M or m vanishes)");

    if (res.M < 0.0) {
        res.kind = PredatorInvasion::StableAllMuV;
    } else if (res.m > 0.0) {
        res.kind = PredatorInvasion::UnstableAllMuV;
    } else {
        res.kind = PredatorInvasion::Threshold;
        res.mu_v_star = threshold_mu(b_eff, q, 1.0, tol);
    }
    return res;
}

Vector disease_free_equilibrium(const SisModel& model, double tol) {
    validate_model(model);
    const Matrix a_eff = effective_matrix(model.net);
    if (!strongly_connected(a_eff))
        throw StructureError("disease_free_equilibrium: network must be irreducible");
    return model.total_population * principal_eigen(a_eff, tol).right;
}

R0Report sis_r0(const SisModel& model, double mu_I, double tol) {
    validate_model(model);
    if (!(mu_I > 0.0)) throw DomainError("sis_r0: mu_I must be positive");
    const int n = model.net.n;
    const Matrix a_eff = effective_matrix(model.net);
    if (!strongly_connected(a_eff))
        throw StructureError("sis_r0: network must be irreducible");

    Matrix v = mu_I * a_eff;
    v.diagonal() -= model.gamma;
    const Matrix f = Matrix(model.beta.asDiagonal());

    const Eigen::PartialPivLU<Matrix> lu(v);
    const Matrix x = lu.solve(-f); // -V^{-1} F
    const Eigen::PartialPivLU<Matrix> lu_t(v.transpose());
    const Matrix ng = lu_t.solve(-f).transpose(); // -F V^{-1}

    R0Report rep;
    rep.mu_I = mu_I;
    rep.r0 = spectral_bound(x, tol);
    if (strongly_connected(ng)) {
        rep.next_gen_residual = principal_eigen(ng, tol).residual;
    } else {
        rep.next_gen_residual = std::abs(rep.r0 - spectral_bound(ng, tol));
    }

    const Vector alpha = principal_eigen(a_eff, tol).right;
    rep.limit_zero = (model.beta.array() / model.gamma.array()).maxCoeff();
    rep.limit_infinity = alpha.dot(model.beta) / alpha.dot(model.gamma);
    return rep;
}

std::vector<R0Report> r0_sweep(const SisModel& model, const std::vector<double>& mu_grid,
                               double tol) {
    if (mu_grid.empty()) throw ValidationError("r0_sweep: empty grid");
    for (size_t i = 1; i < mu_grid.size(); ++i)
        if (!(mu_grid[i] > mu_grid[i - 1]))
            throw ValidationError("r0_sweep: grid must be strictly increasing");
    std::vector<R0Report> out;
    out.reserve(mu_grid.size());
    for (double mu : mu_grid) out.push_back(sis_r0(model, mu, tol));
    return out;
}

CompetitionOutcome competition_outcome(const CompetitionModel& model, double t_end, double tol,
                                       const std::optional<Vector>& initial) {
    validate_model(model);
    if (!(model.mu_u < model.mu_v))
        throw ValidationError("competition_outcome: requires mu_u < mu_v");
    const int n = model.net.n;
    const Matrix a_eff = effective_matrix(model.net);
    if (!strongly_connected(a_eff))
        throw StructureError("competition_outcome: network must be irreducible");

    const double big_m = model.p.maxCoeff();
    if (!(big_m > 0.0))
        throw DomainError("competition_outcome: requires M = max p > 0");

    const Vector alpha = principal_eigen(a_eff).right;
    const double scale = model.p.dot(alpha) / alpha.squaredNorm();
    if ((model.p - scale * alpha).cwiseAbs().maxCoeff() <=
        1e-9 * std::max(1.0, model.p.cwiseAbs().maxCoeff()))
        throw DomainError(
            "competition_outcome: ideal-free degenerate case, p is proportional to alpha "
            "(continuum of equilibria)");

    // semi-trivial target (u*, 0) exists iff the u-subsystem is persistent
    std::optional<Vector> u_star;
    {
        Matrix j = model.mu_u * a_eff;
        j.diagonal() += model.p;
        if (spectral_bound(j) > 0.0) {
            SingleModel sub;
            sub.net = model.net;
            sub.growth = GrowthFamily::Linear;
            sub.p = model.p;
            sub.mu = model.mu_u;
            u_star = single_equilibrium(sub, 1e-10);
        }
    }

    Vector y0(2 * n);
    if (initial) {
        if (initial->size() != 2 * n)
            throw ValidationError("competition_outcome: initial state dimension mismatch");
        y0 = *initial;
    } else {
        for (int i = 0; i < n; ++i) {
            const double base = std::max(model.p(i) / 2.0, 0.05 * big_m);
            y0(i) = base;
            y0(n + i) = base;
        }
    }

    const ModelSpec spec = model;
    const RhsFunction rhs = make_rhs(spec);
    IntegratorConfig cfg;

    CompetitionOutcome out;
    out.u_star = u_star;

    double t = 0.0;
    double window = 1.0;
    Vector y = y0;
    const auto evaluate = [&](CompetitionOutcome& o) {
        o.final_u = y.head(n);
        o.final_v = y.tail(n);
        o.v_norm = o.final_v.cwiseAbs().maxCoeff();
        if (u_star) o.u_star_distance = (o.final_u - *u_star).cwiseAbs().maxCoeff();
        o.t_reached = t;
        if (o.v_norm < tol && o.final_u.cwiseAbs().maxCoeff() < tol)
            o.verdict = CompetitionVerdict::BothExtinct;
        else if (o.v_norm < tol && u_star && *o.u_star_distance < std::sqrt(tol))
            o.verdict = CompetitionVerdict::SlowerWins;
        else
            o.verdict = CompetitionVerdict::Undetermined;
    };

    while (t < t_end) {
        const double t_next = std::min(t + window, t_end);
        const Trajectory piece = integrate(rhs, y, t, t_next, cfg);
        y = piece.final_state();
        t = piece.final_time();
        if (piece.termination == Termination::StepFailure)
            throw NumericError("competition_outcome: integrator step failure at t = " +
                               std::to_string(t));
        evaluate(out);
        if (out.verdict != CompetitionVerdict::Undetermined) return out;
        window *= 2.0;
    }
    evaluate(out);
    return out;
}

} // namespace specbound
