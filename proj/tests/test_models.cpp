#include <doctest.h>

#include <cmath>

#include "specbound/models.hpp"
#include "specbound/random.hpp"
#include "specbound/spectral.hpp"

using namespace specbound;

namespace {

DispersalNetwork symmetric_ring2() {
    Matrix offdiag = Matrix::Zero(2, 2);
    offdiag(0, 1) = offdiag(1, 0) = 1.0;
    return build_network(2, offdiag);
}

SingleModel single_logistic(const DispersalNetwork& net, Vector r, Vector K, double mu) {
    SingleModel m;
    m.net = net;
    m.growth = GrowthFamily::Logistic;
    m.r = std::move(r);
    m.K = std::move(K);
    m.mu = mu;
    return m;
}

SingleModel single_linear(const DispersalNetwork& net, Vector p, double mu) {
    SingleModel m;
    m.net = net;
    m.growth = GrowthFamily::Linear;
    m.p = std::move(p);
    m.mu = mu;
    return m;
}

SisModel sis_two_patch(double mu_i) {
    SisModel m;
    m.net = symmetric_ring2();
    m.beta = Vector(2);
    m.beta << 4.0, 1.0;
    m.gamma = Vector::Ones(2);
    m.mu_s = 1.0;
    m.mu_i = mu_i;
    m.total_population = 100.0;
    return m;
}

// Finite-difference Jacobian oracle.
Matrix fd_jacobian(const ModelSpec& spec, const Vector& state, double h = 1e-6) {
    const int dim = static_cast<int>(state.size());
    Matrix jac(dim, dim);
    for (int j = 0; j < dim; ++j) {
        Vector up = state, dn = state;
        up(j) += h;
        dn(j) -= h;
        jac.col(j) = (model_rhs(spec, up) - model_rhs(spec, dn)) / (2.0 * h);
    }
    return jac;
}

} // namespace

TEST_CASE("single-patch logistic at carrying capacity is stationary") {
    const DispersalNetwork net = build_network(1, Matrix::Zero(1, 1));
    const SingleModel m = single_logistic(net, Vector::Ones(1), Vector::Constant(1, 5.0), 0.0);
    const Vector rhs = model_rhs(m, Vector::Constant(1, 5.0));
    CHECK(rhs(0) == doctest::Approx(0.0));
}

TEST_CASE("SIS derivatives conserve total mass") {
    const SisModel m = sis_two_patch(2.0);
    Vector state(4);
    state << 30.0, 20.0, 25.0, 25.0;
    const Vector dy = model_rhs(m, state);
    CHECK(std::abs(dy.sum()) < 1e-12);
}

TEST_CASE("competition boundary face is invariant") {
    CompetitionModel m;
    m.net = symmetric_ring2();
    m.p = Vector(2);
    m.p << 2.0, 1.0;
    m.mu_u = 0.5;
    m.mu_v = 1.0;
    SingleModel sub = single_linear(m.net, m.p, m.mu_u);
    const Vector u_star = single_equilibrium(sub, 1e-10);
    Vector state(4);
    state << u_star(0), u_star(1), 0.0, 0.0;
    const Vector dy = model_rhs(m, state);
    CHECK(dy.tail(2).cwiseAbs().maxCoeff() == 0.0);
    CHECK(dy.head(2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("single-species Jacobian at extinction is mu(A - diag(eps)) + diag(f(0))") {
    DispersalNetwork net = symmetric_ring2();
    SingleModel m = single_linear(net, (Vector(2) << 1.0, -2.0).finished(), 0.7);
    m.leak = (Vector(2) << 0.1, 0.3).finished();
    const Matrix jac = model_jacobian(m, Vector::Zero(2));
    Matrix expected = 0.7 * (effective_matrix(net) - Matrix(m.leak.asDiagonal()));
    expected.diagonal() += m.p;
    CHECK((jac - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("predator-prey Jacobian at E1 is block triangular with the predator bound block") {
    PredPreyModel m;
    m.prey_net = symmetric_ring2();
    m.pred_net = symmetric_ring2();
    m.r = Vector::Ones(2);
    m.K = Vector::Constant(2, 3.0);
    m.response = ResponseFamily::Lotka;
    m.c = Vector::Ones(2);
    m.d = (Vector(2) << 2.0, 5.0).finished();
    m.mu_u = 0.7;
    m.mu_v = 1.3;

    Vector e1(4);
    e1 << 3.0, 3.0, 0.0, 0.0;
    const Matrix jac = model_jacobian(m, e1);
    CHECK(jac.block(2, 0, 2, 2).cwiseAbs().maxCoeff() == 0.0);
    Matrix predator_block = 1.3 * effective_matrix(m.pred_net);
    predator_block.diagonal() += (Vector(2) << 3.0 - 2.0, 3.0 - 5.0).finished();
    CHECK((jac.block(2, 2, 2, 2) - predator_block).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("analytic Jacobians match finite differences at random interior states") {
    Rng rng(97531);
    std::uniform_real_distribution<double> pos(0.3, 2.5);
    for (int c = 0; c < 12; ++c) {
        const int n = 2 + c % 3;
        const DispersalNetwork net = random_strongly_connected_network(rng, n);

        SingleModel single = single_logistic(net, Vector::Ones(n), Vector::Constant(n, 2.0),
                                             pos(rng));
        for (int i = 0; i < n; ++i) {
            single.r(i) = pos(rng);
            single.K(i) = pos(rng);
        }
        Vector u(n);
        for (int i = 0; i < n; ++i) u(i) = pos(rng);
        const ModelSpec s1 = single;
        CHECK((model_jacobian(s1, u) - fd_jacobian(s1, u)).cwiseAbs().maxCoeff() <
              1e-5 * std::max(1.0, fd_jacobian(s1, u).cwiseAbs().maxCoeff()));

        PredPreyModel pp;
        pp.prey_net = net;
        pp.pred_net = random_strongly_connected_network(rng, n);
        pp.r = Vector::Ones(n);
        pp.K = Vector::Constant(n, 2.0);
        pp.response = (c % 2) ? ResponseFamily::Monod : ResponseFamily::Lotka;
        if (pp.response == ResponseFamily::Monod) pp.response_a = Vector::Constant(n, 0.8);
        pp.c = Vector::Ones(n);
        pp.d = Vector::Constant(n, 0.5);
        pp.mu_u = pos(rng);
        pp.mu_v = pos(rng);
        Vector uv(2 * n);
        for (int i = 0; i < 2 * n; ++i) uv(i) = pos(rng);
        const ModelSpec s2 = pp;
        CHECK((model_jacobian(s2, uv) - fd_jacobian(s2, uv)).cwiseAbs().maxCoeff() <
              1e-5 * std::max(1.0, fd_jacobian(s2, uv).cwiseAbs().maxCoeff()));

        CompetitionModel comp;
        comp.net = net;
        comp.p = Vector::Constant(n, 1.0);
        comp.mu_u = 0.4;
        comp.mu_v = 0.9;
        const ModelSpec s3 = comp;
        CHECK((model_jacobian(s3, uv) - fd_jacobian(s3, uv)).cwiseAbs().maxCoeff() <
              1e-5 * std::max(1.0, fd_jacobian(s3, uv).cwiseAbs().maxCoeff()));

        SisModel sis;
        sis.net = net;
        sis.beta = Vector::Constant(n, 1.5);
        sis.gamma = Vector::Constant(n, 0.8);
        sis.mu_s = pos(rng);
        sis.mu_i = pos(rng);
        sis.total_population = 10.0;
        const ModelSpec s4 = sis;
        CHECK((model_jacobian(s4, uv) - fd_jacobian(s4, uv)).cwiseAbs().maxCoeff() <
              1e-5 * std::max(1.0, fd_jacobian(s4, uv).cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("SIS Jacobian requires positive patch totals") {
    const SisModel m = sis_two_patch(1.0);
    Vector state(4);
    state << 0.0, 10.0, 0.0, 10.0;
    CHECK_THROWS_AS(model_jacobian(m, state), DomainError);
}

TEST_CASE("single equilibrium examples") {
    const DispersalNetwork one = build_network(1, Matrix::Zero(1, 1));
    const Vector u1 = single_equilibrium(
        single_logistic(one, Vector::Ones(1), Vector::Constant(1, 5.0), 0.0), 1e-11);
    CHECK(u1(0) == doctest::Approx(5.0).epsilon(1e-10));

    const DispersalNetwork net = symmetric_ring2();
    const Vector u2 = single_equilibrium(
        single_logistic(net, Vector::Ones(2), Vector::Constant(2, 3.0), 0.8), 1e-11);
    CHECK(u2(0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(u2(1) == doctest::Approx(3.0).epsilon(1e-9));

    const SingleModel hetero = single_logistic(net, Vector::Ones(2),
                                               (Vector(2) << 1.0, 3.0).finished(), 0.5);
    const Vector u3 = single_equilibrium(hetero, 1e-11);
    Rng rng(13);
    std::uniform_real_distribution<double> start(0.1, 4.0);
    for (int k = 0; k < 10; ++k) {
        Vector y0(2);
        y0 << start(rng), start(rng);
        IntegratorConfig cfg;
        cfg.convergence_norm_tol = 1e-10;
        const EquilibriumResult eq = integrate_to_equilibrium(make_rhs(hetero), y0, cfg);
        REQUIRE(eq.converged);
        CHECK((eq.state - u3).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("single equilibrium refuses the extinction regime") {
    const SingleModel sinks =
        single_linear(symmetric_ring2(), (Vector(2) << -1.0, -2.0).finished(), 1.0);
    CHECK_THROWS_WITH_AS(single_equilibrium(sinks, 1e-10),
                         doctest::Contains("no positive equilibrium"), DomainError);
}

TEST_CASE("regime classification across the trichotomy") {
    const DispersalNetwork net = symmetric_ring2();

    const RegimeReport sinks =
        classify_regime(single_linear(net, (Vector(2) << -1.0, -2.0).finished(), 1.0));
    CHECK(sinks.verdict == RegimeVerdict::ExtinctionAllMu);

    const RegimeReport sources =
        classify_regime(single_linear(net, (Vector(2) << 1.0, 2.0).finished(), 1.0));
    CHECK(sources.verdict == RegimeVerdict::PersistenceAllMu);
    CHECK(sources.m == doctest::Approx(1.5).epsilon(1e-9));

    const RegimeReport mixed =
        classify_regime(single_linear(net, (Vector(2) << 1.0, -2.0).finished(), 1.0));
    CHECK(mixed.verdict == RegimeVerdict::ThresholdAt);
    REQUIRE(mixed.mu_star.has_value());
    CHECK(*mixed.mu_star == doctest::Approx(2.0).epsilon(1e-8));

    SingleModel lossy = single_linear(net, (Vector(2) << 1.0, 2.0).finished(), 1.0);
    lossy.leak = (Vector(2) << 0.5, 0.5).finished();
    const RegimeReport lr = classify_regime(lossy);
    CHECK(lr.verdict == RegimeVerdict::ThresholdAt);

    CHECK_THROWS_WITH_AS(
        classify_regime(single_linear(net, (Vector(2) << 0.0, -1.0).finished(), 1.0)),
        doctest::Contains("degenerate"), DomainError);
}

TEST_CASE("predator-prey threshold reuses the two-patch construction") {
    PredPreyModel m;
    m.prey_net = symmetric_ring2();
    m.pred_net = symmetric_ring2();
    m.r = Vector::Ones(2);
    m.K = Vector::Constant(2, 3.0);
    m.response = ResponseFamily::Lotka;
    m.c = Vector::Ones(2);
    m.d = (Vector(2) << 2.0, 5.0).finished();
    m.mu_u = 0.7;
    m.mu_v = 1.0;

    const PredPreyThreshold res = predprey_threshold(m, 1e-10);
    CHECK(res.prey_equilibrium(0) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(res.kind == PredatorInvasion::Threshold);
    REQUIRE(res.mu_v_star.has_value());
    CHECK(*res.mu_v_star == doctest::Approx(2.0).epsilon(1e-8));

    m.d = Vector::Constant(2, 4.0); // every patch hostile: M = 3 - 4 < 0
    CHECK(predprey_threshold(m, 1e-10).kind == PredatorInvasion::StableAllMuV);

    m.d = Vector::Constant(2, 2.0); // every patch favorable: m = 1 > 0
    CHECK(predprey_threshold(m, 1e-10).kind == PredatorInvasion::UnstableAllMuV);
}

TEST_CASE("disease-free equilibrium") {
    SisModel m = sis_two_patch(1.0);
    const Vector dfe = disease_free_equilibrium(m);
    CHECK(dfe(0) == doctest::Approx(50.0).epsilon(1e-10));
    CHECK(dfe(1) == doctest::Approx(50.0).epsilon(1e-10));

    Matrix offdiag = Matrix::Zero(2, 2);
    offdiag(0, 1) = 2.0;
    offdiag(1, 0) = 3.0;
    m.net = build_network(2, offdiag);
    m.total_population = 10.0;
    const Vector skew = disease_free_equilibrium(m, 1e-13);
    CHECK(skew(0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(skew(1) == doctest::Approx(6.0).epsilon(1e-10));

    Matrix ring = Matrix::Zero(3, 3);
    ring(1, 0) = ring(2, 1) = ring(0, 2) = 1.0;
    SisModel m3 = m;
    m3.net = build_network(3, ring);
    m3.beta = Vector::Constant(3, 2.0);
    m3.gamma = Vector::Ones(3);
    const Vector dfe3 = disease_free_equilibrium(m3);
    Vector state(6);
    state.head(3) = dfe3;
    state.tail(3).setZero();
    CHECK(model_rhs(m3, state).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scalar R0 is beta/gamma at any dispersal rate") {
    SisModel m;
    m.net = build_network(1, Matrix::Zero(1, 1));
    m.beta = Vector::Constant(1, 3.0);
    m.gamma = Vector::Constant(1, 2.0);
    m.mu_s = 1.0;
    m.mu_i = 1.0;
    m.total_population = 10.0;
    for (double mu : {0.1, 1.0, 50.0})
        CHECK(sis_r0(m, mu).r0 == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("two-patch R0 closed form and limits") {
    const SisModel m = sis_two_patch(1.0);
    const R0Report rep = sis_r0(m, 1.0);
    CHECK(rep.r0 == doctest::Approx((10.0 + std::sqrt(52.0)) / 6.0).epsilon(1e-11));
    CHECK(rep.limit_zero == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(rep.limit_infinity == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(rep.limit_infinity < rep.r0);
    CHECK(rep.r0 < rep.limit_zero);
}

TEST_CASE("R0 sweep decreases strictly and approaches the mixing limit") {
    const SisModel m = sis_two_patch(1.0);
    const std::vector<R0Report> sweep = r0_sweep(m, {0.1, 1.0, 10.0, 100.0});
    for (size_t k = 1; k < sweep.size(); ++k) CHECK(sweep[k].r0 < sweep[k - 1].r0);
    CHECK(sweep.back().r0 == doctest::Approx(2.5).epsilon(0.05));

    SisModel proportional = m;
    proportional.beta = (Vector(2) << 2.0, 2.0).finished();
    proportional.gamma = Vector::Ones(2);
    const std::vector<R0Report> flat = r0_sweep(proportional, {0.1, 1.0, 10.0});
    for (const R0Report& rep : flat) CHECK(rep.r0 == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("sign of R0 - 1 matches the spectral bound sign") {
    Rng rng(86420);
    std::uniform_real_distribution<double> rate(0.2, 4.0);
    std::uniform_real_distribution<double> mu_dist(0.05, 10.0);
    for (int c = 0; c < 60; ++c) {
        const int n = 2 + c % 4;
        SisModel m;
        m.net = random_strongly_connected_network(rng, n);
        m.beta = Vector::Zero(n);
        m.gamma = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            m.beta(i) = rate(rng);
            m.gamma(i) = rate(rng);
        }
        m.mu_s = 1.0;
        m.mu_i = mu_dist(rng);
        m.total_population = 25.0;
        const double r0 = sis_r0(m, m.mu_i).r0;
        Matrix vf = m.mu_i * effective_matrix(m.net);
        vf.diagonal() += m.beta - m.gamma;
        const double s = spectral_bound(vf, 1e-12);
        const auto sgn = [](double x) { return std::abs(x) < 1e-9 ? 0 : (x > 0 ? 1 : -1); };
        CHECK(sgn(r0 - 1.0) == sgn(s));
    }
}

TEST_CASE("competition: slower disperser wins in the source-rich regime") {
    CompetitionModel m;
    m.net = symmetric_ring2();
    m.p = (Vector(2) << 2.0, 1.0).finished();
    m.mu_u = 0.5;
    m.mu_v = 1.0;
    const CompetitionOutcome res = competition_outcome(m, 1e4, 1e-6);
    CHECK(res.verdict == CompetitionVerdict::SlowerWins);
    REQUIRE(res.u_star.has_value());
    CHECK(res.v_norm < 1e-6);
    CHECK(*res.u_star_distance < 1e-3);
}

TEST_CASE("competition: both species die above the dispersal threshold") {
    CompetitionModel m;
    m.net = symmetric_ring2();
    m.p = (Vector(2) << 1.0, -4.0).finished(); // m = -1.5 < 0, mu* = threshold
    const double mu_star = threshold_mu(effective_matrix(m.net), m.p);
    m.mu_u = mu_star + 1.0;
    m.mu_v = m.mu_u + 1.0;
    const CompetitionOutcome res = competition_outcome(m, 1e4, 1e-6);
    CHECK(res.verdict == CompetitionVerdict::BothExtinct);
}

TEST_CASE("competition rejects bad orderings and the ideal-free degenerate case") {
    CompetitionModel m;
    m.net = symmetric_ring2();
    m.p = (Vector(2) << 2.0, 1.0).finished();
    m.mu_u = 1.0;
    m.mu_v = 0.5;
    CHECK_THROWS_AS(competition_outcome(m, 100.0), ValidationError);

    m.mu_u = 0.5;
    m.mu_v = 1.0;
    m.p = Vector::Constant(2, 1.3); // proportional to alpha = (1/2, 1/2)
    CHECK_THROWS_WITH_AS(competition_outcome(m, 100.0), doctest::Contains("ideal-free"),
                         DomainError);
}

TEST_CASE("trajectories stay nonnegative and SIS mass is conserved") {
    Rng rng(111213);
    std::uniform_real_distribution<double> rate(0.3, 3.0);
    for (int c = 0; c < 5; ++c) {
        SisModel m;
        m.net = random_strongly_connected_network(rng, 3);
        m.beta = Vector::Zero(3);
        m.gamma = Vector::Zero(3);
        for (int i = 0; i < 3; ++i) {
            m.beta(i) = rate(rng);
            m.gamma(i) = rate(rng);
        }
        m.mu_s = rate(rng);
        m.mu_i = rate(rng);
        m.total_population = 30.0;
        Vector y0(6);
        y0 << 8.0, 6.0, 4.0, 5.0, 4.0, 3.0;
        const Trajectory traj = integrate(make_rhs(m), y0, 0.0, 100.0);
        REQUIRE(traj.termination == Termination::ReachedTEnd);
        for (const Vector& y : traj.states) {
            CHECK(y.minCoeff() >= -1e-9);
            CHECK(std::abs(y.sum() - 30.0) < 1e-6 * 30.0);
        }
    }
}

TEST_CASE("stability dichotomy: the Jacobian sign predicts local dynamics") {
    Rng rng(424243);
    std::uniform_real_distribution<double> growth(-2.0, 2.0);
    int checked = 0;
    for (int c = 0; c < 40 && checked < 12; ++c) {
        const int n = 2 + c % 2;
        const DispersalNetwork net = random_strongly_connected_network(rng, n);
        Vector p(n);
        for (int i = 0; i < n; ++i) p(i) = growth(rng);
        const SingleModel m = single_linear(net, p, 0.6);
        const double s = spectral_bound(model_jacobian(m, Vector::Zero(n)), 1e-12);
        if (std::abs(s) < 0.01) continue;
        ++checked;
        const Vector y0 = Vector::Constant(n, 1e-3);
        const Trajectory traj = integrate(make_rhs(m), y0, 0.0, 60.0);
        const double endnorm = traj.final_state().cwiseAbs().maxCoeff();
        if (s < -0.01) CHECK(endnorm < 1e-4);
        if (s > 0.01) CHECK(endnorm > 1e-2);
    }
    CHECK(checked >= 12);
}

TEST_CASE("model validation rejects malformed parameters") {
    SingleModel m;
    m.net = symmetric_ring2();
    m.growth = GrowthFamily::Logistic;
    m.r = Vector::Ones(2);
    m.K = (Vector(2) << 1.0, -1.0).finished();
    m.mu = 1.0;
    CHECK_THROWS_AS(validate_model(ModelSpec(m)), ValidationError);

    SisModel sis = sis_two_patch(1.0);
    sis.gamma(0) = 0.0;
    CHECK_THROWS_AS(validate_model(ModelSpec(sis)), ValidationError);

    CHECK_THROWS_AS(model_rhs(ModelSpec(sis_two_patch(1.0)), Vector::Zero(3)),
                    ValidationError);
}
