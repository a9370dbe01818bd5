// Acceptance suite: one check per shipped guarantee, each printed as a
// pass/fail line with its measured numbers. Exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "specbound/cli.hpp"
#include "specbound/models.hpp"
#include "specbound/problem_file.hpp"
#include "specbound/random.hpp"
#include "specbound/spectral.hpp"
#include "specbound/treecycle.hpp"

using namespace specbound;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::function<std::string()> run; // "" = pass, otherwise failure detail
};

Matrix example_a() {
    Matrix a(2, 2);
    a << -0.5, 1.0, 0.5, -1.0;
    return a;
}

Vector example_q() {
    Vector q(2);
    q << 1.0, 2.0;
    return q;
}

double example_s(double mu) {
    return (6.0 - 3.0 * mu + std::sqrt(9.0 * mu * mu - 4.0 * mu + 4.0)) / 4.0;
}

Matrix ring2() {
    Matrix a(2, 2);
    a << -1.0, 1.0, 1.0, -1.0;
    return a;
}

double bound_at(const Matrix& a, const Vector& q, double mu, double tol = 1e-12) {
    Matrix m = mu * a;
    m.diagonal() += q;
    return spectral_bound(m, tol);
}

std::string fail(const std::string& detail) { return detail; }

std::string c1_closed_form() {
    const auto t0 = std::chrono::steady_clock::now();
    for (double mu : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
        const double numeric = bound_at(example_a(), example_q(), mu, 1e-13);
        const double analytic = example_s(mu);
        if (std::abs(numeric - analytic) > 1e-9)
            return fail("s(" + std::to_string(mu) + ") = " + std::to_string(numeric) +
                        " vs closed form " + std::to_string(analytic));
    }
    const double s1 = bound_at(example_a(), example_q(), 1.0, 1e-13);
    if (std::abs(s1 - 1.5) > 1e-6) return fail("s(1) != 1.5");
    const double ds1 = bound_derivative(example_a(), example_q(), 1.0, 1e-13).ds;
    if (std::abs(ds1 - (-1.0 / 6.0)) > 1e-6)
        return fail("s'(1) = " + std::to_string(ds1) + " vs -1/6");
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed >= 1.0) return fail("runtime " + std::to_string(elapsed) + "s >= 1s");
    return "";
}

std::string c2_limits() {
    const LimitPair lim = asymptotic_limits(example_a(), example_q(), 1e-13);
    if (std::abs(lim.at_zero - 2.0) > 1e-12)
        return fail("at_zero = " + std::to_string(lim.at_zero));
    if (!lim.at_infinity) return fail("missing finite infinite-mu limit");
    if (std::abs(*lim.at_infinity - 4.0 / 3.0) > 1e-12)
        return fail("at_infinity = " + std::to_string(*lim.at_infinity));
    const double far = bound_at(example_a(), example_q(), 1e6, 1e-10);
    if (std::abs(far - 4.0 / 3.0) > 1e-5)
        return fail("s(1e6 A + Q) = " + std::to_string(far));
    return "";
}

std::string c3_third_derivative() {
    const double h = 0.02;
    const auto third = [&](double mu) {
        return (bound_at(example_a(), example_q(), mu + 1.5 * h, 1e-13) -
                3.0 * bound_at(example_a(), example_q(), mu + 0.5 * h, 1e-13) +
                3.0 * bound_at(example_a(), example_q(), mu - 0.5 * h, 1e-13) -
                bound_at(example_a(), example_q(), mu - 1.5 * h, 1e-13)) /
               (h * h * h);
    };
    bool seen_positive = false, seen_negative = false;
    for (double mu = 0.05; mu < 5.0; mu += 0.05) {
        const double d3 = third(mu);
        if (d3 > 0.0) seen_positive = true;
        if (d3 < 0.0) seen_negative = true;
        if (seen_positive && seen_negative) return "";
    }
    return fail("no sign change of the third difference found on (0, 5)");
}

std::string c4_monotone_convex() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(41);
    std::uniform_int_distribution<int> size(2, 8);
    std::uniform_real_distribution<double> log_mu(std::log(0.01), std::log(100.0));
    for (int c = 0; c < 500; ++c) {
        const int n = size(rng);
        const Matrix a = random_quasi_positive_szero(rng, n);
        const Vector q = random_nonconstant_diagonal(rng, n);
        for (int k = 0; k < 20; ++k) {
            const double mu = std::exp(log_mu(rng));
            const double h = std::max(1e-3 * mu, 1e-5);
            const double sm = bound_at(a, q, mu - h, 1e-13);
            const double s0 = bound_at(a, q, mu, 1e-13);
            const double sp = bound_at(a, q, mu + h, 1e-13);
            const double slope = (sp - sm) / (2.0 * h);
            const double curvature = (sp - 2.0 * s0 + sm) / (h * h);
            if (!(slope < 0.0))
                return fail("instance " + std::to_string(c) + ": slope " +
                            std::to_string(slope) + " at mu " + std::to_string(mu));
            if (!(curvature > 0.0))
                return fail("instance " + std::to_string(c) + ": curvature " +
                            std::to_string(curvature) + " at mu " + std::to_string(mu));
        }
        const Vector qc = Vector::Constant(n, q(0));
        const double mu = std::exp(log_mu(rng));
        const double h = 0.5 * mu;
        const double flat =
            (bound_at(a, qc, mu + h, 1e-13) - bound_at(a, qc, mu - h, 1e-13)) / (2.0 * h);
        if (std::abs(flat) >= 1e-9)
            return fail("constant-Q slope " + std::to_string(flat));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed >= 60.0) return fail("runtime " + std::to_string(elapsed) + "s >= 60s");
    return "";
}

std::string c5_karlin() {
    Rng rng(52);
    std::uniform_int_distribution<int> size(2, 6);
    for (int c = 0; c < 100; ++c) {
        const int n = size(rng);
        const Matrix p = random_stochastic(rng, n);
        const Vector r = random_nonconstant_diagonal(rng, n, 0.2, 3.0, 0.3);
        double prev = std::numeric_limits<double>::infinity();
        for (int g = 1; g <= 9; ++g) {
            const double val = karlin_map(p, r, 0.1 * g, 1e-12);
            if (!(val < prev))
                return fail("instance " + std::to_string(c) +
                            ": not strictly decreasing at mu = " + std::to_string(0.1 * g));
            prev = val;
        }
        const Vector rc = Vector::Constant(n, 1.7);
        if (std::abs(karlin_map(p, rc, 0.2, 1e-12) - karlin_map(p, rc, 0.8, 1e-12)) > 1e-9)
            return fail("R = cI map is not constant");
    }
    return "";
}

std::string c6_matrix_tree() {
    Rng rng(63);
    std::uniform_int_distribution<int> size(2, 6);
    for (int c = 0; c < 200; ++c) {
        const DispersalNetwork g = random_strongly_connected_network(rng, size(rng));
        CofactorResult res;
        try {
            res = principal_cofactors(g); // asserts det vs enumeration at 1e-9 relative
        } catch (const Error& e) {
            return fail("instance " + std::to_string(c) + ": " + e.what());
        }
        const Vector alpha_eig = principal_eigen(-appendix_laplacian(g), 1e-13).right;
        const double diff = (res.alpha - alpha_eig).cwiseAbs().maxCoeff();
        if (diff > 1e-10)
            return fail("alpha mismatch " + std::to_string(diff) + " at instance " +
                        std::to_string(c));
    }
    return "";
}

std::string c7_tree_cycle() {
    Rng rng(74);
    std::uniform_int_distribution<int> size(2, 5);
    std::uniform_real_distribution<double> val(-3.0, 3.0);
    for (int c = 0; c < 100; ++c) {
        const DispersalNetwork g = random_strongly_connected_network(rng, size(rng));
        ArcFunctionTable table;
        for (int src = 0; src < g.n; ++src)
            for (int tgt = 0; tgt < g.n; ++tgt)
                if (tgt != src && g.a(tgt, src) > 0.0) {
                    const double v = val(rng);
                    table[{tgt, src}] = [v](double, double) { return v; };
                }
        const TreeCycleCheck chk = tree_cycle_residual(g, table, Vector::Ones(g.n));
        if (chk.residual > 1e-9 * (1.0 + std::abs(chk.lhs)))
            return fail("residual " + std::to_string(chk.residual) + " at instance " +
                        std::to_string(c));
    }

    Matrix offdiag = Matrix::Zero(2, 2);
    offdiag(0, 1) = 2.0;
    offdiag(1, 0) = 3.0;
    ArcFunctionTable hand;
    hand[{0, 1}] = [](double, double) { return 5.0; };
    hand[{1, 0}] = [](double, double) { return 7.0; };
    const TreeCycleCheck chk =
        tree_cycle_residual(build_network(2, offdiag), hand, Vector::Ones(2));
    if (chk.lhs != 72.0 || chk.rhs != 72.0)
        return fail("hand case gave lhs " + std::to_string(chk.lhs) + ", rhs " +
                    std::to_string(chk.rhs));
    return "";
}

std::string c8_kvector() {
    Rng rng(85);
    std::uniform_int_distribution<int> size(1, 10);
    std::uniform_real_distribution<double> pos(1e-2, 10.0);
    for (int c = 0; c < 500; ++c) {
        const int n = size(rng);
        Vector u(n);
        for (int i = 0; i < n; ++i) u(i) = pos(rng);
        if (n >= 3 && c % 5 == 0) u(n - 1) = u(0);
        KVector kv;
        try {
            kv = construct_k_vector(u, pos(rng), pos(rng));
        } catch (const Error& e) {
            return fail("instance " + std::to_string(c) + ": " + e.what());
        }
        if (!verify_k_vector(kv))
            return fail("verification failed at instance " + std::to_string(c));
    }
    Vector u(2);
    u << 1.0, 2.0;
    const KVector kv = construct_k_vector(u, 1.0, 1.0);
    const double ratio = kv.k(1) / kv.k(0);
    if (!(2.0 / 3.0 < ratio && ratio < 3.0 / 4.0))
        return fail("hand-case ratio " + std::to_string(ratio) + " outside (2/3, 3/4)");
    return "";
}

std::string c9_threshold() {
    Vector q(2);
    q << 1.0, -2.0;
    const double mu_star = threshold_mu(ring2(), q, 1.0, 1e-10);
    if (std::abs(mu_star - 2.0) > 1e-8)
        return fail("mu* = " + std::to_string(mu_star) + " vs 2");

    SingleModel model;
    Matrix offdiag = Matrix::Zero(2, 2);
    offdiag(0, 1) = offdiag(1, 0) = 1.0;
    model.net = build_network(2, offdiag);
    model.growth = GrowthFamily::Linear;
    model.p = q;
    model.mu = 1.0;
    const RegimeReport rep = classify_regime(model, 1e-10);
    if (rep.verdict != RegimeVerdict::ThresholdAt || !rep.mu_star)
        return fail("classify_regime did not return a threshold verdict");
    if (std::abs(*rep.mu_star - 2.0) > 1e-8)
        return fail("regime mu* = " + std::to_string(*rep.mu_star));
    return "";
}

std::string c10_sis() {
    SisModel m;
    Matrix offdiag = Matrix::Zero(2, 2);
    offdiag(0, 1) = offdiag(1, 0) = 1.0;
    m.net = build_network(2, offdiag);
    m.beta = Vector(2);
    m.beta << 4.0, 1.0;
    m.gamma = Vector::Ones(2);
    m.mu_s = 1.0;
    m.mu_i = 1.0;
    m.total_population = 100.0;

    const R0Report rep = sis_r0(m, 1.0, 1e-12);
    const double closed = (10.0 + std::sqrt(52.0)) / 6.0;
    if (std::abs(rep.r0 - closed) > 1e-9)
        return fail("r0(1) = " + std::to_string(rep.r0) + " vs " + std::to_string(closed));
    if (std::abs(rep.limit_zero - 4.0) > 1e-12 || std::abs(rep.limit_infinity - 2.5) > 1e-12)
        return fail("limits (" + std::to_string(rep.limit_zero) + ", " +
                    std::to_string(rep.limit_infinity) + ") vs (4, 2.5)");

    double prev = std::numeric_limits<double>::infinity();
    for (double mu : {0.1, 1.0, 10.0, 100.0}) {
        const double r0 = sis_r0(m, mu, 1e-12).r0;
        if (!(r0 < prev)) return fail("r0 not strictly decreasing at mu_I = " + std::to_string(mu));
        prev = r0;
    }

    Rng rng(106);
    std::uniform_int_distribution<int> size(2, 5);
    std::uniform_real_distribution<double> rate(0.2, 4.0);
    std::uniform_real_distribution<double> mu_dist(0.05, 10.0);
    for (int c = 0; c < 100; ++c) {
        SisModel spec;
        spec.net = random_strongly_connected_network(rng, size(rng));
        const int n = spec.net.n;
        spec.beta = Vector::Zero(n);
        spec.gamma = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            spec.beta(i) = rate(rng);
            spec.gamma(i) = rate(rng);
        }
        spec.mu_s = 1.0;
        spec.mu_i = mu_dist(rng);
        spec.total_population = 40.0;
        const double r0 = sis_r0(spec, spec.mu_i, 1e-12).r0;
        const double s = bound_at(effective_matrix(spec.net), spec.beta - spec.gamma,
                                  spec.mu_i, 1e-12);
        const auto sgn = [](double x) { return std::abs(x) < 1e-9 ? 0 : (x > 0 ? 1 : -1); };
        if (sgn(r0 - 1.0) != sgn(s))
            return fail("sign mismatch at instance " + std::to_string(c) + ": r0 " +
                        std::to_string(r0) + ", s " + std::to_string(s));
    }
    return "";
}

std::string c11_competition() {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(117);
    std::uniform_real_distribution<double> growth(0.3, 2.5);
    std::uniform_real_distribution<double> mu_dist(0.2, 1.5);
    std::uniform_real_distribution<double> start(0.05, 2.0);
    for (int c = 0; c < 20; ++c) {
        const int n = 2 + c % 2;
        CompetitionModel m;
        m.net = random_strongly_connected_network(rng, n);
        const Vector alpha = principal_eigen(effective_matrix(m.net), 1e-12).right;
        m.p = Vector::Zero(n);
        do {
            for (int i = 0; i < n; ++i) m.p(i) = growth(rng);
            const double scale = m.p.dot(alpha) / alpha.squaredNorm();
            if ((m.p - scale * alpha).cwiseAbs().maxCoeff() > 1e-3) break;
        } while (true);
        m.mu_u = mu_dist(rng);
        m.mu_v = m.mu_u + mu_dist(rng);

        SingleModel sub;
        sub.net = m.net;
        sub.growth = GrowthFamily::Linear;
        sub.p = m.p;
        sub.mu = m.mu_u;
        const Vector u_star = single_equilibrium(sub, 1e-10);

        for (int trial = 0; trial < 5; ++trial) {
            Vector y0(2 * n);
            for (int i = 0; i < 2 * n; ++i) y0(i) = start(rng);
            const CompetitionOutcome res = competition_outcome(m, 1e4, 1e-5, y0);
            if (res.verdict != CompetitionVerdict::SlowerWins)
                return fail("instance " + std::to_string(c) + " trial " +
                            std::to_string(trial) + ": verdict not slower_wins (v_norm " +
                            std::to_string(res.v_norm) + ")");
            if ((res.final_u - u_star).cwiseAbs().maxCoeff() > 1e-4)
                return fail("instance " + std::to_string(c) +
                            ": u did not reach u* within 1e-4");
        }
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (elapsed >= 120.0) return fail("runtime " + std::to_string(elapsed) + "s >= 120s");
    return "";
}

std::string c12_predator_prey() {
    PredPreyModel m;
    Matrix offdiag = Matrix::Zero(2, 2);
    offdiag(0, 1) = offdiag(1, 0) = 1.0;
    m.prey_net = build_network(2, offdiag);
    m.pred_net = m.prey_net;
    m.r = Vector::Ones(2);
    m.K = Vector::Constant(2, 3.0);
    m.response = ResponseFamily::Lotka;
    m.c = Vector::Ones(2);
    m.d = (Vector(2) << 2.0, 5.0).finished();
    m.mu_u = 0.7;
    m.mu_v = 1.0;

    const PredPreyThreshold res = predprey_threshold(m, 1e-10);
    if (res.kind != PredatorInvasion::Threshold || !res.mu_v_star)
        return fail("no threshold verdict");
    if (std::abs(*res.mu_v_star - 2.0) > 1e-8)
        return fail("mu_v* = " + std::to_string(*res.mu_v_star) + " vs 2");

    Vector near_e1(4);
    near_e1 << 3.0, 3.0, 0.02, 0.02;
    const Vector e1 = (Vector(4) << 3.0, 3.0, 0.0, 0.0).finished();

    m.mu_v = 3.0; // above the threshold: E1 attracts
    const ModelSpec stable = m;
    const Trajectory settle = integrate(make_rhs(stable), near_e1, 0.0, 400.0);
    if ((settle.final_state() - e1).cwiseAbs().maxCoeff() > 1e-3)
        return fail("mu_v = 3 trajectory did not settle at E1 (dist " +
                    std::to_string((settle.final_state() - e1).cwiseAbs().maxCoeff()) + ")");

    m.mu_v = 1.0; // below the threshold: predators invade
    const ModelSpec unstable = m;
    const Trajectory escape = integrate(make_rhs(unstable), near_e1, 0.0, 400.0);
    double max_departure = 0.0;
    for (const Vector& y : escape.states)
        max_departure = std::max(max_departure, (y - e1).cwiseAbs().maxCoeff());
    if (max_departure < 0.5)
        return fail("mu_v = 1 trajectory never left the E1 neighborhood (max departure " +
                    std::to_string(max_departure) + ")");
    return "";
}

std::string c13_mass_conservation() {
    Rng rng(131);
    std::uniform_real_distribution<double> rate(0.2, 3.0);
    std::uniform_real_distribution<double> split(0.05, 1.0);
    for (int c = 0; c < 10; ++c) {
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
        m.total_population = 60.0;
        Vector y0(6);
        double total = 0.0;
        for (int i = 0; i < 6; ++i) {
            y0(i) = split(rng);
            total += y0(i);
        }
        y0 *= m.total_population / total;
        const Trajectory traj = integrate(make_rhs(m), y0, 0.0, 100.0);
        if (traj.termination != Termination::ReachedTEnd)
            return fail("integration failed at instance " + std::to_string(c));
        for (const Vector& y : traj.states)
            if (std::abs(y.sum() - m.total_population) > 1e-6 * m.total_population)
                return fail("drift " + std::to_string(std::abs(y.sum() - m.total_population)) +
                            " at instance " + std::to_string(c));
    }
    return "";
}

std::string c14_determinism() {
    const char* dir = std::getenv("SPECBOUND_FIXTURES");
    if (!dir) return fail("SPECBOUND_FIXTURES not set");
    const std::string fx(dir);
    const std::vector<std::vector<std::string>> invocations = {
        {"classify", fx + "/net2_example.json"},
        {"bound", fx + "/net2_example.json", "--mu", "1"},
        {"curve", fx + "/net2_example.json", "--mu-min", "0.1", "--mu-max", "10", "--steps",
         "50"},
        {"limits", fx + "/net2_example.json"},
        {"threshold", fx + "/net2_threshold.json"},
        {"karlin", fx + "/karlin2.json", "--mu-grid", "0.1,0.3,0.5,0.7,0.9"},
        {"tree-verify", fx + "/tree2.json"},
        {"kvector", fx + "/net2_example.json", "--mu", "1", "--mu-prime", "1"},
        {"simulate", fx + "/sis2.json", "--t-end", "10"},
        {"regime", fx + "/single2.json"},
        {"r0", fx + "/sis2.json", "--mu-grid", "0.1,1,10"},
        {"compete", fx + "/compete2.json", "--t-end", "5000"},
        {"simulate", fx + "/single_logistic3.json", "--t-end", "20"},
        {"simulate", fx + "/sis3_ring.json", "--t-end", "10"},
        {"regime", fx + "/predprey2.json"},
    };
    for (const auto& args : invocations) {
        std::ostringstream out1, err1, out2, err2;
        const int code1 = run_cli(args, out1, err1);
        const int code2 = run_cli(args, out2, err2);
        if (code1 != 0)
            return fail("command '" + args[0] + "' exited " + std::to_string(code1) + ": " +
                        err1.str());
        if (code1 != code2 || out1.str() != out2.str() || err1.str() != err2.str())
            return fail("command '" + args[0] + "' is not byte-identical across runs");
    }
    return "";
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "two-patch closed form s(mu), s(1), s'(1)", c1_closed_form},
        {2, "limits (2, 4/3) and s(1e6 A + Q)", c2_limits},
        {3, "third difference changes sign on (0, 5)", c3_third_derivative},
        {4, "monotonicity/convexity, 500 random instances", c4_monotone_convex},
        {5, "Karlin map strictly decreasing, 100 instances", c5_karlin},
        {6, "matrix-tree cofactors vs enumeration, 200 digraphs", c6_matrix_tree},
        {7, "tree-cycle identity, 100 graphs + exact hand case", c7_tree_cycle},
        {8, "scaling-vector construction, 500 instances", c8_kvector},
        {9, "threshold mu* = 2 and regime verdict", c9_threshold},
        {10, "SIS R0 closed form, monotonicity, limits, sign law", c10_sis},
        {11, "competition exclusion, 20 specs x 5 starts", c11_competition},
        {12, "predator-prey threshold and simulations", c12_predator_prey},
        {13, "SIS mass conservation over [0, 100]", c13_mass_conservation},
        {14, "CLI determinism on golden fixtures", c14_determinism},
    };

    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        char timing[32];
        std::snprintf(timing, sizeof(timing), "%7.2fs", elapsed);
        if (detail.empty()) {
            std::cout << "[PASS] criterion " << c.id << " (" << timing << "): " << c.title
                      << "\n";
        } else {
            std::cout << "[FAIL] criterion " << c.id << " (" << timing << "): " << c.title
                      << " -- " << detail << "\n";
            ++failures;
        }
    }
    if (failures) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all 14 acceptance criteria passed\n";
    return 0;
}
