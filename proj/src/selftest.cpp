#include "specbound/selftest.hpp"

#include <cmath>
#include <functional>
#include <vector>

#include "specbound/models.hpp"
#include "specbound/odeint.hpp"
#include "specbound/random.hpp"
#include "specbound/spectral.hpp"
#include "specbound/treecycle.hpp"

namespace specbound {

namespace {

struct Property {
    std::string name;
    std::function<std::string(Rng&, int)> run; // returns "" on pass
    int base_count;
};

std::string check(bool ok, const std::string& message) { return ok ? "" : message; }

// Numerically evaluated s(mu*A + Q).
double bound_at(const Matrix& a, const Vector& q, double mu, double tol = 1e-13) {
    Matrix m = mu * a;
    m.diagonal() += q;
    return spectral_bound(m, tol);
}

std::string monotone_convex_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 8);
    std::uniform_real_distribution<double> log_mu(std::log(0.01), std::log(100.0));
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix a = random_quasi_positive_szero(rng, n);
        const Vector q = random_nonconstant_diagonal(rng, n);
        for (int k = 0; k < 20; ++k) {
            const double mu = std::exp(log_mu(rng));
            const double h = std::max(1e-3 * mu, 1e-5);
            const double sm = bound_at(a, q, mu - h);
            const double s0 = bound_at(a, q, mu);
            const double sp = bound_at(a, q, mu + h);
            const double slope = (sp - sm) / (2.0 * h);
            const double curv = (sp - 2.0 * s0 + sm) / (h * h);
            if (!(slope < 0.0))
                return "slope " + std::to_string(slope) + " not negative at mu=" +
                       std::to_string(mu);
            if (!(curv > 0.0))
                return "curvature " + std::to_string(curv) + " not positive at mu=" +
                       std::to_string(mu);
        }
        // constant-Q equality case
        const Vector qc = Vector::Constant(n, q(0));
        const double mu = std::exp(log_mu(rng));
        const double h = 0.5 * mu;
        const double slope = (bound_at(a, qc, mu + h) - bound_at(a, qc, mu - h)) / (2.0 * h);
        if (std::abs(slope) > 1e-9)
            return "constant-Q slope " + std::to_string(slope) + " exceeds 1e-9";
    }
    return "";
}

std::string slope_bound_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 8);
    std::uniform_real_distribution<double> log_mu(std::log(0.01), std::log(100.0));
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix a = random_quasi_positive_szero(rng, n);
        const double sa = principal_eigen(a, 1e-13).value;
        const Vector q = random_nonconstant_diagonal(rng, n);
        for (int k = 0; k < 10; ++k) {
            const double mu = std::exp(log_mu(rng));
            const double ds = bound_derivative(a, q, mu, 1e-12).ds;
            if (!(ds <= sa + 1e-7))
                return "ds = " + std::to_string(ds) + " exceeds s(A) = " + std::to_string(sa);
        }
    }
    return "";
}

std::string reducible_monotone_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(3, 8);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix a = random_reducible_szero(rng, n);
        const Vector q = random_nonconstant_diagonal(rng, n);
        double prev = bound_at(a, q, 0.01);
        double prev_mu = 0.01;
        std::vector<double> mus, vals;
        for (double mu = 0.01; mu <= 50.0; mu *= 1.9) {
            const double s = bound_at(a, q, mu);
            if (mu > prev_mu && s > prev + 1e-8)
                return "reducible bound increased from " + std::to_string(prev) + " to " +
                       std::to_string(s);
            mus.push_back(mu);
            vals.push_back(s);
            prev = s;
            prev_mu = mu;
        }
        // convexity of the sampled curve (chords lie above)
        for (size_t k = 1; k + 1 < mus.size(); ++k) {
            const double lam = (mus[k] - mus[k - 1]) / (mus[k + 1] - mus[k - 1]);
            const double chord = (1.0 - lam) * vals[k - 1] + lam * vals[k + 1];
            if (vals[k] > chord + 1e-7)
                return "sampled reducible curve not convex at mu=" + std::to_string(mus[k]);
        }
    }
    return "";
}

std::string karlin_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 6);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix p = random_stochastic(rng, n);
        const Vector r = random_nonconstant_diagonal(rng, n, 0.2, 3.0, 0.3);
        double prev = std::numeric_limits<double>::infinity();
        for (int g = 1; g <= 9; ++g) {
            const double val = karlin_map(p, r, 0.1 * g);
            if (!(val < prev)) return "karlin map not strictly decreasing";
            prev = val;
        }
        const Vector rc = Vector::Constant(n, r(0));
        const double v1 = karlin_map(p, rc, 0.2), v2 = karlin_map(p, rc, 0.7);
        if (std::abs(v1 - v2) > 1e-9) return "karlin map not constant for R = cI";
    }
    return "";
}

std::string collatz_wielandt_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 7);
    std::uniform_real_distribution<double> entry(0.05, 3.0);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix a = random_quasi_positive_szero(rng, n);
        const EigenTriple t = principal_eigen(a, 1e-12);
        Vector u(n);
        for (int i = 0; i < n; ++i) u(i) = entry(rng);
        if (!(collatz_wielandt(a, u) >= t.value - 1e-9))
            return "Collatz-Wielandt value fell below s(A)";
        if (std::abs(collatz_wielandt(a, t.right) - t.value) > 1e-9)
            return "Collatz-Wielandt not tight at the right eigenvector";
    }
    return "";
}

std::string perturbation_consistency_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 7);
    std::uniform_real_distribution<double> mu_dist(0.05, 5.0);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix a = random_quasi_positive_szero(rng, n);
        const Vector q = random_nonconstant_diagonal(rng, n);
        const double mu = mu_dist(rng);
        const double ds = bound_derivative(a, q, mu, 1e-12).ds;
        const double h = std::max(1e-6, 1e-6 * mu);
        const double fd = (bound_at(a, q, mu + h) - bound_at(a, q, mu - h)) / (2.0 * h);
        const double scale = std::max(1.0, std::abs(ds));
        if (std::abs(ds - fd) > 1e-6 * scale)
            return "perturbation ds " + std::to_string(ds) + " vs finite difference " +
                   std::to_string(fd);
    }
    return "";
}

std::string row_sum_bracket_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 7);
    std::uniform_real_distribution<double> mu_dist(0.05, 5.0);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix a = random_quasi_positive_szero(rng, n);
        const Vector q = random_nonconstant_diagonal(rng, n);
        const double mu = mu_dist(rng);
        const double s = bound_at(a, q, mu);
        const Vector rowsum = mu * a.rowwise().sum() + q;
        if (!(rowsum.minCoeff() - 1e-9 <= s && s <= rowsum.maxCoeff() + 1e-9))
            return "eigenvector-weighted row-sum bracket violated";
    }
    return "";
}

std::string matrix_tree_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 6);
    for (int c = 0; c < count; ++c) {
        const DispersalNetwork g = random_strongly_connected_network(rng, size(rng));
        const CofactorResult res = principal_cofactors(g); // self-asserting both routes
        if (!res.tree_checked) return "tree route skipped unexpectedly";
        const Matrix l = appendix_laplacian(g);
        const Vector alpha_eig = principal_eigen(-l, 1e-13).right;
        if ((res.alpha - alpha_eig).cwiseAbs().maxCoeff() > 1e-10)
            return "alpha disagrees with eigensolver null vector";
    }
    return "";
}

std::string tree_cycle_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 5);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (int c = 0; c < count; ++c) {
        const DispersalNetwork g = random_strongly_connected_network(rng, size(rng));
        ArcFunctionTable table;
        for (int src = 0; src < g.n; ++src)
            for (int tgt = 0; tgt < g.n; ++tgt)
                if (tgt != src && g.a(tgt, src) > 0.0) {
                    const double v = val(rng);
                    table[{tgt, src}] = [v](double, double) { return v; };
                }
        Vector x = Vector::Ones(g.n);
        const TreeCycleCheck chk = tree_cycle_residual(g, table, x);
        if (chk.residual > 1e-9 * (1.0 + std::abs(chk.lhs)))
            return "tree-cycle residual " + std::to_string(chk.residual) + " too large";
    }
    return "";
}

std::string kvector_interval_sweep(Rng& rng, int count) {
    std::uniform_real_distribution<double> pos(1e-3, 10.0);
    for (int c = 0; c < count; ++c) {
        const double ui = pos(rng);
        double uj = pos(rng);
        while (uj == ui) uj = pos(rng);
        const double mu = pos(rng), mup = pos(rng);
        const double lower = uj * (mu + mup) / (mup * ui + mu * uj);
        const double upper = (mup * uj + mu * ui) / (ui * (mu + mup));
        if (!(lower < upper)) return "empty admissible interval for distinct u";
    }
    return "";
}

std::string kvector_construct_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(1, 10);
    std::uniform_real_distribution<double> pos(1e-2, 10.0);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        Vector u(n);
        for (int i = 0; i < n; ++i) u(i) = pos(rng);
        if (n >= 3 && c % 4 == 0) u(n - 1) = u(0); // exercise duplicate collapse
        const KVector kv = construct_k_vector(u, pos(rng), pos(rng));
        if (!verify_k_vector(kv)) return "constructed k-vector failed verification";
    }
    return "";
}

std::string sis_sign_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 5);
    std::uniform_real_distribution<double> rate(0.2, 4.0);
    std::uniform_real_distribution<double> mu_dist(0.05, 10.0);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
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
        m.total_population = 50.0;
        const R0Report rep = sis_r0(m, m.mu_i);
        const double s = bound_at(effective_matrix(m.net), m.beta - m.gamma, m.mu_i);
        const auto sgn = [](double x) { return std::abs(x) < 1e-9 ? 0 : (x > 0 ? 1 : -1); };
        if (sgn(rep.r0 - 1.0) != sgn(s))
            return "sign(R0 - 1) disagrees with sign(s(mu_I A + diag(beta - gamma)))";
        if (!(rep.limit_infinity - 1e-8 <= rep.r0 && rep.r0 <= rep.limit_zero + 1e-8))
            return "R0 left the [limit_infinity, limit_zero] bracket";
    }
    return "";
}

std::string mass_conservation_sweep(Rng& rng, int count) {
    std::uniform_real_distribution<double> rate(0.2, 4.0);
    std::uniform_real_distribution<double> split(0.05, 0.95);
    for (int c = 0; c < count; ++c) {
        const int n = 3;
        SisModel m;
        m.net = random_strongly_connected_network(rng, n);
        m.beta = Vector::Zero(n);
        m.gamma = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            m.beta(i) = rate(rng);
            m.gamma(i) = rate(rng);
        }
        m.mu_s = rate(rng);
        m.mu_i = rate(rng);
        m.total_population = 60.0;
        Vector y0(2 * n);
        double total = 0.0;
        for (int i = 0; i < 2 * n; ++i) {
            y0(i) = split(rng);
            total += y0(i);
        }
        y0 *= m.total_population / total;
        const Trajectory traj = integrate(make_rhs(m), y0, 0.0, 100.0);
        if (traj.termination != Termination::ReachedTEnd) return "SIS integration failed";
        for (const Vector& y : traj.states) {
            if (y.minCoeff() < -1e-9) return "trajectory left the nonnegative orthant";
            if (std::abs(y.sum() - m.total_population) > 1e-6 * m.total_population)
                return "total population drifted more than 1e-6 relative";
        }
    }
    return "";
}

std::string equilibrium_uniqueness_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 4);
    std::uniform_real_distribution<double> pos(0.5, 3.0);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        SingleModel m;
        m.net = random_strongly_connected_network(rng, n);
        m.growth = GrowthFamily::Logistic;
        m.r = Vector::Zero(n);
        m.K = Vector::Zero(n);
        for (int i = 0; i < n; ++i) {
            m.r(i) = pos(rng);
            m.K(i) = pos(rng);
        }
        m.mu = pos(rng);
        const Vector u_star = single_equilibrium(m, 1e-10);
        std::uniform_real_distribution<double> start(0.05, 5.0);
        for (int k = 0; k < 3; ++k) {
            Vector y0(n);
            for (int i = 0; i < n; ++i) y0(i) = start(rng);
            IntegratorConfig cfg;
            cfg.convergence_norm_tol = 1e-9;
            const EquilibriumResult eq = integrate_to_equilibrium(make_rhs(m), y0, cfg);
            if (!eq.converged) return "equilibrium integration did not converge";
            if ((eq.state - u_star).cwiseAbs().maxCoeff() > 1e-6)
                return "two routes to the positive equilibrium disagree";
        }
    }
    return "";
}

std::string integrator_consistency_sweep(Rng& rng, int count) {
    std::uniform_int_distribution<int> size(2, 4);
    for (int c = 0; c < count; ++c) {
        const int n = size(rng);
        const Matrix a = random_quasi_positive_szero(rng, n);
        const RhsFunction rhs = [&a](double, const Vector& y) -> Vector { return a * y; };
        Vector y0 = Vector::Constant(n, 1.0);
        IntegratorConfig coarse;
        IntegratorConfig fine;
        fine.rel_tol = coarse.rel_tol / 2.0;
        fine.abs_tol = coarse.abs_tol / 2.0;
        const Vector yc = integrate(rhs, y0, 0.0, 5.0, coarse).final_state();
        const Vector yf = integrate(rhs, y0, 0.0, 5.0, fine).final_state();
        const double allowance = 10.0 * (coarse.rel_tol * yc.cwiseAbs().maxCoeff() * 5e2 +
                                         coarse.abs_tol);
        if ((yc - yf).cwiseAbs().maxCoeff() > allowance)
            return "halved tolerances moved the endpoint more than the error allowance";
        // forward then backward returns to the start
        const Trajectory fwd = integrate(rhs, y0, 0.0, 2.0, fine);
        const Vector back =
            integrate(rhs, fwd.final_state(), 2.0, 0.0, fine).final_state();
        if ((back - y0).cwiseAbs().maxCoeff() > 100.0 * (fine.rel_tol * 10.0 + fine.abs_tol) * 1e2)
            return "forward-backward integration failed to return to the start";
    }
    return "";
}

} // namespace

int run_selftest(std::uint64_t seed, double scale, std::ostream& out) {
    const std::vector<Property> properties = {
        {"monotone-convex (Q non-constant)", monotone_convex_sweep, 20},
        {"slope bounded by s(A)", slope_bound_sweep, 20},
        {"reducible non-increasing convex", reducible_monotone_sweep, 20},
        {"karlin map strictly decreasing", karlin_sweep, 40},
        {"collatz-wielandt bound", collatz_wielandt_sweep, 40},
        {"perturbation ds vs finite differences", perturbation_consistency_sweep, 40},
        {"row-sum bracket", row_sum_bracket_sweep, 40},
        {"matrix-tree cofactors", matrix_tree_sweep, 60},
        {"tree-cycle identity", tree_cycle_sweep, 40},
        {"k-vector interval well-defined", kvector_interval_sweep, 200},
        {"k-vector construction verified", kvector_construct_sweep, 100},
        {"R0 sign equivalence and bracket", sis_sign_sweep, 40},
        {"SIS mass conservation + nonnegativity", mass_conservation_sweep, 5},
        {"positive equilibrium uniqueness", equilibrium_uniqueness_sweep, 5},
        {"integrator self-consistency", integrator_consistency_sweep, 5},
    };

    int failures = 0;
    for (const auto& prop : properties) {
        const int count = std::max(1, static_cast<int>(prop.base_count * scale));
        Rng rng(seed ^ std::hash<std::string>{}(prop.name));
        std::string failure;
        try {
            failure = prop.run(rng, count);
        } catch (const Error& e) {
            failure = std::string("exception: ") + e.what();
        }
        if (failure.empty()) {
            out << "[ok]   " << prop.name << " (" << count << " cases)\n";
        } else {
            out << "[FAIL] " << prop.name << ": " << failure << "\n";
            ++failures;
        }
    }
    return failures;
}

} // namespace specbound
