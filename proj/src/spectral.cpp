#include "specbound/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace specbound {

namespace {

bool is_quasi_positive(const Matrix& m) {
    const int n = static_cast<int>(m.rows());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && m(i, j) < 0.0) return false;
    return true;
}

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols())
        throw ValidationError(std::string(who) + ": matrix must be square");
}

double inf_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

} // namespace

EigenTriple principal_eigen(const Matrix& m, double tol) {
    require_square(m, "principal_eigen");
    if (tol <= 0.0) throw ValidationError("principal_eigen: tol must be positive");
    if (!is_quasi_positive(m))
        throw ValidationError("principal_eigen: matrix is not quasi-positive");
    const int n = static_cast<int>(m.rows());

    if (n == 1) {
        EigenTriple t;
        t.value = m(0, 0);
        t.right = Vector::Ones(1);
        t.left = Vector::Ones(1);
        t.residual = 0.0;
        return t;
    }

    if (!strongly_connected(m))
        throw StructureError("principal_eigen: matrix is reducible");

    const double shift = 1.0 + m.diagonal().cwiseAbs().maxCoeff();
    Matrix b = m;
    b.diagonal().array() += shift;

    const double scale = std::max(1.0, inf_norm(m));
    const double target = tol * scale;
    const int cap = static_cast<int>(100.0 * n * std::max(1.0, -std::log10(tol)));

    Vector u = Vector::Constant(n, 1.0 / n);
    Vector w = Vector::Constant(n, 1.0 / n);
    double lambda = 0.0;
    double residual = std::numeric_limits<double>::infinity();

    for (int it = 0; it < cap; ++it) {
        Vector bu = b * u;
        Vector btw = b.transpose() * w;
        const double wu = w.dot(u);
        lambda = w.dot(bu) / wu;
        residual = std::max((bu - lambda * u).cwiseAbs().maxCoeff(),
                            (btw - lambda * w).cwiseAbs().maxCoeff());
        if (residual <= target) break;
        u = bu / bu.sum();
        w = btw / btw.sum();
    }
    if (residual > target)
        throw NumericError("principal_eigen: no convergence after iteration cap (last residual " +
                               std::to_string(residual) + ")",
                           residual);

    EigenTriple t;
    t.value = lambda - shift;
    t.right = u;
    t.left = w;
    t.residual = residual;
    return t;
}

double spectral_bound(const Matrix& m, double tol) {
    require_square(m, "spectral_bound");
    const int n = static_cast<int>(m.rows());
    if (n == 1) return m(0, 0);

    if (is_quasi_positive(m)) {
        const BlockDecomposition dec = scc_blocks(m);
        if (dec.blocks.size() == 1) return principal_eigen(m, tol).value;
        double s = -std::numeric_limits<double>::infinity();
        for (const auto& blk : dec.blocks) {
            const int k = static_cast<int>(blk.size());
            Matrix sub(k, k);
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c) sub(r, c) = m(blk[r], blk[c]);
            s = std::max(s, k == 1 ? sub(0, 0) : principal_eigen(sub, tol).value);
        }
        return s;
    }

    Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
    return es.eigenvalues().real().maxCoeff();
}

double collatz_wielandt(const Matrix& a, const Vector& u) {
    require_square(a, "collatz_wielandt");
    if (u.size() != a.rows())
        throw ValidationError("collatz_wielandt: vector length mismatch");
    if ((u.array() <= 0.0).any())
        throw DomainError("collatz_wielandt: u must be strictly positive");
    return ((a * u).array() / u.array()).maxCoeff();
}

namespace {

double first_derivative(const Matrix& a, const Vector& q, double mu, double tol) {
    Matrix m = mu * a;
    m.diagonal() += q;
    const EigenTriple t = principal_eigen(m, tol);
    return t.left.dot(a * t.right) / t.left.dot(t.right);
}

} // namespace

BoundDerivative bound_derivative(const Matrix& a, const Vector& q, double mu, double tol) {
    if (mu <= 0.0) throw DomainError("bound_derivative: mu must be positive");
    BoundDerivative d;
    d.ds = first_derivative(a, q, mu, tol);
    const double h = std::max(1e-5, 1e-5 * mu);
    d.d2s = (first_derivative(a, q, mu + h, tol) - first_derivative(a, q, mu - h, tol)) / (2.0 * h);
    return d;
}

SpectralCurve bound_curve(const Matrix& a, const Vector& q, double mu_min,
                          double mu_max, int steps, double tol) {
    if (!(0.0 < mu_min && mu_min < mu_max))
        throw ValidationError("bound_curve: need 0 < mu_min < mu_max");
    if (steps < 2) throw ValidationError("bound_curve: steps must be >= 2");

    SpectralCurve curve;
    curve.mu_min = mu_min;
    curve.mu_max = mu_max;
    curve.steps = steps;
    curve.rows.reserve(steps);
    const double dm = (mu_max - mu_min) / (steps - 1);
    for (int k = 0; k < steps; ++k) {
        const double mu = (k == steps - 1) ? mu_max : mu_min + k * dm;
        CurveRow row;
        row.mu = mu;
        try {
            Matrix m = mu * a;
            m.diagonal() += q;
            row.s = spectral_bound(m, tol);
            const BoundDerivative d = bound_derivative(a, q, mu, tol);
            row.ds = d.ds;
            row.d2s = d.d2s;
        } catch (const NumericError& e) {
            throw NumericError("bound_curve at mu=" + std::to_string(mu) + ": " + e.what(),
                               e.last_residual);
        }
        curve.rows.push_back(row);
    }
    return curve;
}

Matrix similarity_to_column_zero(const Matrix& a, double tol) {
    const EigenTriple t = principal_eigen(a, tol);
    // (U A U^{-1})_{ij} = u_i a_{ij} / u_j with u the left eigenvector;
    // column sums equal s(A).
    const int n = static_cast<int>(a.rows());
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = t.left(i) * a(i, j) / t.left(j);
    return out;
}

Matrix similarity_to_row_zero(const Matrix& a, double tol) {
    const EigenTriple t = principal_eigen(a, tol);
    // (U^{-1} A U)_{ij} = a_{ij} u_j / u_i with u the right eigenvector;
    // row sums equal s(A).
    const int n = static_cast<int>(a.rows());
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = a(i, j) * t.right(j) / t.right(i);
    return out;
}

LimitPair asymptotic_limits(const Matrix& a, const Vector& q, double tol) {
    require_square(a, "asymptotic_limits");
    if (q.size() != a.rows())
        throw ValidationError("asymptotic_limits: q length mismatch");

    const EigenTriple ta = principal_eigen(a, tol);
    const double sa = ta.value;
    const double zero_band = std::max(tol, 1e-12) * std::max(1.0, inf_norm(a));
    if (sa > zero_band)
        throw DomainError("asymptotic_limits: s(A) > 0 is outside the decreasing-bound regime");

    LimitPair lim;
    lim.at_zero = q.maxCoeff();
    if (sa < -zero_band) return lim; // -infinity sentinel: absent optional

    // s(A) = 0: transport to the row-sum-zero representative and take its
    // left null vector.
    const int n = static_cast<int>(a.rows());
    Matrix a_tilde(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a_tilde(i, j) = a(i, j) * ta.right(j) / ta.right(i);
    const EigenTriple tt = principal_eigen(a_tilde, tol);
    lim.weight = tt.left;
    lim.at_infinity = tt.left.dot(q);
    return lim;
}

double threshold_mu(const Matrix& a, const Vector& q, double bracket_hint, double tol) {
    if (bracket_hint <= 0.0)
        throw ValidationError("threshold_mu: bracket_hint must be positive");
    const LimitPair lim = asymptotic_limits(a, q, tol);
    const double at_inf =
        lim.at_infinity ? *lim.at_infinity : -std::numeric_limits<double>::infinity();
    if (lim.at_zero <= 0.0)
        throw DomainError(
            "threshold_mu: no threshold, M = max q <= 0 (extinction regime for every mu)");
    if (at_inf >= 0.0)
        throw DomainError(
            "threshold_mu: no threshold, m = lim s >= 0 (persistence regime for every mu)");

    const auto s_at = [&](double mu) {
        Matrix m = mu * a;
        m.diagonal() += q;
        return spectral_bound(m, tol);
    };

    double lo = 1e-6, hi = bracket_hint;
    double s_lo = s_at(lo), s_hi = s_at(hi);
    int grow = 0;
    while (s_lo <= 0.0 && grow < 60) {
        lo /= 4.0;
        s_lo = s_at(lo);
        ++grow;
    }
    grow = 0;
    while (s_hi >= 0.0 && grow < 60) {
        hi *= 4.0;
        s_hi = s_at(hi);
        ++grow;
    }
    if (!(s_lo > 0.0 && s_hi < 0.0))
        throw NumericError("threshold_mu: failed to bracket a sign change");

    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double s_mid = s_at(mid);
        if (std::abs(s_mid) <= tol) return mid;
        if (s_mid > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    throw NumericError("threshold_mu: bisection cap hit before |s| <= tol", std::abs(s_at(mid)));
}

double karlin_map(const Matrix& p, const Vector& r, double mu, double tol) {
    require_square(p, "karlin_map");
    const int n = static_cast<int>(p.rows());
    if (r.size() != n) throw ValidationError("karlin_map: r length mismatch");
    if (!(mu > 0.0 && mu < 1.0)) throw ValidationError("karlin_map: mu must lie in (0, 1)");
    if ((r.array() <= 0.0).any())
        throw ValidationError("karlin_map: R must be a positive diagonal");
    for (int j = 0; j < n; ++j) {
        double col = 0.0;
        for (int i = 0; i < n; ++i) {
            if (p(i, j) < 0.0) throw ValidationError("karlin_map: P has a negative entry");
            col += p(i, j);
        }
        if (std::abs(col - 1.0) > 1e-10)
            throw ValidationError("karlin_map: column " + std::to_string(j + 1) +
                                  " of P does not sum to 1");
    }

    Matrix pm = mu * p;
    pm.diagonal().array() += 1.0 - mu;
    const Matrix pmr = pm * r.asDiagonal();
    // nonnegative matrix: the spectral radius equals the spectral bound
    return spectral_bound(pmr, tol);
}

} // namespace specbound
