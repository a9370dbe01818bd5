#pragma once

#include <optional>
#include <vector>

#include "specbound/network.hpp"

namespace specbound {

/// Principal eigenpair of a quasi-positive irreducible matrix.
///
/// `value` is the spectral bound; `right` and `left` are the positive
/// eigenvectors normalized to sum 1; `residual` is the achieved
/// max(‖Mu − λu‖∞, ‖wᵀM − λwᵀ‖∞).
struct EigenTriple {
    double value = 0.0;
    Vector right;
    Vector left;
    double residual = 0.0;
};

struct CurveRow {
    double mu = 0.0;
    double s = 0.0;
    double ds = 0.0;
    double d2s = 0.0;
};

/// Sampled mu -> (s, s', s'') over an equally spaced grid.
struct SpectralCurve {
    double mu_min = 0.0;
    double mu_max = 0.0;
    int steps = 0;
    std::vector<CurveRow> rows;
};

/// Limits of s(mu*A + Q) at mu -> 0 and mu -> infinity.
///
/// `at_infinity` is empty exactly when the limit is -infinity (the
/// s(A) < 0 case); the sentinel is a tagged absence, never a float.
/// When s(A) = 0, `weight` holds the positive sum-1 vector v with
/// at_infinity = sum_i v_i q_i.
struct LimitPair {
    double at_zero = 0.0;
    std::optional<double> at_infinity;
    Vector weight;
};

inline constexpr double kDefaultTol = 1e-10;

/// Principal eigenpair by power iteration on the shifted matrix
/// M + cI with c = 1 + max_i |m_ii|. Stops when the residual drops below
/// tol * max(1, ‖M‖∞); throws NumericError with the last residual if the
/// iteration cap is hit first, StructureError if M is reducible.
EigenTriple principal_eigen(const Matrix& m, double tol = kDefaultTol);

/// Spectral bound s(M) = max real part of the spectrum. Irreducible
/// quasi-positive input goes through principal_eigen; reducible
/// quasi-positive input is folded over its diagonal blocks; anything else
/// falls back to a dense eigensolve.
double spectral_bound(const Matrix& m, double tol = kDefaultTol);

/// max_i [Au]_i / u_i for u >> 0: an upper bound for s(A), tight at the
/// right principal eigenvector.
double collatz_wielandt(const Matrix& a, const Vector& u);

struct BoundDerivative {
    double ds = 0.0;
    double d2s = 0.0;
};

/// First derivative of mu -> s(mu*A + Q) from the simple-eigenvalue
/// perturbation identity ds = w'Au / w'u; second derivative by central
/// differences of ds with h = max(1e-5, 1e-5*mu).
BoundDerivative bound_derivative(const Matrix& a, const Vector& q, double mu,
                                 double tol = kDefaultTol);

SpectralCurve bound_curve(const Matrix& a, const Vector& q, double mu_min,
                          double mu_max, int steps, double tol = kDefaultTol);

/// Limits of s(mu*A+Q) per the dispersal-speed asymptotics: at_zero is
/// max_i q_i; for s(A) = 0 the infinite-mu limit is sum_i v_i q_i with v
/// the sum-1 left null vector of A~ = U^{-1} A U, U = diag(right principal
/// eigenvector of A); for s(A) < 0 it is -infinity (absent optional).
/// Throws DomainError when s(A) > 0.
LimitPair asymptotic_limits(const Matrix& a, const Vector& q,
                            double tol = kDefaultTol);

/// Unique mu* > 0 with s(mu* A + Q) = 0, located by bisection on a bracket
/// grown geometrically from [1e-6, bracket_hint]; the stopping certificate
/// is |s(mu* A + Q)| <= tol. Throws DomainError naming the persistence or
/// extinction regime if the limits put s on one side of zero.
double threshold_mu(const Matrix& a, const Vector& q, double bracket_hint = 1.0,
                    double tol = kDefaultTol);

/// Karlin's discrete map r(((1-mu)I + mu*P) R) for a column-stochastic
/// irreducible P, positive diagonal R = diag(r), and mu in (0, 1).
double karlin_map(const Matrix& p, const Vector& r, double mu,
                  double tol = kDefaultTol);

/// Similarity transport L-candidate from the LEFT principal eigenvector:
/// returns U A U^{-1} with U = diag(left eigenvector). When s(A) = 0 the
/// result has zero column sums (so its negation is a Laplacian matrix).
Matrix similarity_to_column_zero(const Matrix& a, double tol = kDefaultTol);

/// Similarity transport from the RIGHT principal eigenvector: returns
/// U^{-1} A U with U = diag(right eigenvector). When s(A) = 0 the result
/// has zero row sums.
Matrix similarity_to_row_zero(const Matrix& a, double tol = kDefaultTol);

} // namespace specbound
