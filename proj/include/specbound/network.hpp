#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "specbound/errors.hpp"

namespace specbound {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// How the diagonal of a connectivity matrix was obtained.
enum class DiagRule { Auto, Supplied };

/// A weighted dispersal network on n patches.
///
/// a(i, j) with i != j is the movement rate from patch j to patch i
/// (units 1/time). With DiagRule::Auto the diagonal is filled as
/// a(j, j) = -sum_{i != j} a(i, j), so every column sums to zero and the
/// all-ones row vector annihilates the matrix. The digraph has an arc
/// j -> i exactly when a(i, j) > 0; zero-weight arcs do not exist.
struct DispersalNetwork {
    int n = 0;
    Matrix a;
    DiagRule diag_rule = DiagRule::Auto;
};

/// Structural classification of a square matrix A.
///
/// The sub-Laplacian family flags describe -A under the column-sum
/// convention: `laplacian` means -A is a Laplacian matrix (off-diagonals of
/// A nonnegative and every column of A sums to zero), `sub_laplacian`
/// relaxes the sums to <= 0, `strictly_sub` requires some column sum < 0,
/// `strongly_sub` requires all of them < 0. The transposed convention
/// ("-A^T sub-Laplacian", i.e. row sums of A) differs for asymmetric A and
/// is not encoded here.
struct MatrixClass {
    bool quasi_positive = false;
    bool laplacian = false;
    bool sub_laplacian = false;
    bool strictly_sub = false;
    bool strongly_sub = false;
    bool irreducible = false;
};

/// Strongly connected components of a digraph, ordered so that the
/// permuted matrix is block upper triangular.
struct BlockDecomposition {
    std::vector<std::vector<int>> blocks;
    std::vector<int> permutation; // permutation[k] = original vertex at slot k
};

/// Builds a network from nonnegative off-diagonal rates.
///
/// `offdiag` must have a zero diagonal; entries off the diagonal are the
/// rates a(i, j). If `diag` is absent the diagonal is auto-filled to make
/// every column sum to zero.
DispersalNetwork build_network(int n, const Matrix& offdiag,
                               const std::optional<Vector>& diag = std::nullopt);

MatrixClass classify_matrix(const Matrix& a);

/// True iff the digraph with arcs {j -> i : a(i, j) > 0} is strongly
/// connected (equivalently, A is irreducible).
bool strongly_connected(const Matrix& a);

/// Tarjan condensation. Blocks are listed so that every arc of the
/// condensation points from a later block to an earlier one, which makes
/// the permuted matrix block upper triangular.
BlockDecomposition scc_blocks(const Matrix& a);

/// Column-sum-zero version of the connectivity matrix: off-diagonal
/// entries copied from `a`, diagonal replaced by the Auto rule. For an
/// auto-diag network this is the stored matrix itself.
Matrix effective_matrix(const DispersalNetwork& net);

} // namespace specbound
