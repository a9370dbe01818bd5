#pragma once

#include <functional>
#include <map>
#include <utility>
#include <vector>

#include "specbound/network.hpp"

namespace specbound {

/// Directed arc from `source` to `target`; present iff a(target, source) > 0.
struct Arc {
    int source = 0;
    int target = 0;
    friend bool operator<(const Arc& x, const Arc& y) {
        return std::pair(x.source, x.target) < std::pair(y.source, y.target);
    }
    friend bool operator==(const Arc& x, const Arc& y) {
        return x.source == y.source && x.target == y.target;
    }
};

/// Spanning in-tree: every non-root vertex is the source of exactly one
/// arc, the root of none, and all paths lead to the root.
struct InTree {
    int root = 0;
    std::vector<Arc> arcs; // sorted by source
    double weight = 1.0;
};

/// Spanning functional subgraph with exactly one directed cycle.
struct UnicyclicSubgraph {
    std::vector<Arc> arcs;  // one per vertex, sorted by source
    std::vector<Arc> cycle; // cycle arcs in traversal order from its smallest vertex
    double weight = 1.0;
};

/// Lemma-style scaling vector: k_i > 0 such that for all i != j with
/// u_i != u_j,  u_j(mu+mu')/(mu' u_i + mu u_j) < k_i/k_j
///            < (mu' u_j + mu u_i)/(u_i(mu+mu')),
/// and k_i = k_j whenever u_i = u_j.
struct KVector {
    Vector k;
    double mu = 0.0;
    double mu_prime = 0.0;
    Vector u;
};

struct EnumerationGuards {
    int in_tree = 8;
    int unicyclic = 7;
};

/// Unnormalized diagonal cofactors C_i of the Laplacian of G, their
/// normalization alpha = C / sum(C), and the two computation routes.
struct CofactorResult {
    Vector cofactors;     // determinant route (principal minors)
    Vector alpha;         // cofactors / sum
    bool tree_checked = false; // enumeration route ran (n <= guard) and agreed
};

/// Appendix-convention Laplacian of the network: l_ij = -a_ij (i != j),
/// l_ii = sum_{k != i} a_ki; every column sums to zero.
Matrix appendix_laplacian(const DispersalNetwork& g);

/// All spanning in-trees rooted at `root` (0-based), lexicographically
/// ordered by arc set. Throws CapacityError when n exceeds the guard.
std::vector<InTree> enumerate_in_trees(const DispersalNetwork& g, int root,
                                       const EnumerationGuards& guards = {});

/// Diagonal cofactors of the Laplacian, computed from principal minors and
/// cross-checked against in-tree enumeration when n fits the guard. Throws
/// StructureError when G is not strongly connected.
CofactorResult principal_cofactors(const DispersalNetwork& g,
                                   const EnumerationGuards& guards = {});

/// All spanning unicyclic subgraphs, lexicographically ordered by arc set.
std::vector<UnicyclicSubgraph> enumerate_unicyclic(const DispersalNetwork& g,
                                                   const EnumerationGuards& guards = {});

/// Per-arc table of edge functions evaluated as f(x_target, x_source).
/// Keys are (target, source) pairs matching the a(i, j) orientation.
using ArcFunctionTable = std::map<std::pair<int, int>, std::function<double(double, double)>>;

/// Both sides of the cycle identity evaluated on G:
///   lhs = sum over arcs (source i, target j) of C_i * a_ji * F_ji(x_j, x_i)
///   rhs = sum over unicyclic Q of w(Q) * sum of F over Q's cycle arcs
/// with UNNORMALIZED cofactors C_i. `normalized_lhs` divides by sum_k C_k,
/// which is the alpha-weighted form.
struct TreeCycleCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double residual = 0.0;
    double normalized_lhs = 0.0;
    double cofactor_sum = 0.0;
};

TreeCycleCheck tree_cycle_residual(const DispersalNetwork& g, const ArcFunctionTable& f,
                                   const Vector& x, const EnumerationGuards& guards = {});

/// Constructs k recursively over the u-sorted order, taking the geometric
/// mean of each admissible ratio interval; exact duplicates in u share one
/// k entry.
KVector construct_k_vector(const Vector& u, double mu, double mu_prime);

/// True iff every ordered pair satisfies the strict double inequality
/// (distinct u) or exact k equality (equal u).
bool verify_k_vector(const KVector& kv);

} // namespace specbound
