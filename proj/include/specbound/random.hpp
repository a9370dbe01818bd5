#pragma once

#include <random>

#include "specbound/network.hpp"

namespace specbound {

using Rng = std::mt19937_64;

/// Random strongly connected network: a directed ring plus extra arcs with
/// the given density, weights uniform in (0, 2].
DispersalNetwork random_strongly_connected_network(Rng& rng, int n, double density = 0.5);

/// Column-sum-zero matrix of a random strongly connected network.
Matrix random_dispersal_matrix(Rng& rng, int n, double density = 0.5);

/// Random irreducible quasi-positive matrix with a random diagonal, shifted
/// so that s(A) = 0 up to solver accuracy.
Matrix random_quasi_positive_szero(Rng& rng, int n, double density = 0.5);

/// Random reducible quasi-positive matrix with s(A) = 0: two or three
/// irreducible column-sum-zero blocks coupled block-upper-triangularly.
Matrix random_reducible_szero(Rng& rng, int n);

/// Random diagonal with entries in [lo, hi] and spread at least min_spread.
Vector random_nonconstant_diagonal(Rng& rng, int n, double lo = -2.0, double hi = 2.0,
                                   double min_spread = 0.5);

/// Random column-stochastic irreducible matrix.
Matrix random_stochastic(Rng& rng, int n);

} // namespace specbound
