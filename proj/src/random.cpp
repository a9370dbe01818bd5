#include "specbound/random.hpp"

#include <algorithm>

#include "specbound/spectral.hpp"

namespace specbound {

DispersalNetwork random_strongly_connected_network(Rng& rng, int n, double density) {
    std::uniform_real_distribution<double> weight(1e-3, 2.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Matrix offdiag = Matrix::Zero(n, n);
    for (int v = 0; v < n; ++v) offdiag((v + 1) % n, v) = weight(rng); // ring v -> v+1
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && offdiag(i, j) == 0.0 && coin(rng) < density)
                offdiag(i, j) = weight(rng);
    return build_network(n, offdiag);
}

Matrix random_dispersal_matrix(Rng& rng, int n, double density) {
    return random_strongly_connected_network(rng, n, density).a;
}

Matrix random_quasi_positive_szero(Rng& rng, int n, double density) {
    Matrix a = random_dispersal_matrix(rng, n, density);
    std::uniform_real_distribution<double> diag(-1.0, 1.0);
    for (int i = 0; i < n; ++i) a(i, i) = diag(rng);
    a.diagonal().array() -= principal_eigen(a, 1e-13).value;
    return a;
}

Matrix random_reducible_szero(Rng& rng, int n) {
    std::uniform_int_distribution<int> nblocks_dist(2, std::max(2, std::min(3, n)));
    const int nblocks = n >= 2 ? nblocks_dist(rng) : 1;
    std::vector<int> sizes(nblocks, 1);
    for (int rest = n - nblocks; rest > 0; --rest)
        sizes[std::uniform_int_distribution<int>(0, nblocks - 1)(rng)] += 1;

    Matrix a = Matrix::Zero(n, n);
    std::uniform_real_distribution<double> weight(0.0, 1.0);
    int offset = 0;
    std::vector<int> starts;
    for (int b = 0; b < nblocks; ++b) {
        starts.push_back(offset);
        const int k = sizes[b];
        a.block(offset, offset, k, k) = k == 1 ? Matrix::Zero(1, 1)
                                               : random_dispersal_matrix(rng, k, 0.6);
        offset += k;
    }
    // strictly-upper-block coupling keeps the spectrum the union of blocks
    for (int b = 0; b + 1 < nblocks; ++b) {
        const int r0 = starts[b], rk = sizes[b];
        for (int c = b + 1; c < nblocks; ++c) {
            const int c0 = starts[c], ck = sizes[c];
            for (int i = 0; i < rk; ++i)
                for (int j = 0; j < ck; ++j)
                    if (weight(rng) < 0.4) a(r0 + i, c0 + j) = weight(rng);
        }
    }
    return a;
}

Vector random_nonconstant_diagonal(Rng& rng, int n, double lo, double hi, double min_spread) {
    std::uniform_real_distribution<double> entry(lo, hi);
    Vector q(n);
    do {
        for (int i = 0; i < n; ++i) q(i) = entry(rng);
    } while (n > 1 && q.maxCoeff() - q.minCoeff() < min_spread);
    return q;
}

Matrix random_stochastic(Rng& rng, int n) {
    std::uniform_real_distribution<double> weight(0.05, 1.0);
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    Matrix p = Matrix::Zero(n, n);
    for (int v = 0; v < n; ++v) p((v + 1) % n, v) = weight(rng);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (p(i, j) == 0.0 && coin(rng) < 0.5) p(i, j) = weight(rng);
    for (int j = 0; j < n; ++j) p.col(j) /= p.col(j).sum();
    return p;
}

} // namespace specbound
