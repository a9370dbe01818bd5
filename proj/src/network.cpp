#include "specbound/network.hpp"

#include <algorithm>
#include <cmath>

namespace specbound {

namespace {

// Off-diagonal column sum of column j, summed in ascending row order.
// build_network fills a(j, j) = -offdiag_colsum(a, j), and classify_matrix
// recomputes the sum in the same order, so auto-filled columns compare as
// exactly zero.
double offdiag_colsum(const Matrix& a, int j) {
    double s = 0.0;
    for (int i = 0; i < a.rows(); ++i) {
        if (i != j) s += a(i, j);
    }
    return s;
}

} // namespace

DispersalNetwork build_network(int n, const Matrix& offdiag,
                               const std::optional<Vector>& diag) {
    if (n < 1) throw ValidationError("build_network: n must be >= 1");
    if (offdiag.rows() != n || offdiag.cols() != n)
        throw ValidationError("build_network: offdiag must be n x n");
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double v = offdiag(i, j);
            if (!std::isfinite(v))
                throw ValidationError("build_network: non-finite rate at (" +
                                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            if (i == j) {
                if (v != 0.0)
                    throw ValidationError("build_network: offdiag must have zero diagonal");
            } else if (v < 0.0) {
                throw ValidationError("build_network: negative rate at (" +
                                      std::to_string(i + 1) + "," + std::to_string(j + 1) + ")");
            }
        }
    }

    DispersalNetwork net;
    net.n = n;
    net.a = offdiag;
    if (diag) {
        if (diag->size() != n)
            throw ValidationError("build_network: diag must have length n");
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite((*diag)(j)))
                throw ValidationError("build_network: non-finite diagonal entry");
            net.a(j, j) = (*diag)(j);
        }
        net.diag_rule = DiagRule::Supplied;
    } else {
        for (int j = 0; j < n; ++j) net.a(j, j) = -offdiag_colsum(net.a, j);
        net.diag_rule = DiagRule::Auto;
    }
    return net;
}

Matrix effective_matrix(const DispersalNetwork& net) {
    Matrix a = net.a;
    for (int j = 0; j < net.n; ++j) a(j, j) = -offdiag_colsum(a, j);
    return a;
}

MatrixClass classify_matrix(const Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("classify_matrix: matrix must be square");
    const int n = static_cast<int>(a.rows());

    MatrixClass c;
    c.quasi_positive = true;
    for (int i = 0; i < n && c.quasi_positive; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && a(i, j) < 0.0) {
                c.quasi_positive = false;
                break;
            }

    if (c.quasi_positive) {
        bool all_zero = true, all_le = true, any_lt = false, all_lt = true;
        for (int j = 0; j < n; ++j) {
            // colsum = a(j,j) + offdiag sum; the pairing keeps auto-filled
            // diagonals exact (see offdiag_colsum).
            const double s = a(j, j) + offdiag_colsum(a, j);
            if (s != 0.0) all_zero = false;
            if (s > 0.0) all_le = false;
            if (s < 0.0) any_lt = true;
            else all_lt = false;
        }
        c.laplacian = all_zero;
        c.sub_laplacian = all_le;
        c.strictly_sub = all_le && any_lt;
        c.strongly_sub = all_le && all_lt;
    }

    c.irreducible = strongly_connected(a);
    return c;
}

namespace {

// Iterative Tarjan SCC over the digraph with arcs j -> i for a(i, j) > 0.
struct TarjanState {
    const Matrix& a;
    int n;
    std::vector<int> index, lowlink, stack;
    std::vector<bool> on_stack;
    std::vector<std::vector<int>> sccs;
    int counter = 0;

    explicit TarjanState(const Matrix& m)
        : a(m), n(static_cast<int>(m.rows())),
          index(n, -1), lowlink(n, 0), on_stack(n, false) {}

    void run(int root) {
        // frames of (vertex, next out-neighbor candidate)
        std::vector<std::pair<int, int>> frames;
        frames.emplace_back(root, 0);
        index[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            auto& [v, next] = frames.back();
            bool descended = false;
            while (next < n) {
                const int w = next++;
                if (w == v || a(w, v) <= 0.0) continue; // arc v -> w iff a(w, v) > 0
                if (index[w] < 0) {
                    index[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on_stack[w]) lowlink[v] = std::min(lowlink[v], index[w]);
            }
            if (descended) continue;
            if (lowlink[v] == index[v]) {
                std::vector<int> comp;
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                sccs.push_back(std::move(comp));
            }
            const int child = v;
            frames.pop_back();
            if (!frames.empty()) {
                const int parent = frames.back().first;
                lowlink[parent] = std::min(lowlink[parent], lowlink[child]);
            }
        }
    }
};

} // namespace

bool strongly_connected(const Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("strongly_connected: matrix must be square");
    return scc_blocks(a).blocks.size() == 1;
}

BlockDecomposition scc_blocks(const Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("scc_blocks: matrix must be square");
    const int n = static_cast<int>(a.rows());

    TarjanState st(a);
    for (int v = 0; v < n; ++v)
        if (st.index[v] < 0) st.run(v);

    // Tarjan emits an SCC only after all components reachable from it are
    // done, so arcs of the condensation point from later-emitted components
    // to earlier ones. Arc v -> w (entry a(w, v) > 0) then has
    // block(w) <= block(v): row blocks never exceed column blocks, which is
    // block upper triangular form.
    BlockDecomposition dec;
    dec.blocks = std::move(st.sccs);
    dec.permutation.reserve(n);
    for (const auto& blk : dec.blocks)
        for (int v : blk) dec.permutation.push_back(v);
    return dec;
}

} // namespace specbound
