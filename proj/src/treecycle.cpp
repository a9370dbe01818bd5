#include "specbound/treecycle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace specbound {

namespace {

std::vector<std::vector<int>> out_neighbors(const DispersalNetwork& g) {
    std::vector<std::vector<int>> out(g.n);
    for (int v = 0; v < g.n; ++v)
        for (int t = 0; t < g.n; ++t)
            if (t != v && g.a(t, v) > 0.0) out[v].push_back(t);
    return out;
}

} // namespace

Matrix appendix_laplacian(const DispersalNetwork& g) {
    Matrix l = Matrix::Zero(g.n, g.n);
    for (int i = 0; i < g.n; ++i) {
        double col = 0.0;
        for (int k = 0; k < g.n; ++k) {
            if (k == i) continue;
            l(k, i) = -g.a(k, i);
            col += g.a(k, i);
        }
        l(i, i) = col;
    }
    return l;
}

std::vector<InTree> enumerate_in_trees(const DispersalNetwork& g, int root,
                                       const EnumerationGuards& guards) {
    if (root < 0 || root >= g.n) throw ValidationError("enumerate_in_trees: root out of range");
    if (g.n > guards.in_tree)
        throw CapacityError("enumerate_in_trees: n = " + std::to_string(g.n) +
                            " exceeds the enumeration guard " + std::to_string(guards.in_tree));

    const auto out = out_neighbors(g);
    std::vector<int> sources; // non-root vertices, ascending
    for (int v = 0; v < g.n; ++v)
        if (v != root) sources.push_back(v);

    std::vector<InTree> trees;
    std::vector<int> target(g.n, -1); // chosen out-arc per vertex, -1 = unassigned / root

    const std::function<void(size_t)> assign = [&](size_t idx) {
        if (idx == sources.size()) {
            InTree t;
            t.root = root;
            for (int v : sources) {
                t.arcs.push_back(Arc{v, target[v]});
                t.weight *= g.a(target[v], v);
            }
            trees.push_back(std::move(t));
            return;
        }
        const int v = sources[idx];
        for (int cand : out[v]) {
            // follow assigned arcs from the candidate; hitting v again would
            // close a cycle
            int cur = cand;
            while (cur != v && target[cur] >= 0) cur = target[cur];
            if (cur == v) continue;
            target[v] = cand;
            assign(idx + 1);
            target[v] = -1;
        }
    };
    assign(0);
    return trees;
}

CofactorResult principal_cofactors(const DispersalNetwork& g, const EnumerationGuards& guards) {
    if (!strongly_connected(g.a))
        throw StructureError("principal_cofactors: network is not strongly connected");

    const Matrix l = appendix_laplacian(g);
    CofactorResult res;
    res.cofactors = Vector::Zero(g.n);
    for (int i = 0; i < g.n; ++i) {
        if (g.n == 1) {
            res.cofactors(0) = 1.0;
            break;
        }
        Matrix minor(g.n - 1, g.n - 1);
        for (int r = 0, rr = 0; r < g.n; ++r) {
            if (r == i) continue;
            for (int c = 0, cc = 0; c < g.n; ++c) {
                if (c == i) continue;
                minor(rr, cc) = l(r, c);
                ++cc;
            }
            ++rr;
        }
        res.cofactors(i) = minor.determinant();
    }

    if (g.n <= guards.in_tree) {
        for (int i = 0; i < g.n; ++i) {
            double sum = 0.0;
            for (const InTree& t : enumerate_in_trees(g, i, guards)) sum += t.weight;
            const double det = res.cofactors(i);
            if (std::abs(det - sum) > 1e-9 * (1.0 + std::abs(det)))
                throw NumericError("principal_cofactors: determinant route " + std::to_string(det) +
                                   " disagrees with tree enumeration " + std::to_string(sum) +
                                   " at vertex " + std::to_string(i + 1));
        }
        res.tree_checked = true;
    }

    const double total = res.cofactors.sum();
    if (!(total > 0.0))
        throw StructureError("principal_cofactors: all cofactors vanish (graph not strongly connected)");
    res.alpha = res.cofactors / total;
    return res;
}

namespace {

// Extracts the cycles of a functional graph given per-vertex targets.
// Returns the list of cycles, each as the vertex sequence starting from its
// smallest member.
std::vector<std::vector<int>> functional_cycles(const std::vector<int>& target) {
    const int n = static_cast<int>(target.size());
    std::vector<int> state(n, 0); // 0 = unvisited, 1 = in progress, 2 = done
    std::vector<std::vector<int>> cycles;
    for (int start = 0; start < n; ++start) {
        if (state[start] != 0) continue;
        std::vector<int> path;
        int cur = start;
        while (state[cur] == 0) {
            state[cur] = 1;
            path.push_back(cur);
            cur = target[cur];
        }
        if (state[cur] == 1) {
            // found a new cycle: the tail of `path` starting at cur
            auto it = std::find(path.begin(), path.end(), cur);
            std::vector<int> cyc(it, path.end());
            const auto min_it = std::min_element(cyc.begin(), cyc.end());
            std::rotate(cyc.begin(), min_it, cyc.end());
            cycles.push_back(std::move(cyc));
        }
        for (int v : path) state[v] = 2;
    }
    return cycles;
}

} // namespace

std::vector<UnicyclicSubgraph> enumerate_unicyclic(const DispersalNetwork& g,
                                                   const EnumerationGuards& guards) {
    if (g.n > guards.unicyclic)
        throw CapacityError("enumerate_unicyclic: n = " + std::to_string(g.n) +
                            " exceeds the enumeration guard " + std::to_string(guards.unicyclic));

    const auto out = out_neighbors(g);
    std::vector<UnicyclicSubgraph> result;
    std::vector<int> target(g.n, -1);

    const std::function<void(int)> assign = [&](int v) {
        if (v == g.n) {
            const auto cycles = functional_cycles(target);
            if (cycles.size() != 1) return;
            UnicyclicSubgraph q;
            for (int s = 0; s < g.n; ++s) {
                q.arcs.push_back(Arc{s, target[s]});
                q.weight *= g.a(target[s], s);
            }
            const auto& cyc = cycles.front();
            for (size_t k = 0; k < cyc.size(); ++k)
                q.cycle.push_back(Arc{cyc[k], cyc[(k + 1) % cyc.size()]});
            result.push_back(std::move(q));
            return;
        }
        for (int cand : out[v]) {
            target[v] = cand;
            assign(v + 1);
        }
        target[v] = -1;
    };
    assign(0);
    return result;
}

TreeCycleCheck tree_cycle_residual(const DispersalNetwork& g, const ArcFunctionTable& f,
                                   const Vector& x, const EnumerationGuards& guards) {
    if (x.size() != g.n) throw ValidationError("tree_cycle_residual: x length mismatch");
    if (g.n > guards.unicyclic)
        throw CapacityError("tree_cycle_residual: n = " + std::to_string(g.n) +
                            " exceeds the enumeration guard " + std::to_string(guards.unicyclic));

    const auto eval = [&](int target, int source) {
        const auto it = f.find({target, source});
        if (it == f.end())
            throw ValidationError("tree_cycle_residual: no F entry for arc " +
                                  std::to_string(source + 1) + " -> " + std::to_string(target + 1));
        return it->second(x(target), x(source));
    };

    const CofactorResult cof = principal_cofactors(g, guards);

    TreeCycleCheck check;
    for (int src = 0; src < g.n; ++src)
        for (int tgt = 0; tgt < g.n; ++tgt)
            if (tgt != src && g.a(tgt, src) > 0.0)
                check.lhs += cof.cofactors(src) * g.a(tgt, src) * eval(tgt, src);

    for (const UnicyclicSubgraph& q : enumerate_unicyclic(g, guards)) {
        double cycle_sum = 0.0;
        for (const Arc& arc : q.cycle) cycle_sum += eval(arc.target, arc.source);
        check.rhs += q.weight * cycle_sum;
    }

    check.residual = std::abs(check.lhs - check.rhs);
    check.cofactor_sum = cof.cofactors.sum();
    check.normalized_lhs = check.lhs / check.cofactor_sum;
    return check;
}

namespace {

// Admissible open interval for the ratio k_hi / k_lo across one step of the
// ascending-u recursion: (u_lo(mu+mu') / (mu' u_hi + mu u_lo),
//                         (mu' u_lo + mu u_hi) / (u_hi(mu+mu'))).
std::pair<double, double> step_interval(double u_lo, double u_hi, double mu, double mu_prime) {
    const double lower = u_lo * (mu + mu_prime) / (mu_prime * u_hi + mu * u_lo);
    const double upper = (mu_prime * u_lo + mu * u_hi) / (u_hi * (mu + mu_prime));
    return {lower, upper};
}

} // namespace

KVector construct_k_vector(const Vector& u, double mu, double mu_prime) {
    if (!std::isfinite(mu) || !std::isfinite(mu_prime) || mu <= 0.0 || mu_prime <= 0.0)
        throw DomainError("construct_k_vector: mu and mu' must be positive");
    if (!u.allFinite() || (u.array() <= 0.0).any())
        throw DomainError("construct_k_vector: u must be strictly positive");
    const int n = static_cast<int>(u.size());

    // distinct values ascending (exact duplicates collapse into one group)
    std::vector<double> values(u.data(), u.data() + n);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());

    std::vector<double> group_k(values.size(), 1.0);
    for (size_t i = 1; i < values.size(); ++i) {
        const auto [lower, upper] = step_interval(values[i - 1], values[i], mu, mu_prime);
        group_k[i] = group_k[i - 1] * std::sqrt(lower * upper);
    }

    KVector kv;
    kv.mu = mu;
    kv.mu_prime = mu_prime;
    kv.u = u;
    kv.k = Vector::Zero(n);
    for (int i = 0; i < n; ++i) {
        const auto it = std::lower_bound(values.begin(), values.end(), u(i));
        kv.k(i) = group_k[static_cast<size_t>(it - values.begin())];
    }

    if (!verify_k_vector(kv))
        throw NumericError("construct_k_vector: constructed k fails verification");
    return kv;
}

bool verify_k_vector(const KVector& kv) {
    const int n = static_cast<int>(kv.u.size());
    if (kv.k.size() != n) return false;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            if (kv.u(i) == kv.u(j)) {
                if (kv.k(i) != kv.k(j)) return false;
                continue;
            }
            const double lower = kv.u(j) * (kv.mu + kv.mu_prime) /
                                 (kv.mu_prime * kv.u(i) + kv.mu * kv.u(j));
            const double upper = (kv.mu_prime * kv.u(j) + kv.mu * kv.u(i)) /
                                 (kv.u(i) * (kv.mu + kv.mu_prime));
            const double ratio = kv.k(i) / kv.k(j);
            if (!(lower < ratio && ratio < upper)) return false;
        }
    return true;
}

} // namespace specbound
