#include "specbound/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>

#include "specbound/models.hpp"
#include "specbound/problem_file.hpp"
#include "specbound/random.hpp"
#include "specbound/selftest.hpp"
#include "specbound/spectral.hpp"
#include "specbound/treecycle.hpp"

namespace specbound {

namespace {

struct GlobalOptions {
    std::string file;
    double tol = kDefaultTol;
    bool tol_given = false;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int guard_n = 0; // 0 = library defaults
    bool json_errors = false;
    std::string out_path;
};

struct Loaded {
    ProblemFile pf;
    double tol = kDefaultTol;
    std::uint64_t seed = 0;
    EnumerationGuards guards;
};

Loaded load(const GlobalOptions& opt) {
    Loaded l;
    l.pf = load_problem(opt.file);
    // precedence: flag > analysis block > default
    if (opt.tol_given)
        l.tol = opt.tol;
    else if (l.pf.analysis && l.pf.analysis->tol)
        l.tol = *l.pf.analysis->tol;
    if (opt.seed_given)
        l.seed = opt.seed;
    else if (l.pf.analysis && l.pf.analysis->seed)
        l.seed = *l.pf.analysis->seed;
    int guard = opt.guard_n;
    if (guard == 0 && l.pf.analysis && l.pf.analysis->guard_n) guard = *l.pf.analysis->guard_n;
    if (guard > 0) {
        l.guards.in_tree = guard;
        l.guards.unicyclic = guard;
    }
    return l;
}

DispersalNetwork need_network(const ProblemFile& pf) {
    if (!pf.network) throw ValidationError("this command needs a 'network' block");
    return network_from_block(*pf.network);
}

Vector need_q(const ProblemFile& pf, int n) {
    if (!pf.q) throw ValidationError("this command needs a 'q' block");
    if (static_cast<int>(pf.q->size()) != n)
        throw ValidationError("'q' must have one entry per patch");
    return Eigen::Map<const Vector>(pf.q->data(), n);
}

// Spectral commands act on A - diag(leak) when the network block carries
// leak rates.
Matrix spectral_matrix(const ProblemFile& pf, const DispersalNetwork& net) {
    Matrix a = net.a;
    if (pf.network && pf.network->leak)
        for (int i = 0; i < net.n; ++i) a(i, i) -= (*pf.network->leak)[i];
    return a;
}

std::string vec_str(const Vector& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v(i));
    }
    return s + ")";
}

void kv_line(std::ostream& out, const std::string& key, const std::string& value) {
    out << "  " << key;
    for (size_t i = key.size(); i < 18; ++i) out << ' ';
    out << value << "\n";
}

std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> grid;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t pos = 0;
            const double v = std::stod(item, &pos);
            if (pos != item.size()) throw std::invalid_argument(item);
            grid.push_back(v);
        } catch (const std::exception&) {
            throw ValidationError("bad grid entry '" + item + "'");
        }
    }
    if (grid.empty()) throw ValidationError("empty grid");
    return grid;
}

// Writes CSV to --out (then prints `summary` to stdout) or to stdout.
void emit_csv(const GlobalOptions& opt, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows, std::ostream& out,
              const std::function<void(std::ostream&)>& summary = nullptr) {
    if (opt.out_path.empty()) {
        write_csv(header, rows, out);
        return;
    }
    std::ofstream f(opt.out_path, std::ios::binary);
    if (!f) throw IoError("cannot open output file '" + opt.out_path + "'");
    write_csv(header, rows, f);
    if (summary) summary(out);
}

int cmd_classify(const GlobalOptions& opt, std::ostream& out) {
    const Loaded l = load(opt);
    const DispersalNetwork net = need_network(l.pf);
    const MatrixClass c = classify_matrix(net.a);
    const BlockDecomposition dec = scc_blocks(net.a);

    out << "matrix classification (n = " << net.n << ")\n";
    kv_line(out, "quasi_positive", c.quasi_positive ? "true" : "false");
    kv_line(out, "laplacian", c.laplacian ? "true" : "false");
    kv_line(out, "sub_laplacian", c.sub_laplacian ? "true" : "false");
    kv_line(out, "strictly_sub", c.strictly_sub ? "true" : "false");
    kv_line(out, "strongly_sub", c.strongly_sub ? "true" : "false");
    kv_line(out, "irreducible", c.irreducible ? "true" : "false");
    kv_line(out, "strongly_connected", strongly_connected(net.a) ? "true" : "false");
    std::string blocks;
    for (size_t b = 0; b < dec.blocks.size(); ++b) {
        if (b) blocks += " ";
        blocks += "{";
        for (size_t k = 0; k < dec.blocks[b].size(); ++k) {
            if (k) blocks += ",";
            blocks += std::to_string(dec.blocks[b][k] + 1);
        }
        blocks += "}";
    }
    kv_line(out, "scc_blocks", blocks);
    return 0;
}

int cmd_bound(const GlobalOptions& opt, double mu, std::ostream& out) {
    const Loaded l = load(opt);
    const DispersalNetwork net = need_network(l.pf);
    const Matrix a = spectral_matrix(l.pf, net);
    const Vector q = need_q(l.pf, net.n);
    Matrix m = mu * a;
    m.diagonal() += q;

    out << "spectral bound of mu*A + Q at mu = " << format_double(mu) << "\n";
    try {
        const EigenTriple t = principal_eigen(m, l.tol);
        kv_line(out, "s", format_double(t.value));
        kv_line(out, "residual", format_double(t.residual));
        kv_line(out, "right", vec_str(t.right));
        kv_line(out, "left", vec_str(t.left));
        kv_line(out, "collatz_wielandt", format_double(collatz_wielandt(m, t.right)));
    } catch (const StructureError&) {
        kv_line(out, "s", format_double(spectral_bound(m, l.tol)));
        kv_line(out, "note", "reducible matrix: blockwise bound, no principal eigenpair");
    }
    return 0;
}

int cmd_curve(const GlobalOptions& opt, double mu_min, double mu_max, int steps,
              std::ostream& out) {
    const Loaded l = load(opt);
    const DispersalNetwork net = need_network(l.pf);
    const Matrix a = spectral_matrix(l.pf, net);
    const Vector q = need_q(l.pf, net.n);
    const SpectralCurve curve = bound_curve(a, q, mu_min, mu_max, steps, l.tol);

    std::vector<std::vector<double>> rows;
    rows.reserve(curve.rows.size());
    for (const CurveRow& r : curve.rows) rows.push_back({r.mu, r.s, r.ds, r.d2s});
    emit_csv(opt, {"mu", "s", "ds", "d2s"}, rows, out, [&](std::ostream& o) {
        o << "curve with " << curve.rows.size() << " rows written\n";
        kv_line(o, "s(mu_min)", format_double(curve.rows.front().s));
        kv_line(o, "s(mu_max)", format_double(curve.rows.back().s));
    });
    return 0;
}

int cmd_limits(const GlobalOptions& opt, std::ostream& out) {
    const Loaded l = load(opt);
    const DispersalNetwork net = need_network(l.pf);
    const Matrix a = spectral_matrix(l.pf, net);
    const Vector q = need_q(l.pf, net.n);
    const LimitPair lim = asymptotic_limits(a, q, l.tol);

    out << "limits of s(mu*A + Q)\n";
    kv_line(out, "at_zero", format_double(lim.at_zero));
    if (lim.at_infinity) {
        kv_line(out, "at_infinity", format_double(*lim.at_infinity));
        kv_line(out, "weight_v", vec_str(lim.weight));
    } else {
        kv_line(out, "at_infinity", "-infinity (s(A) < 0)");
    }
    return 0;
}

int cmd_threshold(const GlobalOptions& opt, std::ostream& out) {
    const Loaded l = load(opt);
    const DispersalNetwork net = need_network(l.pf);
    const Matrix a = spectral_matrix(l.pf, net);
    const Vector q = need_q(l.pf, net.n);
    const double mu_star = threshold_mu(a, q, 1.0, l.tol);
    Matrix m = mu_star * a;
    m.diagonal() += q;

    out << "dispersal threshold\n";
    kv_line(out, "mu_star", format_double(mu_star));
    kv_line(out, "s(mu_star A+Q)", format_double(spectral_bound(m, l.tol)));
    return 0;
}

int cmd_karlin(const GlobalOptions& opt, const std::string& grid_text, std::ostream& out) {
    const Loaded l = load(opt);
    if (!l.pf.karlin) throw ValidationError("this command needs a 'karlin' block");
    const std::vector<double> grid = parse_grid(grid_text);

    std::vector<std::vector<double>> rows;
    for (double mu : grid)
        rows.push_back({mu, karlin_map(l.pf.karlin->p, l.pf.karlin->r, mu, l.tol)});
    emit_csv(opt, {"mu", "r"}, rows, out, [&](std::ostream& o) {
        o << "karlin map over " << rows.size() << " grid points written\n";
    });
    return 0;
}

int cmd_tree_verify(const GlobalOptions& opt, std::ostream& out) {
    const Loaded l = load(opt);
    const DispersalNetwork net = need_network(l.pf);
    const CofactorResult cof = principal_cofactors(net, l.guards);

    out << "matrix-tree verification (n = " << net.n << ")\n";
    for (int i = 0; i < net.n; ++i) {
        double tree_sum = 0.0;
        size_t count = 0;
        for (const InTree& t : enumerate_in_trees(net, i, l.guards)) {
            tree_sum += t.weight;
            ++count;
        }
        kv_line(out, "C_" + std::to_string(i + 1),
                format_double(cof.cofactors(i)) + "  trees " + std::to_string(count) +
                    "  sum " + format_double(tree_sum));
    }
    kv_line(out, "alpha", vec_str(cof.alpha));

    Rng rng(l.seed);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> pos(0.5, 2.0);
    ArcFunctionTable table;
    for (int src = 0; src < net.n; ++src)
        for (int tgt = 0; tgt < net.n; ++tgt)
            if (tgt != src && net.a(tgt, src) > 0.0) {
                const double v = val(rng);
                table[{tgt, src}] = [v](double, double) { return v; };
            }
    Vector x(net.n);
    for (int i = 0; i < net.n; ++i) x(i) = pos(rng);
    const TreeCycleCheck chk = tree_cycle_residual(net, table, x, l.guards);
    const size_t unicyclic_count = enumerate_unicyclic(net, l.guards).size();

    out << "tree-cycle identity (seeded F table, seed = " << l.seed << ")\n";
    kv_line(out, "unicyclic_count", std::to_string(unicyclic_count));
    kv_line(out, "lhs", format_double(chk.lhs));
    kv_line(out, "rhs", format_double(chk.rhs));
    kv_line(out, "residual", format_double(chk.residual));
    kv_line(out, "normalized_lhs", format_double(chk.normalized_lhs));
    kv_line(out, "cofactor_sum", format_double(chk.cofactor_sum));
    return 0;
}

int cmd_kvector(const GlobalOptions& opt, double mu, double mu_prime, std::ostream& out) {
    const Loaded l = load(opt);
    Vector u;
    if (l.pf.analysis && l.pf.analysis->u) {
        u = Eigen::Map<const Vector>(l.pf.analysis->u->data(),
                                     static_cast<Eigen::Index>(l.pf.analysis->u->size()));
    } else {
        const DispersalNetwork net = need_network(l.pf);
        const Matrix a = spectral_matrix(l.pf, net);
        const Vector q = need_q(l.pf, net.n);
        Matrix m = mu * a;
        m.diagonal() += q;
        u = principal_eigen(m, l.tol).right;
    }
    const KVector kv = construct_k_vector(u, mu, mu_prime);

    out << "scaling vector for mu = " << format_double(mu)
        << ", mu' = " << format_double(mu_prime) << "\n";
    kv_line(out, "u", vec_str(kv.u));
    kv_line(out, "k", vec_str(kv.k));
    kv_line(out, "verified", verify_k_vector(kv) ? "true" : "false");
    return 0;
}

Vector default_initial_state(const ModelSpec& spec) {
    return std::visit(
        [](const auto& m) -> Vector {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SingleModel>) {
                Vector y(m.net.n);
                for (int i = 0; i < m.net.n; ++i)
                    y(i) = m.growth == GrowthFamily::Logistic ? 0.5 * m.K(i)
                                                              : 0.5 * std::max(m.p(i), 0.0);
                return y;
            } else if constexpr (std::is_same_v<T, PredPreyModel>) {
                const int n = m.prey_net.n;
                Vector y(2 * n);
                for (int i = 0; i < n; ++i) {
                    y(i) = 0.5 * m.K(i);
                    y(n + i) = 0.05 * m.K(i);
                }
                return y;
            } else if constexpr (std::is_same_v<T, CompetitionModel>) {
                const int n = m.net.n;
                Vector y(2 * n);
                for (int i = 0; i < n; ++i) {
                    y(i) = std::max(m.p(i) / 2.0, 0.01);
                    y(n + i) = std::max(m.p(i) / 2.0, 0.01);
                }
                return y;
            } else {
                const int n = m.net.n;
                Vector y(2 * n);
                for (int j = 0; j < n; ++j) {
                    y(j) = 0.9 * m.total_population / n;
                    y(n + j) = 0.1 * m.total_population / n;
                }
                return y;
            }
        },
        spec);
}

std::vector<std::string> state_names(const ModelSpec& spec) {
    std::vector<std::string> names;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, SingleModel>) {
                for (int i = 1; i <= m.net.n; ++i) names.push_back("u" + std::to_string(i));
            } else if constexpr (std::is_same_v<T, SisModel>) {
                for (int i = 1; i <= m.net.n; ++i) names.push_back("S" + std::to_string(i));
                for (int i = 1; i <= m.net.n; ++i) names.push_back("I" + std::to_string(i));
            } else {
                const int n = state_dimension(ModelSpec(m)) / 2;
                for (int i = 1; i <= n; ++i) names.push_back("u" + std::to_string(i));
                for (int i = 1; i <= n; ++i) names.push_back("v" + std::to_string(i));
            }
        },
        spec);
    return names;
}

int cmd_simulate(const GlobalOptions& opt, double t_end, std::ostream& out) {
    const Loaded l = load(opt);
    const ModelSpec spec = model_from_problem(l.pf);
    if (t_end <= 0.0) throw ValidationError("--t-end must be positive");

    Vector y0;
    if (l.pf.analysis && l.pf.analysis->y0) {
        if (static_cast<int>(l.pf.analysis->y0->size()) != state_dimension(spec))
            throw ValidationError("analysis/y0 has the wrong dimension for this model");
        y0 = Eigen::Map<const Vector>(l.pf.analysis->y0->data(),
                                      static_cast<Eigen::Index>(l.pf.analysis->y0->size()));
    } else {
        y0 = default_initial_state(spec);
    }

    const Trajectory traj = integrate(make_rhs(spec), y0, 0.0, t_end);
    if (traj.termination == Termination::StepFailure)
        throw NumericError("simulate: integrator step failure at t = " +
                           std::to_string(traj.final_time()));

    std::vector<std::string> header = {"t"};
    for (const std::string& n : state_names(spec)) header.push_back(n);
    std::vector<std::vector<double>> rows;
    rows.reserve(traj.times.size());
    for (size_t k = 0; k < traj.times.size(); ++k) {
        std::vector<double> row = {traj.times[k]};
        for (Eigen::Index i = 0; i < traj.states[k].size(); ++i)
            row.push_back(traj.states[k](i));
        rows.push_back(std::move(row));
    }
    emit_csv(opt, header, rows, out, [&](std::ostream& o) {
        o << "trajectory with " << rows.size() << " rows written\n";
        kv_line(o, "final_state", vec_str(traj.final_state()));
        kv_line(o, "clamp_events", std::to_string(traj.clamp_events));
    });
    return 0;
}

int cmd_regime(const GlobalOptions& opt, std::ostream& out) {
    const Loaded l = load(opt);
    const ModelSpec spec = model_from_problem(l.pf);

    if (const auto* single = std::get_if<SingleModel>(&spec)) {
        const RegimeReport rep = classify_regime(*single, l.tol);
        const Vector zero = Vector::Zero(single->net.n);
        const double s0 = spectral_bound(model_jacobian(spec, zero), l.tol);
        out << "single-species regime\n";
        kv_line(out, "M", format_double(rep.M));
        kv_line(out, "m", format_double(rep.m));
        switch (rep.verdict) {
        case RegimeVerdict::ExtinctionAllMu: kv_line(out, "verdict", "extinction_all_mu"); break;
        case RegimeVerdict::PersistenceAllMu:
            kv_line(out, "verdict", "persistence_all_mu");
            break;
        case RegimeVerdict::ThresholdAt:
            kv_line(out, "verdict", "threshold_at(" + format_double(*rep.mu_star) + ")");
            break;
        }
        kv_line(out, "theorem_case", rep.theorem_case);
        kv_line(out, "s(J(0)) at mu", format_double(s0));
        return 0;
    }
    if (const auto* pp = std::get_if<PredPreyModel>(&spec)) {
        const PredPreyThreshold res = predprey_threshold(*pp, l.tol);
        const int n = pp->prey_net.n;
        Vector e1 = Vector::Zero(2 * n);
        e1.head(n) = res.prey_equilibrium;
        const double s1 = spectral_bound(model_jacobian(spec, e1), l.tol);
        out << "predator-prey regime at E1 = (u*, 0)\n";
        kv_line(out, "u_star", vec_str(res.prey_equilibrium));
        kv_line(out, "M", format_double(res.M));
        kv_line(out, "m", format_double(res.m));
        switch (res.kind) {
        case PredatorInvasion::StableAllMuV:
            kv_line(out, "verdict", "E1 stable for every mu_v (M < 0)");
            break;
        case PredatorInvasion::UnstableAllMuV:
            kv_line(out, "verdict", "E1 unstable for every mu_v (m > 0)");
            break;
        case PredatorInvasion::Threshold:
            kv_line(out, "verdict", "threshold_at(" + format_double(*res.mu_v_star) + ")");
            break;
        }
        kv_line(out, "s(J(E1)) at mu_v", format_double(s1));
        return 0;
    }
    throw ValidationError("regime needs a 'single' or 'predprey' model block");
}

int cmd_r0(const GlobalOptions& opt, const std::string& grid_text, std::ostream& out) {
    const Loaded l = load(opt);
    const ModelSpec spec = model_from_problem(l.pf);
    const auto* sis = std::get_if<SisModel>(&spec);
    if (!sis) throw ValidationError("r0 needs a 'sis' model block");
    const std::vector<double> grid = parse_grid(grid_text);
    const std::vector<R0Report> reports = r0_sweep(*sis, grid, l.tol);

    std::vector<std::vector<double>> rows;
    for (const R0Report& rep : reports) rows.push_back({rep.mu_I, rep.r0});
    emit_csv(opt, {"mu_I", "r0"}, rows, out, [&](std::ostream& o) {
        o << "R0 sweep over " << rows.size() << " grid points written\n";
        kv_line(o, "limit_zero", format_double(reports.front().limit_zero));
        kv_line(o, "limit_infinity", format_double(reports.front().limit_infinity));
        kv_line(o, "dfe_S", vec_str(disease_free_equilibrium(*sis, l.tol)));
    });
    return 0;
}

int cmd_compete(const GlobalOptions& opt, double t_end, std::ostream& out) {
    const Loaded l = load(opt);
    const ModelSpec spec = model_from_problem(l.pf);
    const auto* comp = std::get_if<CompetitionModel>(&spec);
    if (!comp) throw ValidationError("compete needs a 'competition' model block");
    if (t_end <= 0.0) throw ValidationError("--t-end must be positive");

    std::optional<Vector> y0;
    if (l.pf.analysis && l.pf.analysis->y0)
        y0 = Eigen::Map<const Vector>(l.pf.analysis->y0->data(),
                                      static_cast<Eigen::Index>(l.pf.analysis->y0->size()));
    const CompetitionOutcome res = competition_outcome(*comp, t_end, 1e-5, y0);

    out << "competition outcome by t = " << format_double(res.t_reached) << "\n";
    switch (res.verdict) {
    case CompetitionVerdict::SlowerWins: kv_line(out, "verdict", "slower_wins"); break;
    case CompetitionVerdict::BothExtinct: kv_line(out, "verdict", "both_extinct"); break;
    case CompetitionVerdict::Undetermined: kv_line(out, "verdict", "undetermined"); break;
    }
    kv_line(out, "final_u", vec_str(res.final_u));
    kv_line(out, "final_v", vec_str(res.final_v));
    kv_line(out, "v_norm", format_double(res.v_norm));
    if (res.u_star) kv_line(out, "u_star", vec_str(*res.u_star));
    if (res.u_star_distance)
        kv_line(out, "u_star_distance", format_double(*res.u_star_distance));
    return 0;
}

std::string error_kind(const Error& e) {
    if (dynamic_cast<const ValidationError*>(&e)) return "validation";
    if (dynamic_cast<const DomainError*>(&e)) return "domain";
    if (dynamic_cast<const StructureError*>(&e)) return "structure";
    if (dynamic_cast<const CapacityError*>(&e)) return "capacity";
    if (dynamic_cast<const IoError*>(&e)) return "io";
    if (dynamic_cast<const NumericError*>(&e)) return "numeric";
    return "error";
}

int exit_code_for(const Error& e) {
    if (dynamic_cast<const CapacityError*>(&e)) return 4;
    if (dynamic_cast<const NumericError*>(&e) || dynamic_cast<const IoError*>(&e)) return 3;
    return 2;
}

void report_error(const Error& e, bool json_errors, std::ostream& err) {
    if (json_errors) {
        // single-line JSON, manually escaped (message content is plain ASCII)
        std::string msg = e.what();
        std::string escaped;
        for (char c : msg) {
            if (c == '"' || c == '\\') escaped += '\\';
            if (c == '\n') {
                escaped += "\\n";
                continue;
            }
            escaped += c;
        }
        err << "{\"error\":{\"type\":\"" << error_kind(e) << "\",\"message\":\"" << escaped
            << "\"}}\n";
    } else {
        err << "error (" << error_kind(e) << "): " << e.what() << "\n";
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"spectral bounds, thresholds and patch-model dynamics for dispersal networks"};
    app.require_subcommand(1);

    GlobalOptions opt;
    double mu = 1.0, mu_min = 0.1, mu_max = 10.0, mu_prime = 1.0, t_end = 100.0;
    int steps = 100;
    std::string grid_text;
    std::uint64_t selftest_seed = 0;
    double selftest_scale = 1.0;

    const auto add_common = [&](CLI::App* sub, bool needs_file = true) {
        if (needs_file)
            sub->add_option("file", opt.file, "problem file (JSON)")->required();
        sub->add_option("--tol", opt.tol, "numeric tolerance override")
            ->each([&](const std::string&) { opt.tol_given = true; });
        sub->add_option("--seed", opt.seed, "random seed override")
            ->each([&](const std::string&) { opt.seed_given = true; });
        sub->add_option("--guard-n", opt.guard_n, "enumeration guard override");
        sub->add_flag("--json-errors", opt.json_errors,
                      "machine-readable errors on stderr as single-line JSON");
        sub->add_option("--out", opt.out_path, "write CSV to this file instead of stdout");
    };

    CLI::App* classify = app.add_subcommand("classify", "structural matrix classification");
    add_common(classify);
    CLI::App* bound = app.add_subcommand("bound", "spectral bound s(mu A + Q) at one mu");
    add_common(bound);
    bound->add_option("--mu", mu, "dispersal rate")->required();
    CLI::App* curve = app.add_subcommand("curve", "sampled curve mu -> (s, s', s'')");
    add_common(curve);
    curve->add_option("--mu-min", mu_min)->required();
    curve->add_option("--mu-max", mu_max)->required();
    curve->add_option("--steps", steps)->required();
    CLI::App* limits = app.add_subcommand("limits", "limits of s at mu -> 0 and infinity");
    add_common(limits);
    CLI::App* threshold = app.add_subcommand("threshold", "unique mu* with s(mu* A + Q) = 0");
    add_common(threshold);
    CLI::App* karlin = app.add_subcommand("karlin", "Karlin map r(((1-mu)I+mu P)R) over a grid");
    add_common(karlin);
    karlin->add_option("--mu-grid", grid_text, "comma-separated mu values in (0,1)")->required();
    CLI::App* tree_verify =
        app.add_subcommand("tree-verify", "matrix-tree cofactors and tree-cycle identity");
    add_common(tree_verify);
    CLI::App* kvector = app.add_subcommand("kvector", "constructive scaling vector of u");
    add_common(kvector);
    kvector->add_option("--mu", mu, "dispersal rate")->required();
    kvector->add_option("--mu-prime", mu_prime, "dispersal increment")->required();
    CLI::App* simulate = app.add_subcommand("simulate", "integrate the model ODE");
    add_common(simulate);
    simulate->add_option("--t-end", t_end, "final time")->required();
    CLI::App* regime = app.add_subcommand("regime", "persistence/extinction classification");
    add_common(regime);
    CLI::App* r0 = app.add_subcommand("r0", "SIS basic reproduction number over a mu_I grid");
    add_common(r0);
    r0->add_option("--mu-grid", grid_text, "comma-separated mu_I values")->required();
    CLI::App* compete = app.add_subcommand("compete", "competition exclusion simulation");
    add_common(compete);
    compete->add_option("--t-end", t_end, "simulation horizon")->required();
    CLI::App* selftest = app.add_subcommand("selftest", "randomized property sweeps");
    selftest->add_option("--seed", selftest_seed, "random seed (mandatory)")->required();
    selftest->add_option("--scale", selftest_scale, "case-count multiplier");
    selftest->add_flag("--json-errors", opt.json_errors, "machine-readable errors");

    std::vector<std::string> argv_storage = args;
    std::vector<const char*> argv = {"specbound"};
    for (const std::string& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        err << app.help();
        return 2;
    }

    try {
        if (classify->parsed()) return cmd_classify(opt, out);
        if (bound->parsed()) return cmd_bound(opt, mu, out);
        if (curve->parsed()) return cmd_curve(opt, mu_min, mu_max, steps, out);
        if (limits->parsed()) return cmd_limits(opt, out);
        if (threshold->parsed()) return cmd_threshold(opt, out);
        if (karlin->parsed()) return cmd_karlin(opt, grid_text, out);
        if (tree_verify->parsed()) return cmd_tree_verify(opt, out);
        if (kvector->parsed()) return cmd_kvector(opt, mu, mu_prime, out);
        if (simulate->parsed()) return cmd_simulate(opt, t_end, out);
        if (regime->parsed()) return cmd_regime(opt, out);
        if (r0->parsed()) return cmd_r0(opt, grid_text, out);
        if (compete->parsed()) return cmd_compete(opt, t_end, out);
        if (selftest->parsed())
            return run_selftest(selftest_seed, selftest_scale, out) == 0 ? 0 : 3;
    } catch (const Error& e) {
        report_error(e, opt.json_errors, err);
        return exit_code_for(e);
    }
    err << "usage error: no subcommand given\n" << app.help();
    return 2;
}

} // namespace specbound
