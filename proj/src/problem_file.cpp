#include "specbound/problem_file.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

namespace specbound {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw ValidationError("problem file: " + path + ": " + message);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& path) {
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) fail(path + "/" + item.key(), "unknown key");
}

const json& require_key(const json& obj, const std::string& key, const std::string& path) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(path, "missing required key '" + key + "'");
    return *it;
}

double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& path) {
    if (!v.is_number_integer()) fail(path, "expected an integer");
    return v.get<int>();
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
    if (!v.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (size_t k = 0; k < v.size(); ++k)
        out.push_back(as_number(v[k], path + "/" + std::to_string(k)));
    return out;
}

NetworkBlock parse_network(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown_keys(obj, {"n", "edges", "diag", "leak"}, path);

    NetworkBlock block;
    block.n = as_int(require_key(obj, "n", path), path + "/n");
    if (block.n < 1) fail(path + "/n", "patch count must be >= 1");

    const json& edges = require_key(obj, "edges", path);
    if (!edges.is_array()) fail(path + "/edges", "expected an array of [i, j, rate] triplets");
    std::set<std::pair<int, int>> seen;
    for (size_t k = 0; k < edges.size(); ++k) {
        const std::string epath = path + "/edges/" + std::to_string(k);
        const json& e = edges[k];
        if (!e.is_array() || e.size() != 3) fail(epath, "expected [i, j, rate]");
        EdgeTriplet t;
        t.i = as_int(e[0], epath + "/0");
        t.j = as_int(e[1], epath + "/1");
        t.rate = as_number(e[2], epath + "/2");
        if (t.i < 1 || t.i > block.n || t.j < 1 || t.j > block.n)
            fail(epath, "patch index out of range 1.." + std::to_string(block.n));
        if (t.i == t.j) fail(epath, "self arcs are rejected");
        if (!seen.insert({t.i, t.j}).second) fail(epath, "duplicate arc is rejected, not summed");
        if (!std::isfinite(t.rate)) fail(epath + "/2", "rate must be finite");
        if (t.rate < 0.0) fail(epath + "/2", "rate must be >= 0");
        block.edges.push_back(t);
    }

    if (obj.contains("diag")) {
        block.diag = as_number_list(obj["diag"], path + "/diag");
        if (static_cast<int>(block.diag->size()) != block.n)
            fail(path + "/diag", "expected n entries");
    }
    if (obj.contains("leak")) {
        block.leak = as_number_list(obj["leak"], path + "/leak");
        if (static_cast<int>(block.leak->size()) != block.n)
            fail(path + "/leak", "expected n entries");
        for (size_t k = 0; k < block.leak->size(); ++k)
            if (!((*block.leak)[k] >= 0.0))
                fail(path + "/leak/" + std::to_string(k), "leak rate must be >= 0");
    }
    return block;
}

KarlinBlock parse_karlin(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown_keys(obj, {"p", "r"}, path);
    const json& rows = require_key(obj, "p", path);
    if (!rows.is_array() || rows.empty()) fail(path + "/p", "expected a matrix as rows");
    const size_t n = rows.size();
    KarlinBlock block;
    block.p.resize(n, n);
    for (size_t i = 0; i < n; ++i) {
        const std::string rpath = path + "/p/" + std::to_string(i);
        const auto row = as_number_list(rows[i], rpath);
        if (row.size() != n) fail(rpath, "matrix must be square");
        for (size_t j = 0; j < n; ++j) block.p(i, j) = row[j];
    }
    const auto r = as_number_list(require_key(obj, "r", path), path + "/r");
    if (r.size() != n) fail(path + "/r", "expected n entries");
    block.r = Eigen::Map<const Vector>(r.data(), n);
    return block;
}

AnalysisBlock parse_analysis(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    reject_unknown_keys(obj, {"tol", "seed", "guard_n", "u", "y0"}, path);
    AnalysisBlock block;
    if (obj.contains("tol")) {
        block.tol = as_number(obj["tol"], path + "/tol");
        if (!(*block.tol > 0.0)) fail(path + "/tol", "tolerance must be positive");
    }
    if (obj.contains("seed")) {
        if (!obj["seed"].is_number_unsigned()) fail(path + "/seed", "expected a nonnegative integer");
        block.seed = obj["seed"].get<std::uint64_t>();
    }
    if (obj.contains("guard_n")) {
        block.guard_n = as_int(obj["guard_n"], path + "/guard_n");
        if (*block.guard_n < 1) fail(path + "/guard_n", "guard must be >= 1");
    }
    if (obj.contains("u")) block.u = as_number_list(obj["u"], path + "/u");
    if (obj.contains("y0")) block.y0 = as_number_list(obj["y0"], path + "/y0");
    return block;
}

ModelBlock parse_model(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail(path, "expected an object");
    ModelBlock block;
    const json& variant = require_key(obj, "variant", path);
    if (!variant.is_string()) fail(path + "/variant", "expected a string");
    block.variant = variant.get<std::string>();

    if (block.variant == "single") {
        reject_unknown_keys(obj, {"variant", "growth", "mu"}, path);
        const json& growth = require_key(obj, "growth", path);
        const std::string gpath = path + "/growth";
        if (!growth.is_object()) fail(gpath, "expected an object");
        const json& fam = require_key(growth, "family", gpath);
        if (!fam.is_string()) fail(gpath + "/family", "expected a string");
        block.growth_family = fam.get<std::string>();
        if (*block.growth_family == "logistic") {
            reject_unknown_keys(growth, {"family", "r", "K"}, gpath);
            block.r = as_number_list(require_key(growth, "r", gpath), gpath + "/r");
            block.K = as_number_list(require_key(growth, "K", gpath), gpath + "/K");
        } else if (*block.growth_family == "linear") {
            reject_unknown_keys(growth, {"family", "p"}, gpath);
            block.p = as_number_list(require_key(growth, "p", gpath), gpath + "/p");
        } else {
            fail(gpath + "/family", "expected 'logistic' or 'linear'");
        }
        block.mu = as_number(require_key(obj, "mu", path), path + "/mu");
    } else if (block.variant == "predprey") {
        reject_unknown_keys(obj, {"variant", "r", "K", "response", "c", "d", "mu_u", "mu_v"},
                            path);
        block.r = as_number_list(require_key(obj, "r", path), path + "/r");
        block.K = as_number_list(require_key(obj, "K", path), path + "/K");
        const json& resp = require_key(obj, "response", path);
        const std::string rpath = path + "/response";
        if (!resp.is_object()) fail(rpath, "expected an object");
        const json& fam = require_key(resp, "family", rpath);
        if (!fam.is_string()) fail(rpath + "/family", "expected a string");
        block.response_family = fam.get<std::string>();
        if (*block.response_family == "lotka") {
            reject_unknown_keys(resp, {"family"}, rpath);
        } else if (*block.response_family == "monod") {
            reject_unknown_keys(resp, {"family", "a"}, rpath);
            block.response_a = as_number_list(require_key(resp, "a", rpath), rpath + "/a");
        } else {
            fail(rpath + "/family", "expected 'lotka' or 'monod'");
        }
        block.c = as_number_list(require_key(obj, "c", path), path + "/c");
        block.d = as_number_list(require_key(obj, "d", path), path + "/d");
        block.mu_u = as_number(require_key(obj, "mu_u", path), path + "/mu_u");
        block.mu_v = as_number(require_key(obj, "mu_v", path), path + "/mu_v");
    } else if (block.variant == "competition") {
        reject_unknown_keys(obj, {"variant", "p", "mu_u", "mu_v"}, path);
        block.p = as_number_list(require_key(obj, "p", path), path + "/p");
        block.mu_u = as_number(require_key(obj, "mu_u", path), path + "/mu_u");
        block.mu_v = as_number(require_key(obj, "mu_v", path), path + "/mu_v");
    } else if (block.variant == "sis") {
        reject_unknown_keys(obj, {"variant", "beta", "gamma", "mu_S", "mu_I", "N"}, path);
        block.beta = as_number_list(require_key(obj, "beta", path), path + "/beta");
        block.gamma = as_number_list(require_key(obj, "gamma", path), path + "/gamma");
        block.mu_S = as_number(require_key(obj, "mu_S", path), path + "/mu_S");
        block.mu_I = as_number(require_key(obj, "mu_I", path), path + "/mu_I");
        block.N = as_number(require_key(obj, "N", path), path + "/N");
    } else {
        fail(path + "/variant", "expected one of single|predprey|competition|sis");
    }
    return block;
}

} // namespace

ProblemFile parse_problem(const json& doc) {
    if (!doc.is_object()) fail("/", "expected a JSON object");
    reject_unknown_keys(doc,
                        {"schema_version", "network", "network_b", "q", "model", "karlin",
                         "analysis"},
                        "");

    ProblemFile pf;
    const json& ver = require_key(doc, "schema_version", "");
    if (!ver.is_string()) fail("/schema_version", "expected a string");
    pf.schema_version = ver.get<std::string>();
    if (pf.schema_version != "1")
        fail("/schema_version", "unsupported schema version '" + pf.schema_version + "'");

    if (doc.contains("network")) pf.network = parse_network(doc["network"], "/network");
    if (doc.contains("network_b")) pf.network_b = parse_network(doc["network_b"], "/network_b");
    if (doc.contains("q")) {
        pf.q = as_number_list(doc["q"], "/q");
        if (pf.network && static_cast<int>(pf.q->size()) != pf.network->n)
            fail("/q", "expected n entries");
    }
    if (doc.contains("model")) pf.model = parse_model(doc["model"], "/model");
    if (doc.contains("karlin")) pf.karlin = parse_karlin(doc["karlin"], "/karlin");
    if (doc.contains("analysis")) pf.analysis = parse_analysis(doc["analysis"], "/analysis");
    return pf;
}

ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open problem file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError("problem file '" + path + "': " + e.what());
    }
    return parse_problem(doc);
}

namespace {

json network_to_json(const NetworkBlock& block) {
    json obj;
    obj["n"] = block.n;
    json edges = json::array();
    for (const auto& e : block.edges) edges.push_back(json::array({e.i, e.j, e.rate}));
    obj["edges"] = edges;
    if (block.diag) obj["diag"] = *block.diag;
    if (block.leak) obj["leak"] = *block.leak;
    return obj;
}

} // namespace

json serialize_problem(const ProblemFile& pf) {
    json doc;
    doc["schema_version"] = pf.schema_version;
    if (pf.network) doc["network"] = network_to_json(*pf.network);
    if (pf.network_b) doc["network_b"] = network_to_json(*pf.network_b);
    if (pf.q) doc["q"] = *pf.q;
    if (pf.model) {
        const ModelBlock& m = *pf.model;
        json obj;
        obj["variant"] = m.variant;
        if (m.variant == "single") {
            json growth;
            growth["family"] = *m.growth_family;
            if (*m.growth_family == "logistic") {
                growth["r"] = *m.r;
                growth["K"] = *m.K;
            } else {
                growth["p"] = *m.p;
            }
            obj["growth"] = growth;
            obj["mu"] = *m.mu;
        } else if (m.variant == "predprey") {
            obj["r"] = *m.r;
            obj["K"] = *m.K;
            json resp;
            resp["family"] = *m.response_family;
            if (*m.response_family == "monod") resp["a"] = *m.response_a;
            obj["response"] = resp;
            obj["c"] = *m.c;
            obj["d"] = *m.d;
            obj["mu_u"] = *m.mu_u;
            obj["mu_v"] = *m.mu_v;
        } else if (m.variant == "competition") {
            obj["p"] = *m.p;
            obj["mu_u"] = *m.mu_u;
            obj["mu_v"] = *m.mu_v;
        } else {
            obj["beta"] = *m.beta;
            obj["gamma"] = *m.gamma;
            obj["mu_S"] = *m.mu_S;
            obj["mu_I"] = *m.mu_I;
            obj["N"] = *m.N;
        }
        doc["model"] = obj;
    }
    if (pf.karlin) {
        json obj;
        json rows = json::array();
        for (int i = 0; i < pf.karlin->p.rows(); ++i) {
            json row = json::array();
            for (int j = 0; j < pf.karlin->p.cols(); ++j) row.push_back(pf.karlin->p(i, j));
            rows.push_back(row);
        }
        obj["p"] = rows;
        obj["r"] = std::vector<double>(pf.karlin->r.data(),
                                       pf.karlin->r.data() + pf.karlin->r.size());
        doc["karlin"] = obj;
    }
    if (pf.analysis) {
        json obj = json::object();
        if (pf.analysis->tol) obj["tol"] = *pf.analysis->tol;
        if (pf.analysis->seed) obj["seed"] = *pf.analysis->seed;
        if (pf.analysis->guard_n) obj["guard_n"] = *pf.analysis->guard_n;
        if (pf.analysis->u) obj["u"] = *pf.analysis->u;
        if (pf.analysis->y0) obj["y0"] = *pf.analysis->y0;
        doc["analysis"] = obj;
    }
    return doc;
}

DispersalNetwork network_from_block(const NetworkBlock& block) {
    Matrix offdiag = Matrix::Zero(block.n, block.n);
    for (const auto& e : block.edges) offdiag(e.i - 1, e.j - 1) = e.rate;
    std::optional<Vector> diag;
    if (block.diag)
        diag = Eigen::Map<const Vector>(block.diag->data(),
                                        static_cast<Eigen::Index>(block.diag->size()));
    return build_network(block.n, offdiag, diag);
}

namespace {

Vector to_vector(const std::vector<double>& v) {
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

[[noreturn]] void missing(const std::string& what) {
    throw ValidationError("problem file: model block is missing " + what);
}

} // namespace

ModelSpec model_from_problem(const ProblemFile& pf) {
    if (!pf.model) throw ValidationError("problem file: this command needs a model block");
    if (!pf.network) throw ValidationError("problem file: this command needs a network block");
    const ModelBlock& m = *pf.model;
    const DispersalNetwork net = network_from_block(*pf.network);

    ModelSpec spec;
    if (m.variant == "single") {
        SingleModel s;
        s.net = net;
        s.growth = *m.growth_family == "logistic" ? GrowthFamily::Logistic : GrowthFamily::Linear;
        if (s.growth == GrowthFamily::Logistic) {
            s.r = to_vector(*m.r);
            s.K = to_vector(*m.K);
        } else {
            s.p = to_vector(*m.p);
        }
        if (pf.network->leak) s.leak = to_vector(*pf.network->leak);
        if (!m.mu) missing("mu");
        s.mu = *m.mu;
        spec = s;
    } else if (m.variant == "predprey") {
        PredPreyModel s;
        s.prey_net = net;
        s.pred_net = pf.network_b ? network_from_block(*pf.network_b) : net;
        s.r = to_vector(*m.r);
        s.K = to_vector(*m.K);
        s.response =
            *m.response_family == "lotka" ? ResponseFamily::Lotka : ResponseFamily::Monod;
        if (s.response == ResponseFamily::Monod) s.response_a = to_vector(*m.response_a);
        s.c = to_vector(*m.c);
        s.d = to_vector(*m.d);
        s.mu_u = *m.mu_u;
        s.mu_v = *m.mu_v;
        spec = s;
    } else if (m.variant == "competition") {
        CompetitionModel s;
        s.net = net;
        s.p = to_vector(*m.p);
        s.mu_u = *m.mu_u;
        s.mu_v = *m.mu_v;
        spec = s;
    } else {
        SisModel s;
        s.net = net;
        s.beta = to_vector(*m.beta);
        s.gamma = to_vector(*m.gamma);
        s.mu_s = *m.mu_S;
        s.mu_i = *m.mu_I;
        s.total_population = *m.N;
        spec = s;
    }
    validate_model(spec);
    return spec;
}

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_csv(const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, std::ostream& out) {
    for (size_t i = 0; i < header.size(); ++i) {
        if (i) out << ',';
        out << header[i];
    }
    out << '\n';
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
}

} // namespace specbound
