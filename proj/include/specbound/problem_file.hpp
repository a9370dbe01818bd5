#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "specbound/models.hpp"
#include "specbound/network.hpp"

namespace specbound {

/// One off-diagonal entry: [i, j, rate] means movement j -> i, 1-based in
/// files.
struct EdgeTriplet {
    int i = 0;
    int j = 0;
    double rate = 0.0;
};

struct NetworkBlock {
    int n = 0;
    std::vector<EdgeTriplet> edges;
    std::optional<std::vector<double>> diag;
    std::optional<std::vector<double>> leak;
};

struct KarlinBlock {
    Matrix p; // rows of the column-stochastic matrix
    Vector r;
};

struct AnalysisBlock {
    std::optional<double> tol;
    std::optional<std::uint64_t> seed;
    std::optional<int> guard_n;
    std::optional<std::vector<double>> u;  // kvector input override
    std::optional<std::vector<double>> y0; // simulate initial state override
};

struct ModelBlock {
    std::string variant; // single | predprey | competition | sis
    // single
    std::optional<std::string> growth_family; // logistic | linear
    std::optional<std::vector<double>> r, K, p;
    std::optional<double> mu;
    // predprey
    std::optional<std::string> response_family; // lotka | monod
    std::optional<std::vector<double>> response_a, c, d;
    std::optional<double> mu_u, mu_v;
    // sis
    std::optional<std::vector<double>> beta, gamma;
    std::optional<double> mu_S, mu_I, N;
};

struct ProblemFile {
    std::string schema_version;
    std::optional<NetworkBlock> network;
    std::optional<NetworkBlock> network_b;
    std::optional<std::vector<double>> q;
    std::optional<ModelBlock> model;
    std::optional<KarlinBlock> karlin;
    std::optional<AnalysisBlock> analysis;
};

/// Parses and strictly validates a problem file; unknown keys, bad indices
/// and malformed values raise ValidationError with the offending JSON path.
ProblemFile load_problem(const std::string& path);
ProblemFile parse_problem(const nlohmann::json& doc);

/// Inverse of parse_problem; loading then serializing a file reproduces the
/// original document value-for-value.
nlohmann::json serialize_problem(const ProblemFile& pf);

/// Builds the dispersal network from a network block (duplicate and self
/// arcs rejected during parsing).
DispersalNetwork network_from_block(const NetworkBlock& block);

/// Instantiates the model described by the file (network + model blocks).
ModelSpec model_from_problem(const ProblemFile& pf);

/// Shortest decimal form that parses back to the same double (17
/// significant digits).
std::string format_double(double value);

/// Writes header + rows as UTF-8 comma-separated values with '.' decimals
/// and round-trip-exact numbers.
void write_csv(const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows, std::ostream& out);

} // namespace specbound
