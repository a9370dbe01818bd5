#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "specbound/models.hpp"
#include "specbound/network.hpp"
#include "specbound/spectral.hpp"
#include "specbound/treecycle.hpp"

namespace py = pybind11;
using namespace specbound;

namespace {

DispersalNetwork network_from_offdiag(const Matrix& offdiag,
                                      const std::optional<Vector>& diag) {
    return build_network(static_cast<int>(offdiag.rows()), offdiag, diag);
}

SisModel make_sis(const Matrix& offdiag, const Vector& beta, const Vector& gamma, double mu_s,
                  double mu_i, double total) {
    SisModel m;
    m.net = network_from_offdiag(offdiag, std::nullopt);
    m.beta = beta;
    m.gamma = gamma;
    m.mu_s = mu_s;
    m.mu_i = mu_i;
    m.total_population = total;
    validate_model(m);
    return m;
}

} // namespace

PYBIND11_MODULE(_specbound, m) {
    m.doc() = "Spectral bounds and threshold dynamics for dispersal networks";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<StructureError>(m, "StructureError", PyExc_ValueError);
    py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
    py::register_exception<CapacityError>(m, "CapacityError", PyExc_ValueError);

    py::class_<DispersalNetwork>(m, "DispersalNetwork")
        .def_readonly("n", &DispersalNetwork::n)
        .def_readonly("a", &DispersalNetwork::a)
        .def_property_readonly("diag_auto", [](const DispersalNetwork& net) {
            return net.diag_rule == DiagRule::Auto;
        });

    py::class_<MatrixClass>(m, "MatrixClass")
        .def_readonly("quasi_positive", &MatrixClass::quasi_positive)
        .def_readonly("laplacian", &MatrixClass::laplacian)
        .def_readonly("sub_laplacian", &MatrixClass::sub_laplacian)
        .def_readonly("strictly_sub", &MatrixClass::strictly_sub)
        .def_readonly("strongly_sub", &MatrixClass::strongly_sub)
        .def_readonly("irreducible", &MatrixClass::irreducible);

    py::class_<EigenTriple>(m, "EigenTriple")
        .def_readonly("value", &EigenTriple::value)
        .def_readonly("right", &EigenTriple::right)
        .def_readonly("left", &EigenTriple::left)
        .def_readonly("residual", &EigenTriple::residual);

    m.def("build_network", &network_from_offdiag, py::arg("offdiag"),
          py::arg("diag") = std::nullopt,
          "Dispersal network from nonnegative off-diagonal rates; the diagonal "
          "is auto-filled to zero column sums when absent.");
    m.def("classify_matrix", &classify_matrix, py::arg("a"));
    m.def("strongly_connected", &strongly_connected, py::arg("a"));
    m.def(
        "scc_blocks",
        [](const Matrix& a) {
            std::vector<std::vector<int>> blocks;
            for (const auto& b : scc_blocks(a).blocks) blocks.push_back(b);
            return blocks;
        },
        py::arg("a"));

    m.def("principal_eigen", &principal_eigen, py::arg("m"), py::arg("tol") = kDefaultTol);
    m.def("spectral_bound", &spectral_bound, py::arg("m"), py::arg("tol") = kDefaultTol);
    m.def("collatz_wielandt", &collatz_wielandt, py::arg("a"), py::arg("u"));
    m.def(
        "bound_derivative",
        [](const Matrix& a, const Vector& q, double mu, double tol) {
            const BoundDerivative d = bound_derivative(a, q, mu, tol);
            return py::make_tuple(d.ds, d.d2s);
        },
        py::arg("a"), py::arg("q"), py::arg("mu"), py::arg("tol") = kDefaultTol);
    m.def(
        "bound_curve",
        [](const Matrix& a, const Vector& q, double mu_min, double mu_max, int steps,
           double tol) {
            const SpectralCurve c = bound_curve(a, q, mu_min, mu_max, steps, tol);
            Matrix rows(c.rows.size(), 4);
            for (size_t k = 0; k < c.rows.size(); ++k)
                rows.row(static_cast<Eigen::Index>(k)) << c.rows[k].mu, c.rows[k].s,
                    c.rows[k].ds, c.rows[k].d2s;
            return rows;
        },
        py::arg("a"), py::arg("q"), py::arg("mu_min"), py::arg("mu_max"), py::arg("steps"),
        py::arg("tol") = kDefaultTol, "Rows of (mu, s, ds, d2s) over the grid.");
    m.def(
        "asymptotic_limits",
        [](const Matrix& a, const Vector& q, double tol) {
            const LimitPair lim = asymptotic_limits(a, q, tol);
            return py::make_tuple(lim.at_zero, lim.at_infinity, lim.weight);
        },
        py::arg("a"), py::arg("q"), py::arg("tol") = kDefaultTol,
        "(at_zero, at_infinity_or_None, weight_v); None encodes the -infinity limit.");
    m.def("threshold_mu", &threshold_mu, py::arg("a"), py::arg("q"),
          py::arg("bracket_hint") = 1.0, py::arg("tol") = kDefaultTol);
    m.def("karlin_map", &karlin_map, py::arg("p"), py::arg("r"), py::arg("mu"),
          py::arg("tol") = kDefaultTol);

    m.def(
        "principal_cofactors",
        [](const Matrix& offdiag) {
            const auto res = principal_cofactors(network_from_offdiag(offdiag, std::nullopt));
            return py::make_tuple(res.cofactors, res.alpha);
        },
        py::arg("offdiag"),
        "Unnormalized Laplacian cofactors and their normalization alpha.");
    m.def(
        "construct_k_vector",
        [](const Vector& u, double mu, double mu_prime) {
            return construct_k_vector(u, mu, mu_prime).k;
        },
        py::arg("u"), py::arg("mu"), py::arg("mu_prime"));
    m.def(
        "verify_k_vector",
        [](const Vector& u, const Vector& k, double mu, double mu_prime) {
            KVector kv;
            kv.u = u;
            kv.k = k;
            kv.mu = mu;
            kv.mu_prime = mu_prime;
            return verify_k_vector(kv);
        },
        py::arg("u"), py::arg("k"), py::arg("mu"), py::arg("mu_prime"));

    m.def(
        "sis_r0",
        [](const Matrix& offdiag, const Vector& beta, const Vector& gamma, double mu_i) {
            const R0Report rep = sis_r0(make_sis(offdiag, beta, gamma, 1.0, mu_i, 1.0), mu_i);
            return py::make_tuple(rep.r0, rep.limit_zero, rep.limit_infinity);
        },
        py::arg("offdiag"), py::arg("beta"), py::arg("gamma"), py::arg("mu_I"),
        "(r0, limit_zero, limit_infinity) for the SIS patch model.");
}
