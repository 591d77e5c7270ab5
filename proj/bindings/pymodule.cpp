// python bindings for the main operations
#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "declab/delta_well.hpp"
#include "declab/dynamics.hpp"
#include "declab/pointer_basis.hpp"
#include "declab/wigner_classical.hpp"

namespace py = pybind11;
using namespace declab;

namespace {

// python-side holders are mutable shared_ptr; the C++ API uses
// shared_ptr-to-const, which the pointers convert to implicitly
using GridHolder = std::shared_ptr<SpectrumGrid>;
using QnumHolder = std::shared_ptr<QuantumNumbers>;

SectorSelector sector_from_int(long long x) {
    if (x < 0) return BoundSector{};
    return static_cast<std::size_t>(x);
}

} // namespace

PYBIND11_MODULE(declab, m) {
    m.doc() = "spectral decoherence laboratory: state functionals over a "
              "bound-plus-continuum spectrum, pointer bases, phase-space limits";

    py::class_<SpectrumGrid, GridHolder>(m, "SpectrumGrid")
        .def_readonly("omega0", &SpectrumGrid::omega0)
        .def_readonly("omega_max", &SpectrumGrid::omega_max)
        .def_property_readonly("nodes", [](const SpectrumGrid& g) { return g.nodes; })
        .def_property_readonly("weights", [](const SpectrumGrid& g) { return g.weights; })
        .def_property_readonly("n_nodes", [](const SpectrumGrid& g) { return g.n_nodes(); });

    m.def(
        "make_spectrum_grid",
        [](double omega0, double omega_max, int n_panels, int panel_order) {
            return std::const_pointer_cast<SpectrumGrid>(
                make_spectrum_grid(omega0, omega_max, n_panels, panel_order));
        },
        py::arg("omega0"), py::arg("omega_max"), py::arg("n_panels"), py::arg("panel_order"));

    py::class_<QuantumNumbers, QnumHolder>(m, "QuantumNumbers")
        .def(py::init([](const std::vector<std::vector<int>>& axes) {
                 return std::make_shared<QuantumNumbers>(QuantumNumbers::product(axes));
             }),
             py::arg("axes"))
        .def_readonly("labels", &QuantumNumbers::labels)
        .def_property_readonly("count", [](const QuantumNumbers& q) { return q.count(); });

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("hermiticity_defect", &ValidationReport::hermiticity_defect)
        .def_readonly("negativity_defect", &ValidationReport::negativity_defect)
        .def_readonly("normalization_defect", &ValidationReport::normalization_defect)
        .def("ok", &ValidationReport::pass);

    py::class_<StateFn>(m, "StateFn")
        .def_property_readonly("bound", [](const StateFn& s) { return s.blocks().bound; })
        .def("cont", [](const StateFn& s, std::size_t k) { return s.blocks().cont.at(k); })
        .def_property_readonly("cont_cont",
                               [](const StateFn& s) { return s.blocks().cont_cont; })
        .def("total_mass", &StateFn::total_mass)
        .def("energy_diagonal", &StateFn::energy_diagonal);

    py::class_<ObservableFn>(m, "ObservableFn")
        .def_property_readonly("bound", [](const ObservableFn& o) { return o.blocks().bound; })
        .def("cont", [](const ObservableFn& o, std::size_t k) { return o.blocks().cont.at(k); })
        .def("self_adjoint", &ObservableFn::self_adjoint)
        .def("energy_diagonal", &ObservableFn::energy_diagonal);

    m.def(
        "identity_observable",
        [](GridHolder g, QnumHolder q) { return identity_observable(g, q); }, py::arg("grid"),
        py::arg("qnums"));
    m.def(
        "hamiltonian_observable",
        [](GridHolder g, QnumHolder q) { return hamiltonian_observable(g, q); },
        py::arg("grid"), py::arg("qnums"));
    m.def(
        "pure_state",
        [](GridHolder g, QnumHolder q, const Eigen::VectorXcd& b, const Eigen::MatrixXcd& f) {
            return pure_state(g, q, b, f);
        },
        py::arg("grid"), py::arg("qnums"), py::arg("bound_amp"), py::arg("cont_amp"));
    m.def(
        "gaussian_amplitude",
        [](GridHolder g, double c, double w) { return gaussian_amplitude(*g, c, w); },
        py::arg("grid"), py::arg("center"), py::arg("width"));
    m.def(
        "gaussian_momentum_amplitude",
        [](GridHolder g, double kc, double kw) { return gaussian_momentum_amplitude(*g, kc, kw); },
        py::arg("grid"), py::arg("k_center"), py::arg("k_width"));
    m.def("validate_state", &validate_state, py::arg("rho"));
    m.def("dual_pairing",
          [](const StateFn& rho, const ObservableFn& O) { return dual_pairing(rho, O); },
          py::arg("rho"), py::arg("observable"));
    m.def("diagonal_power", &diagonal_power, py::arg("observable"), py::arg("n"));

    m.def("evolve_state", &evolve_state, py::arg("rho"), py::arg("t"));
    m.def("equilibrium_state", &equilibrium_state, py::arg("rho"));
    m.def(
        "expectation",
        [](const StateFn& rho, const ObservableFn& O, double t, const std::string& mode) {
            DynamicsOptions opt;
            if (mode == "plain") opt.mode = QuadratureMode::Plain;
            else if (mode == "filon") opt.mode = QuadratureMode::Filon;
            else opt.mode = QuadratureMode::Auto;
            return expectation(rho, O, t, opt);
        },
        py::arg("rho"), py::arg("observable"), py::arg("t"), py::arg("mode") = "auto");
    m.def(
        "decoherence_deficit",
        [](const StateFn& rho, const ObservableFn& O, double t, const std::string& mode) {
            DynamicsOptions opt;
            if (mode == "plain") opt.mode = QuadratureMode::Plain;
            else if (mode == "filon") opt.mode = QuadratureMode::Filon;
            else opt.mode = QuadratureMode::Auto;
            return decoherence_deficit(rho, O, t, opt);
        },
        py::arg("rho"), py::arg("observable"), py::arg("t"), py::arg("mode") = "auto");

    py::class_<PointerTransform>(m, "PointerTransform")
        .def_readonly("bound_U", &PointerTransform::bound_U)
        .def_readonly("bound_eigs", &PointerTransform::bound_eigs)
        .def_readonly("cont_eigs", &PointerTransform::cont_eigs)
        .def_readonly("min_overlap", &PointerTransform::min_overlap)
        .def("cont_U", [](const PointerTransform& u, std::size_t k) { return u.cont_U.at(k); });

    m.def("diagonalize_blocks",
          [](const StateFn& rho) { return diagonalize_blocks(rho); }, py::arg("rho"));
    m.def("transform_state", &transform_state, py::arg("rho"), py::arg("transform"));
    m.def("transform_observable", &transform_observable, py::arg("observable"),
          py::arg("transform"));
    m.def(
        "pointer_observables",
        [](const PointerTransform& u, QnumHolder q) { return pointer_observables(u, q); },
        py::arg("transform"), py::arg("qnums"));
    m.def(
        "moment_check",
        [](long long sector, std::size_t r, const ObservableFn& O, int n) {
            return moment_check(sector_from_int(sector), r, O, n);
        },
        py::arg("sector"), py::arg("label"), py::arg("observable"), py::arg("n"),
        "sector: continuum node index, or -1 for the bound level");
    m.def("commutator_expectation", &commutator_expectation, py::arg("rho_star"),
          py::arg("pointer_observable"), py::arg("observable"));

    py::class_<DeltaWellModel>(m, "DeltaWellModel")
        .def_readonly("g", &DeltaWellModel::g)
        .def_readonly("hbar", &DeltaWellModel::hbar)
        .def_readonly("omega0", &DeltaWellModel::omega0)
        .def("bound", &DeltaWellModel::bound)
        .def("even", &DeltaWellModel::even)
        .def("odd", &DeltaWellModel::odd)
        .def("phase_shift", &DeltaWellModel::phase_shift);
    m.def("deltawell_model", &deltawell_model, py::arg("g"), py::arg("hbar") = 1.0);

    py::class_<PhaseSpaceGrid>(m, "PhaseSpaceGrid")
        .def(py::init([](double q_half, int n_q, double p_half, int n_p, double lambda_half,
                         double hbar) {
                 PhaseSpaceGrid g;
                 g.q_half = q_half;
                 g.n_q = n_q;
                 g.p_half = p_half;
                 g.n_p = n_p;
                 g.lambda_half = lambda_half;
                 g.hbar = hbar;
                 g.validate();
                 return g;
             }),
             py::arg("q_half"), py::arg("n_q"), py::arg("p_half"), py::arg("n_p"),
             py::arg("lambda_half"), py::arg("hbar") = 1.0)
        .def_readonly("hbar", &PhaseSpaceGrid::hbar);

    py::class_<PositionKernel>(m, "PositionKernel")
        .def_readonly("K", &PositionKernel::K)
        .def_readonly("trace", &PositionKernel::trace)
        .def_readonly("hermiticity_defect", &PositionKernel::hermiticity_defect);

    py::class_<WignerDensity>(m, "WignerDensity")
        .def_readonly("W", &WignerDensity::W)
        .def_readonly("normalization", &WignerDensity::normalization)
        .def_readonly("max_imag_residue", &WignerDensity::max_imag_residue);

    py::class_<SymbolTable>(m, "SymbolTable")
        .def_readonly("W", &SymbolTable::W)
        .def_readonly("window_applied", &SymbolTable::window_applied);

    m.def("position_kernel", &position_kernel, py::arg("rho"), py::arg("model"),
          py::arg("grid"));
    m.def("wigner_state", &wigner_state, py::arg("kernel"), py::arg("grid"));
    m.def(
        "wigner_observable",
        [](const ObservableFn& O, const DeltaWellModel& model, const PhaseSpaceGrid& grid,
           const std::string& window) {
            LambdaWindow w = LambdaWindow::Auto;
            if (window == "on") w = LambdaWindow::On;
            else if (window == "off") w = LambdaWindow::Off;
            return wigner_observable(O, model, grid, w);
        },
        py::arg("observable"), py::arg("model"), py::arg("grid"), py::arg("window") = "auto");
    m.def("phase_space_pairing", &phase_space_pairing, py::arg("density"), py::arg("symbol"),
          py::arg("grid"));

    py::class_<ClassicalParticle>(m, "ClassicalParticle")
        .def_readonly("weight", &ClassicalParticle::weight)
        .def_readonly("energy", &ClassicalParticle::energy)
        .def_readonly("label", &ClassicalParticle::label)
        .def_readonly("bound", &ClassicalParticle::bound);

    py::class_<ClassicalEnsemble>(m, "ClassicalEnsemble")
        .def_readonly("particles", &ClassicalEnsemble::particles)
        .def_readonly("total_weight", &ClassicalEnsemble::total_weight);

    m.def("classical_equilibrium_density", &classical_equilibrium_density,
          py::arg("rho_star_pointer"), py::arg("transform"), py::arg("model"));
    m.def(
        "classical_moments",
        [](const ClassicalEnsemble& ens, const std::string& which, int n) {
            MomentTable t = which == "H"
                                ? classical_moments(ens, HamiltonianMoment{}, n)
                                : classical_moments(ens, static_cast<std::size_t>(
                                                             std::stoul(which.substr(1))), n);
            return py::make_tuple(t.per_particle, t.aggregate);
        },
        py::arg("ensemble"), py::arg("which"), py::arg("n"),
        "which: 'H' or 'P<axis>' (e.g. 'P0'); returns (per_particle, aggregate)");
}
