#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "heatctl/config.hpp"
#include "heatctl/dynamics.hpp"
#include "heatctl/experiments.hpp"
#include "heatctl/kernel.hpp"
#include "heatctl/spde.hpp"
#include "heatctl/transform.hpp"

namespace py = pybind11;
using namespace heatctl;

namespace {

Eigen::MatrixXd kernel_grid_matrix(const Kernel& k) {
  const int n = k.grid.n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = k.grid(i, j);
  return m;
}

Kernel solve_kernel_py(py::object a, double c, int n) {
  if (py::isinstance<py::float_>(a) || py::isinstance<py::int_>(a))
    return solve_kernel(a.cast<double>(), c, n);
  return solve_kernel(a.cast<std::vector<double>>(), c, n);
}

}  // namespace

PYBIND11_MODULE(heatctl, m) {
  m.doc() = "Backstepping boundary control toolkit for the anti-stable stochastic heat equation";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<CertificationError>(m, "CertificationError", PyExc_RuntimeError);
  py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_RuntimeError);

  py::class_<Kernel>(m, "Kernel")
      .def_property_readonly("n", [](const Kernel& k) { return k.grid.n(); })
      .def_readonly("c", &Kernel::c)
      .def_readonly("k11", &Kernel::k11)
      .def_readonly("a_samples", &Kernel::a_samples)
      .def_readonly("diag_trace", &Kernel::diag_trace)
      .def_readonly("kx1_trace", &Kernel::kx1_trace)
      .def("grid_matrix", &kernel_grid_matrix, "dense lower-triangular k(x_i, zeta_j)")
      .def("value", [](const Kernel& k, int i, int j) { return k.grid(i, j); });

  m.def("solve_kernel", &solve_kernel_py, py::arg("a"), py::arg("c"), py::arg("n"));
  m.def("bessel_kernel_value", &bessel_kernel_value, py::arg("c"), py::arg("x"), py::arg("zeta"));
  m.def("kernel_interior_residual", &kernel_interior_residual);
  m.def("save_kernel_csv", &save_kernel_csv);
  m.def("load_kernel_csv", &load_kernel_csv);

  py::class_<TransformPair>(m, "TransformPair")
      .def_readonly("n", &TransformPair::n)
      .def_readonly("forward", &TransformPair::forward)
      .def_readonly("inverse_kernel_max_sq", &TransformPair::inverse_kernel_max_sq)
      .def_readonly("kx1_trace", &TransformPair::kx1_trace)
      .def_readonly("k11", &TransformPair::k11);

  m.def("build_transform", &build_transform);
  m.def("apply_forward",
        [](const TransformPair& tp, const std::vector<double>& y) { return apply_forward(tp, y); });
  m.def("apply_inverse",
        [](const TransformPair& tp, const std::vector<double>& z) { return apply_inverse(tp, z); });

  m.def("lyapunov_solve", &lyapunov_solve);
  m.def("build_M", &build_M);
  m.def("mu_from_Q", &mu_from_Q);
  m.def("mu_closed_form_n2", &mu_closed_form_n2, py::arg("c"), py::arg("l1"), py::arg("l2"));

  py::class_<PlantSpec>(m, "PlantSpec")
      .def(py::init([](double c, double sigma, Matrix A, RowVector C, Vector L) {
             return PlantSpec{c, sigma, std::move(A), std::move(C), std::move(L), {}};
           }),
           py::arg("c"), py::arg("sigma"), py::arg("A"), py::arg("C"), py::arg("L"))
      .def_readonly("c", &PlantSpec::c)
      .def_readonly("sigma", &PlantSpec::sigma)
      .def("validate", &PlantSpec::validate);

  py::class_<GammaConstants>(m, "GammaConstants")
      .def_readonly("gamma1", &GammaConstants::gamma1)
      .def_readonly("gamma2", &GammaConstants::gamma2)
      .def_readonly("gamma", &GammaConstants::gamma)
      .def_readonly("gamma_star", &GammaConstants::gamma_star);

  py::class_<GainCertificate>(m, "GainCertificate")
      .def_readonly("M", &GainCertificate::M)
      .def_readonly("Q", &GainCertificate::Q)
      .def_readonly("lambda_min", &GainCertificate::lambda_min)
      .def_readonly("lambda_max", &GainCertificate::lambda_max)
      .def_readonly("mu_c", &GainCertificate::mu_c)
      .def_readonly("sigma_max", &GainCertificate::sigma_max)
      .def_readonly("rate_Ze", &GainCertificate::rate_Ze)
      .def_readonly("theta_star", &GainCertificate::theta_star)
      .def_readonly("degenerate_branch", &GainCertificate::degenerate_branch);

  m.def("certify_gains", &certify_gains, py::arg("spec"), py::arg("theta_frac") = 0.9);
  m.def("gamma_constants", &gamma_constants, py::arg("cert"), py::arg("EZ0sq"), py::arg("Eeta0sq"),
        py::arg("Ebeta0sq"), py::arg("max_l_sq"));

  py::class_<BrownianPath>(m, "BrownianPath")
      .def_readonly("seed", &BrownianPath::seed)
      .def_readonly("dt", &BrownianPath::dt)
      .def_readonly("increments", &BrownianPath::increments)
      .def("coarsened", &BrownianPath::coarsened);

  m.def("brownian_path", &brownian_path, py::arg("seed"), py::arg("dt"), py::arg("steps"));
  m.def("derive_stream_seed", &derive_stream_seed);

  py::class_<ExoSeries>(m, "ExoSeries")
      .def_readonly("xi", &ExoSeries::xi)
      .def_readonly("w", &ExoSeries::w);
  m.def("exo_series", &exo_series, py::arg("xi0"), py::arg("dt"), py::arg("steps"), py::arg("A"),
        py::arg("C"));

  py::class_<CoupledTrajectory>(m, "CoupledTrajectory")
      .def_readonly("t", &CoupledTrajectory::t)
      .def_readonly("Z", &CoupledTrajectory::Z)
      .def_readonly("eta", &CoupledTrajectory::eta);
  m.def("simulate_coupled", &simulate_coupled, py::arg("Z0"), py::arg("eta0"), py::arg("spec"),
        py::arg("dt"), py::arg("T"), py::arg("path"));
  m.def("simulate_scalar_Z",
        [](double Z0, const std::vector<double>& u0, const std::vector<double>& w, double c,
           double sigma, const BrownianPath& p) {
          return simulate_scalar_Z(Z0, u0, w, c, sigma, p);
        });

  py::enum_<SimMode>(m, "SimMode")
      .value("open", SimMode::open)
      .value("closed", SimMode::closed)
      .value("target", SimMode::target)
      .value("coupled", SimMode::coupled);

  py::class_<Scenario>(m, "Scenario")
      .def(py::init<>())
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("mode", &Scenario::mode)
      .def_readwrite("m", &Scenario::m)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("horizon", &Scenario::horizon)
      .def_readwrite("c", &Scenario::c)
      .def_readwrite("sigma", &Scenario::sigma)
      .def_readwrite("A", &Scenario::A)
      .def_readwrite("C", &Scenario::C)
      .def_readwrite("L", &Scenario::L)
      .def_readwrite("xi0", &Scenario::xi0)
      .def_readwrite("a_form", &Scenario::a_form)
      .def_readwrite("y0_form", &Scenario::y0_form)
      .def_readwrite("a_samples", &Scenario::a_samples)
      .def_readwrite("y0", &Scenario::y0)
      .def_readwrite("Z0", &Scenario::Z0)
      .def_readwrite("eta0", &Scenario::eta0)
      .def_readwrite("snapshot_stride", &Scenario::snapshot_stride)
      .def("resolve_fields", [](Scenario& sc) { resolve_scenario_fields(sc); })
      .def("validate", &Scenario::validate);

  m.def("scenario_preset", &scenario_preset);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("t", &Trajectory::t)
      .def_readonly("norm_sq", &Trajectory::norm_sq)
      .def_readonly("y1", &Trajectory::y1)
      .def_readonly("Z", &Trajectory::Z)
      .def_readonly("w", &Trajectory::w)
      .def_readonly("w_hat", &Trajectory::w_hat)
      .def_readonly("u", &Trajectory::u)
      .def_readonly("brownian", &Trajectory::brownian)
      .def_readonly("snapshot_t", &Trajectory::snapshot_t)
      .def_readonly("snapshot_y", &Trajectory::snapshot_y);

  py::class_<Measurements>(m, "Measurements")
      .def_readonly("y1", &Measurements::y1)
      .def_readonly("Z", &Measurements::Z)
      .def_readonly("avg_kx", &Measurements::avg_kx);
  m.def("measure",
        [](const std::vector<double>& y, const TransformPair& tp) { return measure(y, tp); });
  m.def("dobc_control", &dobc_control, py::arg("y1"), py::arg("avg_kx"), py::arg("k11"),
        py::arg("w_hat"));
  m.def("step_field",
        [](const std::vector<double>& y, double flux, const std::vector<double>& a, double c_shift,
           double sigma, double dB, double dt) {
          return step_field(y, flux, a, c_shift, sigma, dB, dt);
        });

  m.def("simulate_closed_loop", &simulate_closed_loop, py::arg("scenario"), py::arg("seed"));
  m.def("simulate_open_loop", &simulate_open_loop, py::arg("scenario"), py::arg("seed"));
  m.def("simulate_target",
        [](const Scenario& sc, std::uint64_t seed, const std::vector<double>& w_tilde) {
          return simulate_target(sc, seed, w_tilde);
        },
        py::arg("scenario"), py::arg("seed"), py::arg("w_tilde_series"));

  py::class_<Ensemble>(m, "Ensemble")
      .def_readonly("t", &Ensemble::t)
      .def_readonly("mean", &Ensemble::mean)
      .def_readonly("se", &Ensemble::se)
      .def_readonly("mean_west", &Ensemble::mean_west)
      .def_readonly("tail_slopes", &Ensemble::tail_slopes)
      .def_readonly("aborts", &Ensemble::aborts)
      .def_readonly("initial_mean", &Ensemble::initial_mean);

  m.def("run_ensemble", &run_ensemble, py::arg("scenario"), py::arg("n_paths"),
        py::arg("master_seed"), py::arg("record_stride") = 0, py::arg("threads") = 0,
        py::arg("w_tilde_series") = std::vector<double>{});

  m.def("fit_decay",
        [](const std::vector<double>& t, const std::vector<double>& v, double lo, double hi) {
          return fit_decay(t, v, lo, hi);
        },
        py::arg("times"), py::arg("values"), py::arg("t_lo"), py::arg("t_hi"));

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("theta_star", &BoundReport::theta_star)
      .def_readonly("gamma_star", &BoundReport::gamma_star)
      .def_readonly("max_margin", &BoundReport::max_margin)
      .def_readonly("as_pass_fraction", &BoundReport::as_pass_fraction)
      .def_readonly("certified", &BoundReport::certified)
      .def_readonly("pass_", &BoundReport::pass);

  m.def("check_bound", &check_bound);
  m.def("check_coupled_bound", &check_coupled_bound);
}
