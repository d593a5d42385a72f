#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cslcosmo/config.hpp"
#include "cslcosmo/exclusion.hpp"
#include "cslcosmo/io.hpp"
#include "cslcosmo/sde.hpp"
#include "cslcosmo/source.hpp"
#include "cslcosmo/spectrum.hpp"

namespace py = pybind11;
using namespace cslcosmo;

PYBIND11_MODULE(_cslcosmo, m) {
  m.doc() = "single-mode collapse-model cosmology core";
  m.attr("__version__") = kVersion;

  // --- units and parameters ------------------------------------------------
  py::class_<PhysicalConstants>(m, "PhysicalConstants")
      .def(py::init<>())
      .def_readwrite("planck_length_m", &PhysicalConstants::planck_length_m)
      .def_readwrite("planck_time_s", &PhysicalConstants::planck_time_s)
      .def_readwrite("planck_mass_kg", &PhysicalConstants::planck_mass_kg)
      .def_readwrite("nucleon_mass_kg", &PhysicalConstants::nucleon_mass_kg)
      .def("length_unit_m", &PhysicalConstants::length_unit_m)
      .def("time_unit_s", &PhysicalConstants::time_unit_s)
      .def("mass_unit_kg", &PhysicalConstants::mass_unit_kg)
      .def("nucleon_reduced", &PhysicalConstants::nucleon_reduced)
      .def("rc_from_si", &PhysicalConstants::rc_from_si)
      .def("rc_to_si", &PhysicalConstants::rc_to_si)
      .def("rate_from_si", &PhysicalConstants::rate_from_si)
      .def("rate_to_si", &PhysicalConstants::rate_to_si);
  m.def("load_constants", &load_constants, py::arg("path"));

  py::class_<CosmologyParams>(m, "CosmologyParams")
      .def(py::init<>())
      .def_readwrite("h_end", &CosmologyParams::h_end)
      .def_readwrite("eps1", &CosmologyParams::eps1)
      .def_readwrite("eps2", &CosmologyParams::eps2)
      .def_readwrite("eta_end", &CosmologyParams::eta_end)
      .def("a_end", &CosmologyParams::a_end)
      .def("eta_r", &CosmologyParams::eta_r)
      .def("rho_end", &CosmologyParams::rho_end)
      .def("validate", &CosmologyParams::validate);

  py::class_<CslParams>(m, "CslParams")
      .def(py::init<>())
      .def_readwrite("gamma", &CslParams::gamma)
      .def_readwrite("r_c", &CslParams::r_c)
      .def_readwrite("m0", &CslParams::m0)
      .def_readwrite("p_index", &CslParams::p_index)
      .def("gamma_over_m0sq", &CslParams::gamma_over_m0sq)
      .def("lambda_rate", &CslParams::lambda_rate)
      .def_static("gamma_from_lambda", &CslParams::gamma_from_lambda,
                  py::arg("lambda_rate"), py::arg("r_c"));

  py::enum_<Era>(m, "Era").value("Inflation", Era::Inflation).value("Radiation", Era::Radiation);

  py::class_<ModeBackground>(m, "ModeBackground")
      .def(py::init<const CosmologyParams&, double>(), py::arg("cosmo"), py::arg("k"))
      .def_static("from_delta_n", &ModeBackground::from_delta_n, py::arg("cosmo"),
                  py::arg("delta_n"))
      .def("cosmo", &ModeBackground::cosmo, py::return_value_policy::copy)
      .def("k", &ModeBackground::k)
      .def("x_end", &ModeBackground::x_end)
      .def("delta_n", &ModeBackground::delta_n)
      .def("era_at", &ModeBackground::era_at)
      .def("n_of_eta", &ModeBackground::n_of_eta)
      .def("eta_of_n", &ModeBackground::eta_of_n)
      .def("a_of_eta", &ModeBackground::a_of_eta)
      .def("hubble", &ModeBackground::hubble)
      .def("cal_h", &ModeBackground::cal_h)
      .def("k_over_ah", &ModeBackground::k_over_ah)
      .def("omega2", &ModeBackground::omega2)
      .def("z_ms", &ModeBackground::z_ms)
      .def("matching_s", &ModeBackground::matching_s)
      .def("eta_rc_cross", &ModeBackground::eta_rc_cross);

  // --- modes, couplings, sources --------------------------------------------
  py::enum_<ModeForm>(m, "ModeForm")
      .value("MatchedExact", ModeForm::MatchedExact)
      .value("Continued", ModeForm::Continued)
      .value("LeadingOrder", ModeForm::LeadingOrder);

  py::class_<ModeValue>(m, "ModeValue")
      .def_readonly("g", &ModeValue::g)
      .def_readonly("gp", &ModeValue::gp)
      .def_readonly("wronskian", &ModeValue::wronskian);

  m.def("free_mode", &free_mode, py::arg("bg"), py::arg("eta"),
        py::arg("form") = ModeForm::MatchedExact);
  m.def("green_function", &green_function, py::arg("bg"), py::arg("eta"), py::arg("etabar"),
        py::arg("form") = ModeForm::MatchedExact);
  m.def("green_function_deta", &green_function_deta, py::arg("bg"), py::arg("eta"),
        py::arg("etabar"), py::arg("form") = ModeForm::MatchedExact);
  m.def("green_function_dsource", &green_function_dsource, py::arg("bg"), py::arg("eta"),
        py::arg("etabar"), py::arg("form") = ModeForm::MatchedExact);
  m.def("omega_free", &omega_free, py::arg("bg"), py::arg("eta"));
  m.def("re_omega_free", &re_omega_free, py::arg("bg"), py::arg("eta"));

  py::enum_<CouplingOrder>(m, "CouplingOrder")
      .value("Full", CouplingOrder::Full)
      .value("LeadingSlowRoll", CouplingOrder::LeadingSlowRoll);

  py::class_<Jet2>(m, "Jet2")
      .def_readonly("f", &Jet2::f)
      .def_readonly("d1", &Jet2::d1)
      .def_readonly("d2", &Jet2::d2);

  py::class_<CouplingSet>(m, "CouplingSet")
      .def_readonly("alpha", &CouplingSet::alpha)
      .def_readonly("beta", &CouplingSet::beta)
      .def_readonly("A", &CouplingSet::A)
      .def_readonly("B", &CouplingSet::B)
      .def_readonly("C", &CouplingSet::C)
      .def_readonly("smear", &CouplingSet::smear);

  m.def("couplings_at", &couplings_at, py::arg("bg"), py::arg("csl"), py::arg("eta"),
        py::arg("order") = CouplingOrder::Full);
  m.def("source_s", &source_s, py::arg("bg"), py::arg("csl"), py::arg("eta"),
        py::arg("order") = CouplingOrder::Full);

  // --- moment (Lindblad) and quadrature routes ------------------------------
  py::class_<OdeOptions>(m, "OdeOptions")
      .def(py::init<>())
      .def_readwrite("rel_tol", &OdeOptions::rel_tol)
      .def_readwrite("abs_tol", &OdeOptions::abs_tol)
      .def_readwrite("h_init", &OdeOptions::h_init)
      .def_readwrite("h_max", &OdeOptions::h_max)
      .def_readwrite("max_steps", &OdeOptions::max_steps);

  py::class_<QuadOptions>(m, "QuadOptions")
      .def(py::init<>())
      .def_readwrite("rel_tol", &QuadOptions::rel_tol)
      .def_readwrite("abs_tol", &QuadOptions::abs_tol)
      .def_readwrite("max_intervals", &QuadOptions::max_intervals);

  py::class_<EvolveOptions>(m, "EvolveOptions")
      .def(py::init<>())
      .def_readwrite("x_ini", &EvolveOptions::x_ini)
      .def_readwrite("n_rad_efolds", &EvolveOptions::n_rad_efolds)
      .def_readwrite("ode", &EvolveOptions::ode)
      .def_readwrite("order", &EvolveOptions::order);

  py::class_<MomentState>(m, "MomentState")
      .def_readonly("p_vv", &MomentState::p_vv)
      .def_readonly("p_cross", &MomentState::p_cross)
      .def_readonly("p_pp", &MomentState::p_pp);

  py::class_<MomentSample>(m, "MomentSample")
      .def_readonly("n", &MomentSample::n)
      .def_readonly("eta", &MomentSample::eta)
      .def_readonly("m", &MomentSample::m);

  py::class_<MomentRun>(m, "MomentRun")
      .def_readonly("samples", &MomentRun::samples)
      .def_readonly("final_state", &MomentRun::final_state)
      .def_readonly("n_ini", &MomentRun::n_ini)
      .def_readonly("n_final", &MomentRun::n_final)
      .def("at_n", &MomentRun::at_n);

  m.def("bunch_davies_moments", &bunch_davies_moments, py::arg("bg"), py::arg("eta"));
  m.def("integrate_moments", &integrate_moments, py::arg("bg"), py::arg("csl"), py::arg("opt"),
        py::arg("sample_n") = std::vector<double>{});

  py::class_<QuadraturePvv>(m, "QuadraturePvv")
      .def_readonly("p_vv_free", &QuadraturePvv::p_vv_free)
      .def_readonly("correction", &QuadraturePvv::correction)
      .def("p_vv", &QuadraturePvv::p_vv);

  m.def("quadrature_pvv", &quadrature_pvv, py::arg("bg"), py::arg("csl"), py::arg("eta"),
        py::arg("eta_ini"), py::arg("qopt") = QuadOptions{},
        py::arg("order") = CouplingOrder::Full, py::arg("boundary_terms") = true);

  // --- wavefunction sector ---------------------------------------------------
  py::class_<OmegaSample>(m, "OmegaSample")
      .def_readonly("n", &OmegaSample::n)
      .def_readonly("eta", &OmegaSample::eta)
      .def_readonly("omega", &OmegaSample::omega);

  py::class_<OmegaRun>(m, "OmegaRun")
      .def_readonly("samples", &OmegaRun::samples)
      .def_readonly("omega_final", &OmegaRun::omega_final)
      .def_readonly("representation_switches", &OmegaRun::representation_switches)
      .def_readonly("quasi_static_chunks", &OmegaRun::quasi_static_chunks)
      .def_readonly("backend_switched", &OmegaRun::backend_switched)
      .def("omega_at", &OmegaRun::omega_at)
      .def("log_norm_at", &OmegaRun::log_norm_at);

  py::enum_<OmegaBackend>(m, "OmegaBackend")
      .value("DirectRiccati", OmegaBackend::DirectRiccati)
      .value("LinearizedMode", OmegaBackend::LinearizedMode);

  m.def("integrate_omega", &integrate_omega, py::arg("bg"), py::arg("csl"), py::arg("opt"),
        py::arg("sample_n") = std::vector<double>{},
        py::arg("backend") = OmegaBackend::DirectRiccati);
  m.def("omega_perturbative", &omega_perturbative, py::arg("bg"), py::arg("csl"), py::arg("eta"),
        py::arg("eta_ini"), py::arg("quad") = QuadOptions{},
        py::arg("order") = CouplingOrder::Full);
  m.def("riccati_rhs", &riccati_rhs, py::arg("omega"), py::arg("bg"), py::arg("csl"),
        py::arg("eta"), py::arg("order") = CouplingOrder::Full);
  py::class_<LinearizedCoeffs>(m, "LinearizedCoeffs")
      .def_readonly("c1", &LinearizedCoeffs::c1)
      .def_readonly("c1_prime", &LinearizedCoeffs::c1_prime)
      .def_readonly("c2", &LinearizedCoeffs::c2)
      .def_readonly("delta_omega2", &LinearizedCoeffs::delta_omega2);
  m.def("linearized_coeffs", &linearized_coeffs, py::arg("bg"), py::arg("csl"), py::arg("eta"),
        py::arg("order") = CouplingOrder::Full);
  m.def("collapse_r", &collapse_r, py::arg("bg"), py::arg("eta"), py::arg("omega"));

  // --- stochastic unraveling --------------------------------------------------
  py::class_<EnsembleOptions>(m, "EnsembleOptions")
      .def(py::init<>())
      .def_readwrite("n_traj", &EnsembleOptions::n_traj)
      .def_readwrite("seed", &EnsembleOptions::seed)
      .def_readwrite("threads", &EnsembleOptions::threads)
      .def_readwrite("dn_max", &EnsembleOptions::dn_max)
      .def_readwrite("osc_cap", &EnsembleOptions::osc_cap)
      .def_readwrite("noise_log_floor", &EnsembleOptions::noise_log_floor)
      .def_readwrite("evolve", &EnsembleOptions::evolve);

  py::class_<EnsembleStat>(m, "EnsembleStat")
      .def_readonly("n", &EnsembleStat::n)
      .def_readonly("eta", &EnsembleStat::eta)
      .def_readonly("mean_v", &EnsembleStat::mean_v)
      .def_readonly("stderr_v", &EnsembleStat::stderr_v)
      .def_readonly("mean_v2", &EnsembleStat::mean_v2)
      .def_readonly("stderr_v2", &EnsembleStat::stderr_v2)
      .def_readonly("mean_chi", &EnsembleStat::mean_chi)
      .def_readonly("mean_sigma", &EnsembleStat::mean_sigma)
      .def_readonly("re_omega", &EnsembleStat::re_omega)
      .def_readonly("im_omega", &EnsembleStat::im_omega)
      .def_readonly("log_norm", &EnsembleStat::log_norm)
      .def_readonly("var_re_omega", &EnsembleStat::var_re_omega)
      .def_readonly("p_vv", &EnsembleStat::p_vv)
      .def_readonly("collapse_r_det", &EnsembleStat::collapse_r_det)
      .def_readonly("collapse_r_mc", &EnsembleStat::collapse_r_mc);

  py::class_<EnsembleRun>(m, "EnsembleRun")
      .def_readonly("stats", &EnsembleRun::stats)
      .def_readonly("omega", &EnsembleRun::omega)
      .def_readonly("n_traj", &EnsembleRun::n_traj)
      .def_readonly("seed", &EnsembleRun::seed)
      .def_readonly("n_noise_on", &EnsembleRun::n_noise_on)
      .def_readonly("n_steps", &EnsembleRun::n_steps);

  m.def("run_ensemble", &run_ensemble, py::arg("bg"), py::arg("csl"), py::arg("opt"),
        py::arg("sample_n"));

  // --- spectrum ----------------------------------------------------------------
  py::enum_<CrossingRegime>(m, "CrossingRegime")
      .value("InflationCrossing", CrossingRegime::InflationCrossing)
      .value("RadiationCrossing", CrossingRegime::RadiationCrossing);

  py::enum_<SpectrumRoute>(m, "SpectrumRoute")
      .value("Lindblad", SpectrumRoute::Lindblad)
      .value("Quadrature", SpectrumRoute::Quadrature)
      .value("Ensemble", SpectrumRoute::Ensemble)
      .value("ClosedForm", SpectrumRoute::ClosedForm);

  m.def("crossing_regime", &crossing_regime, py::arg("cosmo"), py::arg("r_c"),
        py::arg("delta_n"));

  py::class_<SpectrumOptions>(m, "SpectrumOptions")
      .def(py::init<>())
      .def_readwrite("route", &SpectrumOptions::route)
      .def_readwrite("evolve", &SpectrumOptions::evolve)
      .def_readwrite("quad", &SpectrumOptions::quad)
      .def_readwrite("ensemble", &SpectrumOptions::ensemble)
      .def_readwrite("order", &SpectrumOptions::order);

  py::class_<SpectrumPoint>(m, "SpectrumPoint")
      .def_readonly("k", &SpectrumPoint::k)
      .def_readonly("p_v", &SpectrumPoint::p_v)
      .def_readonly("p_vv", &SpectrumPoint::p_vv)
      .def_readonly("p_vv_free", &SpectrumPoint::p_vv_free)
      .def_readonly("correction_rel", &SpectrumPoint::correction_rel)
      .def_readonly("stderr_correction", &SpectrumPoint::stderr_correction)
      .def_readonly("r_value", &SpectrumPoint::r_value)
      .def_readonly("regime", &SpectrumPoint::regime)
      .def_readonly("route", &SpectrumPoint::route)
      .def_readonly("clipped", &SpectrumPoint::clipped);

  m.def("power_spectrum", &power_spectrum, py::arg("bg"), py::arg("csl"),
        py::arg("opt") = SpectrumOptions{});
  m.def("collapse_r_numeric", &collapse_r_numeric, py::arg("bg"), py::arg("csl"),
        py::arg("opt") = SpectrumOptions{});

  m.def("log10_correction_closed", &log10_correction_closed, py::arg("regime"),
        py::arg("cosmo"), py::arg("csl"), py::arg("delta_n"));
  m.def("log10_correction_end_of_inflation", &log10_correction_end_of_inflation,
        py::arg("cosmo"), py::arg("csl"), py::arg("delta_n"));
  m.def("log10_collapse_deviation_closed", &log10_collapse_deviation_closed,
        py::arg("regime"), py::arg("cosmo"), py::arg("csl"), py::arg("delta_n"));
  m.def("correction_closed", &correction_closed, py::arg("regime"), py::arg("cosmo"),
        py::arg("csl"), py::arg("delta_n"));
  m.def("collapse_r_closed", &collapse_r_closed, py::arg("regime"), py::arg("cosmo"),
        py::arg("csl"), py::arg("delta_n"));

  py::class_<PowerFit>(m, "PowerFit")
      .def_readonly("slope", &PowerFit::slope)
      .def_readonly("intercept", &PowerFit::intercept)
      .def_readonly("residual_rms", &PowerFit::residual_rms);

  m.def("fit_loglog", &fit_loglog, py::arg("x"), py::arg("y"));
  m.def("fit_correction_index", &fit_correction_index, py::arg("points"));

  // --- exclusion ------------------------------------------------------------
  py::class_<GammaBounds>(m, "GammaBounds")
      .def_readonly("r_c", &GammaBounds::r_c)
      .def_readonly("branch", &GammaBounds::branch)
      .def_readonly("log10_gamma_max", &GammaBounds::log10_gamma_max)
      .def_readonly("log10_gamma_min", &GammaBounds::log10_gamma_min)
      .def_readonly("log10_gamma_max_inf", &GammaBounds::log10_gamma_max_inf)
      .def_readonly("log10_gamma_max_rad", &GammaBounds::log10_gamma_max_rad)
      .def_readonly("log10_gamma_min_inf", &GammaBounds::log10_gamma_min_inf)
      .def_readonly("log10_gamma_min_rad", &GammaBounds::log10_gamma_min_rad);

  m.def("gamma_bounds", &gamma_bounds, py::arg("r_c"), py::arg("cosmo"), py::arg("csl"),
        py::arg("delta_n"));
  m.def("log10_lambda_of_gamma", &log10_lambda_of_gamma, py::arg("log10_gamma"),
        py::arg("r_c"));
  m.def("log10_gamma_of_lambda", &log10_gamma_of_lambda, py::arg("log10_lambda"),
        py::arg("r_c"));

  py::class_<LabPolygon>(m, "LabPolygon")
      .def(py::init<>())
      .def_readwrite("id", &LabPolygon::id)
      .def_readwrite("excludes_inside", &LabPolygon::excludes_inside)
      .def_readwrite("vertices", &LabPolygon::vertices);

  py::class_<LabOverlay>(m, "LabOverlay")
      .def(py::init<>())
      .def_readwrite("polygons", &LabOverlay::polygons)
      .def("empty", &LabOverlay::empty)
      .def("excluded", &LabOverlay::excluded);

  m.def("load_lab_overlay", &load_lab_overlay, py::arg("path"));
  m.def("point_in_polygon", &point_in_polygon, py::arg("polygon"), py::arg("x"), py::arg("y"));

  py::enum_<CellStatus>(m, "CellStatus")
      .value("CmbAllowed", CellStatus::CmbAllowed)
      .value("CmbExcludedSpectrum", CellStatus::CmbExcludedSpectrum)
      .value("CmbExcludedNoCollapse", CellStatus::CmbExcludedNoCollapse)
      .value("LabExcluded", CellStatus::LabExcluded)
      .value("BothExcluded", CellStatus::BothExcluded);

  m.def("cell_status_name", &cell_status_name, py::arg("status"));

  py::class_<ScanConfig>(m, "ScanConfig")
      .def(py::init<>())
      .def_readwrite("rc_log10_min", &ScanConfig::rc_log10_min)
      .def_readwrite("rc_log10_max", &ScanConfig::rc_log10_max)
      .def_readwrite("lambda_log10_min", &ScanConfig::lambda_log10_min)
      .def_readwrite("lambda_log10_max", &ScanConfig::lambda_log10_max)
      .def_readwrite("n_rc", &ScanConfig::n_rc)
      .def_readwrite("n_lambda", &ScanConfig::n_lambda)
      .def_readwrite("delta_n", &ScanConfig::delta_n)
      .def_readwrite("safety_factor", &ScanConfig::safety_factor)
      .def_readwrite("overlay_path", &ScanConfig::overlay_path);

  py::class_<ExclusionCell>(m, "ExclusionCell")
      .def_readonly("log10_rc", &ExclusionCell::log10_rc)
      .def_readonly("log10_lambda", &ExclusionCell::log10_lambda)
      .def_readonly("status", &ExclusionCell::status);

  py::class_<BoundaryPoint>(m, "BoundaryPoint")
      .def_readonly("log10_rc_m", &BoundaryPoint::log10_rc_m)
      .def_readonly("log10_gamma", &BoundaryPoint::log10_gamma)
      .def_readonly("log10_lambda_s", &BoundaryPoint::log10_lambda_s)
      .def_readonly("branch", &BoundaryPoint::branch);

  py::class_<ScanResult>(m, "ScanResult")
      .def_readonly("cells", &ScanResult::cells)
      .def_readonly("boundary_max", &ScanResult::boundary_max)
      .def_readonly("boundary_min", &ScanResult::boundary_min)
      .def_readonly("log10_rc_break_m", &ScanResult::log10_rc_break_m)
      .def_readonly("n_joint_allowed", &ScanResult::n_joint_allowed)
      .def_readonly("has_overlay", &ScanResult::has_overlay)
      .def_readonly("verdict", &ScanResult::verdict);

  m.def("scan_grid", &scan_grid, py::arg("scan"), py::arg("cosmo"), py::arg("csl"),
        py::arg("overlay") = LabOverlay{}, py::arg("constants") = PhysicalConstants{},
        py::arg("threads") = 0,
        py::call_guard<py::gil_scoped_release>());

  // --- config ---------------------------------------------------------------
  py::class_<GridConfig>(m, "GridConfig")
      .def(py::init<>())
      .def_readwrite("delta_n_min", &GridConfig::delta_n_min)
      .def_readwrite("delta_n_max", &GridConfig::delta_n_max)
      .def_readwrite("k_count", &GridConfig::k_count);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("cosmo", &RunConfig::cosmo)
      .def_readwrite("delta_n", &RunConfig::delta_n)
      .def_readwrite("csl", &RunConfig::csl)
      .def_readwrite("ensemble", &RunConfig::ensemble)
      .def_readwrite("route", &RunConfig::route)
      .def_readwrite("quad", &RunConfig::quad)
      .def_readwrite("grid", &RunConfig::grid)
      .def_readwrite("scan", &RunConfig::scan)
      .def_readwrite("constants", &RunConfig::constants)
      .def("pivot_mode", &RunConfig::pivot_mode);

  m.def("parse_config_text", &parse_config_text, py::arg("text"),
        py::arg("constants") = PhysicalConstants{});
  m.def("load_config", &load_config, py::arg("path"),
        py::arg("constants") = PhysicalConstants{});
  m.def("config_to_text", &config_to_text, py::arg("config"));
}
