#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cslcosmo/exclusion.hpp"
#include "cslcosmo/io.hpp"
#include "cslcosmo/sde.hpp"
#include "cslcosmo/spectrum.hpp"

namespace {

using namespace cslcosmo;

constexpr double kTwoPi2 = 19.739208802178716;

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a + (b - a) * i / (n - 1);
  return out;
}

std::string fmt(double v) { return format_cell(v); }

std::string default_out(const std::string& command, const std::string& format) {
  return command + (format == "json" ? ".json" : ".csv");
}

SpectrumOptions spectrum_options(const RunConfig& cfg) {
  SpectrumOptions sopt;
  sopt.route = cfg.route;
  sopt.evolve = cfg.ensemble.evolve;
  sopt.quad = cfg.quad;
  sopt.ensemble = cfg.ensemble;
  return sopt;
}

int cmd_mode_evolve(const RunConfig& cfg, const std::string& out,
                    const std::string& format, bool with_ensemble) {
  const ModeBackground bg = cfg.pivot_mode();
  const EvolveOptions& ev = cfg.ensemble.evolve;
  const double n_ini = bg.n_of_eta(-ev.x_ini / bg.k());
  const double n_final = ev.n_rad_efolds > 0.0 ? ev.n_rad_efolds : 0.0;
  const std::vector<double> sample_n = linspace(n_ini, n_final, 201);

  const MomentRun mr = integrate_moments(bg, cfg.csl, ev, sample_n);
  const OmegaRun orun = integrate_omega(bg, cfg.csl, ev, sample_n);

  std::vector<std::string> cols{"n",        "eta",      "p_vv",     "p_cross",
                                "p_pp",     "re_omega", "im_omega", "log_norm",
                                "r"};
  EnsembleRun er;
  if (with_ensemble) {
    er = run_ensemble(bg, cfg.csl, cfg.ensemble, sample_n);
    for (const char* c : {"mean_v", "stderr_v", "mean_v2", "stderr_v2",
                          "p_vv_mc", "r_mc"})
      cols.push_back(c);
  }
  Table t(cols);
  for (std::size_t i = 0; i < sample_n.size(); ++i) {
    const MomentSample& ms = mr.samples.at(i);
    const OmegaSample& os = orun.samples.at(i);
    std::vector<std::string> row{
        fmt(ms.n),
        fmt(ms.eta),
        fmt(ms.m.p_vv),
        fmt(ms.m.p_cross),
        fmt(ms.m.p_pp),
        fmt(os.omega.real()),
        fmt(os.omega.imag()),
        fmt(orun.log_norm_at(os.n)),
        fmt(collapse_r(bg, os.eta, os.omega))};
    if (with_ensemble) {
      const EnsembleStat& st = er.stats.at(i);
      for (double v : {st.mean_v, st.stderr_v, st.mean_v2, st.stderr_v2,
                       st.p_vv, st.collapse_r_mc})
        row.push_back(fmt(v));
    }
    t.add_row(std::move(row));
  }

  const double eta_obs = bg.eta_of_n(n_final);
  const double p_vv_free = std::norm(free_mode(bg, eta_obs).g);
  const double corr = mr.final_state.p_vv / p_vv_free - 1.0;
  const double r_val = collapse_r(bg, eta_obs, orun.omega_final);
  const double p_v = std::pow(bg.k(), 3) / kTwoPi2 /
                     (4.0 * re_omega_free(bg, eta_obs)) * (1.0 + corr - r_val);

  nlohmann::ordered_json summary;
  summary["correction_rel"] = corr;
  summary["collapse_r"] = r_val;
  summary["p_v"] = p_v;
  summary["regime"] = crossing_regime(bg.cosmo(), cfg.csl.r_c, bg.delta_n()) ==
                              CrossingRegime::InflationCrossing
                          ? "inflation-crossing"
                          : "radiation-crossing";
  if (with_ensemble) {
    const EnsembleStat& fin = er.stats.back();
    summary["ensemble_p_vv"] = fin.p_vv;
    summary["ensemble_collapse_r_mc"] = fin.collapse_r_mc;
    summary["n_traj"] = er.n_traj;
    summary["seed"] = er.seed;
  }

  emit_table(t, "mode-evolve", cfg, out, format, summary);
  std::cout << "correction_rel = " << fmt(corr) << "\nR = " << fmt(r_val)
            << "\nwrote " << out << "\n";
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, const std::string& out,
                 const std::string& format) {
  if (cfg.grid.k_count < 2)
    throw std::invalid_argument("spectrum: grid.k_count must be >= 2");
  if (!(cfg.grid.delta_n_max > cfg.grid.delta_n_min))
    throw std::invalid_argument("spectrum: grid.delta_n_max must exceed delta_n_min");

  const std::vector<double> dns =
      linspace(cfg.grid.delta_n_min, cfg.grid.delta_n_max, cfg.grid.k_count);
  const CrossingRegime reg0 =
      crossing_regime(cfg.cosmo, cfg.csl.r_c, dns.front());
  for (double dn : dns)
    if (crossing_regime(cfg.cosmo, cfg.csl.r_c, dn) != reg0)
      throw std::invalid_argument(
          "spectrum: k-grid mixes crossing regimes; split the grid at "
          "H_end r_c = e^{delta_n}");

  const SpectrumOptions sopt = spectrum_options(cfg);
  std::vector<SpectrumPoint> pts;
  pts.reserve(dns.size());
  for (double dn : dns) {
    const ModeBackground bg = ModeBackground::from_delta_n(cfg.cosmo, dn);
    pts.push_back(power_spectrum(bg, cfg.csl, sopt));
  }

  Table t({"k", "delta_n", "p_v", "p_vv", "p_vv_free", "correction_rel",
           "stderr_correction", "r_value", "regime", "clipped"});
  t.mark_text(8);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const SpectrumPoint& p = pts[i];
    t.add_row({fmt(p.k), fmt(dns[i]), fmt(p.p_v), fmt(p.p_vv), fmt(p.p_vv_free),
               fmt(p.correction_rel), fmt(p.stderr_correction), fmt(p.r_value),
               p.regime == CrossingRegime::InflationCrossing
                   ? "inflation-crossing"
                   : "radiation-crossing",
               p.clipped ? "1" : "0"});
  }

  nlohmann::ordered_json summary;
  summary["route"] = cfg.resolved.count("spectrum.route")
                         ? cfg.resolved.at("spectrum.route")
                         : "lindblad";
  summary["regime"] = reg0 == CrossingRegime::InflationCrossing
                          ? "inflation-crossing"
                          : "radiation-crossing";
  const double p_idx = cfg.csl.p_index;
  summary["expected_index"] = reg0 == CrossingRegime::InflationCrossing
                                  ? 2.0 * p_idx - 1.0
                                  : 4.0 * p_idx - 10.0;
  std::string fit_note;
  try {
    const PowerFit fit = fit_correction_index(pts);
    summary["fitted_index"] = fit.slope;
    summary["fit_intercept"] = fit.intercept;
    summary["fit_residual_rms"] = fit.residual_rms;
  } catch (const std::invalid_argument& e) {
    // fall back to a raw log-log fit when the strict fit preconditions
    // (>= 5 points, >= 1 decade) do not hold
    try {
      std::vector<double> ks, cs;
      for (const SpectrumPoint& p : pts) {
        ks.push_back(p.k);
        cs.push_back(p.correction_rel);
      }
      const PowerFit fit = fit_loglog(ks, cs);
      summary["fitted_index"] = fit.slope;
      summary["fit_intercept"] = fit.intercept;
      summary["fit_residual_rms"] = fit.residual_rms;
      summary["fit_note"] = "raw log-log fit; grid below strict-fit size";
    } catch (const std::invalid_argument&) {
      summary["fitted_index"] = nullptr;
      summary["fit_note"] = e.what();
    }
  }

  emit_table(t, "spectrum", cfg, out, format, summary);
  std::cout << "spectrum: " << pts.size() << " points, regime "
            << summary["regime"].get<std::string>();
  if (summary["fitted_index"].is_number())
    std::cout << ", fitted index " << fmt(summary["fitted_index"].get<double>());
  std::cout << "\nwrote " << out << "\n";
  return 0;
}

int cmd_ensemble(const RunConfig& cfg, const std::string& out,
                 const std::string& format) {
  const ModeBackground bg = cfg.pivot_mode();
  const EvolveOptions& ev = cfg.ensemble.evolve;
  const double n_ini = bg.n_of_eta(-ev.x_ini / bg.k());
  const double n_final = ev.n_rad_efolds > 0.0 ? ev.n_rad_efolds : 0.0;
  const std::vector<double> sample_n = linspace(n_ini, n_final, 11);

  const EnsembleRun er = run_ensemble(bg, cfg.csl, cfg.ensemble, sample_n);

  Table t({"n", "eta", "mean_v", "stderr_v", "mean_v2", "stderr_v2", "mean_chi",
           "mean_sigma", "re_omega", "im_omega", "log_norm", "var_re_omega",
           "p_vv", "collapse_r_det", "collapse_r_mc"});
  for (const EnsembleStat& st : er.stats)
    t.add_row({fmt(st.n), fmt(st.eta), fmt(st.mean_v), fmt(st.stderr_v),
               fmt(st.mean_v2), fmt(st.stderr_v2), fmt(st.mean_chi),
               fmt(st.mean_sigma), fmt(st.re_omega), fmt(st.im_omega),
               fmt(st.log_norm), fmt(st.var_re_omega), fmt(st.p_vv),
               fmt(st.collapse_r_det), fmt(st.collapse_r_mc)});

  const EnsembleStat& fin = er.stats.back();
  const double eta_obs = bg.eta_of_n(fin.n);
  const double p_vv_free = std::norm(free_mode(bg, eta_obs).g);

  nlohmann::ordered_json summary;
  summary["n_traj"] = er.n_traj;
  summary["seed"] = er.seed;
  summary["n_steps"] = er.n_steps;
  summary["n_noise_on"] = er.n_noise_on;
  summary["p_vv"] = fin.p_vv;
  summary["correction_rel"] = fin.p_vv / p_vv_free - 1.0;
  summary["stderr_correction"] = fin.stderr_v2 / p_vv_free;
  summary["collapse_r_det"] = fin.collapse_r_det;
  summary["collapse_r_mc"] = fin.collapse_r_mc;

  emit_table(t, "ensemble", cfg, out, format, summary);
  std::cout << "ensemble: " << er.n_traj << " trajectories, "
            << er.n_steps << " steps, R_det = " << fmt(fin.collapse_r_det)
            << "\nwrote " << out << "\n";
  return 0;
}

int cmd_exclusion(const RunConfig& cfg, const std::string& out,
                  const std::string& format) {
  LabOverlay overlay;
  if (!cfg.scan.overlay_path.empty())
    overlay = load_lab_overlay(cfg.scan.overlay_path);

  const ScanResult res = scan_grid(cfg.scan, cfg.cosmo, cfg.csl, overlay,
                                   cfg.constants, cfg.ensemble.threads);

  Table t({"log10_rc", "log10_lambda", "status"});
  t.mark_text(2);
  for (const ExclusionCell& c : res.cells)
    t.add_row({fmt(c.log10_rc), fmt(c.log10_lambda),
               cell_status_name(c.status)});

  std::array<int, 5> counts{};
  for (const ExclusionCell& c : res.cells)
    ++counts[static_cast<int>(c.status)];

  auto boundary_json = [](const std::vector<BoundaryPoint>& pts) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const BoundaryPoint& b : pts)
      arr.push_back({{"log10_rc_m", b.log10_rc_m},
                     {"log10_lambda_s", b.log10_lambda_s},
                     {"log10_gamma", b.log10_gamma},
                     {"branch", b.branch == CrossingRegime::InflationCrossing
                                    ? "inflation-crossing"
                                    : "radiation-crossing"}});
    return arr;
  };

  nlohmann::ordered_json summary;
  summary["verdict"] = res.verdict;
  summary["n_joint_allowed"] = res.n_joint_allowed;
  summary["log10_rc_break_m"] = res.log10_rc_break_m;
  summary["counts"] = {
      {cell_status_name(CellStatus::CmbAllowed), counts[0]},
      {cell_status_name(CellStatus::CmbExcludedSpectrum), counts[1]},
      {cell_status_name(CellStatus::CmbExcludedNoCollapse), counts[2]},
      {cell_status_name(CellStatus::LabExcluded), counts[3]},
      {cell_status_name(CellStatus::BothExcluded), counts[4]}};
  summary["parameters"] = {{"delta_n", cfg.scan.delta_n},
                           {"p_index", cfg.csl.p_index},
                           {"m0", cfg.csl.m0},
                           {"h_inf", cfg.cosmo.h_end},
                           {"epsilon1", cfg.cosmo.eps1},
                           {"safety_factor", cfg.scan.safety_factor},
                           {"n_rc", cfg.scan.n_rc},
                           {"n_lambda", cfg.scan.n_lambda}};
  summary["boundary_gamma_max"] = boundary_json(res.boundary_max);
  summary["boundary_gamma_min"] = boundary_json(res.boundary_min);

  emit_table(t, "exclusion", cfg, out, format, summary);
  std::cout << "exclusion: verdict " << res.verdict << ", "
            << res.n_joint_allowed << " jointly allowed cells\nwrote " << out
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-mode collapse-model cosmology toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, out_path, format, constants_path;
  std::uint64_t seed = 0;
  int threads = -1;
  bool with_ensemble = false;

  app.add_option("--config", config_path,
                 "run config (key = value) or a manifest JSON from a previous run");
  app.add_option("--out", out_path, "output path (default: <command>.<format>)");
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "ensemble seed override");
  auto* threads_opt = app.add_option("--threads", threads, "worker thread count (0: all cores)");
  app.add_option("--constants", constants_path,
                 "physical-constants file overriding the built-in table");

  CLI::App* sub_mode = app.add_subcommand(
      "mode-evolve", "evolve one mode: moment and width trajectories");
  sub_mode->add_flag("--ensemble", with_ensemble,
                     "append ensemble statistics columns");
  CLI::App* sub_spec = app.add_subcommand(
      "spectrum", "power spectrum over a k-grid with a fitted correction index");
  CLI::App* sub_ens = app.add_subcommand(
      "ensemble", "Monte-Carlo trajectory ensemble statistics");
  CLI::App* sub_exc = app.add_subcommand(
      "exclusion", "(r_c, lambda) exclusion map and verdict");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    PhysicalConstants pc;
    if (!constants_path.empty()) pc = load_constants(constants_path);

    RunConfig cfg = config_path.empty() ? parse_config_text("", pc)
                                        : load_config_any(config_path, pc);
    if (!constants_path.empty()) cfg.constants = pc;
    if (*seed_opt) {
      cfg.ensemble.seed = seed;
      cfg.resolved["numerics.seed"] = std::to_string(seed);
    }
    if (*threads_opt) {
      cfg.ensemble.threads = threads;
      cfg.resolved["numerics.threads"] = std::to_string(threads);
    }
    if (!format.empty()) {
      cfg.output.format = format;
      cfg.resolved["output.format"] = format;
    }
    if (!out_path.empty()) {
      cfg.output.path = out_path;
      cfg.resolved["output.path"] = out_path;
    }

    std::string cmd;
    if (sub_mode->parsed()) cmd = "mode-evolve";
    else if (sub_spec->parsed()) cmd = "spectrum";
    else if (sub_ens->parsed()) cmd = "ensemble";
    else cmd = "exclusion";

    const std::string fmt_final = cfg.output.format;
    std::string out_final = cfg.output.path;
    if (out_final.empty()) {
      out_final = default_out(cmd, fmt_final);
      cfg.output.path = out_final;
      cfg.resolved["output.path"] = out_final;
    }

    if (sub_mode->parsed())
      return cmd_mode_evolve(cfg, out_final, fmt_final, with_ensemble);
    if (sub_spec->parsed()) return cmd_spectrum(cfg, out_final, fmt_final);
    if (sub_ens->parsed()) return cmd_ensemble(cfg, out_final, fmt_final);
    return cmd_exclusion(cfg, out_final, fmt_final);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
}
