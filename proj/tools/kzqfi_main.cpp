// kzqfi: transverse-field Ising quench runner.
//
// Subcommands: ground-state, quench, sweep, fit, oracle, spectrum, predict.
// Exit codes: 0 ok, 2 usage/invalid input, 3 numerical/convergence failure,
// 4 truncation budget exceeded, 5 engine capacity exceeded.

#include <cstdio>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "kzqfi/dmrg.hpp"
#include "kzqfi/errors.hpp"
#include "kzqfi/io.hpp"
#include "kzqfi/runner.hpp"
#include "kzqfi/tfim.hpp"

namespace {

using nlohmann::json;

json load_config_or_empty(const std::string& path) {
  if (path.empty()) return json::object();
  return kzqfi::io::read_json_file(path);
}

struct QuenchFlags {
  std::string config_path;
  std::string out_dir;
  std::string engine;
  std::string shape;
  std::size_t n_sites = 0;
  double tau_q = 0.0;
  double alpha = 0.0;
  double g_start = 0.0;
  double g_end = 0.0;
  double dt = 0.0;
  std::size_t chi_max = 0;
  double svd_eps = 0.0;
  double budget = 0.0;
  std::uint64_t seed = 0;
  bool thermodynamic = false;
  double ode_tol = 0.0;
  bool print_config = false;
};

void add_quench_flags(CLI::App* cmd, QuenchFlags& f,
                      std::map<std::string, CLI::Option*>& opts) {
  opts["config"] = cmd->add_option("--config", f.config_path,
                                   "JSON run config; flags override it");
  opts["out"] = cmd->add_option("--out", f.out_dir, "output directory");
  opts["engine"] =
      cmd->add_option("--engine", f.engine, "mps | dense | ff")
          ->check(CLI::IsMember({"mps", "dense", "ff"}));
  opts["n-sites"] = cmd->add_option("--n-sites", f.n_sites, "chain length");
  opts["shape"] = cmd->add_option("--shape", f.shape, "linear | power | constant")
                      ->check(CLI::IsMember({"linear", "power", "constant"}));
  opts["tau-q"] = cmd->add_option("--tau-q", f.tau_q, "quench time scale");
  opts["alpha"] = cmd->add_option("--alpha", f.alpha, "power-shape exponent");
  opts["g-start"] = cmd->add_option("--g-start", f.g_start, "initial field");
  opts["g-end"] = cmd->add_option("--g-end", f.g_end, "final field");
  opts["dt"] = cmd->add_option("--dt", f.dt, "Trotter step");
  opts["chi-max"] = cmd->add_option("--chi-max", f.chi_max, "bond dimension cap");
  opts["svd-eps"] = cmd->add_option("--svd-eps", f.svd_eps, "truncation threshold");
  opts["budget"] =
      cmd->add_option("--budget", f.budget, "cumulative truncation budget");
  opts["seed"] = cmd->add_option("--seed", f.seed, "base RNG seed");
  opts["thermodynamic"] = cmd->add_flag("--thermodynamic", f.thermodynamic,
                                        "ff engine: closed-form defect density");
  opts["ode-tol"] = cmd->add_option("--ode-tol", f.ode_tol, "ff mode ODE tolerance");
  opts["print-config"] = cmd->add_flag("--print-config", f.print_config,
                                       "print the resolved config and exit");
}

json quench_config_json(const QuenchFlags& f,
                        const std::map<std::string, CLI::Option*>& opts) {
  json cfg = load_config_or_empty(f.config_path);
  auto set_if = [&](const char* flag, const json::json_pointer& ptr, json value) {
    if (opts.at(flag)->count() > 0) cfg[ptr] = std::move(value);
  };
  using jp = json::json_pointer;
  set_if("out", jp("/output_dir"), f.out_dir);
  set_if("engine", jp("/engine"), f.engine);
  set_if("n-sites", jp("/model/n_sites"), f.n_sites);
  set_if("shape", jp("/schedule/shape"), f.shape);
  set_if("tau-q", jp("/schedule/tau_q"), f.tau_q);
  set_if("alpha", jp("/schedule/alpha"), f.alpha);
  set_if("g-start", jp("/schedule/g_start"), f.g_start);
  set_if("g-end", jp("/schedule/g_end"), f.g_end);
  set_if("dt", jp("/tebd/dt"), f.dt);
  set_if("chi-max", jp("/tebd/chi_max"), f.chi_max);
  set_if("svd-eps", jp("/tebd/svd_eps"), f.svd_eps);
  set_if("budget", jp("/tebd/budget"), f.budget);
  set_if("seed", jp("/seed"), f.seed);
  set_if("thermodynamic", jp("/ff/thermodynamic"), f.thermodynamic);
  set_if("ode-tol", jp("/ff/ode_tol"), f.ode_tol);
  return cfg;
}

int run_quench_like(const QuenchFlags& f,
                    const std::map<std::string, CLI::Option*>& opts) {
  auto cfg = kzqfi::runner::parse_run_config(quench_config_json(f, opts));
  if (f.print_config) {
    std::cout << kzqfi::runner::resolved_config_json(cfg).dump(2) << "\n";
    return 0;
  }
  auto result = kzqfi::runner::run_single(cfg);
  std::cout << kzqfi::runner::record_csv_text(result.record);
  std::cerr << "outputs: " << result.dir.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transverse-field Ising quench simulations (MPS/TEBD with "
               "free-fermion and dense oracles)"};
  app.require_subcommand(1);

  // ground-state
  auto* gs_cmd = app.add_subcommand("ground-state", "DMRG ground state at fixed g");
  std::size_t gs_n = 16, gs_chi = 64, gs_sweeps = 20;
  double gs_g = 5.0, gs_tol = 1e-10;
  std::uint64_t gs_seed = 1;
  gs_cmd->add_option("--n-sites", gs_n, "chain length");
  gs_cmd->add_option("--g", gs_g, "transverse field");
  gs_cmd->add_option("--chi-max", gs_chi, "bond dimension cap");
  gs_cmd->add_option("--max-sweeps", gs_sweeps, "sweep cap");
  gs_cmd->add_option("--energy-tol", gs_tol, "sweep-to-sweep energy tolerance");
  gs_cmd->add_option("--seed", gs_seed, "initial-state seed");

  // quench
  auto* q_cmd = app.add_subcommand("quench", "single quench run");
  QuenchFlags qf;
  std::map<std::string, CLI::Option*> q_opts;
  add_quench_flags(q_cmd, qf, q_opts);

  // oracle (quench with a non-MPS engine; defaults to ff)
  auto* o_cmd = app.add_subcommand("oracle", "free-fermion / dense reference run");
  QuenchFlags of;
  std::map<std::string, CLI::Option*> o_opts;
  add_quench_flags(o_cmd, of, o_opts);

  // sweep
  auto* s_cmd = app.add_subcommand("sweep", "Cartesian parameter sweep");
  std::string s_config, s_out;
  std::size_t s_conc = 0;
  bool s_print = false;
  s_cmd->add_option("--config", s_config, "sweep config JSON (base + axes)")
      ->required();
  auto* s_out_opt = s_cmd->add_option("--out", s_out, "sweep output directory");
  auto* s_conc_opt =
      s_cmd->add_option("--max-concurrency", s_conc, "worker thread cap");
  s_cmd->add_flag("--print-config", s_print, "print the parsed sweep plan and exit");

  // fit
  auto* f_cmd = app.add_subcommand("fit", "fit aggregated records");
  std::string f_records, f_mode = "power-law", f_value = "f_q", f_out;
  bool f_extrapolate = false;
  f_cmd->add_option("--records", f_records, "records CSV path")->required();
  f_cmd->add_option("--mode", f_mode, "finite-size | power-law")
      ->check(CLI::IsMember({"finite-size", "power-law"}));
  f_cmd->add_option("--value-column", f_value, "column to fit (default f_q)");
  f_cmd->add_flag("--extrapolate", f_extrapolate,
                  "finite-size extrapolate per tau_q before the power-law fit");
  f_cmd->add_option("--out", f_out, "also write the report JSON here");

  // spectrum
  auto* sp_cmd = app.add_subcommand("spectrum", "single-particle spectrum eps_k");
  std::size_t sp_n = 16;
  double sp_g = 1.0;
  std::string sp_out;
  sp_cmd->add_option("--n-sites", sp_n, "chain length (even)");
  sp_cmd->add_option("--g", sp_g, "transverse field");
  sp_cmd->add_option("--out", sp_out, "write CSV here instead of stdout");

  // predict
  auto* p_cmd = app.add_subcommand("predict", "Kibble-Zurek exponent table");
  int p_d = 1;
  double p_nu = 1.0, p_z = 1.0, p_alpha = 1.0;
  p_cmd->add_option("--d", p_d, "spatial dimension");
  p_cmd->add_option("--nu", p_nu, "correlation-length exponent");
  p_cmd->add_option("--z", p_z, "dynamical exponent");
  p_cmd->add_option("--alpha", p_alpha, "schedule power");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(gs_cmd)) {
      kzqfi::tfim::ModelParams model{gs_n, 1.0, 1.0};
      kzqfi::dmrg::DMRGConfig cfg;
      cfg.chi_max = gs_chi;
      cfg.max_sweeps = gs_sweeps;
      cfg.energy_tol = gs_tol;
      cfg.seed = gs_seed;
      auto result = kzqfi::dmrg::ground_state(model, gs_g, cfg);
      json out = {{"n_sites", gs_n},
                  {"g", gs_g},
                  {"energy", result.energy},
                  {"energy_per_site", result.energy / static_cast<double>(gs_n)},
                  {"sweeps", result.sweeps},
                  {"energy_per_sweep", result.energy_per_sweep},
                  {"max_bond_dim", result.psi.max_bond_dim()}};
      std::cout << out.dump(2) << "\n";
    } else if (app.got_subcommand(q_cmd)) {
      return run_quench_like(qf, q_opts);
    } else if (app.got_subcommand(o_cmd)) {
      if (o_opts.at("engine")->count() == 0) of.engine = "ff";
      auto cfg_json = quench_config_json(of, o_opts);
      cfg_json["engine"] = of.engine.empty() ? "ff" : of.engine;
      if (cfg_json["engine"] == "mps")
        throw kzqfi::InvalidArgumentError("oracle: engine must be ff or dense");
      auto cfg = kzqfi::runner::parse_run_config(cfg_json);
      if (of.print_config) {
        std::cout << kzqfi::runner::resolved_config_json(cfg).dump(2) << "\n";
        return 0;
      }
      auto result = kzqfi::runner::run_single(cfg);
      std::cout << kzqfi::runner::record_csv_text(result.record);
      std::cerr << "outputs: " << result.dir.string() << "\n";
    } else if (app.got_subcommand(s_cmd)) {
      auto sweep_cfg =
          kzqfi::runner::parse_sweep_config(kzqfi::io::read_json_file(s_config));
      if (s_out_opt->count() > 0) sweep_cfg.output_dir = s_out;
      if (s_conc_opt->count() > 0) sweep_cfg.max_concurrency = s_conc;
      if (s_print) {
        std::size_t n_cells = 1;
        json axes = json::object();
        for (const auto& [axis, values] : sweep_cfg.axes) {
          n_cells *= values.size();
          axes[axis] = values;
        }
        json plan = {{"base", sweep_cfg.base},
                     {"axes", axes},
                     {"n_cells", n_cells},
                     {"output_dir", sweep_cfg.output_dir.string()},
                     {"max_concurrency", sweep_cfg.max_concurrency}};
        std::cout << plan.dump(2) << "\n";
        return 0;
      }
      auto result = kzqfi::runner::run_sweep(sweep_cfg);
      for (const auto& cell : result.cells) {
        std::cout << cell.name << ": " << cell.status;
        if (!cell.error.empty()) std::cout << " (" << cell.error << ")";
        std::cout << "\n";
      }
      std::cout << "cells=" << result.cells.size()
                << " failed=" << result.n_failed
                << " records=" << result.records_csv.string() << "\n";
      if (result.n_failed > 0) return 3;
    } else if (app.got_subcommand(f_cmd)) {
      auto table = kzqfi::io::read_csv(f_records);
      json report;
      if (f_mode == "finite-size")
        report = kzqfi::runner::fit_report_finite_size(table, f_value);
      else
        report = kzqfi::runner::fit_report_power_law(table, f_value, f_extrapolate);
      if (!f_out.empty()) kzqfi::io::write_json_file(f_out, report);
      std::cout << report.dump(2) << "\n";
    } else if (app.got_subcommand(sp_cmd)) {
      kzqfi::io::CsvWriter w({"k", "epsilon_k"});
      for (double k : kzqfi::tfim::antiperiodic_momenta(sp_n)) {
        w.cell(k);
        w.cell(kzqfi::tfim::spectrum_epsilon_k(sp_g, k));
        w.end_row();
      }
      if (sp_out.empty())
        std::cout << w.str();
      else
        kzqfi::io::write_text_atomic(sp_out, w.str());
    } else if (app.got_subcommand(p_cmd)) {
      std::cout << kzqfi::runner::kz_report(p_d, p_nu, p_z, p_alpha).dump(2)
                << "\n";
    }
  } catch (const kzqfi::InvalidArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kzqfi::InvalidInputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kzqfi::BudgetExceededError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const kzqfi::CapacityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const kzqfi::NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
