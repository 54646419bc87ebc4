#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pzf/cli_io.hpp"

namespace fs = std::filesystem;

namespace {

pzf::RunConfig load_config(const std::string& config_path) {
  if (config_path.empty()) return pzf::parse_config("");
  std::ifstream f(config_path, std::ios::binary);
  if (!f) {
    throw pzf::ConfigError("cannot read config file '" + config_path + "'");
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return pzf::parse_config(buf.str());
}

pzf::State to_state(const std::vector<double>& v) {
  return pzf::State{v.at(0), v.at(1), v.at(2)};
}

void emit(const fs::path& path, std::string_view text) {
  pzf::write_text_file(path, text);
  std::cout << "wrote " << path.string() << "\n";
}

void emit_json(const fs::path& path, const nlohmann::json& j) {
  emit(path, j.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Salinity-coupled plankton-fish food chain analysis"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  app.add_option("-c,--config", config_path, "Flat key=value config file");
  app.add_option("--out-dir", out_dir, "Directory for output files");

  std::vector<double> start{1.0, 1.0, 1.0};
  const auto add_start = [&start](CLI::App* cmd) {
    cmd->add_option("--start", start, "Initial state P Z F")->expected(3);
  };

  auto* cmd_equilibria = app.add_subcommand("equilibria", "Equilibria and feasibility");
  std::string eq_out = "equilibria.json";
  cmd_equilibria->add_option("-o,--out", eq_out, "Output JSON path");

  auto* cmd_stability = app.add_subcommand("stability", "Routh-Hurwitz stability per equilibrium");
  std::string st_out = "stability.json";
  cmd_stability->add_option("-o,--out", st_out, "Output JSON path");

  auto* cmd_simulate = app.add_subcommand("simulate", "Integrate and write the time series");
  std::string sim_out = "simulate.csv";
  cmd_simulate->add_option("-o,--out", sim_out, "Output CSV path");
  add_start(cmd_simulate);

  auto* cmd_scan = app.add_subcommand("scan", "Bifurcation scan over one parameter");
  std::string scan_param;
  double scan_from = 0.0, scan_to = 0.0;
  int scan_steps = 0, scan_jobs = 0;
  std::string scan_out = "scan.csv", scan_json_out = "scan.json";
  cmd_scan->add_option("--param", scan_param, "Parameter name")->required();
  cmd_scan->add_option("--from", scan_from, "Range start")->required();
  cmd_scan->add_option("--to", scan_to, "Range end")->required();
  cmd_scan->add_option("--steps", scan_steps, "Grid size (>= 2)")->required();
  cmd_scan->add_option("--jobs", scan_jobs, "0 = default thread team, 1 = serial");
  cmd_scan->add_option("-o,--out", scan_out, "Output CSV path");
  cmd_scan->add_option("--json-out", scan_json_out, "Output JSON summary path");
  add_start(cmd_scan);

  auto* cmd_hopf = app.add_subcommand("hopf", "Locate a Hopf crossing by bisection");
  std::string hopf_param;
  double hopf_lo = 0.0, hopf_hi = 0.0, hopf_tol = 1e-6;
  std::string hopf_out = "hopf.json";
  cmd_hopf->add_option("--param", hopf_param, "Parameter name")->required();
  cmd_hopf->add_option("--lo", hopf_lo, "Bracket low end")->required();
  cmd_hopf->add_option("--hi", hopf_hi, "Bracket high end")->required();
  cmd_hopf->add_option("--tol", hopf_tol, "Bracket width tolerance");
  cmd_hopf->add_option("-o,--out", hopf_out, "Output JSON path");

  auto* cmd_lyapunov = app.add_subcommand("lyapunov", "Largest Lyapunov exponent");
  std::string ly_out = "lyapunov.json";
  cmd_lyapunov->add_option("-o,--out", ly_out, "Output JSON path");
  add_start(cmd_lyapunov);

  auto* cmd_global = app.add_subcommand("global-check", "Boundedness and contraction certificate");
  std::string gc_out = "global_check.json";
  double gc_rho = 0.0;
  bool gc_rho_set = false;
  auto* rho_opt = cmd_global->add_option("--rho", gc_rho, "Override rho for the mu certificate");
  cmd_global->add_option("-o,--out", gc_out, "Output JSON path");
  add_start(cmd_global);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    const pzf::RunConfig config = load_config(config_path);
    const fs::path dir(out_dir);
    if (!dir.empty()) fs::create_directories(dir);

    if (*cmd_equilibria) {
      emit_json(dir / eq_out, pzf::equilibria_report(config));
    } else if (*cmd_stability) {
      emit_json(dir / st_out, pzf::stability_report(config));
    } else if (*cmd_simulate) {
      const pzf::EffectiveParameters p = pzf::derive_effective(config.raw, config.mode);
      const pzf::Trajectory traj =
          pzf::integrate(p, to_state(start), config.analysis.integrator);
      emit(dir / sim_out, pzf::timeseries_csv(traj));
    } else if (*cmd_scan) {
      pzf::ScanOptions opt{scan_param, scan_from, scan_to, scan_steps, scan_jobs};
      const pzf::ScanResult result = pzf::bifurcation_scan(
          config.raw, config.mode, to_state(start), opt, config.analysis);
      emit(dir / scan_out, pzf::scan_csv(result));
      emit_json(dir / scan_json_out, pzf::scan_report(config, result));
    } else if (*cmd_hopf) {
      const pzf::HopfResult h = pzf::hopf_locate(config.raw, config.mode,
                                                 hopf_param, hopf_lo, hopf_hi, hopf_tol);
      emit_json(dir / hopf_out, pzf::hopf_report(config, h, hopf_param, hopf_lo, hopf_hi));
    } else if (*cmd_lyapunov) {
      emit_json(dir / ly_out, pzf::lyapunov_report(config, to_state(start)));
    } else if (*cmd_global) {
      gc_rho_set = rho_opt->count() > 0;
      emit_json(dir / gc_out,
                pzf::global_check_report(config, to_state(start),
                                         gc_rho_set ? std::optional<double>(gc_rho)
                                                    : std::nullopt));
    }
    return 0;
  } catch (const pzf::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pzf::PreconditionError& e) {
    std::cerr << "precondition failed: " << e.what() << "\n";
    return 4;
  } catch (const pzf::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
