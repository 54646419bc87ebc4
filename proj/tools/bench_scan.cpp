// Times the bifurcation-scan kernel: serial reference vs the OpenMP path,
// and verifies the two produce byte-identical output.

#include <chrono>
#include <iostream>

#include "pzf/attractor_analysis.hpp"
#include "pzf/cli_io.hpp"

#ifdef PZF_HAVE_OPENMP
#include <omp.h>
#endif

using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

}  // namespace

int main() {
  pzf::RawParameters raw;  // baseline calibration
  pzf::AnalysisConfig cfg;
  cfg.integrator.t_end = 400.0;
  cfg.transient = 150.0;

  pzf::ScanOptions opt{"su", 5.0, 8.5, 24, 1};
  const pzf::State start{1.0, 1.0, 1.0};

#ifdef PZF_HAVE_OPENMP
  std::cout << "OpenMP threads available: " << omp_get_max_threads() << "\n";
#else
  std::cout << "built without OpenMP; both paths run serially\n";
#endif
  std::cout << "scan " << opt.param << " in [" << opt.from << ", " << opt.to
            << "], " << opt.steps << " points, t_end=" << cfg.integrator.t_end
            << "\n";

  auto t0 = clock_type::now();
  const pzf::ScanResult serial =
      pzf::bifurcation_scan_serial(raw, pzf::DilutionMode::Downstream, start, opt, cfg);
  const double serial_s = seconds_since(t0);
  std::cout << "serial:   " << serial_s << " s\n";

  opt.jobs = 0;
  t0 = clock_type::now();
  const pzf::ScanResult parallel =
      pzf::bifurcation_scan(raw, pzf::DilutionMode::Downstream, start, opt, cfg);
  const double parallel_s = seconds_since(t0);
  std::cout << "parallel: " << parallel_s << " s\n";
  std::cout << "speedup:  " << serial_s / parallel_s << "x\n";

  const bool identical = pzf::scan_csv(serial) == pzf::scan_csv(parallel);
  std::cout << "outputs identical: " << (identical ? "yes" : "NO") << "\n";
  return identical ? 0 : 1;
}
