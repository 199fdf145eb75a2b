#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "kzqfi/dmrg.hpp"
#include "kzqfi/io.hpp"
#include "kzqfi/observables.hpp"
#include "kzqfi/tebd.hpp"
#include "kzqfi/tfim.hpp"

namespace kzqfi::runner {

struct FFOptions {
  bool thermodynamic = false;
  double ode_tol = 1e-10;
};

/// Fully resolved description of one run. JSON sections: model, schedule,
/// dmrg, tebd, ff, plus top-level engine / output_dir / seed.
struct RunConfig {
  tfim::ModelParams model{16, 1.0, 1.0};
  tfim::QuenchSchedule schedule = tfim::QuenchSchedule::linear(1.0);
  dmrg::DMRGConfig dmrg_cfg;
  tebd::TEBDConfig tebd_cfg;
  FFOptions ff;
  std::string engine = "mps";
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
  bool dmrg_seed_explicit = false;
};

/// Overlays `j` onto defaults; unknown keys and type mismatches raise
/// InvalidArgumentError naming the offending field path.
RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json resolved_config_json(const RunConfig& cfg);

extern const std::vector<std::string> kRecordColumns;
std::string record_csv_text(const observables::ObservableRecord& rec);
observables::ObservableRecord record_from_row(const io::CsvTable& table,
                                              std::size_t row);

struct RunResult {
  observables::ObservableRecord record;
  std::filesystem::path dir;
};

/// Ground state -> evolution -> measurement for the configured engine, with
/// record/profile/trace CSVs and a manifest (config echo + output hashes)
/// persisted under cfg.output_dir.
RunResult run_single(const RunConfig& cfg);

struct SweepConfig {
  nlohmann::json base;  // RunConfig JSON; cell values are overlaid on it
  std::vector<std::pair<std::string, std::vector<nlohmann::json>>> axes;
  std::size_t max_concurrency = 0;  // 0 = auto
  std::filesystem::path output_dir = "sweep";
};

SweepConfig parse_sweep_config(const nlohmann::json& j);

struct CellOutcome {
  std::size_t index = 0;
  std::string name;
  std::string status;  // ok | failed | skipped(= ok, reused)
  std::string error;
  observables::ObservableRecord record;
};

struct SweepResult {
  std::vector<CellOutcome> cells;
  std::filesystem::path records_csv;
  std::filesystem::path summary_json;
  std::size_t n_failed = 0;
};

/// Runs the Cartesian product of the axes (deterministic enumeration) with a
/// worker pool; completed cells (valid manifest + matching hashes) are not
/// recomputed. Aggregates records.csv in cell order; per-cell failures are
/// recorded in the summary without aborting the sweep.
SweepResult run_sweep(const SweepConfig& cfg);

/// Requested concurrency clamped by hardware and KZQFI_MAX_THREADS.
std::size_t effective_concurrency(std::size_t requested);

nlohmann::json fit_report_finite_size(const io::CsvTable& records,
                                      const std::string& value_column);
nlohmann::json fit_report_power_law(const io::CsvTable& records,
                                    const std::string& value_column,
                                    bool extrapolate);
nlohmann::json kz_report(int d, double nu, double z, double alpha);

}  // namespace kzqfi::runner
