#include "kzqfi/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include "kzqfi/errors.hpp"
#include "kzqfi/fit.hpp"
#include "kzqfi/oracles.hpp"

namespace kzqfi::runner {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& path, const std::string& what) {
  throw InvalidArgumentError("config: " + what + " at '" + path + "'");
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) bad_field(path, "expected a number");
  return v.get<double>();
}

std::uint64_t as_uint(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<long long>() >= 0)
    return static_cast<std::uint64_t>(v.get<long long>());
  bad_field(path, "expected a non-negative integer");
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad_field(path, "expected a string");
  return v.get<std::string>();
}

bool as_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) bad_field(path, "expected a boolean");
  return v.get<bool>();
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) bad_field(path, "expected an object");
}

std::string iso_utc_now() {
  std::time_t t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  require_object(j, "(root)");
  RunConfig cfg;

  std::string shape = "linear";
  double tau_q = 1.0, alpha = 2.0, g_start = 5.0, g_end = 0.0;
  double g_const = 1.0, duration = 1.0;

  for (const auto& [key, val] : j.items()) {
    if (key == "model") {
      require_object(val, "model");
      for (const auto& [k2, v2] : val.items()) {
        if (k2 == "n_sites")
          cfg.model.n_sites = static_cast<std::size_t>(as_uint(v2, "model.n_sites"));
        else if (k2 == "j")
          cfg.model.j_coupling = as_double(v2, "model.j");
        else
          bad_field("model." + k2, "unknown key");
      }
    } else if (key == "schedule") {
      require_object(val, "schedule");
      for (const auto& [k2, v2] : val.items()) {
        const std::string p = "schedule." + k2;
        if (k2 == "shape")
          shape = as_string(v2, p);
        else if (k2 == "tau_q")
          tau_q = as_double(v2, p);
        else if (k2 == "alpha")
          alpha = as_double(v2, p);
        else if (k2 == "g_start")
          g_start = as_double(v2, p);
        else if (k2 == "g_end")
          g_end = as_double(v2, p);
        else if (k2 == "g")
          g_const = as_double(v2, p);
        else if (k2 == "duration")
          duration = as_double(v2, p);
        else
          bad_field(p, "unknown key");
      }
    } else if (key == "dmrg") {
      require_object(val, "dmrg");
      for (const auto& [k2, v2] : val.items()) {
        const std::string p = "dmrg." + k2;
        if (k2 == "chi_max")
          cfg.dmrg_cfg.chi_max = static_cast<std::size_t>(as_uint(v2, p));
        else if (k2 == "svd_eps")
          cfg.dmrg_cfg.svd_eps = as_double(v2, p);
        else if (k2 == "max_sweeps")
          cfg.dmrg_cfg.max_sweeps = static_cast<std::size_t>(as_uint(v2, p));
        else if (k2 == "energy_tol")
          cfg.dmrg_cfg.energy_tol = as_double(v2, p);
        else if (k2 == "local_solver_tol")
          cfg.dmrg_cfg.local_solver_tol = as_double(v2, p);
        else if (k2 == "seed") {
          cfg.dmrg_cfg.seed = as_uint(v2, p);
          cfg.dmrg_seed_explicit = true;
        } else
          bad_field(p, "unknown key");
      }
    } else if (key == "tebd") {
      require_object(val, "tebd");
      for (const auto& [k2, v2] : val.items()) {
        const std::string p = "tebd." + k2;
        if (k2 == "dt")
          cfg.tebd_cfg.dt = as_double(v2, p);
        else if (k2 == "chi_max")
          cfg.tebd_cfg.chi_max = static_cast<std::size_t>(as_uint(v2, p));
        else if (k2 == "svd_eps")
          cfg.tebd_cfg.svd_eps = as_double(v2, p);
        else if (k2 == "budget")
          cfg.tebd_cfg.truncation_budget = as_double(v2, p);
        else if (k2 == "record_every")
          cfg.tebd_cfg.record_every = static_cast<std::size_t>(as_uint(v2, p));
        else if (k2 == "checkpoint_every")
          cfg.tebd_cfg.checkpoint_every = static_cast<std::size_t>(as_uint(v2, p));
        else
          bad_field(p, "unknown key");
      }
    } else if (key == "ff") {
      require_object(val, "ff");
      for (const auto& [k2, v2] : val.items()) {
        const std::string p = "ff." + k2;
        if (k2 == "thermodynamic")
          cfg.ff.thermodynamic = as_bool(v2, p);
        else if (k2 == "ode_tol")
          cfg.ff.ode_tol = as_double(v2, p);
        else
          bad_field(p, "unknown key");
      }
    } else if (key == "engine") {
      cfg.engine = as_string(val, "engine");
    } else if (key == "output_dir") {
      cfg.output_dir = as_string(val, "output_dir");
    } else if (key == "seed") {
      cfg.seed = as_uint(val, "seed");
    } else {
      bad_field(key, "unknown key");
    }
  }

  try {
    if (shape == "linear")
      cfg.schedule = tfim::QuenchSchedule::linear(tau_q, g_start, g_end);
    else if (shape == "power")
      cfg.schedule = tfim::QuenchSchedule::power(alpha, tau_q, g_start, g_end);
    else if (shape == "constant")
      cfg.schedule = tfim::QuenchSchedule::constant(g_const, duration);
    else
      bad_field("schedule.shape", "must be one of linear|power|constant");
  } catch (const InvalidArgumentError& e) {
    throw InvalidArgumentError(std::string("config: schedule: ") + e.what());
  }

  if (cfg.engine != "mps" && cfg.engine != "dense" && cfg.engine != "ff")
    bad_field("engine", "must be one of mps|dense|ff");
  if (cfg.model.n_sites < 2) bad_field("model.n_sites", "must be >= 2");
  if (!cfg.dmrg_seed_explicit) cfg.dmrg_cfg.seed = cfg.seed;
  return cfg;
}

json resolved_config_json(const RunConfig& cfg) {
  json j;
  j["model"] = {{"n_sites", cfg.model.n_sites}, {"j", cfg.model.j_coupling}};
  json js;
  switch (cfg.schedule.shape) {
    case tfim::ScheduleShape::kLinear:
      js = {{"shape", "linear"},
            {"tau_q", cfg.schedule.tau_q},
            {"g_start", cfg.schedule.g_start},
            {"g_end", cfg.schedule.g_end}};
      break;
    case tfim::ScheduleShape::kPower:
      js = {{"shape", "power"},
            {"tau_q", cfg.schedule.tau_q},
            {"alpha", cfg.schedule.alpha},
            {"g_start", cfg.schedule.g_start},
            {"g_end", cfg.schedule.g_end}};
      break;
    case tfim::ScheduleShape::kConstant:
      js = {{"shape", "constant"},
            {"g", cfg.schedule.g_start},
            {"duration", cfg.schedule.duration()}};
      break;
  }
  j["schedule"] = js;
  j["dmrg"] = {{"chi_max", cfg.dmrg_cfg.chi_max},
               {"svd_eps", cfg.dmrg_cfg.svd_eps},
               {"max_sweeps", cfg.dmrg_cfg.max_sweeps},
               {"energy_tol", cfg.dmrg_cfg.energy_tol},
               {"local_solver_tol", cfg.dmrg_cfg.local_solver_tol},
               {"seed", cfg.dmrg_cfg.seed}};
  j["tebd"] = {{"dt", cfg.tebd_cfg.dt},
               {"chi_max", cfg.tebd_cfg.chi_max},
               {"svd_eps", cfg.tebd_cfg.svd_eps},
               {"budget", cfg.tebd_cfg.truncation_budget},
               {"record_every", cfg.tebd_cfg.record_every},
               {"checkpoint_every", cfg.tebd_cfg.checkpoint_every}};
  j["ff"] = {{"thermodynamic", cfg.ff.thermodynamic}, {"ode_tol", cfg.ff.ode_tol}};
  j["engine"] = cfg.engine;
  j["output_dir"] = cfg.output_dir.string();
  j["seed"] = cfg.seed;
  return j;
}

const std::vector<std::string> kRecordColumns = {
    "N",  "tau_q",   "alpha", "f_q", "n_d",       "mean_sz",
    "chi_max", "dt", "cum_trunc", "engine"};

namespace {

void write_optional(io::CsvWriter& w, double v) {
  if (std::isnan(v))
    w.cell(std::string());
  else
    w.cell(v);
}

}  // namespace

std::string record_csv_text(const observables::ObservableRecord& rec) {
  io::CsvWriter w(kRecordColumns);
  w.cell(rec.n_sites);
  write_optional(w, rec.tau_q);
  write_optional(w, rec.alpha);
  write_optional(w, rec.f_q);
  write_optional(w, rec.n_d);
  write_optional(w, rec.mean_sz);
  if (rec.engine == "mps")
    w.cell(rec.chi_max);
  else
    w.cell(std::string());
  write_optional(w, rec.dt);
  write_optional(w, rec.cum_trunc);
  w.cell(rec.engine);
  w.end_row();
  return w.str();
}

observables::ObservableRecord record_from_row(const io::CsvTable& table,
                                              std::size_t row) {
  if (row >= table.rows.size())
    throw InvalidInputError("record_from_row: row index out of range");
  auto num = [&](const std::string& col) {
    const std::string& cell = table.rows[row][table.column_index(col)];
    return cell.empty() ? std::nan("") : io::parse_double(cell);
  };
  observables::ObservableRecord rec;
  rec.n_sites = static_cast<std::size_t>(num("N"));
  rec.tau_q = num("tau_q");
  rec.alpha = num("alpha");
  rec.f_q = num("f_q");
  rec.n_d = num("n_d");
  rec.mean_sz = num("mean_sz");
  const std::string& chi = table.rows[row][table.column_index("chi_max")];
  rec.chi_max = chi.empty() ? 0 : static_cast<std::size_t>(io::parse_double(chi));
  rec.dt = num("dt");
  rec.cum_trunc = num("cum_trunc");
  rec.engine = table.rows[row][table.column_index("engine")];
  return rec;
}

namespace {

std::string profile_csv_text(
    const std::vector<std::pair<std::size_t, double>>& c_z) {
  io::CsvWriter w({"r", "c_z"});
  for (const auto& [r, v] : c_z) {
    w.cell(r);
    w.cell(v);
    w.end_row();
  }
  return w.str();
}

std::string trace_csv_text(const tebd::EvolutionTrace& trace) {
  io::CsvWriter w({"time", "g", "cum_trunc", "max_chi"});
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    w.cell(trace.times[i]);
    w.cell(trace.g_values[i]);
    w.cell(trace.cumulative_truncation[i]);
    w.cell(trace.max_bond_dim[i]);
    w.end_row();
  }
  return w.str();
}

observables::ObservableRecord run_mps(const RunConfig& cfg,
                                      tebd::EvolutionTrace& trace_out) {
  auto gs = dmrg::ground_state(cfg.model, cfg.schedule.g_start, cfg.dmrg_cfg);
  tebd::TEBDConfig tcfg = cfg.tebd_cfg;
  if (tcfg.checkpoint_every > 0 && tcfg.checkpoint_path.empty())
    tcfg.checkpoint_path = (cfg.output_dir / "checkpoint.mps").string();
  auto evolved = tebd::evolve(std::move(gs.psi), cfg.schedule, cfg.model, tcfg);
  trace_out = std::move(evolved.trace);
  auto rec = observables::measure_observables(evolved.psi);
  rec.chi_max = cfg.tebd_cfg.chi_max;
  rec.dt = cfg.tebd_cfg.dt;
  rec.engine = "mps";
  return rec;
}

observables::ObservableRecord run_dense(const RunConfig& cfg) {
  if (cfg.model.n_sites > oracles::kDenseMaxSites)
    throw CapacityError("engine=dense requires n_sites <= 12");
  auto [gs, energy] = oracles::dense_ground_state(cfg.model, cfg.schedule.g_start);
  auto final_state =
      oracles::dense_evolve(std::move(gs), cfg.schedule, cfg.model, cfg.tebd_cfg.dt);
  observables::ObservableRecord rec;
  const std::size_t n = cfg.model.n_sites;
  rec.n_sites = n;
  rec.f_q = oracles::dense_qfi_density(final_state);
  rec.n_d = oracles::dense_defect_density(final_state);
  double mz = 0.0;
  for (std::size_t s = 0; s < n; ++s)
    mz = std::max(mz, std::abs(oracles::dense_expectation_z(final_state, s)));
  rec.mean_sz = mz;
  if (n >= 4) {
    const std::size_t anchor = n / 2 - 1;
    for (std::size_t r = 1; anchor + r < n; ++r)
      rec.c_z.emplace_back(
          r, oracles::dense_correlation_zz(final_state, anchor, anchor + r));
  }
  rec.dt = cfg.tebd_cfg.dt;
  rec.cum_trunc = 0.0;
  rec.engine = "dense";
  return rec;
}

observables::ObservableRecord run_ff(const RunConfig& cfg) {
  observables::ObservableRecord rec;
  rec.n_sites = cfg.model.n_sites;
  rec.f_q = std::nan("");
  rec.mean_sz = std::nan("");
  rec.dt = std::nan("");
  rec.cum_trunc = std::nan("");
  rec.n_d = cfg.ff.thermodynamic
                ? oracles::defect_density_ff_thermodynamic(cfg.schedule.tau_q)
                : oracles::defect_density_ff(cfg.schedule, cfg.model.n_sites,
                                             cfg.ff.ode_tol);
  rec.engine = "ff";
  return rec;
}

}  // namespace

RunResult run_single(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);
  const std::string started = iso_utc_now();

  observables::ObservableRecord rec;
  tebd::EvolutionTrace trace;
  bool have_trace = false;
  if (cfg.engine == "mps") {
    rec = run_mps(cfg, trace);
    have_trace = true;
  } else if (cfg.engine == "dense") {
    rec = run_dense(cfg);
  } else {
    rec = run_ff(cfg);
  }
  rec.tau_q = cfg.schedule.shape == tfim::ScheduleShape::kConstant
                  ? std::nan("")
                  : cfg.schedule.tau_q;
  rec.alpha = cfg.schedule.alpha;

  json outputs = json::object();
  auto emit = [&](const std::string& name, const std::string& text) {
    const fs::path p = cfg.output_dir / name;
    io::write_text_atomic(p, text);
    outputs[name] = {{"sha256", io::sha256_hex(text)}, {"bytes", text.size()}};
  };
  emit("record.csv", record_csv_text(rec));
  if (!rec.c_z.empty()) emit("profile.csv", profile_csv_text(rec.c_z));
  if (have_trace) emit("trace.csv", trace_csv_text(trace));

  json manifest;
  manifest["config"] = resolved_config_json(cfg);
  manifest["status"] = "ok";
  manifest["outputs"] = outputs;
  manifest["started_at"] = started;
  manifest["finished_at"] = iso_utc_now();
  io::write_json_file(cfg.output_dir / "manifest.json", manifest);

  return RunResult{std::move(rec), cfg.output_dir};
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

namespace {

/// Short axis names map onto config paths; anything with a dot is taken
/// literally as a dotted path into the config JSON.
std::string axis_pointer(const std::string& axis) {
  static const std::map<std::string, std::string> aliases = {
      {"n_sites", "/model/n_sites"}, {"N", "/model/n_sites"},
      {"tau_q", "/schedule/tau_q"},  {"alpha", "/schedule/alpha"},
      {"shape", "/schedule/shape"},  {"g_start", "/schedule/g_start"},
      {"g_end", "/schedule/g_end"},  {"dt", "/tebd/dt"},
      {"chi_max", "/tebd/chi_max"},  {"svd_eps", "/tebd/svd_eps"},
      {"engine", "/engine"},         {"seed", "/seed"}};
  auto it = aliases.find(axis);
  if (it != aliases.end()) return it->second;
  if (axis.find('.') == std::string::npos)
    throw InvalidArgumentError("sweep: unknown axis '" + axis + "'");
  std::string ptr = "/" + axis;
  for (auto& c : ptr)
    if (c == '.') c = '/';
  return ptr;
}

std::string sanitize_token(std::string s) {
  for (auto& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '-' &&
        c != '_')
      c = '-';
  return s;
}

std::string value_token(const json& v) {
  if (v.is_string()) return sanitize_token(v.get<std::string>());
  return sanitize_token(v.dump());
}

bool cell_completed(const std::filesystem::path& dir, const json& want_config) {
  namespace fs = std::filesystem;
  const fs::path mp = dir / "manifest.json";
  if (!fs::exists(mp)) return false;
  json manifest;
  try {
    manifest = io::read_json_file(mp);
  } catch (const std::exception&) {
    return false;
  }
  if (!manifest.is_object() || manifest.value("status", "") != "ok") return false;
  if (!manifest.contains("config") || manifest["config"] != want_config)
    return false;
  if (!manifest.contains("outputs") || !manifest["outputs"].is_object())
    return false;
  for (const auto& [name, meta] : manifest["outputs"].items()) {
    const fs::path p = dir / name;
    if (!fs::exists(p)) return false;
    try {
      if (io::sha256_file_hex(p) != meta.value("sha256", "")) return false;
    } catch (const std::exception&) {
      return false;
    }
  }
  return true;
}

}  // namespace

SweepConfig parse_sweep_config(const json& j) {
  require_object(j, "(root)");
  SweepConfig cfg;
  bool have_base = false;
  for (const auto& [key, val] : j.items()) {
    if (key == "base") {
      require_object(val, "base");
      cfg.base = val;
      have_base = true;
    } else if (key == "axes") {
      require_object(val, "axes");
      for (const auto& [axis, values] : val.items()) {
        if (!values.is_array() || values.empty())
          bad_field("axes." + axis, "expected a non-empty array");
        axis_pointer(axis);  // validates the name early
        cfg.axes.emplace_back(axis,
                              std::vector<json>(values.begin(), values.end()));
      }
    } else if (key == "max_concurrency") {
      cfg.max_concurrency = static_cast<std::size_t>(as_uint(val, "max_concurrency"));
    } else if (key == "output_dir") {
      cfg.output_dir = as_string(val, "output_dir");
    } else {
      bad_field(key, "unknown key");
    }
  }
  if (!have_base) bad_field("base", "missing required section");
  if (cfg.axes.empty()) bad_field("axes", "missing or empty");
  // never let a cell write somewhere surprising
  if (cfg.base.contains("output_dir")) cfg.base.erase("output_dir");
  return cfg;
}

std::size_t effective_concurrency(std::size_t requested) {
  std::size_t hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t n = requested == 0 ? hw : requested;
  if (const char* env = std::getenv("KZQFI_MAX_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && cap > 0) n = std::min<std::size_t>(n, cap);
  }
  return std::max<std::size_t>(1, std::min(n, hw));
}

SweepResult run_sweep(const SweepConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output_dir);

  // enumerate the Cartesian product, last axis fastest
  std::size_t n_cells = 1;
  for (const auto& [_, values] : cfg.axes) n_cells *= values.size();
  if (n_cells == 0) throw InvalidArgumentError("sweep: empty axis");

  struct Cell {
    std::size_t index;
    std::string name;
    json config;
  };
  std::vector<Cell> cells;
  cells.reserve(n_cells);
  std::vector<std::size_t> digits(cfg.axes.size(), 0);
  int width = 1;
  for (std::size_t w = n_cells; w >= 10; w /= 10) ++width;

  std::set<std::string> swept_paths;
  for (const auto& [axis, _] : cfg.axes) swept_paths.insert(axis_pointer(axis));
  const std::uint64_t base_seed =
      cfg.base.contains("seed") ? as_uint(cfg.base["seed"], "base.seed") : 1;

  for (std::size_t idx = 0; idx < n_cells; ++idx) {
    json cell_cfg = cfg.base;
    std::string name;
    {
      char buf[16];
      std::snprintf(buf, sizeof buf, "cell_%0*zu", width, idx);
      name = buf;
    }
    std::size_t rem = idx;
    for (std::size_t a = cfg.axes.size(); a-- > 0;) {
      digits[a] = rem % cfg.axes[a].second.size();
      rem /= cfg.axes[a].second.size();
    }
    for (std::size_t a = 0; a < cfg.axes.size(); ++a) {
      const auto& [axis, values] = cfg.axes[a];
      const json& v = values[digits[a]];
      cell_cfg[json::json_pointer(axis_pointer(axis))] = v;
      name += "_" + sanitize_token(axis) + "=" + value_token(v);
    }
    if (!swept_paths.count("/seed")) cell_cfg["seed"] = base_seed + idx;
    cell_cfg["output_dir"] = (cfg.output_dir / name).string();
    cells.push_back({idx, std::move(name), std::move(cell_cfg)});
  }

  std::vector<CellOutcome> outcomes(n_cells);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n_cells) return;
      const Cell& cell = cells[i];
      CellOutcome& out = outcomes[i];
      out.index = cell.index;
      out.name = cell.name;
      try {
        RunConfig rc = parse_run_config(cell.config);
        const json resolved = resolved_config_json(rc);
        const fs::path dir = cfg.output_dir / cell.name;
        if (cell_completed(dir, resolved)) {
          auto table = io::read_csv(dir / "record.csv");
          out.record = record_from_row(table, 0);
          out.status = "skipped";
        } else {
          out.record = run_single(rc).record;
          out.status = "ok";
        }
      } catch (const std::exception& e) {
        out.status = "failed";
        out.error = e.what();
      }
    }
  };

  const std::size_t n_threads =
      std::min(effective_concurrency(cfg.max_concurrency), n_cells);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  SweepResult result;
  result.cells = std::move(outcomes);
  result.n_failed = 0;

  io::CsvWriter agg(kRecordColumns);
  json summary_cells = json::array();
  for (const auto& out : result.cells) {
    json sc = {{"index", out.index}, {"name", out.name}, {"status", out.status}};
    if (out.status == "failed") {
      ++result.n_failed;
      sc["error"] = out.error;
    } else {
      const std::string row = record_csv_text(out.record);
      // append the data row only (skip the header line)
      agg.raw_row(row.substr(row.find('\n') + 1));
    }
    summary_cells.push_back(std::move(sc));
  }
  result.records_csv = cfg.output_dir / "records.csv";
  io::write_text_atomic(result.records_csv, agg.str());

  json summary;
  summary["n_cells"] = n_cells;
  summary["n_failed"] = result.n_failed;
  summary["cells"] = std::move(summary_cells);
  result.summary_json = cfg.output_dir / "summary.json";
  io::write_json_file(result.summary_json, summary);
  return result;
}

// ---------------------------------------------------------------------------
// Fit reports
// ---------------------------------------------------------------------------

namespace {

std::vector<std::pair<double, double>> numeric_points(
    const io::CsvTable& records, const std::string& x_column,
    const std::string& value_column) {
  const std::size_t xi = records.column_index(x_column);
  const std::size_t vi = records.column_index(value_column);
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : records.rows) {
    if (row[vi].empty()) continue;  // engines that don't measure this column
    pts.emplace_back(io::parse_double(row[xi]), io::parse_double(row[vi]));
  }
  return pts;
}

json points_json(const std::vector<std::pair<double, double>>& pts) {
  json arr = json::array();
  for (const auto& [x, y] : pts) arr.push_back({x, y});
  return arr;
}

}  // namespace

json fit_report_finite_size(const io::CsvTable& records,
                            const std::string& value_column) {
  auto pts = numeric_points(records, "N", value_column);
  auto fitres = fit::finite_size_extrapolate(pts);
  json j;
  j["mode"] = "finite-size";
  j["value_column"] = value_column;
  j["intercept"] = fitres.f_q_infinity;
  j["a_coeff"] = fitres.a_coeff;
  j["stderr"] = fitres.stderr_intercept;
  j["residual_rms"] = fitres.residual_rms;
  j["points"] = points_json(fitres.points);
  j["residuals"] = fitres.residuals;
  return j;
}

json fit_report_power_law(const io::CsvTable& records,
                          const std::string& value_column, bool extrapolate) {
  json j;
  j["value_column"] = value_column;
  std::vector<std::pair<double, double>> pts;
  if (extrapolate) {
    // group by tau_q, extrapolate each group over 1/N, then fit the intercepts
    const std::size_t ti = records.column_index("tau_q");
    const std::size_t ni = records.column_index("N");
    const std::size_t vi = records.column_index(value_column);
    std::map<double, std::vector<std::pair<double, double>>> groups;
    for (const auto& row : records.rows) {
      if (row[vi].empty()) continue;
      groups[io::parse_double(row[ti])].emplace_back(io::parse_double(row[ni]),
                                                     io::parse_double(row[vi]));
    }
    json jgroups = json::array();
    for (const auto& [tau, gpts] : groups) {
      fit::FiniteSizeFit fs;
      try {
        fs = fit::finite_size_extrapolate(gpts);
      } catch (const std::exception& e) {
        throw InvalidInputError("extrapolation at tau_q=" + io::format_double(tau) +
                                ": " + e.what());
      }
      jgroups.push_back({{"tau_q", tau},
                         {"intercept", fs.f_q_infinity},
                         {"a_coeff", fs.a_coeff},
                         {"stderr", fs.stderr_intercept},
                         {"n_points", gpts.size()}});
      pts.emplace_back(tau, fs.f_q_infinity);
    }
    j["mode"] = "power-law-extrapolated";
    j["groups"] = std::move(jgroups);
  } else {
    pts = numeric_points(records, "tau_q", value_column);
    j["mode"] = "power-law";
  }
  auto fitres = fit::power_law_fit(pts);
  j["exponent"] = fitres.exponent;
  j["stderr"] = fitres.stderr_exponent;
  j["intercept"] = fitres.log_prefactor;
  j["r_squared"] = fitres.r_squared;
  j["points"] = points_json(fitres.points);
  j["residuals"] = fitres.residuals;
  return j;
}

json kz_report(int d, double nu, double z, double alpha) {
  auto p = fit::kz_predict(d, nu, z, alpha);
  json j;
  j["d"] = p.d;
  j["nu"] = p.nu;
  j["z"] = p.z;
  j["alpha"] = p.alpha;
  j["nu_lambda"] = p.nu_lambda;
  j["z_lambda"] = p.z_lambda;
  j["defect_exponent"] = p.defect_exponent;
  j["qfi_exponent"] = p.qfi_exponent;
  j["freezeout_time_exponent"] = p.freezeout_time_exponent;
  j["gap_exponent"] = p.gap_exponent;
  return j;
}

}  // namespace kzqfi::runner
