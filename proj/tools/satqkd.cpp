// satqkd: coherent-efficiency, noise-budget and key-rate calculator for a
// satellite-to-ground CV-QKD downlink with a delay-line local oscillator.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage/validation error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "satqkd/coherence.hpp"
#include "satqkd/config.hpp"
#include "satqkd/kernels.hpp"
#include "satqkd/keyrate.hpp"
#include "satqkd/manifest.hpp"
#include "satqkd/noise.hpp"
#include "satqkd/optics.hpp"
#include "satqkd/params.hpp"
#include "satqkd/turbulence.hpp"
#include "satqkd/util.hpp"
#include "satqkd/version.hpp"

namespace {

using namespace satqkd;

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

ScenarioSet load_set(const std::string& scenario_path) {
  if (!scenario_path.empty()) {
    return load_scenario(read_file(scenario_path));
  }
  if (const char* dir = std::getenv("SATQKD_SCENARIO_DIR")) {
    std::filesystem::path p = std::filesystem::path(dir) / "default.cfg";
    if (std::filesystem::exists(p)) {
      return load_scenario(read_file(p.string()));
    }
  }
  return load_scenario("");  // built-in defaults
}

// `--set section.key=value` overrides applied on top of the scenario file.
void apply_overrides(ScenarioSet& set, const std::vector<std::string>& kvs) {
  if (kvs.empty()) return;
  std::string text = serialize(set);
  ConfigDoc doc = ConfigDoc::parse(text);
  for (const auto& kv : kvs) {
    std::size_t dot = kv.find('.');
    std::size_t eq = kv.find('=');
    if (dot == std::string::npos || eq == std::string::npos || eq < dot) {
      throw ValidationError("set", "expected section.key=value, got: " + kv);
    }
    doc.set(kv.substr(0, dot), kv.substr(dot + 1, eq - dot - 1),
            kv.substr(eq + 1));
  }
  set = load_scenario(doc.serialize());
}

std::vector<double> parse_loss_range(const std::string& spec) {
  double start = 0, stop = 0, step = 0;
  char extra = 0;
  int n = std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step,
                      &extra);
  if (n != 3) {
    throw ValidationError("loss-db", "expected START:STOP:STEP, got: " + spec);
  }
  if (stop < start) {
    throw ValidationError("loss-db", "STOP must be >= START");
  }
  std::vector<double> out;
  if (stop == start) {
    out.push_back(start);
    return out;
  }
  if (step <= 0) {
    throw ValidationError("loss-db", "STEP must be > 0 for a range");
  }
  for (double v = start; v <= stop + 1e-9; v += step) out.push_back(v);
  return out;
}

struct OutputTracker {
  std::vector<std::string> written;
  void write(const std::string& path, const std::string& content) {
    write_text_file(path, content);
    written.push_back(path);
  }
  void remove_all() {
    for (const auto& p : written) std::remove(p.c_str());
  }
};

RunManifest make_manifest(const std::string& command,
                          const std::vector<std::string>& argv,
                          const ScenarioSet& set) {
  RunManifest m;
  m.command = command;
  m.argv = argv;
  m.resolved_scenario = serialize(set);
  m.seed = set.sim.seed;
  m.tool_version = kToolVersion;
  m.csv_schema = kCsvSchemaVersion;
  m.kernel_backend = kern::active_backend_name();
  return m;
}

void progress_to_stderr(int done, int total) {
  if (total >= 20 && done % (total / 20) != 0 && done != total) return;
  std::fprintf(stderr, "\r%d/%d iterations", done, total);
  if (done == total) std::fprintf(stderr, "\n");
  std::fflush(stderr);
}

double gamma_from_file(const std::string& path) {
  nlohmann::json j = nlohmann::json::parse(read_file(path));
  if (j.contains("ao") && j["ao"].contains("mean")) {
    return j["ao"]["mean"].get<double>();
  }
  if (j.contains("no_ao") && j["no_ao"].contains("mean")) {
    return j["no_ao"]["mean"].get<double>();
  }
  throw std::runtime_error("no gamma mean found in " + path);
}

struct CommonFlags {
  std::string scenario;
  std::vector<std::string> overrides;
  std::string out;
  int threads = 0;  // 0: keep scenario value
};

void add_common(CLI::App* cmd, CommonFlags& cf) {
  cmd->add_option("--scenario", cf.scenario, "scenario file (cfg)");
  cmd->add_option("--set", cf.overrides,
                  "override any field: section.key=value (repeatable)");
  cmd->add_option("--out", cf.out, "output path base; stdout when omitted");
  cmd->add_option("--threads", cf.threads, "worker cap (results unaffected)");
}

int cmd_gamma(const CommonFlags& cf, std::optional<int> iterations,
              std::optional<std::uint64_t> seed, std::optional<double> zenith,
              std::optional<int> grid, bool ao_only, bool no_ao_only,
              const std::string& debug_fields,
              const std::vector<std::string>& argv) {
  ScenarioSet set = load_set(cf.scenario);
  apply_overrides(set, cf.overrides);
  if (iterations) set.sim.iterations = *iterations;
  if (seed) set.sim.seed = *seed;
  if (zenith) {
    if (*zenith < 0.0 || *zenith >= 90.0) {
      throw ValidationError("zenith", "must be in [0, 90)");
    }
    set.scenario.zeta = *zenith;
  }
  if (grid) set.sim.grid_size = *grid;
  if (cf.threads > 0) set.sim.threads = cf.threads;
  validate(set.scenario);
  validate(set.sim);

  bool with_ao = !no_ao_only && set.sim.n_max > 0;
  bool with_no_ao = !ao_only;

  if (!debug_fields.empty()) {
    const Scenario& s = set.scenario;
    const SimulationControl& c = set.sim;
    double sec = 1.0 / std::cos(deg2rad(s.zeta));
    double w_top = gaussian_beam_radius(s.w0, s.lambda,
                                        (s.H - c.h_top) * sec);
    double dx = std::min(c.extent_factor * w_top / c.grid_size,
                         s.D_R / c.min_aperture_px);
    ComplexField src = gaussian_source(s.w0, s.lambda, c.grid_size,
                                       dx / (w_top / s.w0));
    ComplexField top = far_field_to_atmosphere(src, s.H, c.h_top, s.zeta);
    write_grid(debug_fields + "_top.bin", top);
    Cn2Profile prof{c.hv_a_ground, c.hv_wind, c.site_altitude};
    auto slabs = slab_partition(prof, s.lambda, c.n_screens, c.h_top, s.zeta);
    ScreenGenerator gen(c.grid_size, top.dx, c.L0, c.l0,
                        c.subharmonic_levels);
    for (std::size_t i = 0; i < slabs.size(); ++i) {
      PhaseScreen scr = gen.generate(slabs[i].r0, c.seed,
                                     static_cast<std::uint32_t>(i), 0);
      write_grid(debug_fields + "_screen" + std::to_string(i) + ".bin",
                 c.grid_size, top.dx, scr.phase, slabs[i].r0, slabs[i].h_lo,
                 slabs[i].h_hi);
    }
  }

  auto t0 = std::chrono::steady_clock::now();
  CampaignResult res = run_gamma_campaign(set, with_no_ao, with_ao,
                                          cf.out.empty() ? ProgressFn{}
                                                         : progress_to_stderr);
  auto t1 = std::chrono::steady_clock::now();

  std::string csv = gamma_csv(res);
  std::string summary = gamma_summary_json(res);
  if (cf.out.empty()) {
    std::fputs(csv.c_str(), stdout);
    return 0;
  }
  OutputTracker files;
  files.write(cf.out, csv);
  files.write(cf.out + ".summary.json", summary);
  RunManifest m = make_manifest("gamma", argv, set);
  m.outputs = files.written;
  m.duration_s = std::chrono::duration<double>(t1 - t0).count();
  write_text_file(cf.out + ".manifest.json", m.to_json());
  return 0;
}

int cmd_noise(const CommonFlags& cf, double gamma, double loss_db,
              const std::string& format,
              const std::vector<std::string>& argv) {
  ScenarioSet set = load_set(cf.scenario);
  apply_overrides(set, cf.overrides);
  validate(set.scenario);
  if (gamma <= 0.0 || gamma > 1.0) {
    throw ValidationError("gamma", "must be in (0, 1]");
  }
  if (loss_db < 0.0) throw ValidationError("loss-db", "must be >= 0");

  const Scenario& s = set.scenario;
  double xi_d = xi_d_total(s, gamma);
  double N_R = optimal_N_R(s, xi_d);
  double T = std::pow(10.0, -loss_db / 10.0);
  NoiseBudget b = assemble_budget(s, gamma, N_R, T);

  std::string text =
      format == "json" ? budget_json(b) : budget_table(b);
  if (cf.out.empty()) {
    std::fputs(text.c_str(), stdout);
    return 0;
  }
  OutputTracker files;
  files.write(cf.out, text);
  RunManifest m = make_manifest("noise", argv, set);
  m.outputs = files.written;
  write_text_file(cf.out + ".manifest.json", m.to_json());
  return 0;
}

int cmd_keyrate(const CommonFlags& cf, std::optional<double> gamma,
                const std::string& gamma_from, const std::string& loss_spec,
                const std::vector<std::string>& argv) {
  ScenarioSet set = load_set(cf.scenario);
  apply_overrides(set, cf.overrides);
  validate(set.scenario);
  validate(set.finite_size);

  double g;
  if (gamma && !gamma_from.empty()) {
    throw ValidationError("gamma", "use either --gamma or --gamma-from");
  } else if (gamma) {
    g = *gamma;
  } else if (!gamma_from.empty()) {
    g = gamma_from_file(gamma_from);
  } else {
    throw ValidationError("gamma", "required: --gamma or --gamma-from");
  }
  if (g <= 0.0 || g > 1.0) {
    throw ValidationError("gamma", "must be in (0, 1]");
  }
  std::vector<double> grid = parse_loss_range(loss_spec);
  auto rows = sweep_loss(set.scenario, g, set.finite_size, grid);
  std::string csv = keyrate_csv(rows);
  if (cf.out.empty()) {
    std::fputs(csv.c_str(), stdout);
    return 0;
  }
  OutputTracker files;
  files.write(cf.out, csv);
  RunManifest m = make_manifest("keyrate", argv, set);
  m.outputs = files.written;
  write_text_file(cf.out + ".manifest.json", m.to_json());
  return 0;
}

int cmd_run(const CommonFlags& cf, std::optional<int> iterations,
            std::optional<std::uint64_t> seed, std::optional<double> zenith,
            const std::string& loss_spec,
            const std::vector<std::string>& argv) {
  ScenarioSet set = load_set(cf.scenario);
  apply_overrides(set, cf.overrides);
  if (iterations) set.sim.iterations = *iterations;
  if (seed) set.sim.seed = *seed;
  if (zenith) {
    if (*zenith < 0.0 || *zenith >= 90.0) {
      throw ValidationError("zenith", "must be in [0, 90)");
    }
    set.scenario.zeta = *zenith;
  }
  if (cf.threads > 0) set.sim.threads = cf.threads;
  validate(set.scenario);
  validate(set.finite_size);
  validate(set.sim);

  std::string base = cf.out.empty() ? "run" : cf.out;
  OutputTracker files;
  auto t0 = std::chrono::steady_clock::now();
  try {
    bool with_ao = set.sim.n_max > 0;
    CampaignResult res =
        run_gamma_campaign(set, true, with_ao, progress_to_stderr);
    files.write(base + "_gamma.csv", gamma_csv(res));
    files.write(base + "_gamma.summary.json", gamma_summary_json(res));

    double g = with_ao ? res.ao.mean : res.no_ao.mean;
    const Scenario& s = set.scenario;
    double xi_d = xi_d_total(s, g);
    double N_R = optimal_N_R(s, xi_d);
    NoiseBudget b = assemble_budget(s, g, N_R, 1.0);
    files.write(base + "_noise.json", budget_json(b));

    std::vector<double> grid = parse_loss_range(loss_spec);
    auto rows = sweep_loss(s, g, set.finite_size, grid);
    files.write(base + "_keyrate.csv", keyrate_csv(rows));

    auto t1 = std::chrono::steady_clock::now();
    RunManifest m = make_manifest("run", argv, set);
    m.outputs = files.written;
    m.duration_s = std::chrono::duration<double>(t1 - t0).count();
    write_text_file(base + ".manifest.json", m.to_json());
  } catch (...) {
    files.remove_all();  // no partial artifact sets
    throw;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"satellite downlink CV-QKD simulator (delay-line LO scheme)"};
  app.require_subcommand(1);
  std::vector<std::string> raw_argv(argv, argv + argc);

  CommonFlags cf_gamma, cf_noise, cf_keyrate, cf_run;

  auto* gamma = app.add_subcommand(
      "gamma", "Monte-Carlo coherent-efficiency campaign");
  add_common(gamma, cf_gamma);
  std::optional<int> g_iter, g_grid;
  std::optional<std::uint64_t> g_seed;
  std::optional<double> g_zenith;
  bool g_ao = false, g_no_ao = false;
  std::string g_debug;
  gamma->add_option("--iterations", g_iter, "Monte-Carlo iterations");
  gamma->add_option("--seed", g_seed, "master seed");
  gamma->add_option("--zenith", g_zenith, "zenith angle, degrees");
  gamma->add_option("--grid", g_grid, "grid size (power of two)");
  gamma->add_flag("--ao", g_ao, "AO-corrected value only");
  gamma->add_flag("--no-ao", g_no_ao, "uncorrected value only");
  gamma->add_option("--debug-fields", g_debug,
                    "dump binary grids with this path prefix");

  auto* noise = app.add_subcommand("noise", "excess-noise budget");
  add_common(noise, cf_noise);
  double n_gamma = 1.0, n_loss = 15.0;
  std::string n_format = "table";
  noise->add_option("--gamma", n_gamma, "coherent efficiency");
  noise->add_option("--loss-db", n_loss, "channel loss, dB");
  noise->add_option("--format", n_format, "table|json")
      ->check(CLI::IsMember({"table", "json"}));

  auto* keyrate = app.add_subcommand("keyrate", "finite-size key-rate sweep");
  add_common(keyrate, cf_keyrate);
  std::optional<double> k_gamma;
  std::string k_from, k_loss = "0:30:0.5";
  keyrate->add_option("--gamma", k_gamma, "coherent efficiency");
  keyrate->add_option("--gamma-from", k_from,
                      "read gamma from a campaign summary JSON");
  keyrate->add_option("--loss-db", k_loss, "range START:STOP:STEP");

  auto* run = app.add_subcommand(
      "run", "campaign, budget and key-rate sweep in one invocation");
  add_common(run, cf_run);
  std::optional<int> r_iter;
  std::optional<std::uint64_t> r_seed;
  std::optional<double> r_zenith;
  std::string r_loss = "0:30:0.5";
  run->add_option("--iterations", r_iter, "Monte-Carlo iterations");
  run->add_option("--seed", r_seed, "master seed");
  run->add_option("--zenith", r_zenith, "zenith angle, degrees");
  run->add_option("--loss-db", r_loss, "range START:STOP:STEP");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gamma->parsed()) {
      return cmd_gamma(cf_gamma, g_iter, g_seed, g_zenith, g_grid, g_ao,
                       g_no_ao, g_debug, raw_argv);
    }
    if (noise->parsed()) {
      return cmd_noise(cf_noise, n_gamma, n_loss, n_format, raw_argv);
    }
    if (keyrate->parsed()) {
      return cmd_keyrate(cf_keyrate, k_gamma, k_from, k_loss, raw_argv);
    }
    if (run->parsed()) {
      return cmd_run(cf_run, r_iter, r_seed, r_zenith, r_loss, raw_argv);
    }
  } catch (const satqkd::ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}
