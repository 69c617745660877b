#include "satqkd/manifest.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "satqkd/util.hpp"
#include "satqkd/version.hpp"

namespace satqkd {

using nlohmann::json;

std::string RunManifest::to_json() const {
  json j;
  j["schema_version"] = csv_schema;
  j["tool"] = kToolName;
  j["tool_version"] = tool_version;
  j["command"] = command;
  j["argv"] = argv;
  j["seed"] = seed;
  j["kernel_backend"] = kernel_backend;
  j["resolved_scenario"] = resolved_scenario;
  j["outputs"] = outputs;
  j["duration_s"] = duration_s;
  return j.dump(2) + "\n";
}

std::string gamma_csv(const CampaignResult& r) {
  std::ostringstream os;
  os << "iteration";
  if (r.has_no_ao) os << ",gamma_no_ao";
  if (r.has_ao) os << ",gamma_ao";
  os << "\n";
  std::size_t count =
      r.has_no_ao ? r.no_ao.samples.size() : r.ao.samples.size();
  for (std::size_t i = 0; i < count; ++i) {
    os << i;
    if (r.has_no_ao) os << "," << format_double(r.no_ao.samples[i]);
    if (r.has_ao) os << "," << format_double(r.ao.samples[i]);
    os << "\n";
  }
  os << "mean";
  if (r.has_no_ao) os << "," << format_double(r.no_ao.mean);
  if (r.has_ao) os << "," << format_double(r.ao.mean);
  os << "\n";
  os << "stddev";
  if (r.has_no_ao) os << "," << format_double(r.no_ao.stddev);
  if (r.has_ao) os << "," << format_double(r.ao.stddev);
  os << "\n";
  return os.str();
}

std::string gamma_summary_json(const CampaignResult& r) {
  json j;
  j["seed"] = r.fingerprint.seed;
  j["zeta_deg"] = r.fingerprint.zeta;
  j["n_max"] = r.fingerprint.n_max;
  j["grid_size"] = r.fingerprint.grid_size;
  j["iterations"] = r.fingerprint.iterations;
  j["r0_total_m"] = r.r0_total;
  j["ground_beam_radius_m"] = r.ground_beam_radius;
  j["pixel_pitch_m"] = r.pixel_pitch;
  auto stats = [](const GammaStats& s) {
    json g;
    g["mean"] = s.mean;
    g["stddev"] = s.stddev;
    g["stderr"] = s.stderr_mean;
    g["count"] = s.count;
    g["mean_as_printed"] = s.mean_as_printed;
    return g;
  };
  if (r.has_no_ao) j["no_ao"] = stats(r.no_ao);
  if (r.has_ao) j["ao"] = stats(r.ao);
  return j.dump(2) + "\n";
}

std::string keyrate_csv(const std::vector<KeyRateResult>& rows) {
  std::ostringstream os;
  os << "loss_db,T,xi_ch,xi_d,I_AB,S_BE,delta_aep_term,log_term,K_raw,"
        "K,T_worst,xi_worst,N_R\n";
  for (const auto& r : rows) {
    os << format_double(r.loss_db) << "," << format_double(r.T) << ","
       << format_double(r.xi_ch) << "," << format_double(r.xi_d) << ","
       << format_double(r.I_AB) << "," << format_double(r.S_BE) << ","
       << format_double(r.delta_aep_term) << "," << format_double(r.log_term)
       << "," << format_double(r.K_raw) << "," << format_double(r.K) << ","
       << format_double(r.T_worst) << "," << format_double(r.xi_worst) << ","
       << format_double(r.N_R) << "\n";
  }
  return os.str();
}

std::string budget_json(const NoiseBudget& b) {
  json j;
  j["xi_ta"] = b.xi_ta;
  j["xi_rin_atmos"] = b.xi_rin_atmos;
  j["xi_background"] = b.xi_background;
  j["xi_mod"] = b.xi_mod;
  j["xi_rin_lo"] = b.xi_rin_lo;
  j["xi_rin_signal"] = b.xi_rin_signal;
  j["xi_leak"] = b.xi_leak;
  j["xi_phase"] = b.xi_phase;
  j["xi_ch_total"] = b.xi_ch_total;
  if (b.xi_ch_override) j["xi_ch_override"] = *b.xi_ch_override;
  j["xi_gamma"] = b.xi_gamma;
  j["xi_el"] = b.xi_el;
  j["xi_tech"] = b.xi_tech;
  j["xi_d_total"] = b.xi_d_total;
  j["xi_total_at_input"] = b.xi_total_at_input;
  j["v_error"] = b.v_error;
  j["v_est"] = b.v_est;
  j["gamma"] = b.gamma;
  j["N_R"] = b.N_R;
  j["T"] = b.T;
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << content;
  if (!os) throw std::runtime_error("short write: " + path);
}

}  // namespace satqkd
