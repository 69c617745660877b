#include "satqkd/params.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "satqkd/config.hpp"
#include "satqkd/util.hpp"

namespace satqkd {

std::string format_double(double v) {
  char buf[40];
  // %.17g round-trips any double; trim to shortest form that still does.
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    double back = 0.0;
    std::sscanf(buf, "%lf", &back);
    if (back == v) break;
  }
  return buf;
}

namespace {

double parse_num(const std::string& field, const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ValidationError(field, "not a number: '" + text + "'");
  }
}

std::uint64_t parse_u64(const std::string& field, const std::string& text) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError(field, "not an unsigned integer: '" + text + "'");
  }
  return v;
}

int parse_int(const std::string& field, const std::string& text) {
  int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) {
    throw ValidationError(field, "not an integer: '" + text + "'");
  }
  return v;
}

void require(bool ok, const std::string& field, const std::string& bound) {
  if (!ok) throw ValidationError(field, "must satisfy " + bound);
}

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

}  // namespace

void validate(const Scenario& s) {
  require(s.f > 0, "f", "> 0");
  require(s.w0 > 0, "w0", "> 0");
  require(s.D_R > 0, "D_R", "> 0");
  require(s.H > 0, "H", "> 0");
  require(s.eta_d > 0 && s.eta_d <= 1, "eta_d", "in (0, 1]");
  require(s.V_A > 0, "V_A", "> 0");
  require(s.tau0 > 0, "tau0", "> 0");
  require(s.lambda > 0, "lambda", "> 0");
  require(s.zeta >= 0 && s.zeta < 90, "zeta", "in [0, 90)");
  require(s.v_el >= 0, "v_el", ">= 0");
  require(s.xi_tech >= 0, "xi_tech", ">= 0");
  require(s.R_e_db >= 0, "R_e_db", ">= 0");
  require(s.R_po_db >= 0, "R_po_db", ">= 0");
  require(s.n_adc_bits > 0, "n_adc_bits", "> 0");
  require(s.V_ta >= 0, "V_ta", ">= 0");
  require(s.V_rin_atmos >= 0, "V_rin_atmos", ">= 0");
  require(s.xi_rin_lo_coeff >= 0, "xi_rin_lo_coeff", ">= 0");
  require(s.xi_rin_signal >= 0, "xi_rin_signal", ">= 0");
  require(s.xi_background >= 0, "xi_background", ">= 0");
  require(s.xi_mod >= 0, "xi_mod", ">= 0");
  if (s.xi_ch_override) {
    require(*s.xi_ch_override >= 0, "xi_ch_override", ">= 0");
  }
}

void validate(const FiniteSizeParams& f) {
  require(f.N_total >= 1, "N_total", ">= 1");
  require(f.key_fraction > 0 && f.key_fraction < 1, "key_fraction",
          "in (0, 1)");
  require(f.beta > 0 && f.beta <= 1, "beta", "in (0, 1]");
  require(f.eps_total > 0 && f.eps_total < 1, "eps_total", "in (0, 1)");
  for (auto [v, name] : {std::pair{f.eps_s, "eps_s"},
                         std::pair{f.eps_PA, "eps_PA"},
                         std::pair{f.eps_PE, "eps_PE"},
                         std::pair{f.eps_EC, "eps_EC"}}) {
    require(v > 0 && v < 1, name, "in (0, 1)");
  }
  // epsilon composition: eps_EC + 2 eps_s + eps_PA + eps_PE = eps_total
  double sum = f.eps_EC + 2.0 * f.eps_s + f.eps_PA + f.eps_PE;
  require(std::abs(sum - f.eps_total) <= 1e-9 * f.eps_total, "eps_total",
          "eps_EC + 2*eps_s + eps_PA + eps_PE = eps_total");
  require(f.d_bits >= 0, "d_bits", ">= 0");
}

void validate(const SimulationControl& c) {
  require(is_pow2(c.grid_size) && c.grid_size >= 128, "grid_size",
          "a power of two >= 128");
  require(c.iterations >= 1, "iterations", ">= 1");
  require(c.n_screens >= 1, "n_screens", ">= 1");
  require(c.n_max >= 0, "n_max", ">= 0");
  require(c.L0 > 0, "L0", "> 0");
  require(c.l0 > 0, "l0", "> 0");
  require(c.subharmonic_levels >= 0, "subharmonic_levels", ">= 0");
  require(c.h_top > c.site_altitude, "h_top", "> site_altitude");
  require(c.site_altitude >= 0, "site_altitude", ">= 0");
  require(c.hv_a_ground >= 0, "hv_a_ground", ">= 0");
  require(c.hv_wind >= 0, "hv_wind", ">= 0");
  require(c.cn2_scale >= 0, "cn2_scale", ">= 0");
  require(c.extent_factor > 0, "extent_factor", "> 0");
  require(c.min_aperture_px >= 8, "min_aperture_px", ">= 8");
  require(c.threads >= 1, "threads", ">= 1");
}

namespace {

struct FieldBinder {
  ScenarioSet& set;

  bool apply(const std::string& section, const std::string& key,
             const std::string& value) {
    const std::string f = section.empty() ? key : section + "." + key;
    Scenario& s = set.scenario;
    FiniteSizeParams& fs = set.finite_size;
    SimulationControl& c = set.sim;
    if (section == "scenario") {
      if (key == "f") s.f = parse_num(f, value);
      else if (key == "w0") s.w0 = parse_num(f, value);
      else if (key == "D_R") s.D_R = parse_num(f, value);
      else if (key == "H") s.H = parse_num(f, value);
      else if (key == "eta_d") s.eta_d = parse_num(f, value);
      else if (key == "V_A") s.V_A = parse_num(f, value);
      else if (key == "tau0") s.tau0 = parse_num(f, value);
      else if (key == "lambda") s.lambda = parse_num(f, value);
      else if (key == "zeta") s.zeta = parse_num(f, value);
      else if (key == "v_el") s.v_el = parse_num(f, value);
      else if (key == "xi_tech") s.xi_tech = parse_num(f, value);
      else if (key == "R_e_db") s.R_e_db = parse_num(f, value);
      else if (key == "R_po_db") s.R_po_db = parse_num(f, value);
      else if (key == "n_adc_bits") s.n_adc_bits = parse_int(f, value);
      else if (key == "V_ta") s.V_ta = parse_num(f, value);
      else if (key == "V_rin_atmos") s.V_rin_atmos = parse_num(f, value);
      else if (key == "xi_rin_lo_coeff") s.xi_rin_lo_coeff = parse_num(f, value);
      else if (key == "xi_rin_signal") s.xi_rin_signal = parse_num(f, value);
      else if (key == "xi_background") s.xi_background = parse_num(f, value);
      else if (key == "xi_mod") s.xi_mod = parse_num(f, value);
      else if (key == "xi_ch_override") {
        if (value == "none") s.xi_ch_override.reset();
        else s.xi_ch_override = parse_num(f, value);
      } else return false;
      return true;
    }
    if (section == "finite_size") {
      if (key == "N_total") fs.N_total = parse_num(f, value);
      else if (key == "key_fraction") fs.key_fraction = parse_num(f, value);
      else if (key == "beta") fs.beta = parse_num(f, value);
      else if (key == "eps_total") fs.eps_total = parse_num(f, value);
      else if (key == "eps_s") fs.eps_s = parse_num(f, value);
      else if (key == "eps_PA") fs.eps_PA = parse_num(f, value);
      else if (key == "eps_PE") fs.eps_PE = parse_num(f, value);
      else if (key == "eps_EC") fs.eps_EC = parse_num(f, value);
      else if (key == "d_bits") fs.d_bits = parse_int(f, value);
      else return false;
      return true;
    }
    if (section == "simulation") {
      if (key == "grid_size") c.grid_size = parse_int(f, value);
      else if (key == "iterations") c.iterations = parse_int(f, value);
      else if (key == "seed") c.seed = parse_u64(f, value);
      else if (key == "n_screens") c.n_screens = parse_int(f, value);
      else if (key == "n_max") c.n_max = parse_int(f, value);
      else if (key == "L0") c.L0 = parse_num(f, value);
      else if (key == "l0") c.l0 = parse_num(f, value);
      else if (key == "subharmonic_levels") c.subharmonic_levels = parse_int(f, value);
      else if (key == "h_top") c.h_top = parse_num(f, value);
      else if (key == "site_altitude") c.site_altitude = parse_num(f, value);
      else if (key == "hv_a_ground") c.hv_a_ground = parse_num(f, value);
      else if (key == "hv_wind") c.hv_wind = parse_num(f, value);
      else if (key == "cn2_scale") c.cn2_scale = parse_num(f, value);
      else if (key == "extent_factor") c.extent_factor = parse_num(f, value);
      else if (key == "min_aperture_px") c.min_aperture_px = parse_int(f, value);
      else if (key == "threads") c.threads = parse_int(f, value);
      else return false;
      return true;
    }
    return false;
  }
};

}  // namespace

ScenarioSet load_scenario(std::string_view text) {
  ConfigDoc doc = ConfigDoc::parse(text);
  ScenarioSet set;
  FieldBinder binder{set};
  for (const auto& section : doc.sections()) {
    if (!section.empty() && section != "scenario" &&
        section != "finite_size" && section != "simulation") {
      throw ValidationError(section, "unknown section");
    }
    for (const auto& key : doc.keys(section)) {
      if (!binder.apply(section, key, *doc.get(section, key))) {
        throw ValidationError(section.empty() ? key : section + "." + key,
                              "unknown parameter");
      }
    }
  }
  validate(set.scenario);
  validate(set.finite_size);
  validate(set.sim);
  return set;
}

std::string serialize(const ScenarioSet& set) {
  ConfigDoc doc;
  const Scenario& s = set.scenario;
  auto put = [&doc](const std::string& sec, const std::string& key, double v) {
    doc.set(sec, key, format_double(v));
  };
  put("scenario", "f", s.f);
  put("scenario", "w0", s.w0);
  put("scenario", "D_R", s.D_R);
  put("scenario", "H", s.H);
  put("scenario", "eta_d", s.eta_d);
  put("scenario", "V_A", s.V_A);
  put("scenario", "tau0", s.tau0);
  put("scenario", "lambda", s.lambda);
  put("scenario", "zeta", s.zeta);
  put("scenario", "v_el", s.v_el);
  put("scenario", "xi_tech", s.xi_tech);
  put("scenario", "R_e_db", s.R_e_db);
  put("scenario", "R_po_db", s.R_po_db);
  doc.set("scenario", "n_adc_bits", std::to_string(s.n_adc_bits));
  put("scenario", "V_ta", s.V_ta);
  put("scenario", "V_rin_atmos", s.V_rin_atmos);
  put("scenario", "xi_rin_lo_coeff", s.xi_rin_lo_coeff);
  put("scenario", "xi_rin_signal", s.xi_rin_signal);
  put("scenario", "xi_background", s.xi_background);
  put("scenario", "xi_mod", s.xi_mod);
  doc.set("scenario", "xi_ch_override",
          s.xi_ch_override ? format_double(*s.xi_ch_override) : "none");

  const FiniteSizeParams& fs = set.finite_size;
  put("finite_size", "N_total", fs.N_total);
  put("finite_size", "key_fraction", fs.key_fraction);
  put("finite_size", "beta", fs.beta);
  put("finite_size", "eps_total", fs.eps_total);
  put("finite_size", "eps_s", fs.eps_s);
  put("finite_size", "eps_PA", fs.eps_PA);
  put("finite_size", "eps_PE", fs.eps_PE);
  put("finite_size", "eps_EC", fs.eps_EC);
  doc.set("finite_size", "d_bits", std::to_string(fs.d_bits));

  const SimulationControl& c = set.sim;
  doc.set("simulation", "grid_size", std::to_string(c.grid_size));
  doc.set("simulation", "iterations", std::to_string(c.iterations));
  doc.set("simulation", "seed", std::to_string(c.seed));
  doc.set("simulation", "n_screens", std::to_string(c.n_screens));
  doc.set("simulation", "n_max", std::to_string(c.n_max));
  put("simulation", "L0", c.L0);
  put("simulation", "l0", c.l0);
  doc.set("simulation", "subharmonic_levels",
          std::to_string(c.subharmonic_levels));
  put("simulation", "h_top", c.h_top);
  put("simulation", "site_altitude", c.site_altitude);
  put("simulation", "hv_a_ground", c.hv_a_ground);
  put("simulation", "hv_wind", c.hv_wind);
  put("simulation", "cn2_scale", c.cn2_scale);
  put("simulation", "extent_factor", c.extent_factor);
  doc.set("simulation", "min_aperture_px", std::to_string(c.min_aperture_px));
  doc.set("simulation", "threads", std::to_string(c.threads));
  return doc.serialize();
}

}  // namespace satqkd
