#include "bellmux/io/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bellmux/analytic/werner.hpp"

namespace bellmux {

const std::vector<Config::SchemaEntry>& Config::schema() {
  static const std::vector<SchemaEntry> s = {
      {"geometry.width_px", "int", "130", "observed region width [px]"},
      {"geometry.height_px", "int", "160", "observed region height [px]"},
      {"geometry.pixel_pitch", "double", "2.38", "wavevector per pixel [rad/mm per px]"},
      {"geometry.y_max", "double", "761.6", "maximal y wavevector entering the fold [rad/mm]"},
      {"geometry.origin_x", "double", "-154.7", "wavevector of pixel (0,0), x [rad/mm]"},
      {"geometry.origin_y", "double", "0.0", "wavevector of pixel (0,0), y [rad/mm]"},
      {"kernel.sigma_x", "double", "6.2594", "pair correlation width in x difference [rad/mm]"},
      {"kernel.sigma_y", "double", "6.2594", "pair correlation width in y difference [rad/mm]"},
      {"source.chi", "double", "0.01", "pair generation probability per mode"},
      {"source.alpha", "double", "0.565", "geometric mode-count factor"},
      {"source.eta_w", "double", "0.08", "write-out filtering+detection efficiency"},
      {"source.eta_r0", "double", "0.405", "read-out retrieval efficiency at t=0"},
      {"source.eta_d", "double", "1.0", "read-arm detection efficiency"},
      {"noise.b_w", "double", "0.0", "write-arm noise per mode per shot"},
      {"noise.b_r0", "double", "0.0", "read-arm noise per mode at t=0"},
      {"noise.b_r_inf", "double", "0.0", "read-arm noise plateau (>= b_r0)"},
      {"noise.b_r_chi", "double", "0.0", "chi-proportional read-arm noise coefficient"},
      {"noise.tau_b", "double", "13.0", "read-noise rise time [us]"},
      {"decoherence.gamma", "double", "6260.0", "motional decoherence constant [us rad/mm]"},
      {"decoherence.temp_cal", "double", "1.8418172e+09",
       "temperature calibration T = temp_cal/gamma^2 [uK (us rad/mm)^2]"},
      {"phase.variant", "string", "linear", "constant | linear | grid"},
      {"phase.a_w_x", "double", "0.0", "write-arm phase gradient x [rad per rad/mm]"},
      {"phase.a_w_y", "double", "0.033", "write-arm phase gradient y [rad per rad/mm]"},
      {"phase.a_r_x", "double", "0.0", "read-arm phase gradient x [rad per rad/mm]"},
      {"phase.a_r_y", "double", "0.033", "read-arm phase gradient y [rad per rad/mm]"},
      {"phase.phi0", "double", "0.0", "phase offset [rad]"},
      {"phase.grid_cell", "double", "30.0", "grid variant cell size [rad/mm]"},
      {"phase.grid_seed", "int", "7", "grid variant cell-value seed"},
      {"sim.mode", "string", "physical", "physical | effective"},
      {"sim.inject", "string", "constant", "effective-mode visibility: constant | model"},
      {"sim.v_eff", "double", "0.92", "effective-mode visibility override"},
      {"sim.inject_v0", "double", "0.92", "injected storage-time model offset"},
      {"sim.inject_w", "double", "0.13", "injected storage-time noise weight"},
      {"sim.floor_calibration", "bool", "true",
       "top up accidentals to the closed-form coincidence budget"},
      {"sim.seed", "int", "1", "master seed; all randomness derives from it"},
      {"sim.shots", "int", "100000", "shots per schedule entry"},
      {"sim.threads", "int", "0", "worker threads, 0 = hardware"},
      {"schedule.type", "string", "visibility", "visibility | bell"},
      {"schedule.times", "string", "0.3", "storage times, comma separated [us]"},
      {"schedule.t0", "double", "0.0", "bell schedule storage time [us]"},
      {"analysis.n_sigma", "double", "1.0", "coincidence window half-width [sigma]"},
      {"analysis.smooth_sigma_x", "double", "10.0", "map smoothing along x_s [px]"},
      {"analysis.smooth_sigma_y", "double", "1.0", "map smoothing along y_s [px]"},
      {"analysis.segment_px", "int", "50", "fringe-fit segment length [px]"},
      {"analysis.segment_step_px", "int", "1", "segment step [px]"},
      {"analysis.min_counts", "double", "100", "minimum raw coincidences per segment"},
      {"analysis.x_margin_px", "int", "10", "columns excluded at the x edges [px]"},
      {"analysis.refine_frequency", "bool", "true", "refine the fringe frequency locally"},
      {"analysis.correct_smoothing", "bool", "true", "divide out the filter transfer"},
      {"analysis.deblur_pixelation", "bool", "true", "divide out the pixelation transfer"},
      {"analysis.band_halfwidth_px", "double", "12", "balanced-band half width [px]"},
      {"analysis.k_bins", "int", "6", "|k| bins for the lifetime-vs-k fit"},
      {"analysis.g2_tile_px", "int", "10", "tile size for g2 map averaging [px]"},
      {"analysis.g2_min_coincidences", "int", "100", "minimum coincidences per g2 tile"},
      {"analysis.bell_min_counts", "int", "8", "minimum coincidences per Bell map bin"},
  };
  return s;
}

Config Config::defaults() {
  Config c;
  for (const auto& e : schema()) c.values_[e.key] = e.def;
  return c;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Config Config::parse_string(const std::string& text, const std::string& source) {
  Config c = defaults();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  std::map<std::string, int> seen;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected `key = value`");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (c.values_.find(key) == c.values_.end())
      throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown key `" + key + "`");
    if (seen.count(key))
      throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key `" + key +
                        "` (first at line " + std::to_string(seen[key]) + ")");
    seen[key] = line_no;
    c.values_[key] = value;
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

std::string Config::serialize() const {
  std::string out;
  for (const auto& e : schema()) {
    out += e.key;
    out += " = ";
    out += values_.at(e.key);
    out += "\n";
  }
  return out;
}

std::string Config::schema_text() {
  std::string out;
  for (const auto& e : schema()) {
    out += "# ";
    out += e.key;
    out += " (";
    out += e.type;
    out += ", default ";
    out += e.def;
    out += "): ";
    out += e.doc;
    out += "\n";
  }
  return out;
}

const std::string& Config::raw(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key: " + key);
  return it->second;
}

void Config::set(const std::string& key, const std::string& value) {
  if (values_.find(key) == values_.end()) throw ConfigError("unknown config key: " + key);
  values_[key] = value;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = raw(key);
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: `" + v + "`");
  }
}

int Config::get_int(const std::string& key) const {
  const double x = get_double(key);
  if (x != std::floor(x)) throw ConfigError("config key " + key + ": not an integer");
  return static_cast<int>(x);
}

std::uint64_t Config::get_u64(const std::string& key) const {
  const double x = get_double(key);
  if (x < 0 || x != std::floor(x))
    throw ConfigError("config key " + key + ": not a nonnegative integer");
  return static_cast<std::uint64_t>(x);
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = raw(key);
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key " + key + ": expected true/false, got `" + v + "`");
}

std::string Config::get_string(const std::string& key) const { return raw(key); }

DetectorGeometry Config::geometry() const {
  DetectorGeometry g;
  g.width_px = get_int("geometry.width_px");
  g.height_px = get_int("geometry.height_px");
  g.pixel_pitch = get_double("geometry.pixel_pitch");
  g.y_max = get_double("geometry.y_max");
  g.origin_x = get_double("geometry.origin_x");
  g.origin_y = get_double("geometry.origin_y");
  try {
    g.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return g;
}

CorrelationKernel Config::kernel() const {
  CorrelationKernel k{get_double("kernel.sigma_x"), get_double("kernel.sigma_y")};
  try {
    k.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return k;
}

PhaseProfile Config::phase() const {
  PhaseProfile p;
  const std::string v = get_string("phase.variant");
  if (v == "constant")
    p.variant = PhaseVariant::constant;
  else if (v == "linear")
    p.variant = PhaseVariant::linear;
  else if (v == "grid")
    p.variant = PhaseVariant::grid;
  else
    throw ConfigError("phase.variant: unknown variant `" + v + "`");
  p.a_w = {get_double("phase.a_w_x"), get_double("phase.a_w_y")};
  p.a_r = {get_double("phase.a_r_x"), get_double("phase.a_r_y")};
  p.phi0 = get_double("phase.phi0");
  p.grid_cell = get_double("phase.grid_cell");
  p.grid_seed = get_u64("phase.grid_seed");
  return p;
}

SourceParams Config::source() const {
  SourceParams s;
  s.chi = get_double("source.chi");
  s.alpha = get_double("source.alpha");
  s.eta_w = get_double("source.eta_w");
  s.eta_r0 = get_double("source.eta_r0");
  s.eta_d = get_double("source.eta_d");
  try {
    s.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return s;
}

NoiseModel Config::noise() const {
  NoiseModel n;
  n.b_w = get_double("noise.b_w");
  n.b_r0 = get_double("noise.b_r0");
  n.b_r_inf = get_double("noise.b_r_inf");
  n.b_r_chi = get_double("noise.b_r_chi");
  n.tau_b = get_double("noise.tau_b");
  try {
    n.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return n;
}

DecoherenceParams Config::decoherence() const {
  DecoherenceParams d;
  d.gamma = get_double("decoherence.gamma");
  d.temp_cal = get_double("decoherence.temp_cal");
  try {
    d.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return d;
}

AnalysisParams Config::analysis() const {
  AnalysisParams a;
  a.n_sigma = get_double("analysis.n_sigma");
  a.smooth_sigma_x_px = get_double("analysis.smooth_sigma_x");
  a.smooth_sigma_y_px = get_double("analysis.smooth_sigma_y");
  a.segment_px = get_int("analysis.segment_px");
  a.segment_step_px = get_int("analysis.segment_step_px");
  a.min_counts = get_double("analysis.min_counts");
  a.x_margin_px = get_int("analysis.x_margin_px");
  a.refine_frequency = get_bool("analysis.refine_frequency");
  a.correct_smoothing = get_bool("analysis.correct_smoothing");
  a.deblur_pixelation = get_bool("analysis.deblur_pixelation");
  a.band_halfwidth_px = get_double("analysis.band_halfwidth_px");
  a.k_bins = get_int("analysis.k_bins");
  a.g2_tile_px = get_int("analysis.g2_tile_px");
  a.g2_min_coincidences = get_u64("analysis.g2_min_coincidences");
  a.bell_min_counts = static_cast<std::uint32_t>(get_int("analysis.bell_min_counts"));
  if (!(a.n_sigma > 0.0)) throw ConfigError("analysis.n_sigma must be > 0");
  if (a.segment_px < 4) throw ConfigError("analysis.segment_px must be >= 4");
  return a;
}

SimulationPlan Config::plan() const {
  SimulationPlan p;
  p.geom = geometry();
  p.kernel = kernel();
  p.phase = phase();
  p.source = source();
  p.noise = noise();
  p.dec = decoherence();
  const std::string mode = get_string("sim.mode");
  if (mode == "physical")
    p.mode = SimMode::physical;
  else if (mode == "effective")
    p.mode = SimMode::effective;
  else
    throw ConfigError("sim.mode: unknown mode `" + mode + "`");
  const std::string inj = get_string("sim.inject");
  if (inj == "constant")
    p.inject = InjectMode::constant;
  else if (inj == "model")
    p.inject = InjectMode::model;
  else
    throw ConfigError("sim.inject: unknown mode `" + inj + "`");
  p.v_eff = get_double("sim.v_eff");
  p.inject_v0 = get_double("sim.inject_v0");
  p.inject_w = get_double("sim.inject_w");
  p.floor_calibration = get_bool("sim.floor_calibration");
  p.n_sigma = get_double("analysis.n_sigma");
  p.seed = get_u64("sim.seed");
  p.threads = get_int("sim.threads");
  const std::uint64_t shots = get_u64("sim.shots");

  const std::string type = get_string("schedule.type");
  if (type == "visibility") {
    const std::string times = get_string("schedule.times");
    std::stringstream ss(times);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      ScheduleEntry e;
      try {
        e.storage_time = std::stod(tok);
      } catch (const std::exception&) {
        throw ConfigError("schedule.times: not a number: `" + tok + "`");
      }
      e.setting = {0.0, 0.0};
      e.shots = shots;
      p.schedule.push_back(e);
    }
    if (p.schedule.empty()) throw ConfigError("schedule.times: empty list");
  } else if (type == "bell") {
    const BasisPair bases = optimal_bases(get_double("phase.phi0"));
    const double t0 = get_double("schedule.t0");
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        // Entry order (w1,r1), (w1,r2), (w2,r1), (w2,r2).
        ScheduleEntry e;
        e.setting = {bases.xi_w[j], bases.xi_r[i]};
        e.storage_time = t0;
        e.shots = shots;
        p.schedule.push_back(e);
      }
  } else {
    throw ConfigError("schedule.type: unknown type `" + type + "`");
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return p;
}

FringeConfig Config::fringe() const {
  FringeConfig f = make_fringe_config(phase(), geometry());
  const AnalysisParams a = analysis();
  f.smooth_sigma_x_px = a.smooth_sigma_x_px;
  f.smooth_sigma_y_px = a.smooth_sigma_y_px;
  f.segment_px = a.segment_px;
  f.step_px = a.segment_step_px;
  f.min_counts = a.min_counts;
  f.x_margin_px = a.x_margin_px;
  f.refine_frequency = a.refine_frequency;
  f.correct_smoothing = a.correct_smoothing;
  f.deblur_pixelation = a.deblur_pixelation;
  return f;
}

}  // namespace bellmux
