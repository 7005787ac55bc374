#include "bellmux/io/tasks.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "bellmux/analysis/bell.hpp"
#include "bellmux/analysis/lifetime.hpp"
#include "bellmux/analysis/summary.hpp"
#include "bellmux/analytic/modes.hpp"
#include "bellmux/analytic/visibility.hpp"
#include "bellmux/analytic/werner.hpp"
#include "bellmux/io/events.hpp"

namespace bellmux {

namespace fs = std::filesystem;

namespace {

std::string num(double x) {
  char b[48];
  std::snprintf(b, sizeof b, "%.9g", x);
  return b;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot open output file: " + path);
  out << text;
  out.flush();
  if (!out) throw DataError("write failure on " + path);
}

void write_matrix(const std::string& path, const std::vector<double>& data, int w, int h) {
  std::string text;
  text.reserve(static_cast<std::size_t>(w) * h * 12);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x) text += ',';
      text += num(data[static_cast<std::size_t>(y) * w + x]);
    }
    text += '\n';
  }
  write_text(path, text);
}

std::map<std::string, std::string> read_kv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("missing input: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

std::vector<VisibilityMap> make_visibility_maps(const AccumulationResult& acc, const Config& cfg) {
  const DetectorGeometry geom = cfg.geometry();
  FringeConfig fringe = cfg.fringe();
  std::vector<VisibilityMap> maps;
  maps.reserve(acc.maps.size());
  for (const auto& m : acc.maps) maps.push_back(visibility_map(m, geom, fringe));
  return maps;
}

std::string vis_points_csv(const VisibilityMap& m) {
  std::string text = "x_s,y_s,v,se,counts,freq,flagged\n";
  for (const auto& p : m.points) {
    text += num(p.x_s);
    text += ',';
    text += num(p.y_s);
    text += ',';
    text += num(p.v);
    text += ',';
    text += num(p.se);
    text += ',';
    text += num(p.counts);
    text += ',';
    text += num(p.freq);
    text += ',';
    text += p.flagged ? '1' : '0';
    text += '\n';
  }
  return text;
}

/// Oracle mean over the unmasked points of a measured map; each point is
/// the model averaged over the segment the fringe fit spans.
double oracle_mean(const VisibilityMap& m, const Config& cfg) {
  const DetectorGeometry geom = cfg.geometry();
  const SourceParams src = cfg.source();
  const NoiseModel noise = cfg.noise();
  const DecoherenceParams dec = cfg.decoherence();
  const AnalysisParams ap = cfg.analysis();
  const double seg_len = ap.segment_px * geom.pixel_pitch;
  if (m.points.empty()) return 0.0;
  double acc = 0.0;
  for (const auto& p : m.points)
    acc += visibility_vs_time_segment(m.storage_time, {p.x_s, p.y_s}, seg_len, 16, src, noise,
                                      dec, ap.n_sigma, geom);
  return acc / static_cast<double>(m.points.size());
}

void task_bell(const AccumulationResult& acc, const Config& cfg, const RunMeta& meta,
               const std::string& dir) {
  if (acc.maps.size() != 4)
    throw DataError("bell task needs exactly 4 schedule entries, have " +
                    std::to_string(acc.maps.size()));
  (void)meta;
  const DetectorGeometry geom = cfg.geometry();
  BellConfig bc = make_bell_config(cfg.phase(), geom);
  const AnalysisParams ap = cfg.analysis();
  bc.min_counts = ap.bell_min_counts;
  bc.refine_frequency = ap.refine_frequency;
  bc.deblur_pixelation = ap.deblur_pixelation;

  std::array<const CoincidenceMap*, 4> maps{&acc.maps[0], &acc.maps[1], &acc.maps[2],
                                            &acc.maps[3]};
  const BellMapResult res = bell_map(maps, geom, bc);

  for (int b = 0; b < 4; ++b) {
    const ExpectedValueMap e = expected_value_map(acc.maps[b]);
    write_matrix(dir + "/e_basis" + std::to_string(b) + ".csv", e.e, e.sum_w, e.sum_h);
  }
  write_matrix(dir + "/s_raw.csv", res.s_raw, res.sum_w, res.sum_h);
  write_matrix(dir + "/s_fit.csv", res.s_fit, res.sum_w, res.sum_h);
  std::string trace = "y_index,s_avg,se,ok\n";
  for (int sy = 0; sy < res.sum_h; ++sy)
    trace += std::to_string(sy) + "," + num(res.s_avg[sy]) + "," + num(res.s_avg_se[sy]) + "," +
             (res.s_avg_ok[sy] ? "1" : "0") + "\n";
  write_text(dir + "/s_avg.csv", trace);

  std::string summary;
  summary += "amplitude = " + num(res.amplitude) + "\n";
  summary += "amplitude_se = " + num(res.amplitude_se) + "\n";
  summary += "freq_y_px = " + num(res.fitted_freq_y) + "\n";
  write_text(dir + "/bell_summary.txt", summary);
}

void task_visibility(const AccumulationResult& acc, const Config& cfg, const RunMeta& meta,
                     const std::string& dir, std::uint64_t seed) {
  const auto maps = make_visibility_maps(acc, cfg);
  std::string summary;
  summary += "entries = " + std::to_string(maps.size()) + "\n";
  for (std::size_t i = 0; i < maps.size(); ++i) {
    write_text(dir + "/vis_" + std::to_string(i) + ".csv", vis_points_csv(maps[i]));
    const ModeSummary s = mode_summary(maps[i], seed + i);
    const std::string p = "vis." + std::to_string(i) + ".";
    summary += p + "t = " + num(meta.schedule.times[i]) + "\n";
    summary += p + "points = " + std::to_string(s.n_points) + "\n";
    summary += p + "mean_v = " + num(s.mean_all) + "\n";
    summary += p + "mean_v_se = " + num(s.mean_all_se) + "\n";
    summary += p + "fraction_violating = " + num(s.fraction_violating) + "\n";
    summary += p + "fraction_se = " + num(s.fraction_se) + "\n";
    summary += p + "mean_violating = " + num(s.mean_violating) + "\n";
    summary += p + "oracle_mean_v = " + num(oracle_mean(maps[i], cfg)) + "\n";
  }
  write_text(dir + "/visibility_summary.txt", summary);
}

void task_g2(const AccumulationResult& acc, const Config& cfg, const RunMeta& meta,
             const std::string& dir) {
  const auto vmaps = make_visibility_maps(acc, cfg);
  const AnalysisParams ap = cfg.analysis();
  std::string summary;
  summary += "entries = " + std::to_string(acc.maps.size()) + "\n";
  for (std::size_t i = 0; i < acc.maps.size(); ++i) {
    const auto& m = acc.maps[i];
    const G2Estimate whole = estimate_g2(m);
    const G2VisibilityAverage avg = g2_visibility_average(
        m, ap.g2_tile_px, ap.g2_min_coincidences, ap.x_margin_px, ap.segment_px / 2);
    double fit_v = 0.0, fit_se = 0.0;
    {
      double wsum = 0.0, vsum = 0.0;
      for (const auto& p : vmaps[i].points) {
        if (!(p.se > 0.0)) continue;
        vsum += p.v;
        wsum += 1.0;
      }
      if (wsum > 0.0) {
        fit_v = vsum / wsum;
        double var = 0.0;
        for (const auto& p : vmaps[i].points) var += (p.v - fit_v) * (p.v - fit_v);
        fit_se = std::sqrt(var) / wsum;  // spread-based error of the mean
      }
    }
    const std::string p = "g2." + std::to_string(i) + ".";
    summary += p + "t = " + num(meta.schedule.times[i]) + "\n";
    summary += p + "g2_total = " + num(whole.valid ? whole.g2 : 0.0) + "\n";
    summary += p + "coincidences = " + std::to_string(whole.coincidences) + "\n";
    summary += p + "v_from_g2 = " + num(avg.valid ? avg.mean : 0.0) + "\n";
    summary += p + "v_from_g2_se = " + num(avg.valid ? avg.se : 0.0) + "\n";
    summary += p + "tiles = " + std::to_string(avg.tiles) + "\n";
    summary += p + "v_from_fringes = " + num(fit_v) + "\n";
    summary += p + "v_from_fringes_se = " + num(fit_se) + "\n";
  }
  write_text(dir + "/g2_summary.txt", summary);
}

void task_lifetime(const AccumulationResult& acc, const Config& cfg, const std::string& dir) {
  const auto vmaps = make_visibility_maps(acc, cfg);
  const DetectorGeometry geom = cfg.geometry();
  const DecoherenceParams cal = cfg.decoherence();
  const AnalysisParams ap = cfg.analysis();

  DecoherenceFit fit;
  try {
    fit = fit_decoherence(vmaps, geom, cfg.kernel(), cal);
  } catch (const std::runtime_error& e) {
    throw NumericalError(std::string("lifetime fit failed: ") + e.what());
  }

  std::string summary;
  summary += "v0 = " + num(fit.v0) + "\n";
  summary += "v0_se = " + num(fit.v0_se) + "\n";
  summary += "w = " + num(fit.w) + "\n";
  summary += "w_se = " + num(fit.w_se) + "\n";
  summary += "gamma = " + num(fit.gamma) + "\n";
  summary += "gamma_se = " + num(fit.gamma_se) + "\n";
  summary += "temperature = " + num(fit.temperature) + "\n";
  summary += "temperature_se = " + num(fit.temperature_se) + "\n";
  summary += "chi2 = " + num(fit.chi2) + "\n";
  summary += "n_points = " + std::to_string(fit.n_points) + "\n";

  try {
    const TauKFit tk = tau_vs_k(vmaps, geom, cfg.kernel(), cal,
                                ap.band_halfwidth_px * geom.pixel_pitch, ap.k_bins, cal.gamma);
    std::string table = "k_center,tau,tau_se,n_points,used\n";
    for (const auto& b : tk.bins)
      table += num(b.k_center) + "," + num(b.tau) + "," + num(b.tau_se) + "," +
               std::to_string(b.n_points) + "," + (b.used ? "1" : "0") + "\n";
    write_text(dir + "/tau_vs_k.csv", table);
    summary += "tau_k.gamma = " + num(tk.gamma) + "\n";
    summary += "tau_k.gamma_se = " + num(tk.gamma_se) + "\n";
    summary += "tau_k.temperature = " + num(tk.temperature) + "\n";
    summary += "tau_k.v0 = " + num(tk.v0) + "\n";
    summary += "tau_k.w = " + num(tk.w) + "\n";
    summary += "tau_k.excluded_bins = " + std::to_string(tk.n_excluded_bins) + "\n";
  } catch (const std::runtime_error& e) {
    summary += std::string("tau_k.error = ") + e.what() + "\n";
  }
  write_text(dir + "/lifetime_fit.txt", summary);
}

}  // namespace

void cmd_simulate(const SimulateOptions& opt) {
  Config cfg = Config::parse_file(opt.config_path);
  if (opt.seed) cfg.set("sim.seed", std::to_string(*opt.seed));
  if (opt.shots) cfg.set("sim.shots", std::to_string(*opt.shots));
  if (opt.threads) cfg.set("sim.threads", std::to_string(*opt.threads));
  const SimulationPlan plan = cfg.plan();

  try {
    EventWriter writer(opt.out_path);
    const RunDiagnostics diag = run_experiment(plan, writer);
    writer.close();
    write_meta(opt.out_path, cfg, plan, diag);
    if (!opt.quiet) {
      std::printf("wrote %s (%" PRIu64 " records, %" PRIu64 " shots, %d modes, %" PRIu64
                  " dropped)\n",
                  opt.out_path.c_str(), writer.records(), diag.total_shots, diag.achieved_modes,
                  diag.dropped_hits);
    }
  } catch (...) {
    std::error_code ec;
    fs::remove(opt.out_path, ec);
    fs::remove(meta_path_for(opt.out_path), ec);
    throw;
  }
}

void cmd_analyze(const AnalyzeOptions& opt) {
  const RunMeta meta = read_meta(opt.events_path);
  Config cfg = meta.config;
  if (opt.config_path) cfg = Config::parse_file(*opt.config_path);

  fs::create_directories(opt.out_dir);
  const AccumulationResult acc = accumulate_file(opt.events_path, cfg.geometry(), cfg.kernel(),
                                                 cfg.analysis().n_sigma, meta.schedule);
  if (!opt.quiet && acc.skipped_records > 0)
    std::fprintf(stderr, "skipped %" PRIu64 " records with unknown basis or bad pixels\n",
                 acc.skipped_records);

  const std::uint64_t seed = opt.seed ? *opt.seed : meta.seed;
  if (opt.task == "bell")
    task_bell(acc, cfg, meta, opt.out_dir);
  else if (opt.task == "visibility")
    task_visibility(acc, cfg, meta, opt.out_dir, seed);
  else if (opt.task == "g2")
    task_g2(acc, cfg, meta, opt.out_dir);
  else if (opt.task == "lifetime")
    task_lifetime(acc, cfg, opt.out_dir);
  else
    throw ConfigError("unknown task: " + opt.task);
  if (!opt.quiet) std::printf("task %s done, outputs in %s\n", opt.task.c_str(), opt.out_dir.c_str());
}

namespace {

struct ReportRow {
  std::string name;
  double target;
  double achieved;
  double tolerance;
  bool present;
  bool pass;
};

void add_row(std::vector<ReportRow>& rows, const std::string& name, double target,
             double achieved, double tol) {
  rows.push_back({name, target, achieved, tol, true, std::abs(achieved - target) <= tol});
}

}  // namespace

void cmd_report(const ReportOptions& opt) {
  Config cfg = Config::defaults();
  if (opt.config_path) cfg = Config::parse_file(*opt.config_path);
  const SourceParams src = cfg.source();
  const CorrelationKernel kernel = cfg.kernel();
  const DetectorGeometry geom = cfg.geometry();

  std::vector<ReportRow> rows;
  add_row(rows, "binning_factor_n1", 0.825, binning_factor(1.0, src.alpha), 0.001);
  add_row(rows, "collision_probability", 4.8e-4, collision_probability(20800, 5), 4.8e-4 * 0.02);
  add_row(rows, "success_probability", 0.356, success_probability(src.eta_w, src.chi, 550),
          0.002);
  const double sigma_px = kernel.sigma_x / geom.pixel_pitch;
  add_row(rows, "crosstalk_probability", 1.7e-3,
          crosstalk_probability(src, sigma_px, geom.n_px(), 550), 1.7e-4);
  {
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const double v = 0.3 + 0.7 * i / 99.0;
      const double phi = 6.2831853 * i / 100.0;
      const double s = bell_parameter_for({v, phi}, optimal_bases(phi));
      worst = std::max(worst, std::abs(s - 2.0 * std::sqrt(2.0) * v));
    }
    add_row(rows, "chsh_identity_max_residual", 0.0, worst, 1e-10);
  }
  add_row(rows, "mode_count", 550.0, mode_count(geom.area(), kernel, src.alpha), 275.0);

  std::vector<std::string> missing;
  const auto optional_kv = [&](const std::string& name) {
    std::map<std::string, std::string> kv;
    const std::string path = opt.out_dir + "/" + name;
    if (!fs::exists(path)) {
      missing.push_back(path);
      return kv;
    }
    return read_kv(path);
  };

  const auto bell = optional_kv("bell_summary.txt");
  if (!bell.empty()) {
    const double amp = std::stod(bell.at("amplitude"));
    const double se = std::stod(bell.at("amplitude_se"));
    add_row(rows, "bell_amplitude", 2.60, amp, 3.0 * std::hypot(se, 0.19));
  }
  const auto vis = optional_kv("visibility_summary.txt");
  if (!vis.empty()) {
    const int n = std::stoi(vis.at("entries"));
    for (int i = 0; i < n; ++i) {
      const std::string p = "vis." + std::to_string(i) + ".";
      const double v = std::stod(vis.at(p + "mean_v"));
      const double se = std::stod(vis.at(p + "mean_v_se"));
      const double oracle = std::stod(vis.at(p + "oracle_mean_v"));
      add_row(rows, "visibility_t" + vis.at(p + "t"), oracle, v, 3.0 * std::max(se, 1e-6));
    }
  }
  const auto life = optional_kv("lifetime_fit.txt");
  if (!life.empty()) {
    add_row(rows, "fit_v0", 0.92, std::stod(life.at("v0")), 0.02);
    add_row(rows, "fit_w", 0.13, std::stod(life.at("w")), 0.02);
    add_row(rows, "fit_gamma", 6.26e3, std::stod(life.at("gamma")), 0.29e3);
    add_row(rows, "fit_temperature", 47.0, std::stod(life.at("temperature")), 5.0);
    if (life.count("tau_k.gamma")) {
      const double g = std::stod(life.at("tau_k.gamma"));
      add_row(rows, "tau_k_gamma", std::stod(life.at("gamma")), g,
              0.10 * std::stod(life.at("gamma")));
    }
  }
  const auto g2 = optional_kv("g2_summary.txt");
  if (!g2.empty()) {
    const int n = std::stoi(g2.at("entries"));
    for (int i = 0; i < n; ++i) {
      const std::string p = "g2." + std::to_string(i) + ".";
      const double a = std::stod(g2.at(p + "v_from_g2"));
      const double sa = std::stod(g2.at(p + "v_from_g2_se"));
      const double b = std::stod(g2.at(p + "v_from_fringes"));
      const double sb = std::stod(g2.at(p + "v_from_fringes_se"));
      add_row(rows, "g2_consistency_t" + g2.at(p + "t"), b, a,
              3.0 * std::max(std::hypot(sa, sb), 1e-6));
    }
  }

  if (bell.empty() && vis.empty() && life.empty() && g2.empty()) {
    std::string msg = "no task outputs found in " + opt.out_dir + "; missing:";
    for (const auto& m : missing) msg += " " + m;
    throw DataError(msg);
  }

  std::string txt, csv = "quantity,target,achieved,tolerance,pass\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-28s %14s %14s %12s %s\n", "quantity", "target", "achieved",
                "tolerance", "pass");
  txt += line;
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%-28s %14.6g %14.6g %12.4g %s\n", r.name.c_str(), r.target,
                  r.achieved, r.tolerance, r.pass ? "PASS" : "FAIL");
    txt += line;
    csv += r.name + "," + num(r.target) + "," + num(r.achieved) + "," + num(r.tolerance) + "," +
           (r.pass ? "1" : "0") + "\n";
  }
  for (const auto& m : missing) txt += "missing: " + m + "\n";
  write_text(opt.out_dir + "/report.txt", txt);
  write_text(opt.out_dir + "/report.csv", csv);
  if (!opt.quiet) std::fputs(txt.c_str(), stdout);
}

}  // namespace bellmux
