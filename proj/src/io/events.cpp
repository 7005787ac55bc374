#include "bellmux/io/events.hpp"

#include <zlib.h>

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bellmux {

namespace {

constexpr const char* kHeader = "shot,arm,basis,port,ix,iy,t_us";

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

EventWriter::EventWriter(const std::string& path) : path_(path) {
  // "T" writes transparently (no gzip wrapper) for plain targets.
  const char* mode = ends_with(path, ".gz") ? "wb6" : "wbT";
  gz_ = gzopen(path.c_str(), mode);
  if (!gz_) throw DataError("cannot open output file: " + path);
  buf_.reserve(1 << 20);
  buf_ += kHeader;
  buf_ += '\n';
}

EventWriter::~EventWriter() {
  if (!closed_ && gz_) gzclose(static_cast<gzFile>(gz_));
}

void EventWriter::accept(std::span<const PhotonHit> hits) {
  char line[96];
  for (const auto& h : hits) {
    const int n = std::snprintf(line, sizeof line, "%" PRIu64 ",%c,%u,%c,%u,%u,%.6f\n",
                                h.shot, h.arm == Arm::writeout ? 'w' : 'r',
                                static_cast<unsigned>(h.basis),
                                h.port == Port::plus ? '+' : '-', static_cast<unsigned>(h.ix),
                                static_cast<unsigned>(h.iy), h.storage_time);
    buf_.append(line, static_cast<std::size_t>(n));
    ++records_;
    if (buf_.size() > (1 << 20) - 128) {
      if (gzwrite(static_cast<gzFile>(gz_), buf_.data(), static_cast<unsigned>(buf_.size())) <= 0)
        throw DataError("write failure on " + path_);
      buf_.clear();
    }
  }
}

void EventWriter::close() {
  if (closed_) return;
  if (!buf_.empty() &&
      gzwrite(static_cast<gzFile>(gz_), buf_.data(), static_cast<unsigned>(buf_.size())) <= 0)
    throw DataError("write failure on " + path_);
  buf_.clear();
  if (gzclose(static_cast<gzFile>(gz_)) != Z_OK) throw DataError("close failure on " + path_);
  closed_ = true;
}

EventReader::EventReader(const std::string& path) : path_(path) {
  gz_ = gzopen(path.c_str(), "rb");
  if (!gz_) throw DataError("cannot open event file: " + path);
  buf_.reserve(1 << 20);
  // Header line.
  PhotonHit dummy;
  std::string header;
  {
    // Read the first line manually.
    char c;
    while (true) {
      const int r = gzread(static_cast<gzFile>(gz_), &c, 1);
      if (r <= 0) throw DataError(path + ": missing header");
      if (c == '\n') break;
      header += c;
    }
  }
  ++line_;
  if (header != kHeader)
    throw DataError(path + ":1: bad header `" + header + "`, expected `" + kHeader + "`");
  (void)dummy;
}

EventReader::~EventReader() {
  if (gz_) gzclose(static_cast<gzFile>(gz_));
}

bool EventReader::fill() {
  if (eof_) return pos_ < buf_.size();
  buf_.erase(0, pos_);
  pos_ = 0;
  char chunk[1 << 16];
  const int r = gzread(static_cast<gzFile>(gz_), chunk, sizeof chunk);
  if (r < 0) throw DataError(path_ + ": read failure");
  if (r == 0)
    eof_ = true;
  else
    buf_.append(chunk, static_cast<std::size_t>(r));
  return pos_ < buf_.size();
}

bool EventReader::next(PhotonHit& hit) {
  std::size_t nl;
  while ((nl = buf_.find('\n', pos_)) == std::string::npos) {
    const std::size_t before = buf_.size() - pos_;
    if (!fill()) return false;
    if (eof_ && buf_.size() - pos_ == before) {
      // Trailing record without newline.
      if (before == 0) return false;
      nl = buf_.size();
      break;
    }
  }
  const std::string_view line(buf_.data() + pos_, nl - pos_);
  pos_ = std::min(nl + 1, buf_.size());
  ++line_;

  const auto fail = [&](const char* what) {
    throw DataError(path_ + ":" + std::to_string(line_) + ": " + what + " in `" +
                    std::string(line) + "`");
  };

  std::uint64_t shot = 0;
  unsigned basis = 0, ix = 0, iy = 0;
  char arm = 0, port = 0;
  double t = 0.0;
  char tail = 0;
  const int n = std::sscanf(std::string(line).c_str(),
                            "%" SCNu64 " ,%c,%u,%c,%u,%u,%lf %c", &shot, &arm, &basis, &port,
                            &ix, &iy, &t, &tail);
  if (n != 7) fail("malformed record");
  if (arm != 'w' && arm != 'r') fail("bad arm");
  if (port != '+' && port != '-') fail("bad port");
  if (basis > 65535 || ix > 65535 || iy > 65535) fail("field out of range");
  if (t < 0.0) fail("negative storage time");

  hit.shot = shot;
  hit.arm = arm == 'w' ? Arm::writeout : Arm::readout;
  hit.basis = static_cast<std::uint16_t>(basis);
  hit.port = port == '+' ? Port::plus : Port::minus;
  hit.ix = static_cast<std::uint16_t>(ix);
  hit.iy = static_cast<std::uint16_t>(iy);
  hit.storage_time = t;

  const int arm_ord = static_cast<int>(hit.arm);
  if (have_last_) {
    if (hit.shot < last_shot_ || (hit.shot == last_shot_ && arm_ord < last_arm_))
      fail("records not sorted by (shot, arm)");
  }
  last_shot_ = hit.shot;
  last_arm_ = arm_ord;
  have_last_ = true;
  return true;
}

std::string meta_path_for(const std::string& event_path) {
  std::string p = event_path;
  if (ends_with(p, ".gz")) p.erase(p.size() - 3);
  const auto dot = p.find_last_of('.');
  const auto slash = p.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    p.erase(dot);
  return p + ".meta";
}

void write_meta(const std::string& event_path, const Config& cfg, const SimulationPlan& plan,
                const RunDiagnostics& diag) {
  const std::string path = meta_path_for(event_path);
  std::ofstream out(path);
  if (!out) throw DataError("cannot open metadata file: " + path);
  char num[64];
  out << "seed = " << plan.seed << "\n";
  out << "achieved_modes = " << diag.achieved_modes << "\n";
  out << "total_shots = " << diag.total_shots << "\n";
  out << "total_hits = " << diag.total_hits << "\n";
  out << "dropped_hits = " << diag.dropped_hits << "\n";
  out << "entries = " << plan.schedule.size() << "\n";
  for (std::size_t e = 0; e < plan.schedule.size(); ++e) {
    const auto& s = plan.schedule[e];
    out << "entry." << e << ".t = ";
    std::snprintf(num, sizeof num, "%.17g", s.storage_time);
    out << num << "\n";
    out << "entry." << e << ".shots = " << s.shots << "\n";
    std::snprintf(num, sizeof num, "%.17g", s.setting.xi_w);
    out << "entry." << e << ".xi_w = " << num << "\n";
    std::snprintf(num, sizeof num, "%.17g", s.setting.xi_r);
    out << "entry." << e << ".xi_r = " << num << "\n";
  }
  std::istringstream cfg_lines(cfg.serialize());
  std::string line;
  while (std::getline(cfg_lines, line)) out << "config." << line << "\n";
  out.flush();
  if (!out) throw DataError("write failure on " + path);
}

RunMeta read_meta(const std::string& event_path) {
  const std::string path = meta_path_for(event_path);
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metadata file: " + path);
  RunMeta meta;
  std::string line, config_text;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ":" + std::to_string(line_no) + ": expected `key = value`");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.rfind("config.", 0) == 0) {
      config_text += key.substr(7) + " = " + value + "\n";
    } else {
      meta.values[key] = value;
    }
  }
  try {
    meta.config = Config::parse_string(config_text, path);
  } catch (const ConfigError& e) {
    throw DataError(std::string("metadata config echo invalid: ") + e.what());
  }
  const auto need = [&](const std::string& k) -> const std::string& {
    const auto it = meta.values.find(k);
    if (it == meta.values.end()) throw DataError(path + ": missing key " + k);
    return it->second;
  };
  meta.seed = std::stoull(need("seed"));
  meta.achieved_modes = std::stoi(need("achieved_modes"));
  meta.dropped_hits = std::stoull(need("dropped_hits"));
  const int entries = std::stoi(need("entries"));
  for (int e = 0; e < entries; ++e) {
    const std::string p = "entry." + std::to_string(e) + ".";
    meta.schedule.times.push_back(std::stod(need(p + "t")));
    meta.schedule.shots.push_back(std::stoull(need(p + "shots")));
    meta.schedule.settings.push_back({std::stod(need(p + "xi_w")), std::stod(need(p + "xi_r"))});
  }
  return meta;
}

AccumulationResult accumulate_file(const std::string& event_path, const DetectorGeometry& geom,
                                   const CorrelationKernel& kernel, double n_sigma,
                                   const ScheduleMeta& meta) {
  EventReader reader(event_path);
  CoincidenceAccumulator acc(geom, kernel, n_sigma, meta);
  PhotonHit h;
  std::vector<PhotonHit> batch;
  batch.reserve(4096);
  while (reader.next(h)) {
    batch.push_back(h);
    if (batch.size() == 4096) {
      acc.accept(batch);
      batch.clear();
    }
  }
  if (!batch.empty()) acc.accept(batch);
  return acc.finish();
}

}  // namespace bellmux
