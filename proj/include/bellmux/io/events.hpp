#pragma once
#include <map>
#include <string>

#include "bellmux/analysis/maps.hpp"
#include "bellmux/io/config.hpp"
#include "bellmux/sim/simulator.hpp"

namespace bellmux {

/// CSV event writer usable as a simulator sink. A `.gz` suffix enables
/// gzip compression; anything else is written plain.
class EventWriter final : public EventSink {
 public:
  explicit EventWriter(const std::string& path);
  ~EventWriter() override;
  EventWriter(const EventWriter&) = delete;
  EventWriter& operator=(const EventWriter&) = delete;

  void accept(std::span<const PhotonHit> hits) override;
  void close();  ///< flush and finalize; throws on I/O failure
  std::uint64_t records() const { return records_; }

 private:
  void* gz_ = nullptr;  // gzFile
  std::string path_;
  std::string buf_;
  std::uint64_t records_ = 0;
  bool closed_ = false;
};

/// Streaming reader; transparently handles gzip and plain files.
/// Validates the header and the (shot, arm) sort order.
class EventReader {
 public:
  explicit EventReader(const std::string& path);
  ~EventReader();
  EventReader(const EventReader&) = delete;
  EventReader& operator=(const EventReader&) = delete;

  /// False at end of file; throws DataError with line context on a
  /// malformed record.
  bool next(PhotonHit& hit);

 private:
  bool fill();
  void* gz_ = nullptr;
  std::string path_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::uint64_t line_ = 0;
  std::uint64_t last_shot_ = 0;
  int last_arm_ = -1;
  bool have_last_ = false;
  bool eof_ = false;
};

/// Path of the metadata sidecar: strips a trailing .gz, then replaces
/// the last extension with .meta.
std::string meta_path_for(const std::string& event_path);

void write_meta(const std::string& event_path, const Config& cfg, const SimulationPlan& plan,
                const RunDiagnostics& diag);

struct RunMeta {
  std::map<std::string, std::string> values;
  Config config;          ///< reconstructed from the config echo
  ScheduleMeta schedule;  ///< per-entry times, shots, settings
  std::uint64_t seed = 0;
  int achieved_modes = 0;
  std::uint64_t dropped_hits = 0;
};

RunMeta read_meta(const std::string& event_path);

/// Read a whole event file through the accumulator.
AccumulationResult accumulate_file(const std::string& event_path, const DetectorGeometry& geom,
                                   const CorrelationKernel& kernel, double n_sigma,
                                   const ScheduleMeta& meta);

}  // namespace bellmux
