#ifndef PEERLOC_EPOCH_LOG_IO_HPP
#define PEERLOC_EPOCH_LOG_IO_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "peerloc/runtime.hpp"

namespace peerloc {

/// Parsed epoch-log file contents (see README for the line grammar).
struct LogData {
  std::vector<std::string> estimators;

  struct NodeRow {
    int t = 0;
    int estimator = 0;  ///< index into estimators
    int node = 0;
    Vec2 true_position;
    Vec2 estimate;
    double error = 0.0;
  };
  std::vector<NodeRow> rows;

  struct DetectionRow {
    int t = 0;
    int observer = 0;
    int neighbor = 0;
    int z_true = 0;
    int z_detected = 0;
  };
  std::vector<DetectionRow> detections;

  struct MetaRow {
    int t = 0;
    int measurement_count = 0;
    int reset_count = 0;
    int degeneracy_count = 0;
  };
  std::vector<MetaRow> meta;
};

/// Line-delimited plain-text log: one record per mobile node per step per
/// estimator, with the particle filter's per-neighbor LOS truth/detection
/// appended as neighbor:truth:detected tokens.
void write_epoch_log(const std::vector<EpochLog>& logs,
                     const std::vector<Estimator>& estimators, std::ostream& out);
void write_epoch_log(const std::vector<EpochLog>& logs,
                     const std::vector<Estimator>& estimators,
                     const std::string& path);

LogData read_epoch_log(std::istream& in);
LogData read_epoch_log(const std::string& path);

}  // namespace peerloc

#endif  // PEERLOC_EPOCH_LOG_IO_HPP
