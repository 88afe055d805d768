#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edaqa/config.hpp"
#include "edaqa/features.hpp"
#include "edaqa/labeling.hpp"
#include "edaqa/synthgen.hpp"

namespace edaqa {

/// Thrown for unreadable or malformed input files.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signal CSV (`t,eda`, uniform spacing within 1e-6 s) plus a metadata JSON
/// sidecar with subject_id, channel and fs.
void write_signal(const TimeSeries& ts, const std::string& csv_path, const std::string& meta_path,
                  const Provenance& prov);
/// Without a sidecar, fs is inferred from the time column.
TimeSeries read_signal(const std::string& csv_path, const std::optional<std::string>& meta_path = std::nullopt);

/// JSON list of {reviewer (1-3), start_s, end_s}.
ReviewerMarks read_marks(const std::string& path);
void write_marks(const ReviewerMarks& marks, const std::string& path);

struct LabelRow {
  std::string subject_id;
  std::size_t window_index = 0;
  double r = 0.0;  // NaN when not applicable (rule labels)
  QualityLabel label = QualityLabel::Clean;
};

/// `subject_id,window_index,r,label[,method]`
void write_labels_csv(const std::vector<LabelRow>& rows, const std::string& path, const Provenance& prov,
                      const std::string& method = {});
std::vector<LabelRow> read_labels_csv(const std::string& path);

/// 52 canonical feature columns then `subject_id,window_index,label`.
void write_features_csv(const std::vector<FeatureVector>& rows, const std::string& path, const Provenance& prov);
/// `feature_map_version` receives the version found in the provenance line
/// (0 when absent).
std::vector<FeatureVector> read_features_csv(const std::string& path, int* feature_map_version = nullptr);

void write_mask_csv(const std::vector<bool>& mask, double fs, const std::string& path, const Provenance& prov);
std::vector<bool> read_mask_csv(const std::string& path);
void write_events_json(const std::vector<ArtifactEvent>& events, const std::string& path, const Provenance& prov);

/// printf-style "%.17g" (round-trip exact).
std::string format_real(double v);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace edaqa
