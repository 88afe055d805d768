#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edaqa/config.hpp"
#include "edaqa/io.hpp"
#include "edaqa/synthgen.hpp"

namespace edaqa {

// On-disk corpus: one directory per subject holding
//   target.csv/.json, reference.csv/.json, [reviewer_marks.json],
//   and for synthetic subjects mask.csv and events.json.

struct SubjectFiles {
  std::string subject_id;
  TimeSeries target;
  std::optional<TimeSeries> reference;
  ReviewerMarks marks;
};

/// Subject directories (those holding target.csv), sorted by name.
std::vector<std::string> list_subjects(const std::string& corpus_dir);

SubjectFiles load_subject(const std::string& corpus_dir, const std::string& subject);

void write_subject(const std::string& corpus_dir, const SynthRecord& record, const Provenance& prov);

/// Generates and writes every subject of `cfg.synth`; also writes
/// truth_labels.csv (windows whose artifact mask exceeds 5%).
void generate_corpus(const RunConfig& cfg, const std::string& out_dir);

}  // namespace edaqa
