#include "edaqa/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <limits>

#include "edaqa/parallel.hpp"

namespace fs = std::filesystem;

namespace edaqa {

std::vector<std::string> list_subjects(const std::string& corpus_dir) {
  if (!fs::is_directory(corpus_dir)) throw DataError("corpus directory " + corpus_dir + " does not exist");
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(corpus_dir)) {
    if (e.is_directory() && fs::exists(e.path() / "target.csv")) out.push_back(e.path().filename().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

SubjectFiles load_subject(const std::string& corpus_dir, const std::string& subject) {
  const fs::path dir = fs::path(corpus_dir) / subject;
  auto sidecar = [&](const char* name) -> std::optional<std::string> {
    const fs::path p = dir / name;
    if (fs::exists(p)) return p.string();
    return std::nullopt;
  };
  SubjectFiles s;
  s.subject_id = subject;
  s.target = read_signal((dir / "target.csv").string(), sidecar("target.json"));
  if (s.target.subject_id.empty()) s.target.subject_id = subject;
  if (fs::exists(dir / "reference.csv")) {
    s.reference = read_signal((dir / "reference.csv").string(), sidecar("reference.json"));
    if (s.reference->subject_id.empty()) s.reference->subject_id = subject;
  }
  if (fs::exists(dir / "reviewer_marks.json")) s.marks = read_marks((dir / "reviewer_marks.json").string());
  return s;
}

void write_subject(const std::string& corpus_dir, const SynthRecord& record, const Provenance& prov) {
  const fs::path dir = fs::path(corpus_dir) / record.target.subject_id;
  fs::create_directories(dir);
  write_signal(record.target, (dir / "target.csv").string(), (dir / "target.json").string(), prov);
  write_signal(record.reference, (dir / "reference.csv").string(), (dir / "reference.json").string(), prov);
  write_mask_csv(record.artifact_mask, record.target.fs, (dir / "mask.csv").string(), prov);
  write_events_json(record.events, (dir / "events.json").string(), prov);
}

void generate_corpus(const RunConfig& cfg, const std::string& out_dir) {
  cfg.synth.check();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError("cannot create " + out_dir + ": " + ec.message());
  const Provenance prov = Provenance::of(cfg);
  const auto n = static_cast<std::size_t>(cfg.synth.n_subjects);
  std::vector<std::vector<LabelRow>> truth(n);
  parallel_for(n, [&](std::size_t i) {
    const SynthRecord rec = gen_subject(cfg.synth, static_cast<int>(i));
    write_subject(out_dir, rec, prov);
    const auto labels = mask_to_truth_labels(rec, cfg.features.win_sec);
    for (std::size_t w = 0; w < labels.size(); ++w) {
      truth[i].push_back({rec.target.subject_id, w, std::numeric_limits<double>::quiet_NaN(), labels[w]});
    }
  });
  std::vector<LabelRow> all;
  for (auto& t : truth) all.insert(all.end(), t.begin(), t.end());
  write_labels_csv(all, (fs::path(out_dir) / "truth_labels.csv").string(), prov, "mask");
}

}  // namespace edaqa
