#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "edaqa_cli_test";

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args) {
  const fs::path log = kRoot / "last.log";
  const std::string cmd = std::string(EDAQA_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  std::ifstream is(log);
  std::stringstream ss;
  ss << is.rdbuf();
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, ss.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  os << text;
}

// Small corpus config: 3 subjects x 120 s with artifacts and a reduced grid.
std::string small_config() {
  nlohmann::json j = {{"seed", 5},
                      {"synth", {{"n_subjects", 3}, {"duration_s", 120.0},
                                 {"artifacts", {{"step", 1.0}, {"spike", 1.0}, {"burst", 0.5}}}}},
                      {"ml", {{"C_grid", {1.0, 10.0}}, {"gamma_grid", {0.01, 0.1}}, {"k_grid", {5, 52}},
                              {"rf_trees", 20}, {"selection_trees", 10}}}};
  return j.dump();
}

}  // namespace

TEST_CASE("cli end to end") {
  fs::remove_all(kRoot);
  fs::create_directories(kRoot);
  const fs::path cfg = kRoot / "cfg.json";
  write(cfg, small_config());
  write(kRoot / "empty.json", "{}");

  CHECK(run("").code == 2);
  CHECK(run("frobnicate").code == 2);
  CHECK(run("synth --out " + (kRoot / "x").string()).code == 2);
  CHECK(run("synth --config " + (kRoot / "empty.json").string() + " --out " + (kRoot / "x").string()).code == 2);
  write(kRoot / "broken.json", "{\"seed\": ");
  CHECK(run("label --config " + (kRoot / "broken.json").string() + " --corpus x --out y").code == 2);
  CHECK(run("config --preset nope").code == 2);

  const fs::path corpus = kRoot / "corpus";
  REQUIRE(run("synth --config " + cfg.string() + " --out " + corpus.string()).code == 0);
  int dirs = 0;
  for (const auto& e : fs::directory_iterator(corpus)) dirs += e.is_directory() ? 1 : 0;
  CHECK(dirs == 3);
  const fs::path again = kRoot / "corpus2";
  REQUIRE(run("synth --config " + cfg.string() + " --out " + again.string() + " --threads 3").code == 0);
  for (const char* f : {"S01/target.csv", "S02/reference.csv", "S03/mask.csv", "S03/events.json", "truth_labels.csv"}) {
    CHECK(slurp(corpus / f) == slurp(again / f));
  }
  CHECK(slurp(corpus / "S01/target.csv").rfind("# edaqa ", 0) == 0);

  const fs::path labels = kRoot / "labels.csv";
  const Run lab = run("label --config " + cfg.string() + " --corpus " + corpus.string() + " --out " + labels.string());
  REQUIRE(lab.code == 0);
  CHECK(lab.out.find("windows: 72") != std::string::npos);

  const fs::path feats = kRoot / "features.csv";
  REQUIRE(run("featurize --config " + cfg.string() + " --corpus " + corpus.string() + " --labels " + labels.string() +
              " --out " + feats.string())
              .code == 0);
  const fs::path rules = kRoot / "rules.csv";
  REQUIRE(run("baseline --config " + cfg.string() + " --corpus " + corpus.string() + " --out " + rules.string()).code == 0);

  const fs::path rep = kRoot / "eval";
  const Run ev = run("evaluate --config " + cfg.string() + " --features " + feats.string() + " --labels " +
                     labels.string() + " --rules " + rules.string() + " --out " + rep.string());
  REQUIRE(ev.code == 0);
  CHECK(ev.out.find("rules") != std::string::npos);
  const auto report = nlohmann::json::parse(slurp(rep / "report.json"));
  CHECK(report["leakage_audit"] == "pass");
  for (const auto& r : report["reports"]) {
    CHECK(r["folds"].size() == 3);
    double sum = 0;
    for (const auto& f : r["folds"]) sum += f["accuracy"].get<double>();
    CHECK(r["mean_accuracy"].get<double>() == doctest::Approx(sum / 3).epsilon(1e-12));
  }
  CHECK(fs::exists(rep / "folds.csv"));
  CHECK(fs::exists(rep / "ttest.csv"));

  // single subject -> usage error
  std::string one_subject;
  {
    std::ifstream is(feats);
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty() || line[0] == '#' || line.find("ar_a1") == 0 || line.find(",S01,") != std::string::npos) {
        one_subject += line + "\n";
      }
    }
  }
  write(kRoot / "one.csv", one_subject);
  CHECK(run("evaluate --features " + (kRoot / "one.csv").string() + " --out " + (kRoot / "e1").string()).code == 2);

  const fs::path model = kRoot / "model.json";
  REQUIRE(run("train --config " + cfg.string() + " --features " + feats.string() + " --out " + model.string()).code == 0);
  const fs::path det = kRoot / "det.csv";
  const Run d = run("detect --model " + model.string() + " --signal " + (corpus / "S02/target.csv").string() + " --meta " +
                    (corpus / "S02/target.json").string() + " --out " + det.string());
  CHECK(d.code == 0);
  CHECK(d.out.find("windows: 24") != std::string::npos);

  write(kRoot / "empty.csv", "t,eda\n");
  const Run e = run("detect --model " + model.string() + " --signal " + (kRoot / "empty.csv").string() + " --out " +
                    (kRoot / "det_empty.csv").string());
  CHECK(e.code == 0);
  CHECK(e.out.find("windows: 0") != std::string::npos);

  auto mj = nlohmann::json::parse(slurp(model));
  mj["feature_map_version"] = 99;
  write(kRoot / "model99.json", mj.dump());
  const Run mis = run("detect --model " + (kRoot / "model99.json").string() + " --signal " +
                      (corpus / "S02/target.csv").string() + " --out " + (kRoot / "d99.csv").string());
  CHECK(mis.code == 3);
  CHECK(mis.out.find("99") != std::string::npos);
  CHECK(mis.out.find("version 1") != std::string::npos);

  // missing reference channel
  fs::copy(corpus, kRoot / "noref", fs::copy_options::recursive);
  fs::remove(kRoot / "noref/S02/reference.csv");
  const Run nr = run("label --corpus " + (kRoot / "noref").string() + " --out " + (kRoot / "nr.csv").string());
  CHECK(nr.code == 3);
  CHECK(nr.out.find("S02") != std::string::npos);

  // non-finite sample
  std::string target = slurp(corpus / "S01/target.csv");
  const auto pos = target.find('\n', target.find("t,eda")) + 1;
  const auto comma = target.find(',', pos);
  target.replace(comma + 1, target.find('\n', comma) - comma - 1, "inf");
  fs::copy(corpus, kRoot / "bad", fs::copy_options::recursive);
  write(kRoot / "bad/S01/target.csv", target);
  CHECK(run("label --corpus " + (kRoot / "bad").string() + " --out " + (kRoot / "b.csv").string()).code == 3);

  // marks covering everything plus an uncorrelated target -> all Discarded
  fs::copy(corpus, kRoot / "marked", fs::copy_options::recursive);
  nlohmann::json marks = nlohmann::json::array();
  for (int r = 1; r <= 3; ++r) marks.push_back({{"reviewer", r}, {"start_s", 0.0}, {"end_s", 120.0}});
  write(kRoot / "marked/S03/target.csv", slurp(corpus / "S01/target.csv"));
  write(kRoot / "marked/S03/reviewer_marks.json", marks.dump());
  const fs::path ml = kRoot / "marked.csv";
  REQUIRE(run("label --corpus " + (kRoot / "marked").string() + " --out " + ml.string()).code == 0);
  int s03 = 0, discarded = 0, clean_hi = 0;
  std::ifstream is(ml);
  std::string line;
  while (std::getline(is, line)) {
    if (line.rfind("S03,", 0) != 0) continue;
    ++s03;
    discarded += line.find("discarded") != std::string::npos ? 1 : 0;
    clean_hi += line.find("clean") != std::string::npos ? 1 : 0;
  }
  CHECK(s03 == 24);
  CHECK(discarded + clean_hi == 24);
  CHECK(discarded >= 20);
}
