#include "edaqa/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace edaqa {

using nlohmann::json;

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && s[i] == ' ') ++i;
  return s.substr(i);
}

double parse_real(const std::string& s, const std::string& where) {
  if (s.empty() || s == "nan") return std::numeric_limits<double>::quiet_NaN();
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": cannot parse number '" + s + "'");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot open " + path + " for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path);
  return is;
}

// Reads non-comment lines; the first is the header. Comment lines are
// returned through `comments`.
std::vector<std::vector<std::string>> read_csv(const std::string& path, std::vector<std::string>& header,
                                               std::vector<std::string>* comments = nullptr) {
  std::ifstream is = open_in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool have_header = false;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (comments) comments->push_back(line);
      continue;
    }
    auto cells = split(line);
    for (auto& c : cells) c = trim(c);
    if (!have_header) {
      header = std::move(cells);
      have_header = true;
    } else {
      if (cells.size() != header.size()) {
        throw DataError(path + ": row " + std::to_string(rows.size() + 1) + " has " + std::to_string(cells.size()) +
                        " fields, header has " + std::to_string(header.size()));
      }
      rows.push_back(std::move(cells));
    }
  }
  if (!have_header) throw DataError(path + ": missing header row");
  return rows;
}

int column(const std::vector<std::string>& header, const std::string& name, const std::string& path) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  throw DataError(path + ": missing column '" + name + "'");
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  auto os = open_out(path);
  os << text;
}

std::string read_text(const std::string& path) {
  auto is = open_in(path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_signal(const TimeSeries& ts, const std::string& csv_path, const std::string& meta_path,
                  const Provenance& prov) {
  validate(ts);
  {
    auto os = open_out(csv_path);
    os << prov.csv_comment() << "\nt,eda\n";
    char buf[64];
    for (Eigen::Index k = 0; k < ts.samples.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.6f,%.12g\n", ts.t0 + static_cast<double>(k) / ts.fs, ts.samples(k));
      os << buf;
    }
  }
  json meta = {{"subject_id", ts.subject_id}, {"channel", to_string(ts.channel)}, {"fs", ts.fs},
               {"provenance", prov.to_json()}};
  write_text(meta_path, meta.dump(2) + "\n");
}

TimeSeries read_signal(const std::string& csv_path, const std::optional<std::string>& meta_path) {
  std::vector<std::string> header;
  const auto rows = read_csv(csv_path, header);
  const int ct = column(header, "t", csv_path);
  const int ce = column(header, "eda", csv_path);
  TimeSeries ts;
  ts.samples.resize(static_cast<Eigen::Index>(rows.size()));
  std::vector<double> t(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    t[i] = parse_real(rows[i][static_cast<std::size_t>(ct)], csv_path);
    ts.samples(static_cast<Eigen::Index>(i)) = parse_real(rows[i][static_cast<std::size_t>(ce)], csv_path);
  }
  double fs = 0.0;
  if (meta_path) {
    json meta;
    try {
      meta = json::parse(read_text(*meta_path));
      ts.subject_id = meta.at("subject_id").get<std::string>();
      ts.channel = channel_from_string(meta.at("channel").get<std::string>());
      fs = meta.at("fs").get<double>();
    } catch (const json::exception& e) {
      throw DataError(*meta_path + ": bad signal metadata: " + e.what());
    }
  } else if (rows.size() >= 2) {
    fs = 1.0 / (t[1] - t[0]);
  }
  if (!(fs > 0.0) && rows.size() >= 2) throw DataError(csv_path + ": cannot determine a positive sampling rate");
  ts.fs = fs > 0.0 ? fs : 8.0;
  ts.t0 = rows.empty() ? 0.0 : t[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    const double expected = ts.t0 + static_cast<double>(i) / ts.fs;
    if (!(t[i] > t[i - 1]) || std::abs(t[i] - expected) > 1e-6 + 1e-12 * std::abs(expected)) {
      throw DataError(csv_path + ": time column not uniform at row " + std::to_string(i + 1));
    }
  }
  try {
    validate(ts);
  } catch (const RejectedInput& e) {
    throw DataError(csv_path + ": " + e.what());
  }
  return ts;
}

ReviewerMarks read_marks(const std::string& path) {
  ReviewerMarks marks;
  try {
    const json j = json::parse(read_text(path));
    if (!j.is_array()) throw DataError(path + ": reviewer marks must be a JSON list");
    for (const auto& e : j) {
      const int reviewer = e.at("reviewer").get<int>();
      if (reviewer < 1 || reviewer > ReviewerMarks::kReviewers) {
        throw DataError(path + ": reviewer must be 1, 2 or 3");
      }
      TimeSpan s{e.at("start_s").get<double>(), e.at("end_s").get<double>()};
      if (!(s.end > s.start)) throw DataError(path + ": interval end must exceed start");
      marks.intervals[static_cast<std::size_t>(reviewer - 1)].push_back(s);
    }
  } catch (const json::exception& e) {
    throw DataError(path + ": bad reviewer marks: " + e.what());
  }
  return marks;
}

void write_marks(const ReviewerMarks& marks, const std::string& path) {
  json j = json::array();
  for (int r = 0; r < ReviewerMarks::kReviewers; ++r) {
    for (const auto& s : marks.intervals[static_cast<std::size_t>(r)]) {
      j.push_back({{"reviewer", r + 1}, {"start_s", s.start}, {"end_s", s.end}});
    }
  }
  write_text(path, j.dump(2) + "\n");
}

void write_labels_csv(const std::vector<LabelRow>& rows, const std::string& path, const Provenance& prov,
                      const std::string& method) {
  auto os = open_out(path);
  os << prov.csv_comment() << "\nsubject_id,window_index,r,label" << (method.empty() ? "" : ",method") << "\n";
  for (const auto& r : rows) {
    os << r.subject_id << ',' << r.window_index << ',' << format_real(r.r) << ',' << to_string(r.label);
    if (!method.empty()) os << ',' << method;
    os << '\n';
  }
}

std::vector<LabelRow> read_labels_csv(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, header);
  const auto cs = static_cast<std::size_t>(column(header, "subject_id", path));
  const auto cw = static_cast<std::size_t>(column(header, "window_index", path));
  const auto cr = static_cast<std::size_t>(column(header, "r", path));
  const auto cl = static_cast<std::size_t>(column(header, "label", path));
  std::vector<LabelRow> out;
  for (const auto& row : rows) {
    LabelRow r;
    r.subject_id = row[cs];
    r.window_index = static_cast<std::size_t>(parse_real(row[cw], path));
    r.r = parse_real(row[cr], path);
    try {
      r.label = label_from_string(row[cl]);
    } catch (const RejectedInput& e) {
      throw DataError(path + ": " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

void write_features_csv(const std::vector<FeatureVector>& rows, const std::string& path, const Provenance& prov) {
  auto os = open_out(path);
  os << prov.csv_comment() << '\n';
  for (const auto& name : feature_names()) os << name << ',';
  os << "subject_id,window_index,label\n";
  for (const auto& fv : rows) {
    for (int i = 0; i < kFeatureCount; ++i) os << format_real(fv.values(i)) << ',';
    os << fv.subject_id << ',' << fv.window_index << ',' << to_string(fv.label) << '\n';
  }
}

std::vector<FeatureVector> read_features_csv(const std::string& path, int* feature_map_version) {
  std::vector<std::string> header, comments;
  const auto rows = read_csv(path, header, &comments);
  int version = 0;
  for (const auto& c : comments) {
    const auto pos = c.find("feature_map=");
    if (pos != std::string::npos) version = std::atoi(c.c_str() + pos + 12);
  }
  if (feature_map_version) *feature_map_version = version;
  std::vector<std::size_t> cols;
  for (const auto& name : feature_names()) cols.push_back(static_cast<std::size_t>(column(header, std::string(name), path)));
  const auto cs = static_cast<std::size_t>(column(header, "subject_id", path));
  const auto cw = static_cast<std::size_t>(column(header, "window_index", path));
  const auto cl = static_cast<std::size_t>(column(header, "label", path));
  std::vector<FeatureVector> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    FeatureVector fv;
    for (int i = 0; i < kFeatureCount; ++i) {
      fv.values(i) = parse_real(row[cols[static_cast<std::size_t>(i)]], path);
      if (!std::isfinite(fv.values(i))) {
        throw DataError(path + ": non-finite feature " + std::string(feature_names()[static_cast<std::size_t>(i)]) +
                        " for " + row[cs] + " window " + row[cw]);
      }
    }
    fv.subject_id = row[cs];
    fv.window_index = static_cast<std::size_t>(parse_real(row[cw], path));
    try {
      fv.label = label_from_string(row[cl]);
    } catch (const RejectedInput& e) {
      throw DataError(path + ": " + e.what());
    }
    out.push_back(std::move(fv));
  }
  return out;
}

void write_mask_csv(const std::vector<bool>& mask, double fs, const std::string& path, const Provenance& prov) {
  auto os = open_out(path);
  os << prov.csv_comment() << "\nt,masked\n";
  char buf[48];
  for (std::size_t k = 0; k < mask.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.6f,%d\n", static_cast<double>(k) / fs, mask[k] ? 1 : 0);
    os << buf;
  }
}

std::vector<bool> read_mask_csv(const std::string& path) {
  std::vector<std::string> header;
  const auto rows = read_csv(path, header);
  const auto cm = static_cast<std::size_t>(column(header, "masked", path));
  std::vector<bool> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r[cm] == "1");
  return out;
}

void write_events_json(const std::vector<ArtifactEvent>& events, const std::string& path, const Provenance& prov) {
  json list = json::array();
  for (const auto& e : events) {
    list.push_back({{"type", to_string(e.type)}, {"onset_s", e.onset}, {"duration_s", e.duration},
                    {"magnitude", e.magnitude}});
  }
  json j = {{"provenance", prov.to_json()}, {"events", list}};
  write_text(path, j.dump(2) + "\n");
}

}  // namespace edaqa
