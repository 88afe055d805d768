#include "edaqa/model_io.hpp"

#include <sstream>

#include "edaqa/features.hpp"
#include "edaqa/io.hpp"

namespace edaqa {

using nlohmann::json;

namespace {

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec json_vec(const json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json mat_json(const Mat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index k = 0; k < m.cols(); ++k) r[static_cast<std::size_t>(k)] = m(i, k);
    rows.push_back(r);
  }
  return rows;
}

Mat json_mat(const json& j, Eigen::Index cols) {
  Mat m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto r = j[i].get<std::vector<double>>();
    if (static_cast<Eigen::Index>(r.size()) != cols) throw DataError("model: ragged matrix");
    for (Eigen::Index k = 0; k < cols; ++k) m(static_cast<Eigen::Index>(i), k) = r[static_cast<std::size_t>(k)];
  }
  return m;
}

json params_json(const HyperParams& p) {
  return {{"C", p.C}, {"gamma", p.gamma}, {"knn_k", p.knn_k}, {"rf_max_features", p.rf_max_features}};
}

HyperParams json_params(const json& j) {
  HyperParams p;
  p.C = j.at("C").get<double>();
  p.gamma = j.at("gamma").get<double>();
  p.knn_k = j.at("knn_k").get<int>();
  p.rf_max_features = j.at("rf_max_features").get<int>();
  return p;
}

}  // namespace

json model_to_json(const TrainedClassifier& m, const Provenance& prov) {
  json j;
  j["format"] = "edaqa-model";
  j["format_version"] = kModelFormatVersion;
  j["feature_map_version"] = kFeatureMapVersion;
  j["provenance"] = prov.to_json();
  j["classifier"] = to_string(m.kind);
  j["params"] = params_json(m.params);
  j["features"] = m.features;
  j["input_dim"] = m.input_dim;
  j["standardized"] = m.standardized;
  if (m.standardized) j["standardizer"] = {{"mean", vec_json(m.scaler.mean)}, {"stddev", vec_json(m.scaler.stddev)}};
  switch (m.kind) {
    case ClassifierKind::RandomForest: {
      json trees = json::array();
      for (const auto& t : m.rf.trees) {
        json counts = json::array();
        for (const auto& c : t.counts) counts.push_back({c[0], c[1]});
        trees.push_back({{"feature", t.feature}, {"threshold", t.threshold}, {"left", t.left}, {"right", t.right},
                         {"counts", counts}});
      }
      j["forest"] = {{"n_features", m.rf.n_features}, {"max_features", m.rf.max_features}, {"seed", m.rf.seed},
                     {"single_class", m.rf.single_class}, {"importance", vec_json(m.rf.importance)},
                     {"trees", trees}};
      break;
    }
    case ClassifierKind::Svm:
      j["svm"] = {{"kernel", m.svm.params.kernel == Kernel::Rbf ? "rbf" : "linear"},
                  {"C", m.svm.params.C},
                  {"gamma", m.svm.params.gamma},
                  {"tol", m.svm.params.tol},
                  {"bias", m.svm.bias},
                  {"converged", m.svm.converged},
                  {"dual_coef", vec_json(m.svm.dual_coef)},
                  {"support_vectors", mat_json(m.svm.support_vectors)}};
      break;
    case ClassifierKind::Knn:
      j["knn"] = {{"X", mat_json(m.knn_X)},
                  {"y", std::vector<int>(m.knn_y.data(), m.knn_y.data() + m.knn_y.size())}};
      break;
  }
  return j;
}

TrainedClassifier model_from_json(const json& j, int* feature_map_version) {
  try {
    if (j.at("format").get<std::string>() != "edaqa-model") throw DataError("not an edaqa model file");
    if (j.at("format_version").get<int>() != kModelFormatVersion) {
      throw DataError("unsupported model format version " + std::to_string(j.at("format_version").get<int>()));
    }
    if (feature_map_version) *feature_map_version = j.at("feature_map_version").get<int>();
    TrainedClassifier m;
    m.kind = classifier_from_string(j.at("classifier").get<std::string>());
    m.params = json_params(j.at("params"));
    m.features = j.at("features").get<std::vector<int>>();
    m.input_dim = j.at("input_dim").get<int>();
    m.standardized = j.at("standardized").get<bool>();
    if (m.standardized) {
      m.scaler.mean = json_vec(j.at("standardizer").at("mean"));
      m.scaler.stddev = json_vec(j.at("standardizer").at("stddev"));
    }
    const auto k = static_cast<Eigen::Index>(m.features.size());
    switch (m.kind) {
      case ClassifierKind::RandomForest: {
        const json& f = j.at("forest");
        m.rf.n_features = f.at("n_features").get<int>();
        m.rf.max_features = f.at("max_features").get<int>();
        m.rf.seed = f.at("seed").get<std::uint64_t>();
        m.rf.single_class = f.at("single_class").get<bool>();
        m.rf.importance = json_vec(f.at("importance"));
        for (const auto& t : f.at("trees")) {
          DecisionTree tree;
          tree.feature = t.at("feature").get<std::vector<int>>();
          tree.threshold = t.at("threshold").get<std::vector<double>>();
          tree.left = t.at("left").get<std::vector<int>>();
          tree.right = t.at("right").get<std::vector<int>>();
          for (const auto& c : t.at("counts")) tree.counts.push_back({c.at(0).get<int>(), c.at(1).get<int>()});
          m.rf.trees.push_back(std::move(tree));
        }
        break;
      }
      case ClassifierKind::Svm: {
        const json& s = j.at("svm");
        m.svm.params.kernel = s.at("kernel").get<std::string>() == "rbf" ? Kernel::Rbf : Kernel::Linear;
        m.svm.params.C = s.at("C").get<double>();
        m.svm.params.gamma = s.at("gamma").get<double>();
        m.svm.params.tol = s.at("tol").get<double>();
        m.svm.bias = s.at("bias").get<double>();
        m.svm.converged = s.at("converged").get<bool>();
        m.svm.dual_coef = json_vec(s.at("dual_coef"));
        m.svm.support_vectors = json_mat(s.at("support_vectors"), k);
        break;
      }
      case ClassifierKind::Knn: {
        const json& n = j.at("knn");
        m.knn_X = json_mat(n.at("X"), k);
        const auto y = n.at("y").get<std::vector<int>>();
        m.knn_y = Eigen::Map<const Labels>(y.data(), static_cast<Eigen::Index>(y.size()));
        break;
      }
    }
    return m;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  } catch (const RejectedInput& e) {
    throw DataError(std::string("malformed model file: ") + e.what());
  }
}

void save_model(const TrainedClassifier& model, const Provenance& prov, const std::string& path) {
  write_text(path, model_to_json(model, prov).dump() + "\n");
}

TrainedClassifier load_model(const std::string& path, int* feature_map_version) {
  json j;
  try {
    j = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw DataError(path + " is not valid JSON: " + e.what());
  }
  return model_from_json(j, feature_map_version);
}

json report_to_json(const EvalReport& r) {
  json folds = json::array();
  for (const auto& f : r.folds) {
    std::vector<std::string> names;
    for (int i : f.selected) names.emplace_back(feature_names()[static_cast<std::size_t>(i)]);
    folds.push_back({{"held_out", f.held_out},
                     {"accuracy", f.accuracy},
                     {"balanced_accuracy", f.balanced_accuracy},
                     {"confusion", {{"tp", f.counts.tp}, {"tn", f.counts.tn}, {"fp", f.counts.fp}, {"fn", f.counts.fn}}},
                     {"selected_features", f.selected},
                     {"selected_feature_names", names},
                     {"params", params_json(f.params)},
                     {"grid_points", f.grid_points},
                     {"n_train", f.n_train},
                     {"n_test", f.n_test},
                     {"audit_rows", {{"standardizer", f.audit.standardizer.size()},
                                     {"selection", f.audit.selection.size()},
                                     {"grid_search", f.audit.grid_search.size()},
                                     {"final_fit", f.audit.final_fit.size()}}}});
  }
  return {{"method", r.method},
          {"classifier", to_string(r.kind)},
          {"selection", r.selection},
          {"mean_accuracy", r.mean_accuracy},
          {"std_accuracy", r.std_accuracy},
          {"mean_balanced_accuracy", r.mean_balanced_accuracy},
          {"selection_counts", r.selection_counts},
          {"folds", folds}};
}

std::string report_folds_csv(const std::vector<EvalReport>& reports, const Provenance& prov) {
  std::ostringstream os;
  os << prov.csv_comment() << "\nmethod,held_out,accuracy,balanced_accuracy,tp,tn,fp,fn,n_train,n_test,C,gamma,knn_k,n_selected\n";
  for (const auto& r : reports) {
    for (const auto& f : r.folds) {
      os << r.method << ',' << f.held_out << ',' << format_real(f.accuracy) << ',' << format_real(f.balanced_accuracy)
         << ',' << f.counts.tp << ',' << f.counts.tn << ',' << f.counts.fp << ',' << f.counts.fn << ',' << f.n_train
         << ',' << f.n_test << ',' << format_real(f.params.C) << ',' << format_real(f.params.gamma) << ','
         << f.params.knn_k << ',' << f.selected.size() << '\n';
    }
  }
  return os.str();
}

}  // namespace edaqa
