#pragma once

#include <string>

#include <json.hpp>

#include "edaqa/config.hpp"
#include "edaqa/model_selection.hpp"

namespace edaqa {

inline constexpr int kModelFormatVersion = 1;

/// Versioned model file: classifier, column subset, scaler and parameters.
nlohmann::json model_to_json(const TrainedClassifier& model, const Provenance& prov);
/// `feature_map_version` receives the version the model was trained with.
TrainedClassifier model_from_json(const nlohmann::json& j, int* feature_map_version = nullptr);

void save_model(const TrainedClassifier& model, const Provenance& prov, const std::string& path);
TrainedClassifier load_model(const std::string& path, int* feature_map_version = nullptr);

nlohmann::json report_to_json(const EvalReport& report);
/// Flat per-fold rows: method,held_out,accuracy,balanced_accuracy,tp,tn,fp,fn,n_train,n_test,...
std::string report_folds_csv(const std::vector<EvalReport>& reports, const Provenance& prov);

}  // namespace edaqa
