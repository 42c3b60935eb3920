#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "vasum/dataset.hpp"
#include "vasum/evaluation.hpp"
#include "vasum/training.hpp"

namespace vasum {

using ordered_json = nlohmann::ordered_json;

ordered_json to_json(const SplitConfig& splits);
SplitConfig split_config_from_json(const ordered_json& j);

ordered_json to_json(const Hyperparameters& hyper);
ordered_json to_json(const ModelConfig& config);

// Per-fold training report: loss/F arrays, best epoch, hyperparameters.
ordered_json train_report_json(const TrainReport& report, const TrainOptions& options,
                               std::size_t fold);

// One results cell: method x dataset x setting, plus per-fold detail.
ordered_json results_json(const EvalResult& result, const std::string& method);

// video,fold,precision,recall,f
std::string per_video_csv(const EvalResult& result);

}  // namespace vasum
