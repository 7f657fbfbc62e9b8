#pragma once

#include "localizer/train.hpp"

#include <nlohmann/json.hpp>
#include <vector>

namespace taskgrid::harness {

struct TrainingRun {
    localizer::TrainConfig config;
    double holdout_fraction = 0.2;

    static TrainingRun from_json(const nlohmann::json& j);
};

struct TrainingReport {
    int train_samples = 0;
    int heldout_samples = 0;
    std::vector<localizer::EpochLog> epochs;
    localizer::EvalSummary heldout;
    localizer::EvalSummary baseline;   // nearest mapped instance on the same held-out set

    nlohmann::json to_json() const;
};

// Splits by scene: the scenes with the largest seeds (holdout_fraction of
// them) are held out, so no map of a held-out scene is trained on.
void split_by_scene(const std::vector<localizer::TrainSample>& all, double holdout_fraction,
                    std::vector<localizer::TrainSample>& train, std::vector<localizer::TrainSample>& heldout);

TrainingReport train_localizer(localizer::LocalizerModel& model, const std::vector<localizer::TrainSample>& samples,
                               const TrainingRun& run,
                               const std::function<void(const localizer::EpochLog&)>& on_epoch = {});

} // namespace taskgrid::harness
