#pragma once

#include "localizer/dataset.hpp"
#include "localizer/model.hpp"
#include "tensor/adamw.hpp"

#include <functional>
#include <stdexcept>

namespace taskgrid::localizer {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 4;
    double lr = 5e-4;
    double weight_decay = 0.01;
    double decay_factor = 0.5;
    int decay_every_epochs = 5;
    std::uint64_t seed = 0;
};

struct EpochLog {
    int epoch = 0;
    double loss = 0.0;
};

class DatasetError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Mean per-cell BCE between the predicted heatmap and the gt mask.
tensor::Tensor sample_loss(const LocalizerModel& model, const TrainSample& sample);

// Minimises the mean BCE over the dataset with AdamW; deterministic for a
// fixed seed. `on_epoch` sees the mean training loss of each epoch.
std::vector<EpochLog> train(LocalizerModel& model, const std::vector<TrainSample>& dataset, const TrainConfig& config,
                            const std::function<void(const EpochLog&)>& on_epoch = {});

struct EvalSummary {
    int samples = 0;
    int hits = 0;           // argmax within Chebyshev 1 of a gt cell
    double mean_loss = 0.0;
    double hit_rate() const { return samples ? static_cast<double>(hits) / samples : 0.0; }
};

EvalSummary evaluate(const LocalizerModel& model, const std::vector<TrainSample>& samples);

// Brute-force baseline: the mapped instance of the target category nearest
// to the agent.
EvalSummary evaluate_nearest_instance(const std::vector<TrainSample>& samples);

} // namespace taskgrid::localizer
