#include "harness/training.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace taskgrid::harness {

using namespace localizer;

TrainingRun TrainingRun::from_json(const nlohmann::json& j) {
    TrainingRun r;
    r.config.epochs = j.value("epochs", r.config.epochs);
    r.config.batch_size = j.value("batch_size", r.config.batch_size);
    r.config.lr = j.value("lr", r.config.lr);
    r.config.weight_decay = j.value("weight_decay", r.config.weight_decay);
    r.config.decay_factor = j.value("decay_factor", r.config.decay_factor);
    r.config.decay_every_epochs = j.value("decay_every_epochs", r.config.decay_every_epochs);
    r.config.seed = j.value("seed", r.config.seed);
    r.holdout_fraction = j.value("holdout_fraction", r.holdout_fraction);
    return r;
}

nlohmann::json TrainingReport::to_json() const {
    nlohmann::json losses = nlohmann::json::array();
    for (const auto& e : epochs) losses.push_back(e.loss);
    return {{"train_samples", train_samples},
            {"heldout_samples", heldout_samples},
            {"epoch_loss", losses},
            {"heldout_hit_rate", heldout.hit_rate()},
            {"heldout_loss", heldout.mean_loss},
            {"baseline_hit_rate", baseline.hit_rate()}};
}

void split_by_scene(const std::vector<TrainSample>& all, double holdout_fraction, std::vector<TrainSample>& train,
                    std::vector<TrainSample>& heldout) {
    std::set<std::pair<std::uint64_t, int>> scenes;
    for (const auto& s : all) scenes.insert({s.scene_seed, static_cast<int>(s.room)});
    const auto held = static_cast<std::size_t>(std::lround(holdout_fraction * static_cast<double>(scenes.size())));
    std::set<std::pair<std::uint64_t, int>> out_set;
    auto it = scenes.rbegin();
    for (std::size_t i = 0; i < held && it != scenes.rend(); ++i, ++it) out_set.insert(*it);
    for (const auto& s : all) {
        (out_set.count({s.scene_seed, static_cast<int>(s.room)}) ? heldout : train).push_back(s);
    }
}

TrainingReport train_localizer(LocalizerModel& model, const std::vector<TrainSample>& samples, const TrainingRun& run,
                               const std::function<void(const EpochLog&)>& on_epoch) {
    std::vector<TrainSample> train_set;
    std::vector<TrainSample> heldout;
    split_by_scene(samples, run.holdout_fraction, train_set, heldout);
    TrainingReport report;
    report.train_samples = static_cast<int>(train_set.size());
    report.heldout_samples = static_cast<int>(heldout.size());
    report.epochs = train(model, train_set, run.config, on_epoch);
    report.heldout = evaluate(model, heldout);
    report.baseline = evaluate_nearest_instance(heldout);
    return report;
}

} // namespace taskgrid::harness
