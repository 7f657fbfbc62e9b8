#include "localizer/train.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <random>

namespace taskgrid::localizer {

using namespace tensor;

namespace {

bool near_gt(const TrainSample& s, world::Cell c) {
    return std::any_of(s.gt_cells.begin(), s.gt_cells.end(), [&](world::Cell g) { return world::chebyshev(g, c) <= 1; });
}

// Argmax over explored cells with no confidence threshold.
std::optional<world::Cell> argmax(const Heatmap& h, const mapper::SemanticMap& map) {
    return select_target(h, map, -1.0);
}

} // namespace

Tensor sample_loss(const LocalizerModel& model, const TrainSample& sample) {
    const ForwardTrace tr = model.forward(sample.map, sample.text);
    const auto mask = gt_mask(sample);
    return bce_loss(tr.probs, Tensor::from({mask.size(), 1}, mask));
}

std::vector<EpochLog> train(LocalizerModel& model, const std::vector<TrainSample>& dataset, const TrainConfig& config,
                            const std::function<void(const EpochLog&)>& on_epoch) {
    if (dataset.empty()) throw DatasetError("empty-dataset: nothing to train on");
    const std::size_t batch = static_cast<std::size_t>(std::max(1, config.batch_size));
    const std::size_t steps_per_epoch = (dataset.size() + batch - 1) / batch;
    AdamWConfig opt_config;
    opt_config.lr = config.lr;
    opt_config.weight_decay = config.weight_decay;
    opt_config.decay_factor = config.decay_factor;
    opt_config.decay_interval = config.decay_every_epochs > 0
                                    ? steps_per_epoch * static_cast<std::size_t>(config.decay_every_epochs)
                                    : 0;
    AdamW opt(model.parameter_list(), opt_config);
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<EpochLog> log;
    for (int epoch = 1; epoch <= config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
        }
        double total = 0.0;
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + batch);
            opt.zero_grad();
            for (std::size_t j = start; j < end; ++j) {
                Tensor loss = scale(sample_loss(model, dataset[order[j]]), 1.0 / static_cast<double>(end - start));
                total += loss.item() * static_cast<double>(end - start);
                loss.backward();
            }
            opt.step();
        }
        EpochLog e{epoch, total / static_cast<double>(dataset.size())};
        log.push_back(e);
        if (on_epoch) on_epoch(e);
    }
    return log;
}

EvalSummary evaluate(const LocalizerModel& model, const std::vector<TrainSample>& samples) {
    NoGradGuard guard;
    EvalSummary s;
    double total = 0.0;
    for (const auto& sample : samples) {
        const ForwardTrace tr = model.forward(sample.map, sample.text);
        const auto mask = gt_mask(sample);
        total += bce_loss(tr.probs, Tensor::from({mask.size(), 1}, mask)).item();
        Heatmap h{sample.map.height(), sample.map.width(), {tr.probs.values().begin(), tr.probs.values().end()}};
        const auto best = argmax(h, sample.map);
        ++s.samples;
        if (best && near_gt(sample, *best)) ++s.hits;
    }
    s.mean_loss = samples.empty() ? 0.0 : total / static_cast<double>(samples.size());
    return s;
}

EvalSummary evaluate_nearest_instance(const std::vector<TrainSample>& samples) {
    EvalSummary s;
    for (const auto& sample : samples) {
        ++s.samples;
        const auto cells = sample.map.cells_of(sample.subgoal.object);
        if (cells.empty()) continue;
        const world::Cell a = sample.map.agent().cell;
        const auto best = std::min_element(cells.begin(), cells.end(), [&](world::Cell x, world::Cell y) {
            return std::abs(x.row - a.row) + std::abs(x.col - a.col) < std::abs(y.row - a.row) + std::abs(y.col - a.col);
        });
        if (near_gt(sample, *best)) ++s.hits;
    }
    return s;
}

} // namespace taskgrid::localizer
