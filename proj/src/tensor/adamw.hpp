#pragma once

#include "tensor/tensor.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace taskgrid::tensor {

struct AdamWConfig {
    double lr = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
    // lr is multiplied by decay_factor after every decay_interval steps;
    // an interval of 0 disables the schedule.
    double decay_factor = 0.5;
    std::size_t decay_interval = 0;
};

// AdamW with decoupled weight decay and a step-decay learning-rate schedule.
class AdamW {
public:
    AdamW(std::vector<Tensor> params, AdamWConfig config = {});

    void step();
    void zero_grad();

    std::size_t step_count() const { return steps_; }
    // Learning rate that the next step() will use.
    double current_lr() const;
    const AdamWConfig& config() const { return config_; }

private:
    std::vector<Tensor> params_;
    AdamWConfig config_;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
    std::size_t steps_ = 0;
};

} // namespace taskgrid::tensor
