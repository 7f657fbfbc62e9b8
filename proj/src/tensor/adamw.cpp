#include "tensor/adamw.hpp"

#include <cmath>

namespace taskgrid::tensor {

AdamW::AdamW(std::vector<Tensor> params, AdamWConfig config)
    : params_(std::move(params)), config_(config) {
    m_.reserve(params_.size());
    v_.reserve(params_.size());
    for (const auto& p : params_) {
        m_.emplace_back(p.size(), 0.0);
        v_.emplace_back(p.size(), 0.0);
    }
}

double AdamW::current_lr() const {
    if (config_.decay_interval == 0) return config_.lr;
    const auto k = static_cast<double>(steps_ / config_.decay_interval);
    return config_.lr * std::pow(config_.decay_factor, k);
}

void AdamW::step() {
    const double lr = current_lr();
    ++steps_;
    const double t = static_cast<double>(steps_);
    const double bias1 = 1.0 - std::pow(config_.beta1, t);
    const double bias2 = 1.0 - std::pow(config_.beta2, t);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        auto& p = params_[i];
        if (!p.has_grad()) continue;
        auto w = p.mutable_values();
        auto g = p.grad();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < w.size(); ++j) {
            w[j] *= 1.0 - lr * config_.weight_decay;
            m[j] = config_.beta1 * m[j] + (1.0 - config_.beta1) * g[j];
            v[j] = config_.beta2 * v[j] + (1.0 - config_.beta2) * g[j] * g[j];
            const double m_hat = m[j] / bias1;
            const double v_hat = v[j] / bias2;
            w[j] -= lr * m_hat / (std::sqrt(v_hat) + config_.eps);
        }
    }
}

void AdamW::zero_grad() {
    for (auto& p : params_) {
        if (p.has_grad()) p.zero_grad();
    }
}

} // namespace taskgrid::tensor
