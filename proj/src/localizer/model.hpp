#pragma once

#include "mapper/semantic_map.hpp"
#include "tensor/checkpoint.hpp"
#include "tensor/ops.hpp"
#include "world/subgoal.hpp"

#include <optional>
#include <string>
#include <vector>

namespace taskgrid::localizer {

using tensor::Tensor;

enum class AttentionRoles {
    Prose,   // map cells query, instruction gives keys and values
    Eq2,     // instruction queries, map cells give keys and values
};

struct LocalizerConfig {
    int d = 32;
    int conv_channels = 16;
    int height = 24;
    int width = 24;
    bool use_graph = true;
    int graph_layers = 1;
    AttentionRoles roles = AttentionRoles::Prose;
    bool token_level = false;   // keep one instruction row per token
    int decoder_hidden = 0;     // 0: linear head
    std::uint64_t seed = 0;

    nlohmann::json to_json() const;
    static LocalizerConfig from_json(const nlohmann::json& j);
};

inline constexpr std::size_t kPositionFeatures = 6;

// Per-category features and per-cell inputs derived from one map.
struct MapEncoding {
    Tensor x_prime;       // C x d
    Tensor cell_features; // (H*W) x d, before category content and position
    Tensor membership;    // (H*W) x C, explored-gated category indicators
    Tensor position;      // (H*W) x kPositionFeatures
};

struct AttentionResult {
    Tensor weights;   // rows sum to 1
    Tensor output;
};

// Softmax(Q K^T / sqrt(d)) V, with d taken from Q's column count.
AttentionResult attention(const Tensor& q, const Tensor& k, const Tensor& v);

struct ForwardTrace {
    Tensor x_s;
    Tensor x_prime;
    Tensor e;
    Tensor x;
    Tensor tokens;
    Tensor q, k, v;
    Tensor weights;
    Tensor h;
    Tensor fused;    // (H*W) x d
    Tensor logits;   // (H*W) x 1
    Tensor probs;    // (H*W) x 1
};

struct Heatmap {
    int height = 0;
    int width = 0;
    std::vector<double> probs;   // row-major
    double at(world::Cell c) const { return probs[static_cast<std::size_t>(c.row * width + c.col)]; }
};

class LocalizerModel {
public:
    explicit LocalizerModel(LocalizerConfig config = {});

    const LocalizerConfig& config() const { return config_; }
    tensor::ParamMap& params() { return params_; }
    const tensor::ParamMap& params() const { return params_; }
    std::vector<Tensor> parameter_list() const;
    Tensor& param(const std::string& name) { return params_.at(name); }

    Tensor encode_instruction(const std::string& text) const;
    // C x d node features of an empty map: learned bias plus name embedding.
    Tensor category_embeddings() const;
    MapEncoding encode_map(const mapper::SemanticMap& map) const;
    Tensor correlation_graph(const Tensor& x_prime) const;
    Tensor graph_enhance(const Tensor& x_prime, const Tensor& e) const;
    Tensor cell_tokens(const MapEncoding& enc, const Tensor& x) const;
    // Fused per-cell representation for the configured attention roles.
    ForwardTrace cross_attend(ForwardTrace trace) const;
    Tensor decode(const Tensor& fused) const;

    ForwardTrace forward(const mapper::SemanticMap& map, const std::string& text) const;
    Heatmap predict(const mapper::SemanticMap& map, const std::string& text) const;

    void save(const std::string& path, const nlohmann::json& meta = {}) const;
    static LocalizerModel load(const std::string& path);

private:

    LocalizerConfig config_;
    tensor::ParamMap params_;
};

// Text fed to the localizer for a subgoal: verb, object words, sentence.
std::string localizer_text(const world::Subgoal& subgoal, const std::string& sentence);
// Step instruction the subgoal serves, or the goal statement.
std::string subgoal_sentence(const world::TaskSpec& task, const world::Subgoal& subgoal);

// Argmax over explored cells, lowest row-major index on ties; nullopt when
// the best explored probability is below tau.
std::optional<world::Cell> select_target(const Heatmap& heatmap, const mapper::SemanticMap& map, double tau = 0.2);

} // namespace taskgrid::localizer
