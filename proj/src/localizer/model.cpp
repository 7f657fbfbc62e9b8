#include "localizer/model.hpp"

#include "localizer/tokenizer.hpp"

#include <cmath>
#include <random>

namespace taskgrid::localizer {

using namespace tensor;
using mapper::SemanticMap;

namespace {

constexpr std::size_t kC = world::kCategoryCount;

// 3x3 neighbourhood indices, row-major over (dr, dc), -1 outside the grid.
const std::vector<std::int64_t>& neighbourhood(int h, int w) {
    thread_local int cached_h = -1, cached_w = -1;
    thread_local std::vector<std::int64_t> idx;
    if (cached_h != h || cached_w != w) {
        idx.clear();
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                for (int dr = -1; dr <= 1; ++dr)
                    for (int dc = -1; dc <= 1; ++dc) {
                        const int rr = r + dr, cc = c + dc;
                        idx.push_back(rr < 0 || cc < 0 || rr >= h || cc >= w ? -1 : rr * w + cc);
                    }
        cached_h = h;
        cached_w = w;
    }
    return idx;
}

Tensor conv3x3(const Tensor& x, const Tensor& weight, const Tensor& bias, int h, int w) {
    return relu(add_row(matmul(gather_rows(x, neighbourhood(h, w), 9), weight), bias));
}

} // namespace

nlohmann::json LocalizerConfig::to_json() const {
    return {{"d", d},
            {"conv_channels", conv_channels},
            {"height", height},
            {"width", width},
            {"use_graph", use_graph},
            {"graph_layers", graph_layers},
            {"roles", roles == AttentionRoles::Prose ? "prose" : "eq2"},
            {"token_level", token_level},
            {"decoder_hidden", decoder_hidden},
            {"seed", seed}};
}

LocalizerConfig LocalizerConfig::from_json(const nlohmann::json& j) {
    LocalizerConfig c;
    c.d = j.value("d", c.d);
    c.conv_channels = j.value("conv_channels", c.conv_channels);
    c.height = j.value("height", c.height);
    c.width = j.value("width", c.width);
    c.use_graph = j.value("use_graph", c.use_graph);
    c.graph_layers = j.value("graph_layers", c.graph_layers);
    c.roles = j.value("roles", std::string("prose")) == "eq2" ? AttentionRoles::Eq2 : AttentionRoles::Prose;
    c.token_level = j.value("token_level", c.token_level);
    c.decoder_hidden = j.value("decoder_hidden", c.decoder_hidden);
    c.seed = j.value("seed", c.seed);
    return c;
}

AttentionResult attention(const Tensor& q, const Tensor& k, const Tensor& v) {
    const double inv = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    Tensor w = softmax_rows(scale(matmul(q, transpose(k)), inv));
    return {w, matmul(w, v)};
}

LocalizerModel::LocalizerModel(LocalizerConfig config) : config_(config) {
    std::mt19937_64 rng(config_.seed);
    const std::size_t d = static_cast<std::size_t>(config_.d);
    const std::size_t ch = static_cast<std::size_t>(config_.conv_channels);
    auto xavier = [&](const std::string& name, std::size_t rows, std::size_t cols, double gain = 1.0) {
        const double limit = gain * std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::uniform_real_distribution<double> u(-limit, limit);
        std::vector<double> v(rows * cols);
        for (double& x : v) x = u(rng);
        params_[name] = Tensor::from({rows, cols}, std::move(v), true);
    };
    auto zeros = [&](const std::string& name, std::size_t rows, std::size_t cols) {
        params_[name] = Tensor::zeros({rows, cols}, true);
    };
    xavier("map.proj", SemanticMap::kChannels, ch);
    zeros("map.proj_b", 1, ch);
    xavier("map.conv1", 9 * ch, ch);
    zeros("map.conv1_b", 1, ch);
    xavier("map.conv2", 9 * ch, d);
    zeros("map.conv2_b", 1, d);
    zeros("graph.bias", kC, d);
    xavier("graph.W_e", d, kC);
    for (int l = 0; l < config_.graph_layers; ++l) {
        // E sums messages from all C nodes; keep the residual branch small at init.
        xavier(l == 0 ? "graph.W_a" : "graph.W_a." + std::to_string(l), d, d, 1.0 / static_cast<double>(kC));
    }
    xavier("tok.W_f", d, d);
    xavier("tok.W_pos", kPositionFeatures, d);
    zeros("tok.b", 1, d);
    {
        std::normal_distribution<double> normal(0.0, 1.0);
        std::vector<double> v(Vocabulary::standard().size() * d);
        for (double& x : v) x = normal(rng);
        params_["text.embedding"] = Tensor::from({Vocabulary::standard().size(), d}, std::move(v), true);
    }
    xavier("attn.W_q", d, d);
    xavier("attn.W_k", d, d);
    xavier("attn.W_v", d, d);
    if (config_.decoder_hidden > 0) {
        const std::size_t hdim = static_cast<std::size_t>(config_.decoder_hidden);
        xavier("dec.W1", d, hdim);
        zeros("dec.b1", 1, hdim);
        xavier("dec.W", hdim, 1);
    } else {
        xavier("dec.W", d, 1);
    }
    zeros("dec.b", 1, 1);
}

std::vector<Tensor> LocalizerModel::parameter_list() const {
    std::vector<Tensor> out;
    for (const auto& [name, t] : params_) out.push_back(t);
    return out;
}

Tensor LocalizerModel::encode_instruction(const std::string& text) const {
    const auto ids = Vocabulary::standard().encode(text);
    Tensor rows = gather_rows(params_.at("text.embedding"), ids, 1);
    return config_.token_level ? rows : mean_rows(rows);
}

namespace {

// C x V averaging matrix over the words of each category name.
const Tensor& category_name_matrix() {
    static const Tensor m = [] {
        const auto& vocab = Vocabulary::standard();
        std::vector<double> v(kC * vocab.size(), 0.0);
        for (std::size_t k = 0; k < kC; ++k) {
            const auto ids = vocab.encode(world::category_words(world::category_at(k)));
            for (auto id : ids) v[k * vocab.size() + id] += 1.0 / static_cast<double>(ids.size());
        }
        return Tensor::from({kC, vocab.size()}, std::move(v));
    }();
    return m;
}

} // namespace

// Category nodes start from the embedding of their name, so map and
// instruction share one vocabulary.
Tensor LocalizerModel::category_embeddings() const {
    return add(params_.at("graph.bias"), matmul(category_name_matrix(), params_.at("text.embedding")));
}

MapEncoding LocalizerModel::encode_map(const SemanticMap& map) const {
    const int h = map.height(), w = map.width();
    if (h != config_.height || w != config_.width) {
        throw ShapeError("map is " + std::to_string(h) + "x" + std::to_string(w) + ", model expects " +
                         std::to_string(config_.height) + "x" + std::to_string(config_.width));
    }
    const std::size_t n = static_cast<std::size_t>(h * w);
    std::vector<double> f0(n * SemanticMap::kChannels, 0.0), member(n * kC, 0.0), pos(n * kPositionFeatures);
    std::vector<double> counts(kC, 0.0);
    const world::Cell a = map.agent().cell;
    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const std::size_t i = static_cast<std::size_t>(r * w + c);
            const world::Cell cell{r, c};
            if (map.explored(cell)) {
                for (std::size_t k = 0; k < SemanticMap::kChannels; ++k) f0[i * SemanticMap::kChannels + k] = map.at(k, cell);
                for (std::size_t k = 0; k < kC; ++k) {
                    if (map.at(k, cell) > 0.5) {
                        member[i * kC + k] = 1.0;
                        counts[k] += 1.0;
                    }
                }
            }
            const double dr = static_cast<double>(r - a.row), dc = static_cast<double>(c - a.col);
            const double manhattan = std::abs(dr) + std::abs(dc);
            const double scale_rc = static_cast<double>(std::max(h, w));
            double* p = &pos[i * kPositionFeatures];
            p[0] = dr / scale_rc;
            p[1] = dc / scale_rc;
            p[2] = std::abs(dr) / scale_rc;
            p[3] = std::abs(dc) / scale_rc;
            p[4] = manhattan / (2.0 * scale_rc);
            p[5] = 1.0 / (1.0 + manhattan);
        }
    }
    std::vector<double> pool(kC * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < kC; ++k)
            if (member[i * kC + k] > 0.0) pool[k * n + i] = 1.0 / counts[k];

    const Tensor input = Tensor::from({n, SemanticMap::kChannels}, std::move(f0));
    Tensor x = relu(add_row(matmul(input, params_.at("map.proj")), params_.at("map.proj_b")));
    x = conv3x3(x, params_.at("map.conv1"), params_.at("map.conv1_b"), h, w);
    x = conv3x3(x, params_.at("map.conv2"), params_.at("map.conv2_b"), h, w);

    MapEncoding enc;
    enc.cell_features = x;
    enc.membership = Tensor::from({n, kC}, std::move(member));
    enc.position = Tensor::from({n, kPositionFeatures}, std::move(pos));
    enc.x_prime = add(category_embeddings(), matmul(Tensor::from({kC, n}, std::move(pool)), x));
    return enc;
}

Tensor LocalizerModel::correlation_graph(const Tensor& x_prime) const {
    return sigmoid(matmul(x_prime, params_.at("graph.W_e")));
}

Tensor LocalizerModel::graph_enhance(const Tensor& x_prime, const Tensor& e) const {
    Tensor x = x_prime;
    for (int l = 0; l < config_.graph_layers; ++l) {
        const Tensor& wa = params_.at(l == 0 ? "graph.W_a" : "graph.W_a." + std::to_string(l));
        x = add(x, matmul(matmul(e, x), wa));
    }
    return x;
}

Tensor LocalizerModel::cell_tokens(const MapEncoding& enc, const Tensor& x) const {
    Tensor t = matmul(enc.cell_features, params_.at("tok.W_f"));
    t = add(t, matmul(enc.membership, x));
    t = add(t, matmul(enc.position, params_.at("tok.W_pos")));
    return add_row(t, params_.at("tok.b"));
}

ForwardTrace LocalizerModel::cross_attend(ForwardTrace tr) const {
    if (config_.roles == AttentionRoles::Prose) {
        tr.q = matmul(tr.tokens, params_.at("attn.W_q"));
        tr.k = matmul(tr.x_s, params_.at("attn.W_k"));
        tr.v = matmul(tr.x_s, params_.at("attn.W_v"));
        auto [w, h] = attention(tr.q, tr.k, tr.v);
        tr.weights = w;
        tr.h = h;
        tr.fused = mul(tr.tokens, h);
    } else {
        tr.q = matmul(tr.x_s, params_.at("attn.W_q"));
        tr.k = matmul(tr.tokens, params_.at("attn.W_k"));
        tr.v = matmul(tr.tokens, params_.at("attn.W_v"));
        auto [w, h] = attention(tr.q, tr.k, tr.v);
        tr.weights = w;
        tr.h = h;
        tr.fused = mul_row(tr.tokens, mean_rows(h));
    }
    return tr;
}

Tensor LocalizerModel::decode(const Tensor& fused) const {
    Tensor z = fused;
    if (config_.decoder_hidden > 0) z = relu(add_row(matmul(z, params_.at("dec.W1")), params_.at("dec.b1")));
    return add_row(matmul(z, params_.at("dec.W")), params_.at("dec.b"));
}

ForwardTrace LocalizerModel::forward(const SemanticMap& map, const std::string& text) const {
    ForwardTrace tr;
    tr.x_s = encode_instruction(text);
    const MapEncoding enc = encode_map(map);
    tr.x_prime = enc.x_prime;
    if (config_.use_graph) {
        tr.e = correlation_graph(tr.x_prime);
        tr.x = graph_enhance(tr.x_prime, tr.e);
    } else {
        tr.x = tr.x_prime;
    }
    tr.tokens = cell_tokens(enc, tr.x);
    tr = cross_attend(std::move(tr));
    tr.logits = decode(tr.fused);
    tr.probs = sigmoid(tr.logits);
    return tr;
}

Heatmap LocalizerModel::predict(const SemanticMap& map, const std::string& text) const {
    NoGradGuard guard;
    const ForwardTrace tr = forward(map, text);
    Heatmap h{map.height(), map.width(), {}};
    h.probs.assign(tr.probs.values().begin(), tr.probs.values().end());
    return h;
}

void LocalizerModel::save(const std::string& path, const nlohmann::json& meta) const {
    nlohmann::json m = meta.is_object() ? meta : nlohmann::json::object();
    m["config"] = config_.to_json();
    save_checkpoint(path, params_, m);
}

LocalizerModel LocalizerModel::load(const std::string& path) {
    const auto doc = read_checkpoint(path);
    LocalizerModel model(LocalizerConfig::from_json(doc.at("meta").at("config")));
    load_params_json(doc, model.params_);
    return model;
}

std::string localizer_text(const world::Subgoal& subgoal, const std::string& sentence) {
    return std::string(world::subgoal_verb(subgoal.action)) + " " + world::category_words(subgoal.object) + " " +
           sentence;
}

std::optional<world::Cell> select_target(const Heatmap& heatmap, const SemanticMap& map, double tau) {
    std::optional<world::Cell> best;
    double best_p = -1.0;
    for (int r = 0; r < heatmap.height; ++r) {
        for (int c = 0; c < heatmap.width; ++c) {
            const world::Cell cell{r, c};
            if (!map.explored(cell)) continue;
            const double p = heatmap.at(cell);
            if (p > best_p) {
                best_p = p;
                best = cell;
            }
        }
    }
    if (!best || best_p < tau) return std::nullopt;
    return best;
}

std::string subgoal_sentence(const world::TaskSpec& task, const world::Subgoal& subgoal) {
    if (subgoal.instruction >= 0 && static_cast<std::size_t>(subgoal.instruction) < task.step_instructions.size()) {
        return task.step_instructions[static_cast<std::size_t>(subgoal.instruction)];
    }
    return task.goal_statement;
}

} // namespace taskgrid::localizer
