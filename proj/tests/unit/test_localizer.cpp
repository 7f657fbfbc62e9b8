#include <doctest.h>

#include "helpers.hpp"
#include "localizer/dataset.hpp"
#include "localizer/model.hpp"
#include "localizer/tokenizer.hpp"
#include "localizer/train.hpp"

#include <cmath>
#include <filesystem>
#include <random>

using namespace taskgrid;
using namespace taskgrid::localizer;
using namespace taskgrid::tensor;
using testing_helpers::random_map;

namespace {

LocalizerConfig small_config(std::uint64_t seed = 1) {
    LocalizerConfig c;
    c.height = 6;
    c.width = 7;
    c.d = 8;
    c.conv_channels = 4;
    c.seed = seed;
    return c;
}

void perturb(LocalizerModel& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (auto& [name, t] : m.params())
        for (double& v : t.mutable_values()) v += u(rng);
}

TrainSample sample_for(const mapper::SemanticMap& map, std::vector<world::Cell> gt, const std::string& text) {
    TrainSample s;
    s.map = map;
    s.text = text;
    s.gt_cells = std::move(gt);
    s.subgoal = *world::parse_subgoal("Pickup Mug");
    return s;
}

std::vector<double> vals(const Tensor& t) { return {t.values().begin(), t.values().end()}; }

// Worst relative error of the analytic gradient against central differences
// over every entry of every parameter.
double gradient_check(LocalizerModel& model, const TrainSample& s) {
    for (auto& [n, t] : model.params()) t.zero_grad();
    sample_loss(model, s).backward();
    double worst = 0.0;
    for (auto& [name, t] : model.params()) {
        auto v = t.mutable_values();
        std::vector<double> analytic(t.grad().begin(), t.grad().end());
        analytic.resize(v.size(), 0.0);
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double old = v[i];
            double hi, lo;
            {
                NoGradGuard g;
                v[i] = old + 1e-4;
                hi = sample_loss(model, s).item();
                v[i] = old - 1e-4;
                lo = sample_loss(model, s).item();
            }
            v[i] = old;
            const double fd = (hi - lo) / 2e-4;
            const double rel = std::abs(fd - analytic[i]) / std::max(1e-6, std::abs(fd) + std::abs(analytic[i]));
            worst = std::max(worst, rel);
        }
    }
    return worst;
}

} // namespace

TEST_CASE("gradients of the whole localizer match finite differences") {
    for (int variant = 0; variant < 4; ++variant) {
        auto cfg = small_config(static_cast<std::uint64_t>(variant + 3));
        cfg.roles = variant % 2 ? AttentionRoles::Eq2 : AttentionRoles::Prose;
        cfg.decoder_hidden = variant >= 2 ? 5 : 0;
        cfg.token_level = variant == 3;
        cfg.graph_layers = variant == 2 ? 2 : 1;
        LocalizerModel m(cfg);
        perturb(m, static_cast<std::uint64_t>(variant));
        const auto map = random_map(6, 7, static_cast<std::uint64_t>(variant));
        CAPTURE(variant);
        CHECK(gradient_check(m, sample_for(map, {{2, 3}, {4, 1}}, "open cabinet put the mug in the cabinet")) < 1e-3);
    }
}

TEST_CASE("zero message weights leave node features untouched") {
    LocalizerModel m(small_config());
    perturb(m, 9);
    for (double& v : m.param("graph.W_a").mutable_values()) v = 0.0;
    const auto enc = m.encode_map(random_map(6, 7, 4));
    const Tensor e = m.correlation_graph(enc.x_prime);
    CHECK(vals(m.graph_enhance(enc.x_prime, e)) == vals(enc.x_prime));
    CHECK(vals(m.graph_enhance(enc.x_prime, Tensor::zeros({e.rows(), e.cols()}))) == vals(enc.x_prime));
}

TEST_CASE("graph enhancement matches a loop oracle") {
    LocalizerModel m(small_config());
    perturb(m, 12);
    const auto enc = m.encode_map(random_map(6, 7, 5));
    const Tensor e = m.correlation_graph(enc.x_prime);
    for (double v : e.values()) {
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    const Tensor& x = enc.x_prime;
    const Tensor& wa = m.param("graph.W_a");
    const Tensor out = m.graph_enhance(x, e);
    const std::size_t c = x.rows(), d = x.cols();
    for (std::size_t i = 0; i < c; ++i)
        for (std::size_t j = 0; j < d; ++j) {
            double s = x.at(i, j);
            for (std::size_t k = 0; k < c; ++k)
                for (std::size_t l = 0; l < d; ++l) s += e.at(i, k) * x.at(k, l) * wa.at(l, j);
            CHECK(out.at(i, j) == doctest::Approx(s).epsilon(1e-10));
        }
    for (double& v : m.param("graph.W_e").mutable_values()) v = 0.0;
    const Tensor flat = m.correlation_graph(x);
    for (double v : flat.values()) CHECK(v == 0.5);
}

TEST_CASE("attention against a naive oracle") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-2, 2);
    auto rnd = [&](std::size_t r, std::size_t c) {
        std::vector<double> v(r * c);
        for (double& x : v) x = u(rng);
        return Tensor::from({r, c}, v);
    };
    const Tensor q = rnd(5, 4), k = rnd(3, 4), v = rnd(3, 2);
    const auto res = attention(q, k, v);
    for (std::size_t i = 0; i < 5; ++i) {
        std::vector<double> s(3);
        double mx = -1e300, z = 0.0, rowsum = 0.0;
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t t = 0; t < 4; ++t) s[j] += q.at(i, t) * k.at(j, t);
            s[j] /= 2.0;
            mx = std::max(mx, s[j]);
        }
        for (double& x : s) z += (x = std::exp(x - mx));
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(res.weights.at(i, j) == doctest::Approx(s[j] / z).epsilon(1e-12));
            rowsum += res.weights.at(i, j);
        }
        CHECK(std::abs(rowsum - 1.0) < 1e-6);
        for (std::size_t c = 0; c < 2; ++c) {
            double o = 0.0;
            for (std::size_t j = 0; j < 3; ++j) o += s[j] / z * v.at(j, c);
            CHECK(res.output.at(i, c) == doctest::Approx(o).epsilon(1e-12));
        }
    }
}

TEST_CASE("attention edge cases") {
    const Tensor q = Tensor::from({3, 2}, {1, -4, 0.3, 2, 9, 9});
    const Tensor k1 = Tensor::from({1, 2}, {0.7, -1});
    const Tensor v1 = Tensor::from({1, 3}, {1.5, -2, 0.25});
    const auto single = attention(q, k1, v1);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t c = 0; c < 3; ++c) CHECK(single.output.at(i, c) == v1.at(0, c));
    const Tensor k0 = Tensor::zeros({4, 2});
    const Tensor v = Tensor::from({4, 1}, {1, 2, 3, 6});
    const auto flat = attention(q, k0, v);
    for (std::size_t i = 0; i < 3; ++i) CHECK(flat.output.at(i, 0) == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("instruction encoder") {
    LocalizerModel m(small_config());
    CHECK(vals(m.encode_instruction("open fridge")) == vals(m.encode_instruction("open fridge")));
    CHECK(vals(m.encode_instruction("open fridge")) != vals(m.encode_instruction("open cabinet")));
    const Tensor unk = m.encode_instruction("qqq zzzz xxyy");
    const Tensor& emb = m.param("text.embedding");
    for (std::size_t j = 0; j < unk.cols(); ++j) CHECK(unk.at(0, j) == doctest::Approx(emb.at(kUnknownToken, j)).epsilon(1e-15));
    CHECK(Vocabulary::standard().encode("").size() == 1);
    CHECK(Vocabulary::tokenize("Put the Mug, in it!") == std::vector<std::string>{"put", "the", "mug", "in", "it"});
}

TEST_CASE("map encoder") {
    LocalizerModel m(small_config());
    perturb(m, 2);
    SUBCASE("empty map gives the category embeddings") {
        const auto enc = m.encode_map(mapper::SemanticMap(6, 7));
        CHECK(vals(enc.x_prime) == vals(m.category_embeddings()));
    }
    SUBCASE("dimension mismatch") { CHECK_THROWS_AS(m.encode_map(mapper::SemanticMap(5, 7)), ShapeError); }
    SUBCASE("one changed cell only moves tokens within the receptive field") {
        auto a = testing_helpers::open_map(6, 7, 0, 6, 0, 7, {0, 0});
        auto b = a;
        b.set(world::index(world::Category::Apple), {3, 3}, 1.0);
        const auto ea = m.encode_map(a), eb = m.encode_map(b);
        const Tensor ta = m.cell_tokens(ea, ea.x_prime), tb = m.cell_tokens(eb, ea.x_prime);
        for (int r = 0; r < 6; ++r)
            for (int c = 0; c < 7; ++c) {
                const std::size_t i = static_cast<std::size_t>(r * 7 + c);
                bool same = true;
                for (std::size_t j = 0; j < ta.cols(); ++j) same = same && ta.at(i, j) == tb.at(i, j);
                // two 3x3 convolutions reach two cells away
                if (world::chebyshev({r, c}, {3, 3}) > 2) CHECK(same);
                if (r == 3 && c == 3) CHECK_FALSE(same);
            }
    }
    SUBCASE("unexplored cells never change the heatmap") {
        auto a = testing_helpers::open_map(6, 7, 0, 3, 0, 7, {1, 1});
        auto b = a;
        b.set(world::index(world::Category::Mug), {5, 5}, 1.0);
        b.set(mapper::SemanticMap::kObstacleChannel, {4, 2}, 1.0);
        CHECK(m.predict(a, "pick up mug").probs == m.predict(b, "pick up mug").probs);
    }
    SUBCASE("moving a lone object keeps its pooled feature under translation") {
        auto base = testing_helpers::open_map(6, 7, 0, 6, 0, 7, {0, 0});
        auto a = base, b = base;
        a.set(world::index(world::Category::Apple), {2, 3}, 1.0);
        b.set(world::index(world::Category::Apple), {3, 3}, 1.0);
        const auto ea = m.encode_map(a), eb = m.encode_map(b);
        const std::size_t k = world::index(world::Category::Apple);
        for (std::size_t j = 0; j < ea.x_prime.cols(); ++j) {
            CHECK(ea.x_prime.at(k, j) == doctest::Approx(eb.x_prime.at(k, j)).epsilon(1e-12));
        }
        CHECK(ea.membership.at(2 * 7 + 3, k) == 1.0);
        CHECK(eb.membership.at(3 * 7 + 3, k) == 1.0);
    }
}

TEST_CASE("decoder") {
    LocalizerModel m(small_config());
    perturb(m, 3);
    for (double& v : m.param("dec.W").mutable_values()) v = 0.0;
    for (double& v : m.param("dec.b").mutable_values()) v = 0.0;
    for (double p : m.predict(random_map(6, 7, 1), "pick up mug").probs) CHECK(p == 0.5);
    LocalizerModel r(small_config(8));
    perturb(r, 8);
    for (double p : r.predict(random_map(6, 7, 2), "open drawer").probs) {
        CHECK(p > 0.0);
        CHECK(p < 1.0);
    }
}

TEST_CASE("select_target") {
    auto map = testing_helpers::open_map(8, 8, 0, 8, 0, 8);
    Heatmap h{8, 8, std::vector<double>(64, 0.1)};
    h.probs[3 * 8 + 7] = 0.9;
    CHECK(select_target(h, map, 0.2) == world::Cell{3, 7});
    h.probs[3 * 8 + 7] = 0.1;
    h.probs[2 * 8 + 2] = 0.7;
    h.probs[5 * 8 + 5] = 0.7;
    CHECK(select_target(h, map, 0.2) == world::Cell{2, 2});
    Heatmap low{8, 8, std::vector<double>(64, 0.19)};
    CHECK_FALSE(select_target(low, map, 0.2).has_value());
    auto half = testing_helpers::open_map(8, 8, 4, 8, 0, 8);
    CHECK(select_target(h, half, 0.2) == world::Cell{5, 5});
}

TEST_CASE("overfitting one sample") {
    LocalizerModel m(small_config(21));
    const auto s = sample_for(random_map(6, 7, 11), {{2, 4}}, "pick up mug");
    TrainConfig tc;
    tc.epochs = 500;
    tc.batch_size = 1;
    tc.lr = 5e-3;
    tc.decay_every_epochs = 0;
    const auto log = train(m, {s}, tc);
    CHECK(log.back().loss < 0.01);
    const auto h = m.predict(s.map, s.text);
    CHECK(h.at({2, 4}) > 0.9);
}

TEST_CASE("training is deterministic and rejects empty data") {
    std::vector<TrainSample> data;
    for (int i = 0; i < 6; ++i) {
        data.push_back(sample_for(random_map(6, 7, static_cast<std::uint64_t>(40 + i)), {{i % 6, i}}, "put counter top"));
    }
    TrainConfig tc;
    tc.epochs = 3;
    tc.batch_size = 2;
    tc.seed = 4;
    LocalizerModel a(small_config(5)), b(small_config(5));
    train(a, data, tc);
    train(b, data, tc);
    for (const auto& [name, t] : a.params()) CHECK(vals(t) == vals(b.params().at(name)));
    CHECK_THROWS_AS(train(a, {}, tc), DatasetError);
}

TEST_CASE("training loss does not climb on a fixed set") {
    std::vector<TrainSample> data;
    for (int i = 0; i < 50; ++i) {
        const auto map = random_map(6, 7, static_cast<std::uint64_t>(100 + i));
        data.push_back(sample_for(map, {{i % 6, (i * 3) % 7}}, i % 2 ? "open drawer" : "pick up mug"));
    }
    TrainConfig tc;
    tc.epochs = 8;
    tc.batch_size = 5;
    LocalizerModel m(small_config(6));
    const auto log = train(m, data, tc);
    for (std::size_t i = 1; i < log.size(); ++i) CHECK(log[i].loss <= log[i - 1].loss * 1.05);
}

TEST_CASE("checkpoint and dataset round trips") {
    const auto dir = std::filesystem::temp_directory_path();
    LocalizerModel m(small_config(7));
    perturb(m, 7);
    m.save((dir / "tg_loc.json").string());
    const auto back = LocalizerModel::load((dir / "tg_loc.json").string());
    const auto map = random_map(6, 7, 3);
    CHECK(m.predict(map, "open cabinet").probs == back.predict(map, "open cabinet").probs);
    CHECK(back.config().to_json() == m.config().to_json());

    std::vector<TrainSample> data{sample_for(map, {{1, 2}}, "pick up mug the mug")};
    data[0].subgoal.instruction = 2;
    data[0].subgoal.position = world::Cell{1, 2};
    write_dataset((dir / "tg_ds.jsonl").string(), data);
    const auto read = read_dataset((dir / "tg_ds.jsonl").string());
    REQUIRE(read.size() == 1);
    CHECK(read[0] == data[0]);
    write_dataset((dir / "tg_ds2.jsonl").string(), read);
    CHECK(sample_to_json(read_dataset((dir / "tg_ds2.jsonl").string())[0]) == sample_to_json(data[0]));
}
