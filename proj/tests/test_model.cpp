#include <doctest.h>

#include <cstdio>
#include <random>

#include "cigmatch/model.hpp"
#include "oracles.hpp"

using namespace cigmatch;
using namespace cigmatch::model;

namespace {

// Small trained-shape model over a fixed toy vocabulary, no training.
MatcherModel toy_model(ModelConfig cfg) {
    textprep::Vocabulary vocab;
    for (const char* t : {"alice", "bob", "carol", "met", "argued", "left", "ticket"}) {
        vocab.add(t);
    }
    auto emb = cfg.use_siamese ? textprep::synthesize_embeddings(vocab, cfg.embed_dim, 3)
                               : textprep::EmbeddingTable{};
    termsim::IdfTable idf({termsim::count_terms({"alice", "bob", "met"}),
                           termsim::count_terms({"carol", "left", "ticket"})});
    return init_model(cfg, std::move(vocab), std::move(emb), std::move(idf));
}

PairFeatures toy_features(const MatcherModel& m, int label = 1) {
    data::LabeledPair p{label,
                        "alice met bob. bob argued. carol left with ticket.",
                        "alice met bob again. carol left. ticket gone."};
    return extract_features(p, m);
}

}  // namespace

TEST_CASE("variant table covers the eight ablations") {
    const std::vector<std::string> expected{
        "cig-siam", "cig-siam-gcn", "cig_cd-siam-gcn", "cig-sim", "cig-sim-gcn",
        "cig_cd-sim-gcn", "cig-sim-siam-gcn", "cig-sim-siam-gcn-simg"};
    for (const auto& name : expected) {
        CHECK_NOTHROW((void)config_for_variant(name));
    }
    CHECK(variant_names().size() == 8);
    CHECK_THROWS_WITH_AS((void)config_for_variant("bogus"), doctest::Contains("cig-sim-gcn"),
                         std::invalid_argument);

    auto sim = config_for_variant("cig-sim");
    CHECK(sim.gcn_layers == 0);
    CHECK(!sim.use_siamese);
    auto cd = config_for_variant("cig_cd-sim-gcn");
    CHECK(cd.use_communities);
    auto simg = config_for_variant("cig-sim-siam-gcn-simg");
    CHECK(simg.use_global_sim);
    CHECK(simg.use_siamese);
    CHECK(simg.use_term_features);
}

TEST_CASE("siamese encoder contracts") {
    auto m = toy_model(config_for_variant("cig-siam-gcn"));
    std::vector<int> a{1, 2, 4}, b{1, 3, 5};

    SUBCASE("identical sides zero the abs-diff half") {
        auto out = siamese_encode(a, a, m);
        REQUIRE(out->shape == std::vector<int>{2 * m.cfg.conv_filters});
        for (int i = 0; i < m.cfg.conv_filters; ++i) CHECK(out->values[i] == 0.0);
    }
    SUBCASE("swap invariance") {
        auto ab = siamese_encode(a, b, m);
        auto ba = siamese_encode(b, a, m);
        for (std::size_t i = 0; i < ab->numel(); ++i) CHECK(ab->values[i] == ba->values[i]);
    }
    SUBCASE("empty side gives (|cA|, 0)") {
        auto out = siamese_encode(a, {}, m);
        auto ca = siamese_encode(a, a, m);  // product half = cA*cA
        for (int i = 0; i < m.cfg.conv_filters; ++i) {
            CHECK(out->values[m.cfg.conv_filters + i] == 0.0);
            // |cA - 0| = cA, so squared half of (a,a) equals out's abs half squared
            CHECK(out->values[i] * out->values[i] ==
                  doctest::Approx(ca->values[m.cfg.conv_filters + i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("forward is pair-symmetric") {
    for (const char* variant : {"cig-sim-gcn", "cig-siam-gcn", "cig-sim-siam-gcn-simg", "cig-sim"}) {
        auto m = toy_model(config_for_variant(variant));
        data::LabeledPair p{1, "alice met bob. carol left. ticket gone today.",
                            "bob met alice. ticket was found. carol argued."};
        data::LabeledPair swapped{1, p.doc_b, p.doc_a};
        auto f1 = extract_features(p, m);
        auto f2 = extract_features(swapped, m);
        CHECK(std::abs(predict_probability(f1, m) - predict_probability(f2, m)) < 1e-9);
    }
}

TEST_CASE("gcn_layers=0 degenerates to mean of raw features") {
    auto cfg = config_for_variant("cig-sim");
    auto m = toy_model(cfg);
    auto f = toy_features(m);
    // hand-compose: mean of term features -> classifier
    std::vector<double> mean(5, 0.0);
    for (const auto& row : f.term_features) {
        for (int j = 0; j < 5; ++j) mean[j] += row[j];
    }
    for (double& v : mean) v /= static_cast<double>(f.n_vertices);
    auto x = tensor::as_row(tensor::make_tensor({5}, mean));
    auto h = tensor::relu(tensor::add_rowwise(tensor::matmul(x, m.fc1_w), m.fc1_b));
    auto z = tensor::add_rowwise(tensor::matmul(h, m.fc2_w), m.fc2_b);
    const double want = tensor::sigmoid(z)->scalar();
    CHECK(predict_probability(f, m) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("full-model gradients match finite differences on a toy pair") {
    auto cfg = config_for_variant("cig-sim-siam-gcn-simg");
    cfg.embed_dim = 6;
    cfg.conv_filters = 4;
    cfg.gcn_hidden = 5;
    cfg.gcn_layers = 2;
    auto m = toy_model(cfg);
    auto f = toy_features(m, 1);
    REQUIRE(f.n_vertices >= 3);

    auto params = m.params();
    std::mt19937_64 rng(0);
    auto build = [&]() {
        return tensor::bce_loss(forward(f, m, false, rng), 1.0);
    };
    tensor::zero_grads(params);
    tensor::backward(build());
    for (const auto& p : params) {
        auto analytic = p->grad;
        auto fd = oracles::finite_difference(p->values, [&]() { return build()->scalar(); });
        CHECK(oracles::max_rel_error(analytic, fd) < 1e-4);
    }
}

TEST_CASE("parameter budget of the combined model") {
    auto cfg = config_for_variant("cig-sim-siam-gcn");
    auto m = toy_model(cfg);
    const long count = m.param_count();
    CHECK(count < 100000);
    // conv(3*64*32+32) + gcn(69*128 + 128*128 + 128*16) + fc(16*16+16+16+1)
    CHECK(count == 6176 + 8832 + 16384 + 2048 + 256 + 16 + 16 + 1);
}

TEST_CASE("evaluate metrics") {
    auto m = toy_model(config_for_variant("cig-sim"));
    auto f_pos = toy_features(m, 1);
    const double p = predict_probability(f_pos, m);

    // all-correct: accuracy and F1 are 1
    PairFeatures f1 = f_pos, f2 = f_pos;
    f1.label = p >= 0.5 ? 1 : 0;
    f2.label = f1.label;
    auto metrics = evaluate({f1, f2}, m);
    if (f1.label == 1) {
        CHECK(metrics.accuracy == 1.0);
        CHECK(metrics.f1 == 1.0);
    } else {
        CHECK(metrics.accuracy == 1.0);
        CHECK(metrics.f1 == 0.0);  // no positive predictions, none labeled positive
    }
    CHECK_THROWS_AS((void)evaluate({}, m), std::runtime_error);
}

TEST_CASE("training is deterministic and learns the synthetic task") {
    data::SyntheticParams sp;
    sp.n_pairs = 60;
    sp.n_topics = 3;
    sp.vocab_size = 400;
    sp.seed = 11;
    auto pairs = data::gen_synthetic(sp);

    auto cfg = config_for_variant("cig-sim-gcn");
    cfg.epochs = 4;
    cfg.batch = 8;
    auto r1 = train(pairs, cfg);
    auto r2 = train(pairs, cfg);
    REQUIRE(r1.history.size() == r2.history.size());
    for (std::size_t i = 0; i < r1.history.size(); ++i) {
        CHECK(r1.history[i].loss == r2.history[i].loss);
        CHECK(r1.history[i].accuracy == r2.history[i].accuracy);
    }
    CHECK(r1.best_epoch == r2.best_epoch);
}

TEST_CASE("checkpoint round trip is bit-exact") {
    auto cfg = config_for_variant("cig-sim-siam-gcn-simg");
    cfg.embed_dim = 8;
    auto m = toy_model(cfg);
    const std::string path = "test_ckpt.bin";
    save_checkpoint(path, m);
    auto back = load_checkpoint(path);

    CHECK(back.cfg.use_siamese == m.cfg.use_siamese);
    CHECK(back.cfg.gcn_layers == m.cfg.gcn_layers);
    CHECK(back.vocab.tokens() == m.vocab.tokens());
    CHECK(back.embeddings.matrix == m.embeddings.matrix);
    auto pa = m.named_params();
    auto pb = back.named_params();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(pa[i].first == pb[i].first);
        CHECK(pa[i].second->values == pb[i].second->values);
    }
    CHECK(back.idf.idf("alice") == m.idf.idf("alice"));
    CHECK(back.idf.avg_doc_len() == m.idf.avg_doc_len());

    // same predictions after reload
    auto f = toy_features(m);
    CHECK(predict_probability(f, m) == predict_probability(f, back));
    std::remove(path.c_str());
}

TEST_CASE("bce loss is zero when predictions equal labels") {
    // direct check of the loss lower bound used in training
    auto one = tensor::make_tensor({1}, {1.0});
    CHECK(tensor::bce_loss(one, 1.0)->scalar() == doctest::Approx(0.0).epsilon(1e-9));
    auto zero = tensor::make_tensor({1}, {0.0});
    CHECK(tensor::bce_loss(zero, 0.0)->scalar() == doctest::Approx(0.0).epsilon(1e-9));
}
