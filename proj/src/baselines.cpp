#include "cigmatch/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "cigmatch/tensor.hpp"
#include "cigmatch/termsim.hpp"
#include "cigmatch/textprep.hpp"

namespace cigmatch::baselines {

namespace {

termsim::TermCounts doc_counts(const std::string& text) {
    termsim::TermCounts counts;
    for (const auto& sent : textprep::split_sentences(text)) {
        for (const auto& tok : textprep::tokenize(sent)) ++counts[tok];
    }
    return counts;
}

termsim::IdfTable training_idf(const std::vector<data::LabeledPair>& train) {
    std::vector<termsim::TermCounts> corpus;
    corpus.reserve(train.size() * 2);
    for (const auto& p : train) {
        corpus.push_back(doc_counts(p.doc_a));
        corpus.push_back(doc_counts(p.doc_b));
    }
    return termsim::IdfTable(corpus);
}

struct Scored {
    double score;
    int label;
};

std::pair<double, double> accuracy_f1(const std::vector<Scored>& scored, double threshold) {
    long correct = 0, tp = 0, fp = 0, fn = 0;
    for (const auto& s : scored) {
        const int pred = s.score >= threshold ? 1 : 0;
        if (pred == s.label) ++correct;
        if (pred == 1 && s.label == 1) ++tp;
        if (pred == 1 && s.label == 0) ++fp;
        if (pred == 0 && s.label == 1) ++fn;
    }
    const double acc = static_cast<double>(correct) / static_cast<double>(scored.size());
    double f1 = 0.0;
    if (tp > 0) {
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        f1 = 2.0 * precision * recall / (precision + recall);
    }
    return {acc, f1};
}

}  // namespace

BaselineResult bm25_classify(const data::DatasetSplit& ds) {
    if (ds.train.empty() || ds.dev.empty() || ds.test.empty()) {
        throw std::runtime_error("bm25 baseline needs non-empty train/dev/test splits");
    }
    termsim::IdfTable idf = training_idf(ds.train);
    auto score_split = [&](const std::vector<data::LabeledPair>& pairs) {
        std::vector<Scored> out;
        out.reserve(pairs.size());
        for (const auto& p : pairs) {
            auto f = termsim::similarity_features(doc_counts(p.doc_a), doc_counts(p.doc_b), idf);
            out.push_back({f.bm25_cos, p.label});
        }
        return out;
    };
    std::vector<Scored> dev = score_split(ds.dev);
    std::vector<Scored> test = score_split(ds.test);

    // Grid over observed dev scores (plus the extremes).
    std::vector<double> candidates{0.0, 1.0 + 1e-9};
    for (const auto& s : dev) candidates.push_back(s.score);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    double best_threshold = candidates.front();
    double best_acc = -1.0;
    for (double t : candidates) {
        const double acc = accuracy_f1(dev, t).first;
        if (acc > best_acc) {
            best_acc = acc;
            best_threshold = t;
        }
    }

    auto [acc, f1] = accuracy_f1(test, best_threshold);
    return {acc, f1, best_threshold};
}

BaselineResult simnet_classify(const data::DatasetSplit& ds, int epochs, int batch,
                               std::uint64_t seed) {
    if (ds.train.empty() || ds.dev.empty() || ds.test.empty()) {
        throw std::runtime_error("simnet baseline needs non-empty train/dev/test splits");
    }
    termsim::IdfTable idf = training_idf(ds.train);
    auto featurize = [&](const std::vector<data::LabeledPair>& pairs) {
        std::vector<std::pair<std::vector<double>, int>> out;
        out.reserve(pairs.size());
        for (const auto& p : pairs) {
            auto f = termsim::similarity_features(doc_counts(p.doc_a), doc_counts(p.doc_b), idf);
            out.emplace_back(f.as_vector(), p.label);
        }
        return out;
    };
    auto train_x = featurize(ds.train);
    auto dev_x = featurize(ds.dev);
    auto test_x = featurize(ds.test);

    std::mt19937_64 rng(seed);
    const double limit1 = std::sqrt(6.0 / (5 + 16));
    const double limit2 = std::sqrt(6.0 / (16 + 1));
    auto fc1_w = tensor::param({5, 16}, rng, limit1);
    auto fc1_b = tensor::zeros({16}, true);
    auto fc2_w = tensor::param({16, 1}, rng, limit2);
    auto fc2_b = tensor::zeros({1}, true);
    std::vector<tensor::TensorPtr> params{fc1_w, fc1_b, fc2_w, fc2_b};
    tensor::AdamState state(params);

    auto net = [&](const std::vector<double>& feats) {
        auto x = tensor::make_tensor({1, 5}, feats);
        auto h = tensor::relu(tensor::add_rowwise(tensor::matmul(x, fc1_w), fc1_b));
        auto z = tensor::add_rowwise(tensor::matmul(h, fc2_w), fc2_b);
        return tensor::sigmoid(z);
    };

    auto eval_split = [&](const std::vector<std::pair<std::vector<double>, int>>& rows) {
        std::vector<Scored> scored;
        scored.reserve(rows.size());
        for (const auto& [feats, label] : rows) scored.push_back({net(feats)->scalar(), label});
        return accuracy_f1(scored, 0.5);
    };

    std::vector<std::size_t> order(train_x.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    long step = 0;
    double best_dev = -1.0;
    std::vector<std::vector<double>> best_values;
    for (int epoch = 1; epoch <= epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < order.size(); start += batch) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch));
            const double inv = 1.0 / static_cast<double>(end - start);
            tensor::zero_grads(params);
            for (std::size_t i = start; i < end; ++i) {
                const auto& [feats, label] = train_x[order[i]];
                auto loss = tensor::bce_loss(net(feats), static_cast<double>(label));
                tensor::backward(tensor::scale(loss, inv));
            }
            tensor::clip_global_norm(params, 5.0);
            tensor::l2_decay(params, 3e-7);
            ++step;
            tensor::adam_step(params, state, tensor::lr_schedule(step));
        }
        const double dev_acc = eval_split(dev_x).first;
        if (dev_acc > best_dev) {
            best_dev = dev_acc;
            best_values.clear();
            for (const auto& p : params) best_values.push_back(p->values);
        }
    }
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->values = best_values[i];

    auto [acc, f1] = eval_split(test_x);
    return {acc, f1, 0.5};
}

}  // namespace cigmatch::baselines
