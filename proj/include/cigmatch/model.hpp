#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cigmatch/cig.hpp"
#include "cigmatch/data.hpp"
#include "cigmatch/tensor.hpp"
#include "cigmatch/termsim.hpp"
#include "cigmatch/textprep.hpp"

namespace cigmatch::model {

struct ModelConfig {
    bool use_siamese = false;
    bool use_term_features = true;
    bool use_communities = false;
    bool use_global_sim = false;
    int gcn_layers = 3;
    int gcn_hidden = 128;  // applies when the Siamese encoder is on
    int gcn_out = 16;
    int conv_filters = 32;
    int conv_kernel = 3;
    int embed_dim = 64;
    int max_len = 100;
    int textrank_top_k = 10;
    int min_community = 2;
    int max_community = 6;
    double dropout = 0.1;
    int epochs = 10;
    int batch = 32;
    std::uint64_t seed = 42;

    // Per-vertex feature width.
    int feature_dim() const {
        return (use_siamese ? 2 * conv_filters : 0) + (use_term_features ? 5 : 0);
    }
    // Width of the vector fed to the classifier.
    int pooled_dim() const {
        return (gcn_layers > 0 ? gcn_out : feature_dim()) + (use_global_sim ? 5 : 0);
    }
};

// Table 2 ablation names (lowercased); throws std::invalid_argument listing
// the valid names on an unknown variant.
ModelConfig config_for_variant(const std::string& variant);
const std::vector<std::string>& variant_names();

// Everything the forward pass needs for one pair, precomputed once.
struct PairFeatures {
    int n_vertices = 0;
    std::vector<double> a_norm;                      // [n,n]
    std::vector<std::vector<double>> term_features;  // per vertex, 5 values
    std::vector<std::vector<int>> tokens_a;          // per vertex, embedding ids
    std::vector<std::vector<int>> tokens_b;
    std::vector<double> global_sims;                 // whole-pair 5 metrics
    int label = 0;
};

struct MatcherModel {
    ModelConfig cfg;
    textprep::Vocabulary vocab;
    textprep::EmbeddingTable embeddings;
    termsim::IdfTable idf;

    tensor::TensorPtr conv_w, conv_b;         // Siamese encoder (when enabled)
    std::vector<tensor::TensorPtr> gcn_w;     // one weight matrix per GCN layer
    tensor::TensorPtr fc1_w, fc1_b, fc2_w, fc2_b;

    std::vector<std::pair<std::string, tensor::TensorPtr>> named_params() const;
    std::vector<tensor::TensorPtr> params() const;
    long param_count() const;
};

MatcherModel init_model(const ModelConfig& cfg, textprep::Vocabulary vocab,
                        textprep::EmbeddingTable embeddings, termsim::IdfTable idf);

// Builds vocabulary (training corpus order) and the corpus IdfTable.
void build_vocab_and_idf(const std::vector<data::LabeledPair>& train,
                         textprep::Vocabulary& vocab, termsim::IdfTable& idf);

textprep::Document prepare_document(const std::string& id, const std::string& text,
                                    const ModelConfig& cfg);

PairFeatures extract_features(const data::LabeledPair& pair, const MatcherModel& m);
PairFeatures features_from_cig(const cig::ConceptInteractionGraph& g,
                               const textprep::Document& doc_a,
                               const textprep::Document& doc_b,
                               const MatcherModel& m, int label);

// Eq.-(1) style Siamese match vector for one vertex: conv -> ReLU -> max-pool
// per side with shared weights, then (|cA-cB|, cA*cB). Empty sides contribute
// a zero context vector.
tensor::TensorPtr siamese_encode(const std::vector<int>& tokens_a,
                                 const std::vector<int>& tokens_b,
                                 const MatcherModel& m);

tensor::TensorPtr forward(const PairFeatures& f, const MatcherModel& m,
                          bool train_mode, std::mt19937_64& rng);
double predict_probability(const PairFeatures& f, const MatcherModel& m);

struct EpochMetrics {
    int epoch = 0;
    std::string split;
    double loss = 0.0;
    double accuracy = 0.0;
    double f1 = 0.0;
};

struct Metrics {
    double accuracy = 0.0;
    double f1 = 0.0;
    double loss = 0.0;
};

Metrics evaluate(const std::vector<PairFeatures>& features, const MatcherModel& m);

struct TrainResult {
    MatcherModel model;
    std::vector<EpochMetrics> history;
    int best_epoch = 0;
};

// Trains on a 60/20/20 split of `pairs`; returns the checkpoint of the epoch
// with the best dev accuracy. Throws std::runtime_error on an empty train set.
TrainResult train(const std::vector<data::LabeledPair>& pairs, const ModelConfig& cfg,
                  const std::optional<std::string>& embedding_path = std::nullopt);

// ---- checkpoint (versioned binary, bit-exact round trip) ------------------

void save_checkpoint(const std::string& path, const MatcherModel& m);
MatcherModel load_checkpoint(const std::string& path);

}  // namespace cigmatch::model
