#include "cigmatch/model.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>

namespace cigmatch::model {

using tensor::TensorPtr;

namespace {

const std::map<std::string, ModelConfig>& variant_table() {
    static const std::map<std::string, ModelConfig> table = [] {
        std::map<std::string, ModelConfig> t;
        auto base = ModelConfig{};
        auto siam = [&](bool communities, int layers) {
            ModelConfig c = base;
            c.use_siamese = true;
            c.use_term_features = false;
            c.use_communities = communities;
            c.gcn_layers = layers;
            c.gcn_hidden = 128;
            return c;
        };
        auto sim = [&](bool communities, int layers) {
            ModelConfig c = base;
            c.use_siamese = false;
            c.use_term_features = true;
            c.use_communities = communities;
            c.gcn_layers = layers;
            c.gcn_hidden = 16;
            return c;
        };
        t["cig-siam"] = siam(false, 0);
        t["cig-siam-gcn"] = siam(false, 3);
        t["cig_cd-siam-gcn"] = siam(true, 3);
        t["cig-sim"] = sim(false, 0);
        t["cig-sim-gcn"] = sim(false, 3);
        t["cig_cd-sim-gcn"] = sim(true, 3);
        ModelConfig both = siam(false, 3);
        both.use_term_features = true;
        t["cig-sim-siam-gcn"] = both;
        ModelConfig simg = both;
        simg.use_global_sim = true;
        t["cig-sim-siam-gcn-simg"] = simg;
        return t;
    }();
    return table;
}

double glorot_limit(int fan_in, int fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

std::vector<int> gcn_sizes(const ModelConfig& cfg) {
    std::vector<int> sizes{cfg.feature_dim()};
    for (int l = 1; l < cfg.gcn_layers; ++l) sizes.push_back(cfg.gcn_hidden);
    if (cfg.gcn_layers > 0) sizes.push_back(cfg.gcn_out);
    return sizes;
}

std::vector<std::string> flatten_tokens(const textprep::Document& doc,
                                        const std::vector<int>& sentence_ids) {
    std::vector<std::string> out;
    for (int si : sentence_ids) {
        const auto& s = doc.sentences[si];
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

std::vector<std::string> all_tokens(const textprep::Document& doc) {
    std::vector<std::string> out;
    for (const auto& s : doc.sentences) out.insert(out.end(), s.begin(), s.end());
    return out;
}

std::vector<int> to_ids(const std::vector<std::string>& tokens, const textprep::Vocabulary& vocab,
                        int max_len) {
    std::vector<int> ids;
    ids.reserve(std::min<std::size_t>(tokens.size(), max_len));
    for (const auto& t : tokens) {
        if (static_cast<int>(ids.size()) >= max_len) break;
        ids.push_back(vocab.lookup(t));
    }
    return ids;
}

}  // namespace

ModelConfig config_for_variant(const std::string& variant) {
    auto it = variant_table().find(variant);
    if (it == variant_table().end()) {
        std::string msg = "unknown variant '" + variant + "'; valid names:";
        for (const auto& [name, cfg] : variant_table()) msg += " " + name;
        throw std::invalid_argument(msg);
    }
    return it->second;
}

const std::vector<std::string>& variant_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& [name, cfg] : variant_table()) n.push_back(name);
        return n;
    }();
    return names;
}

std::vector<std::pair<std::string, TensorPtr>> MatcherModel::named_params() const {
    std::vector<std::pair<std::string, TensorPtr>> out;
    if (conv_w) {
        out.emplace_back("siamese.conv_w", conv_w);
        out.emplace_back("siamese.conv_b", conv_b);
    }
    for (std::size_t l = 0; l < gcn_w.size(); ++l) {
        out.emplace_back("gcn." + std::to_string(l) + ".w", gcn_w[l]);
    }
    out.emplace_back("classifier.fc1_w", fc1_w);
    out.emplace_back("classifier.fc1_b", fc1_b);
    out.emplace_back("classifier.fc2_w", fc2_w);
    out.emplace_back("classifier.fc2_b", fc2_b);
    return out;
}

std::vector<TensorPtr> MatcherModel::params() const {
    std::vector<TensorPtr> out;
    for (auto& [name, p] : named_params()) out.push_back(p);
    return out;
}

long MatcherModel::param_count() const {
    long n = 0;
    for (const auto& p : params()) n += static_cast<long>(p->numel());
    return n;
}

MatcherModel init_model(const ModelConfig& cfg, textprep::Vocabulary vocab,
                        textprep::EmbeddingTable embeddings, termsim::IdfTable idf) {
    if (!cfg.use_siamese && !cfg.use_term_features) {
        throw std::invalid_argument("config enables neither siamese nor term features");
    }
    MatcherModel m;
    m.cfg = cfg;
    m.vocab = std::move(vocab);
    m.embeddings = std::move(embeddings);
    m.idf = std::move(idf);

    std::mt19937_64 rng(cfg.seed);
    if (cfg.use_siamese) {
        const int in = cfg.conv_kernel * cfg.embed_dim;
        m.conv_w = tensor::param({in, cfg.conv_filters}, rng, glorot_limit(in, cfg.conv_filters));
        m.conv_b = tensor::zeros({cfg.conv_filters}, true);
    }
    const auto sizes = gcn_sizes(cfg);
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        m.gcn_w.push_back(tensor::param({sizes[l], sizes[l + 1]}, rng,
                                        glorot_limit(sizes[l], sizes[l + 1])));
    }
    const int cls_in = cfg.pooled_dim();
    m.fc1_w = tensor::param({cls_in, 16}, rng, glorot_limit(cls_in, 16));
    m.fc1_b = tensor::zeros({16}, true);
    m.fc2_w = tensor::param({16, 1}, rng, glorot_limit(16, 1));
    m.fc2_b = tensor::zeros({1}, true);
    return m;
}

void build_vocab_and_idf(const std::vector<data::LabeledPair>& train,
                         textprep::Vocabulary& vocab, termsim::IdfTable& idf) {
    std::vector<termsim::TermCounts> corpus;
    corpus.reserve(train.size() * 2);
    for (const auto& pair : train) {
        for (const std::string* text : {&pair.doc_a, &pair.doc_b}) {
            termsim::TermCounts counts;
            for (const auto& sent : textprep::split_sentences(*text)) {
                for (const auto& tok : textprep::tokenize(sent)) {
                    vocab.add(tok);
                    ++counts[tok];
                }
            }
            corpus.push_back(std::move(counts));
        }
    }
    idf = termsim::IdfTable(corpus);
}

textprep::Document prepare_document(const std::string& id, const std::string& text,
                                    const ModelConfig& cfg) {
    textprep::Document doc = textprep::make_document(id, text);
    keygraph::TextRankParams tr;
    tr.top_k = cfg.textrank_top_k;
    doc.keywords = keygraph::textrank_keywords(doc, tr);
    return doc;
}

PairFeatures features_from_cig(const cig::ConceptInteractionGraph& g,
                               const textprep::Document& doc_a,
                               const textprep::Document& doc_b,
                               const MatcherModel& m, int label) {
    PairFeatures f;
    f.label = label;
    f.n_vertices = static_cast<int>(g.size());
    f.a_norm = tensor::normalize_adjacency(g.adjacency, f.n_vertices);
    for (const auto& v : g.vertices) {
        auto toks_a = flatten_tokens(doc_a, v.sentences_a);
        auto toks_b = flatten_tokens(doc_b, v.sentences_b);
        if (m.cfg.use_term_features) {
            auto feats = termsim::similarity_features(termsim::count_terms(toks_a),
                                                      termsim::count_terms(toks_b), m.idf);
            f.term_features.push_back(feats.as_vector());
        }
        if (m.cfg.use_siamese) {
            f.tokens_a.push_back(to_ids(toks_a, m.vocab, m.cfg.max_len));
            f.tokens_b.push_back(to_ids(toks_b, m.vocab, m.cfg.max_len));
        }
    }
    if (m.cfg.use_global_sim) {
        auto feats = termsim::similarity_features(termsim::count_terms(all_tokens(doc_a)),
                                                  termsim::count_terms(all_tokens(doc_b)), m.idf);
        f.global_sims = feats.as_vector();
    }
    return f;
}

PairFeatures extract_features(const data::LabeledPair& pair, const MatcherModel& m) {
    textprep::Document doc_a = prepare_document("a", pair.doc_a, m.cfg);
    textprep::Document doc_b = prepare_document("b", pair.doc_b, m.cfg);
    auto g = cig::build_pair_cig(doc_a, doc_b, m.cfg.use_communities, m.cfg.min_community,
                                 m.cfg.max_community);
    return features_from_cig(g, doc_a, doc_b, m, pair.label);
}

namespace {

TensorPtr context_vector(const std::vector<int>& token_ids, const MatcherModel& m) {
    if (token_ids.empty()) return tensor::zeros({m.cfg.conv_filters});
    const int len = static_cast<int>(token_ids.size());
    const int dim = m.embeddings.dim;
    std::vector<double> emb(static_cast<std::size_t>(len) * dim);
    for (int t = 0; t < len; ++t) {
        const double* row = m.embeddings.row(token_ids[t]);
        std::copy(row, row + dim, emb.begin() + static_cast<std::size_t>(t) * dim);
    }
    auto seq = tensor::make_tensor({len, dim}, std::move(emb));  // frozen input
    auto conv = tensor::conv1d(seq, m.conv_w, m.conv_b, m.cfg.conv_kernel);
    return tensor::maxpool_time(tensor::relu(conv));
}

}  // namespace

TensorPtr siamese_encode(const std::vector<int>& tokens_a, const std::vector<int>& tokens_b,
                         const MatcherModel& m) {
    auto ca = context_vector(tokens_a, m);
    auto cb = context_vector(tokens_b, m);
    return tensor::concat({tensor::abs_diff(ca, cb), tensor::hadamard(ca, cb)});
}

TensorPtr forward(const PairFeatures& f, const MatcherModel& m, bool train_mode,
                  std::mt19937_64& rng) {
    const auto& cfg = m.cfg;
    if (f.n_vertices == 0) throw std::runtime_error("pair features with zero vertices");

    std::vector<TensorPtr> rows;
    rows.reserve(f.n_vertices);
    for (int v = 0; v < f.n_vertices; ++v) {
        std::vector<TensorPtr> parts;
        if (cfg.use_siamese) parts.push_back(siamese_encode(f.tokens_a[v], f.tokens_b[v], m));
        if (cfg.use_term_features) {
            parts.push_back(tensor::make_tensor({5}, f.term_features[v]));
        }
        rows.push_back(parts.size() == 1 ? parts[0] : tensor::concat(parts));
    }
    TensorPtr h = tensor::stack_rows(rows);

    if (cfg.gcn_layers > 0) {
        auto a_norm = tensor::make_tensor({f.n_vertices, f.n_vertices}, f.a_norm);
        for (const auto& w : m.gcn_w) {
            h = tensor::gcn_layer(h, a_norm, w, tensor::Activation::Relu);
            h = tensor::dropout(h, cfg.dropout, train_mode, rng);
        }
    }

    TensorPtr pooled = tensor::mean_rows(h);
    if (cfg.use_global_sim) {
        pooled = tensor::concat({pooled, tensor::make_tensor({5}, f.global_sims)});
    }

    TensorPtr x = tensor::as_row(pooled);
    x = tensor::relu(tensor::add_rowwise(tensor::matmul(x, m.fc1_w), m.fc1_b));
    x = tensor::dropout(x, cfg.dropout, train_mode, rng);
    x = tensor::add_rowwise(tensor::matmul(x, m.fc2_w), m.fc2_b);
    return tensor::sigmoid(x);
}

double predict_probability(const PairFeatures& f, const MatcherModel& m) {
    std::mt19937_64 rng(0);
    return forward(f, m, false, rng)->scalar();
}

Metrics evaluate(const std::vector<PairFeatures>& features, const MatcherModel& m) {
    if (features.empty()) throw std::runtime_error("evaluate on empty split");
    long correct = 0, tp = 0, fp = 0, fn = 0;
    double loss = 0.0;
    for (const auto& f : features) {
        const double p = predict_probability(f, m);
        const int pred = p >= 0.5 ? 1 : 0;
        if (pred == f.label) ++correct;
        if (pred == 1 && f.label == 1) ++tp;
        if (pred == 1 && f.label == 0) ++fp;
        if (pred == 0 && f.label == 1) ++fn;
        const double eps = 1e-12;
        const double pc = std::min(1.0 - eps, std::max(eps, p));
        loss += -(f.label * std::log(pc) + (1 - f.label) * std::log(1.0 - pc));
    }
    Metrics out;
    out.accuracy = static_cast<double>(correct) / static_cast<double>(features.size());
    out.loss = loss / static_cast<double>(features.size());
    if (tp > 0) {
        const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
        const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
        out.f1 = 2.0 * precision * recall / (precision + recall);
    } else {
        out.f1 = 0.0;  // precision undefined or zero
    }
    return out;
}

TrainResult train(const std::vector<data::LabeledPair>& pairs, const ModelConfig& cfg,
                  const std::optional<std::string>& embedding_path) {
    data::DatasetSplit ds = data::split(pairs, cfg.seed);
    if (ds.train.empty()) throw std::runtime_error("empty training set");

    textprep::Vocabulary vocab;
    termsim::IdfTable idf;
    build_vocab_and_idf(ds.train, vocab, idf);

    textprep::EmbeddingTable emb;
    if (cfg.use_siamese) {
        emb = embedding_path ? textprep::load_embeddings(*embedding_path, vocab)
                             : textprep::synthesize_embeddings(vocab, cfg.embed_dim, cfg.seed);
    }
    ModelConfig eff = cfg;
    if (cfg.use_siamese && embedding_path) eff.embed_dim = emb.dim;

    MatcherModel m = init_model(eff, std::move(vocab), std::move(emb), std::move(idf));

    std::vector<PairFeatures> train_feats, dev_feats;
    train_feats.reserve(ds.train.size());
    for (const auto& p : ds.train) train_feats.push_back(extract_features(p, m));
    dev_feats.reserve(ds.dev.size());
    for (const auto& p : ds.dev) dev_feats.push_back(extract_features(p, m));

    auto params = m.params();
    tensor::AdamState state(params);
    std::mt19937_64 rng(cfg.seed + 1);
    long step = 0;

    TrainResult result;
    double best_dev_acc = -1.0;
    std::vector<std::vector<double>> best_values;

    std::vector<std::size_t> order(train_feats.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        long n_batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
            const std::size_t end = std::min(order.size(), start + cfg.batch);
            const double inv = 1.0 / static_cast<double>(end - start);
            tensor::zero_grads(params);
            double batch_loss = 0.0;
            for (std::size_t i = start; i < end; ++i) {
                const PairFeatures& f = train_feats[order[i]];
                auto prob = forward(f, m, true, rng);
                auto loss = tensor::bce_loss(prob, static_cast<double>(f.label));
                batch_loss += loss->scalar();
                tensor::backward(tensor::scale(loss, inv));
            }
            tensor::clip_global_norm(params, 5.0);
            tensor::l2_decay(params, 3e-7);
            ++step;
            tensor::adam_step(params, state, tensor::lr_schedule(step));
            epoch_loss += batch_loss * inv;
            ++n_batches;
        }

        EpochMetrics train_rec{epoch, "train", epoch_loss / std::max(1L, n_batches), 0.0, 0.0};
        result.history.push_back(train_rec);
        Metrics dev = evaluate(dev_feats, m);
        result.history.push_back({epoch, "dev", dev.loss, dev.accuracy, dev.f1});

        if (dev.accuracy > best_dev_acc) {
            best_dev_acc = dev.accuracy;
            result.best_epoch = epoch;
            best_values.clear();
            for (const auto& p : params) best_values.push_back(p->values);
        }
    }

    for (std::size_t i = 0; i < params.size(); ++i) params[i]->values = best_values[i];
    result.model = std::move(m);
    return result;
}

// ---- checkpoint ------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'C', 'I', 'G', 'M'};
constexpr std::uint32_t kVersion = 1;

nlohmann::json config_to_json(const ModelConfig& c) {
    return {
        {"use_siamese", c.use_siamese},
        {"use_term_features", c.use_term_features},
        {"use_communities", c.use_communities},
        {"use_global_sim", c.use_global_sim},
        {"gcn_layers", c.gcn_layers},
        {"gcn_hidden", c.gcn_hidden},
        {"gcn_out", c.gcn_out},
        {"conv_filters", c.conv_filters},
        {"conv_kernel", c.conv_kernel},
        {"embed_dim", c.embed_dim},
        {"max_len", c.max_len},
        {"textrank_top_k", c.textrank_top_k},
        {"min_community", c.min_community},
        {"max_community", c.max_community},
        {"dropout", c.dropout},
        {"epochs", c.epochs},
        {"batch", c.batch},
        {"seed", c.seed},
    };
}

ModelConfig config_from_json(const nlohmann::json& j) {
    ModelConfig c;
    c.use_siamese = j.at("use_siamese").get<bool>();
    c.use_term_features = j.at("use_term_features").get<bool>();
    c.use_communities = j.at("use_communities").get<bool>();
    c.use_global_sim = j.at("use_global_sim").get<bool>();
    c.gcn_layers = j.at("gcn_layers").get<int>();
    c.gcn_hidden = j.at("gcn_hidden").get<int>();
    c.gcn_out = j.at("gcn_out").get<int>();
    c.conv_filters = j.at("conv_filters").get<int>();
    c.conv_kernel = j.at("conv_kernel").get<int>();
    c.embed_dim = j.at("embed_dim").get<int>();
    c.max_len = j.at("max_len").get<int>();
    c.textrank_top_k = j.at("textrank_top_k").get<int>();
    c.min_community = j.at("min_community").get<int>();
    c.max_community = j.at("max_community").get<int>();
    c.dropout = j.at("dropout").get<double>();
    c.epochs = j.at("epochs").get<int>();
    c.batch = j.at("batch").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

void write_doubles(std::ofstream& out, const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void read_doubles(std::ifstream& in, std::vector<double>& v) {
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
    if (!in) throw std::runtime_error("checkpoint truncated");
}

}  // namespace

void save_checkpoint(const std::string& path, const MatcherModel& m) {
    nlohmann::json header;
    header["config"] = config_to_json(m.cfg);
    // Vocabulary tokens in index order, skipping the reserved OOV slot.
    std::vector<std::string> tokens(m.vocab.tokens().begin() + 1, m.vocab.tokens().end());
    header["vocab"] = tokens;
    header["embed_dim"] = m.embeddings.dim;

    std::vector<std::pair<std::string, double>> idf_entries(m.idf.entries().begin(),
                                                            m.idf.entries().end());
    std::sort(idf_entries.begin(), idf_entries.end());
    header["idf"] = idf_entries;
    header["idf_avg_len"] = m.idf.avg_doc_len();
    header["idf_corpus_size"] = m.idf.corpus_size();

    nlohmann::json params = nlohmann::json::array();
    for (const auto& [name, p] : m.named_params()) {
        params.push_back({{"name", name}, {"shape", p->shape}});
    }
    header["params"] = params;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
    const std::string header_str = header.dump();
    const std::uint64_t len = header_str.size();
    out.write(reinterpret_cast<const char*>(&len), sizeof(len));
    out.write(header_str.data(), static_cast<std::streamsize>(header_str.size()));
    write_doubles(out, m.embeddings.matrix);
    for (const auto& [name, p] : m.named_params()) write_doubles(out, p->values);
    if (!out) throw std::runtime_error("checkpoint write failed: " + path);
}

MatcherModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw std::runtime_error("not a checkpoint file: " + path);
    }
    std::uint32_t version = 0;
    in.read(reinterpret_cast<char*>(&version), sizeof(version));
    if (version != kVersion) {
        throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
    }
    std::uint64_t len = 0;
    in.read(reinterpret_cast<char*>(&len), sizeof(len));
    std::string header_str(len, '\0');
    in.read(header_str.data(), static_cast<std::streamsize>(len));
    if (!in) throw std::runtime_error("checkpoint truncated: " + path);
    nlohmann::json header = nlohmann::json::parse(header_str);

    ModelConfig cfg = config_from_json(header.at("config"));

    textprep::Vocabulary vocab;
    for (const auto& t : header.at("vocab")) vocab.add(t.get<std::string>());

    termsim::IdfTable idf;
    std::unordered_map<std::string, double> idf_map;
    for (const auto& e : header.at("idf")) {
        idf_map[e.at(0).get<std::string>()] = e.at(1).get<double>();
    }
    idf.set(std::move(idf_map), header.at("idf_avg_len").get<double>(),
            header.at("idf_corpus_size").get<std::size_t>());

    textprep::EmbeddingTable emb;
    emb.dim = header.at("embed_dim").get<int>();
    emb.matrix.assign(emb.dim > 0 ? vocab.size() * static_cast<std::size_t>(emb.dim) : 0, 0.0);
    if (emb.dim > 0) read_doubles(in, emb.matrix);

    MatcherModel m = init_model(cfg, std::move(vocab), std::move(emb), std::move(idf));
    auto named = m.named_params();
    const auto& specs = header.at("params");
    if (specs.size() != named.size()) throw std::runtime_error("checkpoint parameter list mismatch");
    for (std::size_t i = 0; i < named.size(); ++i) {
        const auto shape = specs[i].at("shape").get<std::vector<int>>();
        if (shape != named[i].second->shape || specs[i].at("name") != named[i].first) {
            throw std::runtime_error("checkpoint parameter mismatch for " + named[i].first);
        }
        read_doubles(in, named[i].second->values);
    }
    return m;
}

}  // namespace cigmatch::model
