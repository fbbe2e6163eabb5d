#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cigmatch/baselines.hpp"
#include "cigmatch/cig.hpp"
#include "cigmatch/data.hpp"
#include "cigmatch/keygraph.hpp"
#include "cigmatch/model.hpp"
#include "cigmatch/termsim.hpp"
#include "cigmatch/textprep.hpp"

namespace py = pybind11;
using namespace cigmatch;

namespace {

// Owning wrapper so Python holds the trained model by reference.
struct Matcher {
    model::MatcherModel m;

    double predict(const std::string& doc_a, const std::string& doc_b) const {
        data::LabeledPair pair{0, doc_a, doc_b};
        auto feats = model::extract_features(pair, m);
        return model::predict_probability(feats, m);
    }

    py::dict evaluate(const std::vector<data::LabeledPair>& pairs) const {
        std::vector<model::PairFeatures> feats;
        feats.reserve(pairs.size());
        for (const auto& p : pairs) feats.push_back(model::extract_features(p, m));
        auto metrics = model::evaluate(feats, m);
        py::dict d;
        d["accuracy"] = metrics.accuracy;
        d["f1"] = metrics.f1;
        d["loss"] = metrics.loss;
        return d;
    }
};

py::dict epoch_to_dict(const model::EpochMetrics& e) {
    py::dict d;
    d["epoch"] = e.epoch;
    d["split"] = e.split;
    d["loss"] = e.loss;
    d["accuracy"] = e.accuracy;
    d["f1"] = e.f1;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cigmatch, mod) {
    mod.doc() = "Concept-interaction-graph document pair matching";

    py::class_<data::LabeledPair>(mod, "LabeledPair")
        .def(py::init([](int label, std::string doc_a, std::string doc_b) {
                 return data::LabeledPair{label, std::move(doc_a), std::move(doc_b)};
             }),
             py::arg("label"), py::arg("doc_a"), py::arg("doc_b"))
        .def_readwrite("label", &data::LabeledPair::label)
        .def_readwrite("doc_a", &data::LabeledPair::doc_a)
        .def_readwrite("doc_b", &data::LabeledPair::doc_b)
        .def("__repr__", [](const data::LabeledPair& p) {
            return "LabeledPair(label=" + std::to_string(p.label) + ", |doc_a|=" +
                   std::to_string(p.doc_a.size()) + ", |doc_b|=" + std::to_string(p.doc_b.size()) +
                   ")";
        });

    py::class_<data::DatasetSplit>(mod, "DatasetSplit")
        .def_readonly("train", &data::DatasetSplit::train)
        .def_readonly("dev", &data::DatasetSplit::dev)
        .def_readonly("test", &data::DatasetSplit::test);

    mod.def("load_jsonl", &data::load_jsonl, py::arg("path"));
    mod.def("save_jsonl", &data::save_jsonl, py::arg("path"), py::arg("pairs"));
    mod.def("split", &data::split, py::arg("pairs"), py::arg("seed") = 42);

    mod.def(
        "gen_synthetic",
        [](int n_pairs, int n_topics, int vocab_size, std::uint64_t seed, int keywords_per_topic,
           double background_overlap, double contamination) {
            data::SyntheticParams p;
            p.n_pairs = n_pairs;
            p.n_topics = n_topics;
            p.vocab_size = vocab_size;
            p.seed = seed;
            p.keywords_per_topic = keywords_per_topic;
            p.background_overlap = background_overlap;
            p.contamination = contamination;
            return data::gen_synthetic(p);
        },
        py::arg("n_pairs") = 500, py::arg("n_topics") = 5, py::arg("vocab_size") = 2000,
        py::arg("seed") = 7, py::arg("keywords_per_topic") = 10,
        py::arg("background_overlap") = 0.35, py::arg("contamination") = 0.25);

    py::class_<model::ModelConfig>(mod, "ModelConfig")
        .def(py::init<>())
        .def_readwrite("use_siamese", &model::ModelConfig::use_siamese)
        .def_readwrite("use_term_features", &model::ModelConfig::use_term_features)
        .def_readwrite("use_communities", &model::ModelConfig::use_communities)
        .def_readwrite("use_global_sim", &model::ModelConfig::use_global_sim)
        .def_readwrite("gcn_layers", &model::ModelConfig::gcn_layers)
        .def_readwrite("gcn_hidden", &model::ModelConfig::gcn_hidden)
        .def_readwrite("gcn_out", &model::ModelConfig::gcn_out)
        .def_readwrite("conv_filters", &model::ModelConfig::conv_filters)
        .def_readwrite("embed_dim", &model::ModelConfig::embed_dim)
        .def_readwrite("textrank_top_k", &model::ModelConfig::textrank_top_k)
        .def_readwrite("dropout", &model::ModelConfig::dropout)
        .def_readwrite("epochs", &model::ModelConfig::epochs)
        .def_readwrite("batch", &model::ModelConfig::batch)
        .def_readwrite("seed", &model::ModelConfig::seed);

    mod.def("config_for_variant", &model::config_for_variant, py::arg("variant"));
    mod.def("variant_names", [] { return model::variant_names(); });

    py::class_<Matcher>(mod, "Matcher")
        .def("predict", &Matcher::predict, py::arg("doc_a"), py::arg("doc_b"))
        .def("evaluate", &Matcher::evaluate, py::arg("pairs"))
        .def("param_count", [](const Matcher& w) { return w.m.param_count(); })
        .def("save", [](const Matcher& w, const std::string& path) {
            model::save_checkpoint(path, w.m);
        }, py::arg("path"))
        .def_static("load", [](const std::string& path) {
            return Matcher{model::load_checkpoint(path)};
        }, py::arg("path"));

    mod.def(
        "train",
        [](const std::vector<data::LabeledPair>& pairs, const model::ModelConfig& cfg,
           const std::optional<std::string>& embeddings) {
            auto result = model::train(pairs, cfg, embeddings);
            py::list history;
            for (const auto& e : result.history) history.append(epoch_to_dict(e));
            return py::make_tuple(Matcher{std::move(result.model)}, history);
        },
        py::arg("pairs"), py::arg("config"), py::arg("embeddings") = std::nullopt,
        "Trains on a 60/20/20 split; returns (matcher, epoch history).");

    mod.def(
        "extract_keywords",
        [](const std::string& text, int top_k) {
            keygraph::TextRankParams params;
            params.top_k = top_k;
            auto doc = textprep::make_document("doc", text);
            return keygraph::textrank_keywords(doc, params);
        },
        py::arg("text"), py::arg("top_k") = 10);

    mod.def(
        "build_cig_json",
        [](const std::string& doc_a, const std::string& doc_b, bool communities) {
            auto a = textprep::make_document("a", doc_a);
            auto b = textprep::make_document("b", doc_b);
            return cig::to_json(cig::build_pair_cig(a, b, communities));
        },
        py::arg("doc_a"), py::arg("doc_b"), py::arg("communities") = false);

    mod.def(
        "similarity_profile",
        [](const std::string& doc_a, const std::string& doc_b) {
            auto a = textprep::make_document("a", doc_a);
            auto b = textprep::make_document("b", doc_b);
            auto flatten = [](const textprep::Document& d) {
                std::vector<std::string> tokens;
                for (const auto& s : d.sentences) tokens.insert(tokens.end(), s.begin(), s.end());
                return tokens;
            };
            auto ta = flatten(a);
            auto tb = flatten(b);
            termsim::IdfTable idf({termsim::count_terms(ta), termsim::count_terms(tb)});
            auto f = termsim::similarity_features(termsim::count_terms(ta),
                                                  termsim::count_terms(tb), idf);
            py::dict d;
            d["tfidf_cos"] = f.tfidf_cos;
            d["tf_cos"] = f.tf_cos;
            d["bm25_cos"] = f.bm25_cos;
            d["jaccard1"] = f.jaccard1;
            d["ochiai"] = f.ochiai;
            return d;
        },
        py::arg("doc_a"), py::arg("doc_b"),
        "Five whole-document term similarity metrics with IDF fit on the pair.");
}
