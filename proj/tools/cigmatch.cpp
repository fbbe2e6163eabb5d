// Command-line front end: dataset generation/import, graph export, training,
// evaluation, prediction, and baselines. Exit code 0 on success, 2 on any
// input error.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "cigmatch/baselines.hpp"
#include "cigmatch/cig.hpp"
#include "cigmatch/data.hpp"
#include "cigmatch/model.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cigmatch;

namespace {

// Resolves a dataset path, falling back to $CIGMATCH_DATA_DIR for relative
// paths that do not exist in the working directory.
std::string resolve_data_path(const std::string& path) {
    if (fs::exists(path)) return path;
    if (!fs::path(path).is_absolute()) {
        if (const char* root = std::getenv("CIGMATCH_DATA_DIR")) {
            fs::path candidate = fs::path(root) / path;
            if (fs::exists(candidate)) return candidate.string();
        }
    }
    return path;  // let the loader report the error
}

// --doc-a/--doc-b accept either a file path or literal text.
std::string text_or_file(const std::string& arg) {
    if (fs::exists(arg) && fs::is_regular_file(arg)) {
        std::ifstream in(arg);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }
    return arg;
}

// Per-pair preprocessing fan-out; the training step itself stays serialized.
std::vector<model::PairFeatures> extract_all(const std::vector<data::LabeledPair>& pairs,
                                             const model::MatcherModel& m, int workers) {
    std::vector<model::PairFeatures> out(pairs.size());
    if (workers <= 1 || pairs.size() < 2) {
        for (std::size_t i = 0; i < pairs.size(); ++i) out[i] = model::extract_features(pairs[i], m);
        return out;
    }
    std::vector<std::thread> threads;
    const std::size_t n = pairs.size();
    const int k = std::min<int>(workers, static_cast<int>(n));
    for (int t = 0; t < k; ++t) {
        threads.emplace_back([&, t]() {
            for (std::size_t i = static_cast<std::size_t>(t); i < n; i += static_cast<std::size_t>(k)) {
                out[i] = model::extract_features(pairs[i], m);
            }
        });
    }
    for (auto& th : threads) th.join();
    return out;
}

json metrics_json(const model::Metrics& m) {
    return json{{"accuracy", m.accuracy}, {"f1", m.f1}, {"loss", m.loss}};
}

int run(int argc, char** argv) {
    CLI::App app{"Document-pair event matching via concept interaction graphs"};
    app.require_subcommand(1);

    // gen-synthetic ----------------------------------------------------------
    auto* gen = app.add_subcommand("gen-synthetic", "Generate a labeled synthetic corpus");
    data::SyntheticParams sp;
    std::string gen_out;
    gen->add_option("--out", gen_out, "Output JSONL path")->required();
    gen->add_option("--n-pairs", sp.n_pairs, "Number of pairs");
    gen->add_option("--n-topics", sp.n_topics, "Number of topics");
    gen->add_option("--vocab-size", sp.vocab_size, "Synthetic vocabulary size");
    gen->add_option("--seed", sp.seed, "Generator seed");
    gen->add_option("--keywords-per-topic", sp.keywords_per_topic, "Topic keyword pool size");
    gen->add_option("--background-overlap", sp.background_overlap,
                    "Fraction of boilerplate sentences drawn from the shared background subpool");
    gen->add_option("--contamination", sp.contamination,
                    "Cross-topic keyword rate inside negative pairs");

    // import -----------------------------------------------------------------
    auto* imp = app.add_subcommand("import", "Convert a CSV/TSV file to the JSONL pair format");
    std::string imp_in, imp_out, imp_format = "auto";
    imp->add_option("--in", imp_in, "Input CSV/TSV path")->required();
    imp->add_option("--out", imp_out, "Output JSONL path")->required();
    imp->add_option("--format", imp_format, "csv, tsv, or auto (by extension)")
        ->check(CLI::IsMember({"csv", "tsv", "auto"}));

    // build-graph --------------------------------------------------------------
    auto* bg = app.add_subcommand("build-graph", "Emit the concept interaction graph of one pair");
    std::string bg_pair, bg_doc_a, bg_doc_b, bg_format = "json";
    int bg_index = 0;
    bool bg_communities = false;
    bg->add_option("--pair", bg_pair, "JSONL file holding the pair");
    bg->add_option("--index", bg_index, "Pair index within --pair (default 0)");
    bg->add_option("--doc-a", bg_doc_a, "First document (file path or literal text)");
    bg->add_option("--doc-b", bg_doc_b, "Second document (file path or literal text)");
    bg->add_option("--out", bg_format, "Output format")->check(CLI::IsMember({"json", "dot"}));
    bg->add_flag("--communities", bg_communities, "Group keywords into communities");

    // train -----------------------------------------------------------------
    auto* tr = app.add_subcommand("train", "Train a matching model");
    std::string tr_data, tr_variant = "cig-sim-gcn", tr_ckpt, tr_embeddings;
    std::uint64_t tr_seed = 42;
    int tr_epochs = -1, tr_batch = -1;
    tr->set_config("--config", "", "Flat key=value config file; flags take precedence");
    tr->add_option("--data", tr_data, "Training pairs (JSONL)")->required();
    tr->add_option("--variant", tr_variant, "Model variant")
        ->check(CLI::IsMember(model::variant_names()));
    tr->add_option("--seed", tr_seed, "Training/split seed");
    tr->add_option("--out", tr_ckpt, "Checkpoint output path")->required();
    tr->add_option("--epochs", tr_epochs, "Override epoch count");
    tr->add_option("--batch", tr_batch, "Override batch size");
    tr->add_option("--embeddings", tr_embeddings, "Pre-trained word embedding file");

    // eval ------------------------------------------------------------------
    auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on one split");
    std::string ev_ckpt, ev_data, ev_split = "test";
    int ev_workers = 1;
    ev->add_option("--ckpt", ev_ckpt, "Checkpoint path")->required();
    ev->add_option("--data", ev_data, "Pairs (JSONL); split with the checkpoint's seed")->required();
    ev->add_option("--split", ev_split, "train, dev, or test")
        ->check(CLI::IsMember({"train", "dev", "test"}));
    ev->add_option("--workers", ev_workers, "Parallel per-pair preprocessing threads");

    // predict ----------------------------------------------------------------
    auto* pr = app.add_subcommand("predict", "Probability that two documents match");
    std::string pr_ckpt, pr_a, pr_b;
    pr->add_option("--ckpt", pr_ckpt, "Checkpoint path")->required();
    pr->add_option("--doc-a", pr_a, "First document (file path or literal text)")->required();
    pr->add_option("--doc-b", pr_b, "Second document (file path or literal text)")->required();

    // baseline -----------------------------------------------------------------
    auto* bl = app.add_subcommand("baseline", "Run a non-graph baseline");
    std::string bl_method, bl_data;
    std::uint64_t bl_seed = 42;
    int bl_epochs = 10, bl_batch = 32;
    bl->add_option("--method", bl_method, "bm25 or simnet")
        ->required()
        ->check(CLI::IsMember({"bm25", "simnet"}));
    bl->add_option("--data", bl_data, "Pairs (JSONL)")->required();
    bl->add_option("--seed", bl_seed, "Split/training seed");
    bl->add_option("--epochs", bl_epochs, "simnet training epochs");
    bl->add_option("--batch", bl_batch, "simnet batch size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // CLI11's own exit codes collapse to the documented contract:
        // 0 for --help/--version, 2 for any usage error.
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
        data::save_jsonl(gen_out, data::gen_synthetic(sp));
        std::cout << json{{"written", gen_out}, {"n_pairs", sp.n_pairs}} << "\n";
        return 0;
    }

    if (imp->parsed()) {
        const std::string in = resolve_data_path(imp_in);
        char delim = ',';
        if (imp_format == "tsv" || (imp_format == "auto" && fs::path(in).extension() == ".tsv")) {
            delim = '\t';
        }
        auto pairs = data::import_delimited(in, delim);
        data::save_jsonl(imp_out, pairs);
        std::cout << json{{"written", imp_out}, {"n_pairs", pairs.size()}} << "\n";
        return 0;
    }

    if (bg->parsed()) {
        std::string text_a, text_b;
        if (!bg_pair.empty()) {
            auto pairs = data::load_jsonl(resolve_data_path(bg_pair));
            if (bg_index < 0 || static_cast<std::size_t>(bg_index) >= pairs.size()) {
                throw std::runtime_error("--index out of range (" + std::to_string(pairs.size()) +
                                         " pairs)");
            }
            text_a = pairs[static_cast<std::size_t>(bg_index)].doc_a;
            text_b = pairs[static_cast<std::size_t>(bg_index)].doc_b;
        } else if (!bg_doc_a.empty() && !bg_doc_b.empty()) {
            text_a = text_or_file(bg_doc_a);
            text_b = text_or_file(bg_doc_b);
        } else {
            throw std::runtime_error("build-graph needs --pair or both --doc-a and --doc-b");
        }
        model::ModelConfig cfg;
        auto a = model::prepare_document("a", text_a, cfg);
        auto b = model::prepare_document("b", text_b, cfg);
        auto g = cig::build_pair_cig(a, b, bg_communities, cfg.min_community, cfg.max_community);
        std::cout << (bg_format == "dot" ? cig::to_dot(g) : cig::to_json(g)) << "\n";
        return 0;
    }

    if (tr->parsed()) {
        auto pairs = data::load_jsonl(resolve_data_path(tr_data));
        auto cfg = model::config_for_variant(tr_variant);
        cfg.seed = tr_seed;
        if (tr_epochs > 0) cfg.epochs = tr_epochs;
        if (tr_batch > 0) cfg.batch = tr_batch;
        std::optional<std::string> emb;
        if (!tr_embeddings.empty()) emb = resolve_data_path(tr_embeddings);
        auto result = model::train(pairs, cfg, emb);
        for (const auto& e : result.history) {
            std::cout << json{{"epoch", e.epoch},
                              {"split", e.split},
                              {"loss", e.loss},
                              {"accuracy", e.accuracy},
                              {"f1", e.f1}}
                      << "\n";
        }
        model::save_checkpoint(tr_ckpt, result.model);
        std::cout << json{{"checkpoint", tr_ckpt},
                          {"variant", tr_variant},
                          {"best_epoch", result.best_epoch},
                          {"parameters", result.model.param_count()}}
                  << "\n";
        return 0;
    }

    if (ev->parsed()) {
        auto m = model::load_checkpoint(ev_ckpt);
        auto pairs = data::load_jsonl(resolve_data_path(ev_data));
        auto ds = data::split(pairs, m.cfg.seed);
        const auto& subset = ev_split == "train" ? ds.train : ev_split == "dev" ? ds.dev : ds.test;
        auto feats = extract_all(subset, m, ev_workers);
        auto metrics = metrics_json(model::evaluate(feats, m));
        metrics["split"] = ev_split;
        metrics["n_pairs"] = subset.size();
        std::cout << metrics << "\n";
        return 0;
    }

    if (pr->parsed()) {
        auto m = model::load_checkpoint(pr_ckpt);
        data::LabeledPair p{0, text_or_file(pr_a), text_or_file(pr_b)};
        auto f = model::extract_features(p, m);
        std::printf("%.17g\n", model::predict_probability(f, m));
        return 0;
    }

    if (bl->parsed()) {
        auto pairs = data::load_jsonl(resolve_data_path(bl_data));
        auto ds = data::split(pairs, bl_seed);
        baselines::BaselineResult r;
        if (bl_method == "bm25") {
            r = baselines::bm25_classify(ds);
        } else {
            r = baselines::simnet_classify(ds, bl_epochs, bl_batch, bl_seed);
        }
        json out{{"method", bl_method}, {"accuracy", r.accuracy}, {"f1", r.f1}};
        if (bl_method == "bm25") out["threshold"] = r.threshold;
        std::cout << out << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
