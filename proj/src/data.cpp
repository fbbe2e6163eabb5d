#include "cigmatch/data.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace cigmatch::data {

std::vector<LabeledPair> load_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path);
    std::vector<LabeledPair> pairs;
    std::string line;
    long line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": invalid JSON: " + e.what());
        }
        if (!j.contains("label") || !j.contains("doc_a") || !j.contains("doc_b")) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": missing field (need label, doc_a, doc_b)");
        }
        LabeledPair p;
        p.label = j.at("label").get<int>();
        if (p.label != 0 && p.label != 1) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        p.doc_a = j.at("doc_a").get<std::string>();
        p.doc_b = j.at("doc_b").get<std::string>();
        if (p.doc_a.empty() || p.doc_b.empty()) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": empty document text");
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

void save_jsonl(const std::string& path, const std::vector<LabeledPair>& pairs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset: " + path);
    for (const auto& p : pairs) {
        nlohmann::json j{{"label", p.label}, {"doc_a", p.doc_a}, {"doc_b", p.doc_b}};
        out << j.dump() << "\n";
    }
}

namespace {

std::vector<std::string> parse_delimited_row(const std::string& line, char delimiter) {
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            in_quotes = true;
        } else if (c == delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace

std::vector<LabeledPair> import_delimited(const std::string& path, char delimiter) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::vector<LabeledPair> pairs;
    std::string line;
    long line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = parse_delimited_row(line, delimiter);
        if (first) {
            first = false;
            if (fields[0] != "0" && fields[0] != "1") continue;  // header row
        }
        if (fields.size() < 3) {
            throw std::runtime_error("line " + std::to_string(line_no) +
                                     ": expected 3 columns (label, doc_a, doc_b)");
        }
        if (fields[0] != "0" && fields[0] != "1") {
            throw std::runtime_error("line " + std::to_string(line_no) + ": label must be 0 or 1");
        }
        pairs.push_back({fields[0] == "1" ? 1 : 0, fields[1], fields[2]});
    }
    return pairs;
}

DatasetSplit split(const std::vector<LabeledPair>& pairs, std::uint64_t seed) {
    if (pairs.size() < 5) throw std::runtime_error("need at least 5 pairs to split");
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const double n = static_cast<double>(pairs.size());
    const std::size_t n_train = static_cast<std::size_t>(std::llround(0.6 * n));
    const std::size_t n_dev = static_cast<std::size_t>(std::llround(0.2 * n));

    DatasetSplit out;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const LabeledPair& p = pairs[order[i]];
        if (i < n_train) out.train.push_back(p);
        else if (i < n_train + n_dev) out.dev.push_back(p);
        else out.test.push_back(p);
    }
    return out;
}

namespace {

std::string topic_token(int topic, int k) {
    return "topic" + std::to_string(topic) + "word" + std::to_string(k);
}

std::string background_token(int k) { return "common" + std::to_string(k); }

std::string make_doc(int topic, int keywords_per_topic, const std::vector<int>& pair_background,
                     double background_overlap, double contamination, int contaminate_topic,
                     std::mt19937_64& rng) {
    std::uniform_int_distribution<int> n_sent_dist(8, 15);
    std::uniform_int_distribution<int> kw_dist(0, keywords_per_topic - 1);
    std::uniform_int_distribution<int> bg_dist(0, static_cast<int>(pair_background.size()) - 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    // Each document activates a subset of its topic pool so positives are
    // similar without being identical.
    std::vector<int> active;
    for (int k = 0; k < keywords_per_topic; ++k) {
        if (uni(rng) < 0.7) active.push_back(k);
    }
    if (active.empty()) active.push_back(kw_dist(rng));
    std::uniform_int_distribution<int> active_dist(0, static_cast<int>(active.size()) - 1);

    const int n_sentences = n_sent_dist(rng);
    std::ostringstream text;
    for (int s = 0; s < n_sentences; ++s) {
        const int len = 8;
        std::vector<std::string> words;
        if (uni(rng) < background_overlap) {
            // Boilerplate sentence built from the pair's shared background
            // subpool: it keeps whole-document similarity high even for
            // negative pairs. Only a few distinct tokens are used per
            // sentence so background words stay low-degree in the word
            // co-occurrence graph and never outrank topic keywords.
            std::vector<std::string> phrase;
            for (int w = 0; w < 3; ++w) {
                phrase.push_back(background_token(pair_background[bg_dist(rng)]));
            }
            for (int w = 0; w < len; ++w) {
                words.push_back(phrase[static_cast<std::size_t>(w) % phrase.size()]);
            }
        } else {
            // Topical sentence about one focus keyword: the focus dominates
            // the sentence, so TF-IDF attachment routes it to the same
            // concept vertex in both documents of a positive pair.
            const int focus = active[static_cast<std::size_t>(s) % active.size()];
            for (int w = 0; w < len; ++w) {
                const double roll = uni(rng);
                if (roll < 0.45) {
                    words.push_back(topic_token(topic, focus));
                } else if (roll < 0.55) {
                    words.push_back(background_token(pair_background[bg_dist(rng)]));
                } else if (contaminate_topic >= 0 && uni(rng) < contamination) {
                    // Stray keywords from the partner's topic: negatives share
                    // tokens globally while no sentence-level concept aligns.
                    words.push_back(topic_token(contaminate_topic, kw_dist(rng)));
                } else {
                    words.push_back(topic_token(topic, active[active_dist(rng)]));
                }
            }
        }
        for (std::size_t w = 0; w < words.size(); ++w) {
            if (w) text << " ";
            text << words[w];
        }
        text << ". ";
    }
    return text.str();
}

}  // namespace

std::vector<LabeledPair> gen_synthetic(const SyntheticParams& params) {
    if (params.n_topics < 2) throw std::runtime_error("gen_synthetic needs at least 2 topics");
    const int background_pool = params.vocab_size - params.n_topics * params.keywords_per_topic;
    if (background_pool < 50) {
        throw std::runtime_error("vocab_size too small for " + std::to_string(params.n_topics) +
                                 " topic pools (need >= " +
                                 std::to_string(params.n_topics * params.keywords_per_topic + 50) + ")");
    }

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<int> topic_dist(0, params.n_topics - 1);
    std::uniform_int_distribution<int> bg_token_dist(0, background_pool - 1);
    // Both documents of a pair draw their background from one shared subpool,
    // so negatives are lexically similar overall even though their topic
    // keywords differ (the "hard negative" construction). The subpool is big
    // enough that no single background token repeats often inside a document,
    // keeping the extracted keywords topical.
    const int pair_pool = std::min(120, background_pool);
    std::vector<LabeledPair> pairs;
    pairs.reserve(params.n_pairs);
    for (int i = 0; i < params.n_pairs; ++i) {
        const int label = i % 2 == 0 ? 1 : 0;
        LabeledPair p;
        p.label = label;
        std::vector<int> background(pair_pool);
        for (int& b : background) b = bg_token_dist(rng);
        const int topic_a = topic_dist(rng);
        if (label == 1) {
            p.doc_a = make_doc(topic_a, params.keywords_per_topic, background,
                               params.background_overlap, params.contamination, -1, rng);
            p.doc_b = make_doc(topic_a, params.keywords_per_topic, background,
                               params.background_overlap, params.contamination, -1, rng);
        } else {
            int topic_b = topic_dist(rng);
            while (topic_b == topic_a) topic_b = topic_dist(rng);
            p.doc_a = make_doc(topic_a, params.keywords_per_topic, background,
                               params.background_overlap, params.contamination, topic_b, rng);
            p.doc_b = make_doc(topic_b, params.keywords_per_topic, background,
                               params.background_overlap, params.contamination, topic_a, rng);
        }
        pairs.push_back(std::move(p));
    }
    return pairs;
}

}  // namespace cigmatch::data
