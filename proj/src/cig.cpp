#include "cigmatch/cig.hpp"

#include <nlohmann/json.hpp>

#include <sstream>
#include <stdexcept>

namespace cigmatch::cig {

namespace {

termsim::IdfTable pair_idf(const std::vector<std::vector<std::string>>& sentences_a,
                           const std::vector<std::vector<std::string>>& sentences_b) {
    std::vector<termsim::TermCounts> corpus;
    corpus.reserve(sentences_a.size() + sentences_b.size());
    for (const auto& s : sentences_a) corpus.push_back(termsim::count_terms(s));
    for (const auto& s : sentences_b) corpus.push_back(termsim::count_terms(s));
    return termsim::IdfTable(corpus);
}

}  // namespace

Attachment attach_sentences(const std::vector<std::vector<std::string>>& sentences,
                            const std::vector<keygraph::Concept>& concepts,
                            const termsim::IdfTable& idf) {
    std::vector<termsim::TermVector> concept_vecs;
    concept_vecs.reserve(concepts.size());
    for (const auto& c : concepts) {
        termsim::TermCounts counts;
        for (const auto& k : c.keywords) counts[k] = 1;
        concept_vecs.push_back(termsim::tfidf_vector(counts, idf));
    }

    Attachment out;
    out.assignment.reserve(sentences.size());
    for (const auto& sentence : sentences) {
        auto vec = termsim::tfidf_vector(termsim::count_terms(sentence), idf);
        int best = -1;
        double best_sim = 0.0;
        for (std::size_t ci = 0; ci < concepts.size(); ++ci) {
            double sim = termsim::cosine(vec, concept_vecs[ci]);
            if (sim > best_sim) {
                best_sim = sim;
                best = static_cast<int>(ci);
            }
        }
        out.assignment.push_back(best);
    }
    return out;
}

std::vector<double> edge_weights(const std::vector<CigVertex>& vertices,
                                 const std::vector<std::vector<std::string>>& sentences_a,
                                 const std::vector<std::vector<std::string>>& sentences_b,
                                 const termsim::IdfTable& idf) {
    const std::size_t n = vertices.size();
    std::vector<termsim::TermVector> pseudo(n);
    for (std::size_t i = 0; i < n; ++i) {
        termsim::TermCounts counts;
        for (int si : vertices[i].sentences_a) {
            for (const auto& tok : sentences_a[si]) ++counts[tok];
        }
        for (int si : vertices[i].sentences_b) {
            for (const auto& tok : sentences_b[si]) ++counts[tok];
        }
        pseudo[i] = termsim::tfidf_vector(counts, idf);
    }
    std::vector<double> adj(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double w = termsim::cosine(pseudo[i], pseudo[j]);
            adj[i * n + j] = w;
            adj[j * n + i] = w;
        }
    }
    return adj;
}

ConceptInteractionGraph build_pair_cig(const textprep::Document& doc_a,
                                       const textprep::Document& doc_b,
                                       bool use_communities,
                                       int min_community, int max_community) {
    if (doc_a.sentences.empty() && doc_b.sentences.empty()) {
        throw std::runtime_error("empty pair");
    }

    std::set<std::string> keywords;
    for (const auto& [tok, score] : doc_a.keywords) keywords.insert(tok);
    for (const auto& [tok, score] : doc_b.keywords) keywords.insert(tok);

    std::vector<std::vector<std::string>> all_sentences = doc_a.sentences;
    all_sentences.insert(all_sentences.end(), doc_b.sentences.begin(), doc_b.sentences.end());

    keygraph::KeyGraph kg = keygraph::build_keygraph(keywords, all_sentences);

    std::vector<keygraph::Concept> concepts;
    if (use_communities) {
        concepts = keygraph::detect_communities(kg, min_community, max_community);
    } else {
        for (const auto& v : kg.vertices) {
            keygraph::Concept c;
            c.keywords.insert(v);
            concepts.push_back(std::move(c));
        }
    }

    termsim::IdfTable idf = pair_idf(doc_a.sentences, doc_b.sentences);
    Attachment att_a = attach_sentences(doc_a.sentences, concepts, idf);
    Attachment att_b = attach_sentences(doc_b.sentences, concepts, idf);

    std::vector<CigVertex> vertices(concepts.size() + 1);
    for (std::size_t ci = 0; ci < concepts.size(); ++ci) vertices[ci].concept_ = concepts[ci];
    const int dummy = static_cast<int>(concepts.size());
    for (std::size_t si = 0; si < att_a.assignment.size(); ++si) {
        int c = att_a.assignment[si] < 0 ? dummy : att_a.assignment[si];
        vertices[c].sentences_a.push_back(static_cast<int>(si));
    }
    for (std::size_t si = 0; si < att_b.assignment.size(); ++si) {
        int c = att_b.assignment[si] < 0 ? dummy : att_b.assignment[si];
        vertices[c].sentences_b.push_back(static_cast<int>(si));
    }

    std::vector<CigVertex> kept;
    for (auto& v : vertices) {
        if (!v.sentences_a.empty() || !v.sentences_b.empty()) kept.push_back(std::move(v));
    }

    ConceptInteractionGraph g;
    g.vertices = std::move(kept);
    g.adjacency = edge_weights(g.vertices, doc_a.sentences, doc_b.sentences, idf);
    return g;
}

std::string to_json(const ConceptInteractionGraph& g) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    for (const auto& v : g.vertices) {
        nlohmann::json jv;
        jv["keywords"] = std::vector<std::string>(v.concept_.keywords.begin(), v.concept_.keywords.end());
        jv["sentences_a"] = v.sentences_a;
        jv["sentences_b"] = v.sentences_b;
        jv["dummy"] = v.is_dummy();
        j["vertices"].push_back(std::move(jv));
    }
    j["edges"] = nlohmann::json::array();
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            double w = g.weight(i, k);
            if (w > 0.0) {
                j["edges"].push_back({{"source", i}, {"target", k}, {"weight", w}});
            }
        }
    }
    return j.dump(2);
}

std::string to_dot(const ConceptInteractionGraph& g) {
    std::ostringstream out;
    out << "graph cig {\n";
    out << "  node [shape=box];\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto& v = g.vertices[i];
        out << "  v" << i << " [label=\"";
        if (v.is_dummy()) {
            out << "(dummy)";
        } else {
            bool first = true;
            for (const auto& k : v.concept_.keywords) {
                if (!first) out << " ";
                out << k;
                first = false;
            }
        }
        out << "\\nA:" << v.sentences_a.size() << " B:" << v.sentences_b.size() << "\"];\n";
    }
    const std::size_t n = g.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            double w = g.weight(i, k);
            if (w > 0.0) {
                out << "  v" << i << " -- v" << k << " [label=\"" << w << "\"];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace cigmatch::cig
