#include <doctest.h>

#include <random>

#include "cigmatch/cig.hpp"
#include "cigmatch/model.hpp"

using namespace cigmatch;
using cigmatch::cig::build_pair_cig;

namespace {

textprep::Document doc_with_keywords(const std::string& text) {
    return model::prepare_document("d", text, model::ModelConfig{});
}

keygraph::Concept concept_of(std::initializer_list<const char*> kws) {
    keygraph::Concept c;
    for (const char* k : kws) c.keywords.insert(k);
    return c;
}

termsim::IdfTable idf_over(const std::vector<std::vector<std::string>>& sentences) {
    std::vector<termsim::TermCounts> corpus;
    for (const auto& s : sentences) corpus.push_back(termsim::count_terms(s));
    return termsim::IdfTable(corpus);
}

}  // namespace

TEST_CASE("attach_sentences picks the most similar concept") {
    std::vector<std::vector<std::string>> sentences{
        {"summer", "went", "home"},          // only keyword: summer
        {"nothing", "matches", "here"},      // no keyword at all
        {"rick", "summer", "rick"},          // closer to rick
    };
    std::vector<keygraph::Concept> concepts{concept_of({"summer"}), concept_of({"rick"})};
    auto idf = idf_over(sentences);
    auto att = cig::attach_sentences(sentences, concepts, idf);
    CHECK(att.assignment[0] == 0);
    CHECK(att.assignment[1] == -1);  // dummy
    CHECK(att.assignment[2] == 1);
}

TEST_CASE("attach_sentences tie goes to the lowest concept index") {
    std::vector<std::vector<std::string>> sentences{{"aa", "bb"}};
    std::vector<keygraph::Concept> concepts{concept_of({"aa"}), concept_of({"bb"})};
    // symmetric idf: both tokens appear once
    auto idf = idf_over({{"aa"}, {"bb"}});
    auto att = cig::attach_sentences(sentences, concepts, idf);
    CHECK(att.assignment[0] == 0);
}

TEST_CASE("edge_weights properties") {
    std::vector<std::vector<std::string>> sa{{"x", "y"}, {"p", "q"}};
    std::vector<std::vector<std::string>> sb{{"x", "y"}};
    std::vector<cig::CigVertex> vertices(2);
    vertices[0].sentences_a = {0};
    vertices[0].sentences_b = {0};
    vertices[1].sentences_a = {1};
    auto idf = idf_over({sa[0], sa[1], sb[0]});

    auto adj = cig::edge_weights(vertices, sa, sb, idf);
    // vertex 0 pseudo-doc {x,y,x,y}, vertex 1 {p,q}: disjoint -> 0
    CHECK(adj[0 * 2 + 1] == 0.0);
    CHECK(adj[0] == 0.0);  // zero diagonal
    CHECK(adj[3] == 0.0);

    // identical pseudo-documents -> weight 1
    std::vector<cig::CigVertex> twins(2);
    twins[0].sentences_a = {0};
    twins[1].sentences_a = {0};
    auto adj2 = cig::edge_weights(twins, sa, sb, idf);
    CHECK(adj2[1] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(adj2[1] == adj2[2]);  // symmetric
}

TEST_CASE("build_pair_cig groups shared concepts with attached sentences") {
    // Two entities that co-occur, a third pair, and an unrelated sentence.
    const std::string text =
        "alice met bob at the market. alice argued with bob loudly. "
        "carol phoned dave about tickets. weather stayed calm everywhere.";
    auto a = doc_with_keywords(text);
    auto b = doc_with_keywords(text);
    auto g = build_pair_cig(a, b, false);

    REQUIRE(g.size() > 0);
    // identical documents attach mirrored sentence sets on every vertex
    bool found_keyword_vertex = false;
    for (const auto& v : g.vertices) {
        CHECK(v.sentences_a == v.sentences_b);
        if (!v.is_dummy() && !v.sentences_a.empty()) found_keyword_vertex = true;
    }
    CHECK(found_keyword_vertex);

    // every sentence attached exactly once per document
    std::size_t total_a = 0, total_b = 0;
    for (const auto& v : g.vertices) {
        total_a += v.sentences_a.size();
        total_b += v.sentences_b.size();
    }
    CHECK(total_a == a.sentences.size());
    CHECK(total_b == b.sentences.size());
}

TEST_CASE("build_pair_cig with no shared keywords leaves one-sided vertices") {
    auto a = doc_with_keywords("alpha beta gamma. alpha beta again.");
    auto b = doc_with_keywords("delta epsilon zeta. delta epsilon more.");
    auto g = build_pair_cig(a, b, false);
    for (const auto& v : g.vertices) {
        if (v.is_dummy()) continue;
        CHECK((v.sentences_a.empty() || v.sentences_b.empty()));
    }
}

TEST_CASE("build_pair_cig rejects an empty pair") {
    textprep::Document e1, e2;
    CHECK_THROWS_WITH_AS((void)build_pair_cig(e1, e2, false), "empty pair", std::runtime_error);
}

TEST_CASE("build_pair_cig is pair-symmetric and adjacency well-formed") {
    std::mt19937_64 rng(55);
    data::SyntheticParams params;
    params.n_pairs = 12;
    params.n_topics = 3;
    params.vocab_size = 300;
    params.seed = 99;
    auto pairs = data::gen_synthetic(params);
    for (const auto& p : pairs) {
        auto a = doc_with_keywords(p.doc_a);
        auto b = doc_with_keywords(p.doc_b);
        auto g1 = build_pair_cig(a, b, false);
        auto g2 = build_pair_cig(b, a, false);
        REQUIRE(g1.size() == g2.size());
        for (std::size_t i = 0; i < g1.size(); ++i) {
            CHECK(g1.vertices[i].concept_.keywords == g2.vertices[i].concept_.keywords);
            CHECK(g1.vertices[i].sentences_a == g2.vertices[i].sentences_b);
            CHECK(g1.vertices[i].sentences_b == g2.vertices[i].sentences_a);
        }
        const std::size_t n = g1.size();
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(g1.adjacency[i * n + i] == 0.0);
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(g1.adjacency[i * n + j] == g1.adjacency[j * n + i]);
                CHECK(g1.adjacency[i * n + j] >= 0.0);
                CHECK(g1.adjacency[i * n + j] <= 1.0 + 1e-12);
            }
        }

        // partition property per document
        std::size_t total_a = 0, total_b = 0;
        for (const auto& v : g1.vertices) {
            total_a += v.sentences_a.size();
            total_b += v.sentences_b.size();
        }
        CHECK(total_a == a.sentences.size());
        CHECK(total_b == b.sentences.size());
    }
}

TEST_CASE("community CIG has fewer or equal vertices") {
    data::SyntheticParams params;
    params.n_pairs = 4;
    params.n_topics = 2;
    params.vocab_size = 200;
    params.seed = 13;
    auto pairs = data::gen_synthetic(params);
    auto a = doc_with_keywords(pairs[0].doc_a);
    auto b = doc_with_keywords(pairs[0].doc_b);
    auto plain = build_pair_cig(a, b, false);
    auto cd = build_pair_cig(a, b, true);
    CHECK(cd.size() <= plain.size());
}

TEST_CASE("CIG export formats") {
    auto a = doc_with_keywords("alice met bob. alice left early.");
    auto g = build_pair_cig(a, a, false);
    auto json = cig::to_json(g);
    CHECK(json.find("\"vertices\"") != std::string::npos);
    CHECK(json.find("\"edges\"") != std::string::npos);
    auto dot = cig::to_dot(g);
    CHECK(dot.rfind("graph cig {", 0) == 0);
    // every surviving concept keyword labels a DOT vertex
    for (const auto& v : g.vertices) {
        for (const auto& kw : v.concept_.keywords) {
            CHECK(dot.find(kw) != std::string::npos);
        }
    }
}
