#include <doctest.h>

#include <random>

#include "cigmatch/keygraph.hpp"
#include "oracles.hpp"

using namespace cigmatch;
using namespace cigmatch::keygraph;

namespace {

textprep::Document doc_from(const std::vector<std::vector<std::string>>& sentences) {
    textprep::Document d;
    d.id = "t";
    d.sentences = sentences;
    return d;
}

}  // namespace

TEST_CASE("textrank: symmetric two-word graph gives equal scores") {
    auto ranked = textrank_keywords(doc_from({{"alpha", "beta", "alpha"}}), {.window = 2});
    REQUIRE(ranked.size() == 2);
    CHECK(ranked[0].second == doctest::Approx(ranked[1].second).epsilon(1e-9));
    CHECK(ranked[0].first == "alpha");  // lexicographic tie-break
}

TEST_CASE("textrank: isolated token scores 1-d") {
    auto ranked = textrank_keywords(doc_from({{"alpha"}}));
    REQUIRE(ranked.size() == 1);
    CHECK(ranked[0].first == "alpha");
    CHECK(ranked[0].second == doctest::Approx(0.15).epsilon(1e-12));
}

TEST_CASE("textrank: star hub dominates (power-iteration oracle)") {
    auto doc = doc_from({{"hub", "xx"}, {"hub", "yy"}, {"hub", "zz"}});
    auto ranked = textrank_keywords(doc, {.window = 2});
    REQUIRE(ranked.size() == 4);
    CHECK(ranked[0].first == "hub");
    CHECK(ranked[0].second > ranked[1].second);

    // Independent power iteration on the star graph, run to convergence.
    double hub = 1.0, leaf = 1.0;
    const double d = 0.85;
    for (int i = 0; i < 200; ++i) {
        const double new_hub = (1 - d) + d * 3.0 * (leaf / 1.0);
        const double new_leaf = (1 - d) + d * (hub / 3.0);
        hub = new_hub;
        leaf = new_leaf;
    }
    CHECK(ranked[0].second == doctest::Approx(hub).epsilon(1e-4));
    CHECK(ranked[1].second == doctest::Approx(leaf).epsilon(1e-4));
}

TEST_CASE("textrank: scores positive and bounded, stopwords excluded") {
    auto doc = doc_from({{"the", "alpha", "beta"}, {"beta", "gamma", "of", "alpha"}});
    auto ranked = textrank_keywords(doc);
    const double n = 3.0;
    double total = 0.0;
    for (const auto& [tok, score] : ranked) {
        CHECK(tok != "the");
        CHECK(tok != "of");
        CHECK(score > 0.0);
        total += score;
    }
    CHECK(total >= n * 0.15 - 1e-9);
    CHECK(total <= n + 1e-9);
}

TEST_CASE("textrank: empty document gives empty list") {
    CHECK(textrank_keywords(doc_from({})).empty());
}

TEST_CASE("build_keygraph counts sentence co-occurrences") {
    std::set<std::string> kws{"a", "b"};
    SUBCASE("one co-occurrence") {
        auto g = build_keygraph(kws, {{"a", "b"}, {"a"}});
        CHECK(g.edges.at(make_edge("a", "b")) == 1);
    }
    SUBCASE("never co-occur: no edges") {
        auto g = build_keygraph(kws, {{"a"}, {"b"}});
        CHECK(g.edges.empty());
        CHECK(g.vertices.size() == 2);
    }
    SUBCASE("single sentence clique") {
        auto g = build_keygraph({"a", "b", "c"}, {{"a", "b", "c"}});
        CHECK(g.edges.size() == 3);
        for (const auto& [e, c] : g.edges) CHECK(c == 1);
    }
}

TEST_CASE("build_keygraph invariant under sentence permutation") {
    std::set<std::string> kws{"a", "b", "c"};
    std::vector<std::vector<std::string>> sents{{"a", "b"}, {"b", "c"}, {"a", "c", "b"}};
    auto g1 = build_keygraph(kws, sents);
    std::reverse(sents.begin(), sents.end());
    auto g2 = build_keygraph(kws, sents);
    CHECK(g1.vertices == g2.vertices);
    CHECK(g1.edges == g2.edges);
}

namespace {

KeyGraph from_edges(const std::vector<std::pair<std::string, std::string>>& edges) {
    KeyGraph g;
    for (const auto& [a, b] : edges) {
        g.vertices.insert(a);
        g.vertices.insert(b);
        g.edges[make_edge(a, b)] = 1;
    }
    return g;
}

}  // namespace

TEST_CASE("edge_betweenness: hand-enumerated small graphs") {
    SUBCASE("path a-b-c") {
        auto bt = edge_betweenness(from_edges({{"a", "b"}, {"b", "c"}}));
        CHECK(bt.at(make_edge("a", "b")) == doctest::Approx(2.0));
        CHECK(bt.at(make_edge("b", "c")) == doctest::Approx(2.0));
    }
    SUBCASE("4-star") {
        auto bt = edge_betweenness(from_edges({{"c", "l1"}, {"c", "l2"}, {"c", "l3"}}));
        for (const auto& [e, s] : bt) CHECK(s == doctest::Approx(3.0));
    }
    SUBCASE("triangle") {
        auto bt = edge_betweenness(from_edges({{"a", "b"}, {"b", "c"}, {"a", "c"}}));
        for (const auto& [e, s] : bt) CHECK(s == doctest::Approx(1.0));
    }
}

TEST_CASE("edge_betweenness matches brute-force enumeration on random graphs") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 7);  // up to 8 vertices
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        KeyGraph g;
        oracles::SimpleGraph og;
        for (int i = 0; i < n; ++i) g.vertices.insert("v" + std::to_string(i));
        for (int i = 0; i < n; ++i) og.vertices.insert("v" + std::to_string(i));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (uni(rng) < 0.45) {
                    g.edges[make_edge("v" + std::to_string(i), "v" + std::to_string(j))] = 1;
                    og.add_edge("v" + std::to_string(i), "v" + std::to_string(j));
                }
            }
        }
        auto got = edge_betweenness(g);
        auto want = oracles::brute_edge_betweenness(og);
        REQUIRE(got.size() == want.size());
        for (const auto& [e, s] : want) {
            CHECK(got.at(e) == doctest::Approx(s).epsilon(1e-9));
        }
    }
}

TEST_CASE("detect_communities") {
    SUBCASE("two 3-cliques joined by a bridge split at the bridge") {
        auto g = from_edges({{"a1", "a2"}, {"a2", "a3"}, {"a1", "a3"},
                             {"b1", "b2"}, {"b2", "b3"}, {"b1", "b3"},
                             {"a1", "b1"}});
        auto cs = detect_communities(g, 2, 3);
        REQUIRE(cs.size() == 2);
        CHECK(cs[0].keywords == std::set<std::string>{"a1", "a2", "a3"});
        CHECK(cs[1].keywords == std::set<std::string>{"b1", "b2", "b3"});
    }
    SUBCASE("already within bounds: kept whole") {
        auto cs = detect_communities(from_edges({{"x", "y"}}), 2, 6);
        REQUIRE(cs.size() == 1);
        CHECK(cs[0].keywords.size() == 2);
    }
    SUBCASE("isolated keyword becomes a singleton") {
        KeyGraph g;
        g.vertices.insert("lonely");
        auto cs = detect_communities(g, 2, 6);
        REQUIRE(cs.size() == 1);
        CHECK(cs[0].keywords == std::set<std::string>{"lonely"});
    }
}

TEST_CASE("detect_communities partitions the vertex set") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 12);
        KeyGraph g;
        for (int i = 0; i < n; ++i) g.vertices.insert("v" + std::to_string(i));
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                if (uni(rng) < 0.3) g.edges[make_edge("v" + std::to_string(i), "v" + std::to_string(j))] = 1;
            }
        }
        auto cs = detect_communities(g, 2, 6);
        std::set<std::string> covered;
        std::size_t total = 0;
        for (const auto& c : cs) {
            CHECK(c.keywords.size() <= 6);
            total += c.keywords.size();
            covered.insert(c.keywords.begin(), c.keywords.end());
        }
        CHECK(covered == g.vertices);        // covers every vertex
        CHECK(total == g.vertices.size());   // exactly once
    }
}
