#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "cigmatch/textprep.hpp"

namespace cigmatch::keygraph {

// Undirected edge, stored with first <= second.
using Edge = std::pair<std::string, std::string>;

inline Edge make_edge(const std::string& a, const std::string& b) {
    return a <= b ? Edge{a, b} : Edge{b, a};
}

// Keyword co-occurrence graph. No self-loops; every stored edge has count >= 1.
struct KeyGraph {
    std::set<std::string> vertices;
    std::map<Edge, int> edges;  // co-occurrence counts

    std::vector<std::string> neighbors(const std::string& v) const;
};

// A keyword community; concepts from detect_communities honor the size bounds.
struct Concept {
    std::set<std::string> keywords;
};

struct TextRankParams {
    int top_k = 10;
    int window = 3;
    double damping = 0.85;
    double epsilon = 1e-6;
    int max_iters = 100;
};

// PageRank-style keyword scoring over the in-sentence co-occurrence graph.
// Stopwords are dropped before graph construction. Returns up to top_k
// (token, score) pairs sorted by score descending, ties lexicographic.
std::vector<std::pair<std::string, double>> textrank_keywords(
    const textprep::Document& doc, const TextRankParams& params = {});

// Vertex per keyword that appears in at least one sentence; edge count is the
// number of sentences containing both endpoints.
KeyGraph build_keygraph(const std::set<std::string>& keywords,
                        const std::vector<std::vector<std::string>>& sentences);

// Shortest-path edge betweenness over unordered vertex pairs, with fractional
// credit split equally among multiple shortest paths.
std::map<Edge, double> edge_betweenness(const KeyGraph& g);

// Girvan-Newman style splitting: repeatedly remove the highest-betweenness
// edge (ties: lexicographically smallest) until every component fits within
// [min_size, max_size]. Undersized leftovers become singleton concepts.
std::vector<Concept> detect_communities(const KeyGraph& g, int min_size = 2, int max_size = 6);

}  // namespace cigmatch::keygraph
