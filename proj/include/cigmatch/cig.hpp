#pragma once

#include <string>
#include <vector>

#include "cigmatch/keygraph.hpp"
#include "cigmatch/termsim.hpp"
#include "cigmatch/textprep.hpp"

namespace cigmatch::cig {

// A concept vertex and the (disjoint) sentence indices attached to it from
// each document. The dummy vertex has an empty keyword set.
struct CigVertex {
    keygraph::Concept concept_;
    std::vector<int> sentences_a;
    std::vector<int> sentences_b;

    bool is_dummy() const { return concept_.keywords.empty(); }
};

// Merged pairwise Concept Interaction Graph. The adjacency matrix is
// symmetric with zero diagonal and weights in [0,1].
struct ConceptInteractionGraph {
    std::vector<CigVertex> vertices;
    std::vector<double> adjacency;  // N x N, row-major

    std::size_t size() const { return vertices.size(); }
    double weight(std::size_t i, std::size_t j) const { return adjacency[i * size() + j]; }
};

// Result of attach_sentences: assignment[i] is the concept index for sentence
// i, or -1 when the sentence matched no concept (dummy).
struct Attachment {
    std::vector<int> assignment;
};

// TF-IDF cosine attachment of each sentence to its best-matching concept.
// Ties go to the lowest concept index; similarity 0 everywhere means dummy.
Attachment attach_sentences(const std::vector<std::vector<std::string>>& sentences,
                            const std::vector<keygraph::Concept>& concepts,
                            const termsim::IdfTable& idf);

// TF-IDF cosine between per-vertex pseudo-documents (all attached sentences
// from both documents concatenated). Diagonal is zero.
std::vector<double> edge_weights(const std::vector<CigVertex>& vertices,
                                 const std::vector<std::vector<std::string>>& sentences_a,
                                 const std::vector<std::vector<std::string>>& sentences_b,
                                 const termsim::IdfTable& idf);

// Builds the merged CIG for a document pair. One KeyGraph is built over the
// union of both documents' keywords and all sentences; concepts are the
// keywords themselves (use_communities = false) or betweenness-detected
// communities. Vertices with no attached sentences at all are dropped.
// Throws std::runtime_error("empty pair") when both documents are empty.
ConceptInteractionGraph build_pair_cig(const textprep::Document& doc_a,
                                       const textprep::Document& doc_b,
                                       bool use_communities,
                                       int min_community = 2, int max_community = 6);

std::string to_json(const ConceptInteractionGraph& g);
std::string to_dot(const ConceptInteractionGraph& g);

}  // namespace cigmatch::cig
